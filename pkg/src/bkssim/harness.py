"""Experiment orchestration, the invariant report, and result serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import linalg as la
from . import nchv, qm
from .nchv import NCHV_ALLOWED, Pattern, classify
from .observables import (
    DEFAULT_COEFFICIENTS,
    LABELS,
    PROPOSITION_CONSTRAINTS,
    RECOVERY_TOL,
    build_maximal_observable,
    build_proposition_basis,
    check_distinct,
    eigen_residual,
    product_matrix,
    recover_projectors,
)

SCHEMA_VERSION = 1
MODES = ("joint", "sequential", "maximal")
FORMATS = ("json", "csv")
RECORD_COLUMNS = ("shot_index", "outcome", "P1", "P2", "P3", "P4", "pattern")
MAX_SEED = (1 << 64) - 1


def sig12(x: float) -> float:
    """Round to 12 significant digits (the serialised precision)."""
    return float(f"{x:.12g}")


# -- verification report ------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerifyReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def render(self) -> str:
        lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + (f"  [{c.detail}]" if c.detail else "")
                 for c in self.checks]
        n_fail = len(self.failures())
        lines.append(f"{len(self.checks) - n_fail}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def _bound(name: str, value: float, tol: float) -> Check:
    return Check(name, bool(value < tol), f"max deviation {value:.2e} < {tol:g}")


def _linalg_checks(seed: int = 7) -> list[Check]:
    gen = np.random.default_rng(seed)

    def rand2():
        return la.matrix(gen.standard_normal((2, 2)) + 1j * gen.standard_normal((2, 2)))

    a, b, c, d = rand2(), rand2(), rand2(), rand2()
    m1, m2 = la.tensor(a, b), la.tensor(c, d)
    v = la.vector(gen.standard_normal(4) + 1j * gen.standard_normal(4))
    w = la.vector(gen.standard_normal(4) + 1j * gen.standard_normal(4))
    alpha = complex(gen.standard_normal(), gen.standard_normal())
    return [
        _bound("tensor product bilinearity",
               la.max_abs_diff(la.tensor(alpha * a + c, b), alpha * la.tensor(a, b) + la.tensor(c, b)), 1e-12),
        _bound("mixed-product rule (A(x)B)(C(x)D) = AC(x)BD",
               la.max_abs_diff(la.matmul(m1, m2), la.tensor(la.matmul(a, c), la.matmul(b, d))), 1e-12),
        _bound("adjoint reverses products",
               la.max_abs_diff(la.adjoint(la.matmul(m1, m2)), la.matmul(la.adjoint(m2), la.adjoint(m1))), 1e-12),
        _bound("<v|Mw> = <M^dag v|w>",
               abs(la.inner(v, la.matvec(m1, w)) - la.inner(la.matvec(la.adjoint(m1), v), w)), 1e-12),
    ]


def run_verify(singles: Mapping[str, np.ndarray] | None = None,
               coefficients: Sequence[float] = DEFAULT_COEFFICIENTS) -> VerifyReport:
    """Every sampling-free invariant of the library.

    ``singles`` replaces one-particle operators in the observables the states
    are checked against; a wrong operator shows up as failed eigen-equations.
    """
    tol = la.DEFAULT_TOL
    report = VerifyReport()
    add = report.checks.append
    report.checks.extend(_linalg_checks())

    basis = build_proposition_basis()
    obs = {label: product_matrix(label, singles) for label in LABELS}
    for label, m in obs.items():
        dev = max(la.max_abs_diff(m, la.adjoint(m)), la.max_abs_diff(la.matmul(m, m), la.I4))
        add(_bound(f"{label} is a Hermitian involution", dev, tol))

    for i, (first, second, sign) in enumerate(PROPOSITION_CONSTRAINTS, start=1):
        psi = basis.states[i - 1]
        res = max(eigen_residual(obs[first], psi, sign), eigen_residual(obs[second], psi, sign))
        s = "+1" if sign > 0 else "-1"
        add(_bound(f"psi{i} eigen-equations: {first}={s}, {second}={s}", res, tol))

    add(_bound("proposition states have unit norm",
               max(abs(la.norm(s) - 1.0) for s in basis.states), tol))
    add(Check("P1..P4 are projectors", all(la.is_projector(p, tol) for p in basis.projectors)))

    qr = qm.verify_qm_theorems(basis, tol)
    add(_bound("mutual orthogonality P_i P_j = 0 (i != j)", qr.max_overlap, tol))
    add(_bound("resolution of identity P1+P2+P3+P4 = 1", qr.identity_deviation, tol))
    comm = max(la.max_abs_diff(la.matmul(p, q), la.matmul(q, p))
               for p in basis.projectors for q in basis.projectors)
    add(_bound("projectors commute pairwise", comm, tol))
    add(_bound("AB.ab = -(Ab.aB)",
               la.max_abs_diff(la.matmul(obs["AB"], obs["ab"]), -la.matmul(obs["Ab"], obs["aB"])), tol))

    h = build_maximal_observable(coefficients, basis)
    cs = h.coefficients
    add(Check("maximal observable H = sum c_i P_i is Hermitian", la.is_hermitian(h.matrix, tol)))
    add(_bound("H psi_i = c_i psi_i",
               max(eigen_residual(h.matrix, s, c) for s, c in zip(basis.states, cs)), 1e-10))
    recovered = recover_projectors(h)
    add(_bound("projector recovery from H (Lagrange product)",
               max(la.max_abs_diff(r, p) for r, p in zip(recovered, basis.projectors)), RECOVERY_TOL))

    nr = nchv.verify_nchv_theorems()
    add(Check("NCHV: propositions not mutually exclusive", nr.not_exclusive,
              f"witness {nr.exclusive_witness.as_tuple() if nr.exclusive_witness else None}"))
    add(Check("NCHV: propositions not exhaustive", nr.not_exhaustive,
              f"witness {nr.exhaustive_witness.as_tuple() if nr.exhaustive_witness else None}"))
    add(Check("NCHV: every hidden state gives 0 or 2 true", nr.zero_or_two))
    rows = nchv.enumerate_all()
    add(Check("NCHV: all-false exactly when vA*vB*va*vb = -1", all(
        (o.pattern is Pattern.ALL_FALSE) == (math.prod(hs.as_tuple()) == -1) for hs, o in rows)))
    add(Check("NCHV: global sign flip leaves outcomes unchanged",
              all(nchv.evaluate(hs.flipped()) == o for hs, o in rows)))

    add(Check("QM: propositions mutually exclusive", qr.exclusive))
    add(Check("QM: propositions exhaustive", qr.exhaustive))
    add(Check("QM: exactly one proposition true per shot", qr.exactly_one))
    add(Check("QM-mandated pattern lies outside the NCHV-allowed set",
              Pattern.EXACTLY_ONE_TRUE not in NCHV_ALLOWED))
    return report


# -- experiments --------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    state_spec: str
    shots: int
    master_seed: int
    mode: str = "joint"
    coefficients: tuple[float, ...] = DEFAULT_COEFFICIENTS
    noise_p: float = 0.0
    order: tuple[int, ...] = (1, 2, 3, 4)
    output_format: str = "json"
    output_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if not 0 <= self.master_seed <= MAX_SEED:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not 0.0 <= self.noise_p <= 1.0:
            raise ValueError("noise probability must lie in [0, 1]")
        if self.output_format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if sorted(self.order) != [1, 2, 3, 4]:
            raise ValueError("order must be a permutation of 1..4")
        if self.mode == "maximal":
            check_distinct(self.coefficients)

    def echo(self) -> dict:
        return {
            "state": self.state_spec,
            "shots": self.shots,
            "seed": self.master_seed,
            "mode": self.mode,
            "coefficients": [sig12(c) for c in self.coefficients] if self.mode == "maximal" else None,
            "order": list(self.order) if self.mode == "sequential" else None,
            "noise": sig12(self.noise_p),
        }


@dataclass(frozen=True)
class ExperimentRecord:
    shot_index: int
    outcome_index: int | None
    truth: tuple[bool, bool, bool, bool]
    pattern: Pattern
    stream: str


@dataclass(frozen=True)
class VerdictReport:
    shots: int
    born_probabilities: tuple[float, ...]
    expected_probabilities: tuple[float, ...]
    counts_per_outcome: tuple[int, ...]
    counts_per_pattern: dict[str, int]
    frequencies: tuple[float, ...]
    standard_errors: tuple[float, ...]
    nchv_consistent_shots: int
    qm_consistent_shots: int
    verdict: str


def decide_verdict(shots: int, nchv_consistent: int, qm_consistent: int) -> str:
    if qm_consistent == shots and nchv_consistent == 0:
        return "QM"
    if nchv_consistent > 0 and qm_consistent == 0:
        return "NCHV"
    return "inconclusive"


def _records_for(truth: np.ndarray, shot_indices: np.ndarray, seed: int) -> list[ExperimentRecord]:
    out = []
    for idx, row in zip(shot_indices.tolist(), truth.tolist()):
        t = tuple(row)
        out.append(ExperimentRecord(
            shot_index=idx,
            outcome_index=t.index(True) + 1 if sum(t) == 1 else None,
            truth=t,
            pattern=classify(t),
            stream=f"{seed}:{idx}",
        ))
    return out


def summarize(records: Sequence[ExperimentRecord], born_probs: Sequence[float], noise_p: float) -> VerdictReport:
    n = len(records)
    outcome_counts = [0, 0, 0, 0]
    pattern_counts = {p.value: 0 for p in Pattern}
    for r in records:
        if r.outcome_index is not None:
            outcome_counts[r.outcome_index - 1] += 1
        pattern_counts[r.pattern.value] += 1
    expected = [(1 - noise_p) * p + noise_p / 4 for p in born_probs]
    nchv_ok = sum(pattern_counts[p.value] for p in NCHV_ALLOWED)
    qm_ok = pattern_counts[Pattern.EXACTLY_ONE_TRUE.value]
    return VerdictReport(
        shots=n,
        born_probabilities=tuple(born_probs),
        expected_probabilities=tuple(expected),
        counts_per_outcome=tuple(outcome_counts),
        counts_per_pattern=pattern_counts,
        frequencies=tuple(c / n for c in outcome_counts),
        standard_errors=tuple(math.sqrt(p * (1 - p) / n) for p in expected),
        nchv_consistent_shots=nchv_ok,
        qm_consistent_shots=qm_ok,
        verdict=decide_verdict(n, nchv_ok, qm_ok),
    )


def _chunks(n: int, k: int) -> list[np.ndarray]:
    return [c for c in np.array_split(np.arange(n, dtype=np.uint64), k) if c.size]


def run_experiment(config: ExperimentConfig) -> tuple[VerdictReport, list[ExperimentRecord]]:
    """Run all shots; records come back sorted by shot index whatever ``workers`` is."""
    state = qm.prepare(config.state_spec)
    basis = build_proposition_basis()
    h = build_maximal_observable(config.coefficients, basis) if config.mode == "maximal" else None

    def run(chunk: np.ndarray):
        truth = qm.sample_batch(state, basis, config.master_seed, chunk, mode=config.mode,
                                order=config.order, h=h, noise_p=config.noise_p)
        return _records_for(truth, chunk, config.master_seed)

    chunks = _chunks(config.shots, config.workers)
    if config.workers == 1:
        parts = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(run, chunks))
    records = sorted((r for part in parts for r in part), key=lambda r: r.shot_index)
    report = summarize(records, qm.born(state, basis).probs, config.noise_p)
    return report, records


# -- serialisation ------------------------------------------------------------

def _dumps(doc, pretty: bool = True) -> str:
    if pretty:
        return json.dumps(doc, indent=2) + "\n"
    return json.dumps(doc, separators=(",", ":")) + "\n"


def report_to_json(config: ExperimentConfig, report: VerdictReport,
                   records: Sequence[ExperimentRecord]) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": config.echo(),
        "born_probabilities": [sig12(p) for p in report.born_probabilities],
        "expected_probabilities": [sig12(p) for p in report.expected_probabilities],
        "counts_per_outcome": {str(i + 1): c for i, c in enumerate(report.counts_per_outcome)},
        "counts_per_pattern": report.counts_per_pattern,
        "frequencies": [sig12(f) for f in report.frequencies],
        "standard_errors": [sig12(s) for s in report.standard_errors],
        "nchv_consistent_shots": report.nchv_consistent_shots,
        "qm_consistent_shots": report.qm_consistent_shots,
        "verdict": report.verdict,
        "record_columns": list(RECORD_COLUMNS),
        "records": [
            [r.shot_index, r.outcome_index if r.outcome_index is not None else 0,
             *(int(t) for t in r.truth), r.pattern.value]
            for r in records
        ],
    }
    return _dumps(doc, pretty=False)


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def records_to_csv(records: Sequence[ExperimentRecord]) -> str:
    return _csv(RECORD_COLUMNS, (
        (r.shot_index, r.outcome_index if r.outcome_index is not None else 0,
         *(int(t) for t in r.truth), r.pattern.value)
        for r in records
    ))


def run_nchv_table(fmt: str = "csv") -> str:
    rows = nchv.table_rows()
    if fmt == "csv":
        return _csv(nchv.TABLE_COLUMNS, rows)
    if fmt == "json":
        return _dumps({"schema_version": SCHEMA_VERSION,
                       "rows": [dict(zip(nchv.TABLE_COLUMNS, r)) for r in rows]})
    raise ValueError(f"format must be one of {FORMATS}")


def run_qm_probs(state_spec: str, fmt: str = "json") -> str:
    state = qm.prepare(state_spec)
    probs = qm.born(state, build_proposition_basis()).probs
    if fmt == "csv":
        return _csv(("outcome", "probability"), ((i + 1, f"{p:.12g}") for i, p in enumerate(probs)))
    if fmt == "json":
        return _dumps({"schema_version": SCHEMA_VERSION, "state": state_spec,
                       "born_probabilities": [sig12(p) for p in probs]})
    raise ValueError(f"format must be one of {FORMATS}")


def serialize_experiment(config: ExperimentConfig, report: VerdictReport,
                         records: Sequence[ExperimentRecord]) -> str:
    if config.output_format == "json":
        return report_to_json(config, report, records)
    return records_to_csv(records)


def summary_line(report: VerdictReport) -> str:
    freqs = " ".join(f"{f:.4f}" for f in report.frequencies)
    born = " ".join(f"{p:.4f}" for p in report.expected_probabilities)
    return (f"verdict={report.verdict} shots={report.shots} "
            f"qm_consistent={report.qm_consistent_shots} nchv_consistent={report.nchv_consistent_shots} "
            f"freq=[{freqs}] expected=[{born}]")
