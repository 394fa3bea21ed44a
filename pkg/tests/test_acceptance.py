"""Exit criteria; each test reports one PASS/FAIL line in the terminal summary.

Run alone with ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from bkssim import linalg as la
from bkssim import qm
from bkssim.harness import ExperimentConfig, run_experiment
from bkssim.nchv import NCHV_ALLOWED, HiddenState, Pattern, enumerate_all, evaluate
from bkssim.observables import (
    PROPOSITION_CONSTRAINTS,
    build_maximal_observable,
    build_proposition_basis,
    eigen_residual,
    product_matrix,
    recover_projectors,
)

from conftest import ACCEPTANCE_LINES
from helpers import same_distribution_pvalue, within_sigma

GOLDEN_BORN_SEED = 20261016
GOLDEN_MODE_PAIRS = [("random:101", 1), ("random:202", 2), ("preset:up-up", 3),
                     ("preset:plus-plus", 4), ("amps:1,0;0,1;2,-1;0,0.5", 5)]


def report(label: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
    assert passed, detail


def best_time(fn, repeats: int = 20) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_ac1_nchv_pattern_counts():
    def count():
        c = {p: 0 for p in Pattern}
        for _, o in enumerate_all():
            c[o.pattern] += 1
        return c

    counts = count()
    elapsed = best_time(count)
    expected = {Pattern.ALL_FALSE: 8, Pattern.TWO_TRUE: 8, Pattern.EXACTLY_ONE_TRUE: 0, Pattern.OTHER: 0}
    report("AC1 hidden-state pattern counts", counts == expected and elapsed < 1e-3,
           f"{ {p.value: n for p, n in counts.items()} }, {elapsed * 1e3:.3f} ms")


def test_ac2_named_witnesses():
    w1 = evaluate(HiddenState(1, 1, 1, 1)).true_set()
    w2 = evaluate(HiddenState(1, 1, 1, -1)).true_set()
    report("AC2 witnesses", w1 == {1, 3} and w2 == set(), f"(+,+,+,+) -> {sorted(w1)}, (+,+,+,-) -> {sorted(w2)}")


def test_ac3_orthogonality_and_completeness():
    def check():
        ps = build_proposition_basis().projectors
        overlap = max(np.abs(la.matmul(ps[i], ps[j])).max() for i in range(4) for j in range(4) if i != j)
        dev = la.max_abs_diff(ps[0] + ps[1] + ps[2] + ps[3], la.I4)
        return overlap, dev

    overlap, dev = check()
    elapsed = best_time(check)
    report("AC3 orthogonality / resolution of identity",
           overlap < 1e-12 and dev < 1e-12 and elapsed < 1e-3,
           f"max|PiPj|={overlap:.1e}, max|sum-I|={dev:.1e}, {elapsed * 1e3:.3f} ms")


def test_ac4_eigen_residuals():
    basis = build_proposition_basis()
    residuals = []
    for psi, (first, second, sign) in zip(basis.states, PROPOSITION_CONSTRAINTS):
        for label in (first, second):
            residuals.append(eigen_residual(product_matrix(label), psi, sign))
    report("AC4 eight eigen-equation residuals", len(residuals) == 8 and max(residuals) < 1e-12,
           f"max residual {max(residuals):.1e}")


def test_ac5_projector_recovery():
    basis = build_proposition_basis()
    gen = np.random.default_rng(5)
    worst, draws = 0.0, 0
    while draws < 100:
        cs = gen.uniform(-1000, 1000, 4)
        gaps = np.abs(cs[:, None] - cs[None, :])[np.triu_indices(4, 1)]
        if gaps.min() <= 1e-6 * np.abs(cs).max():
            continue
        draws += 1
        rec = recover_projectors(build_maximal_observable(cs, basis))
        worst = max(worst, max(la.max_abs_diff(r, p) for r, p in zip(rec, basis.projectors)))
    report("AC5 projector recovery round trip", worst < 1e-9, f"100 draws, worst entry deviation {worst:.1e}")


def test_ac6_all_or_nothing():
    t0 = time.perf_counter()
    bad = total = 0
    for k in range(20):
        rep, records = run_experiment(ExperimentConfig(f"random:{9000 + k}", 10_000, 31 + k))
        total += len(records)
        bad += sum(1 for r in records if r.pattern is not Pattern.EXACTLY_ONE_TRUE or r.pattern in NCHV_ALLOWED)
    elapsed = time.perf_counter() - t0
    report("AC6 every shot has exactly one true proposition", bad == 0 and total == 200_000 and elapsed < 5,
           f"{total} shots, {bad} violations, {elapsed:.2f} s")


def test_ac7_born_statistics():
    n = 100_000
    rep, _ = run_experiment(ExperimentConfig("preset:up-up", n, GOLDEN_BORN_SEED))
    counts = rep.counts_per_outcome
    ok = within_sigma(counts, (0.5, 0.0, 0.25, 0.25), n) and counts[1] == 0
    report("AC7 Born statistics on |00>", ok, f"counts {counts} vs expected (50000, 0, 25000, 25000)")


def test_ac8_mode_equivalence():
    worst = 1.0
    for spec, seed in GOLDEN_MODE_PAIRS:
        hists = [rep.counts_per_outcome for rep, _ in
                 (run_experiment(ExperimentConfig(spec, 10_000, seed, mode=m))
                  for m in ("joint", "sequential", "maximal"))]
        for i in range(3):
            for j in range(i + 1, 3):
                worst = min(worst, same_distribution_pvalue(hists[i], hists[j]))
    report("AC8 joint / sequential / maximal agree", worst > 0.001, f"min pairwise p = {worst:.3g}")


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_ac9_reproducible_outputs(tmp_path, fmt):
    outs = []
    for run in range(2):
        path = tmp_path / f"run{run}.{fmt}"
        subprocess.run([sys.executable, "-m", "bkssim", "simulate", "--state", "random:7", "--shots", "20000",
                        "--seed", "424242", "--mode", "sequential", "--noise", "0.1", "--format", fmt,
                        "--out", str(path)], check=False, capture_output=True)
        outs.append(path.read_bytes())
    report(f"AC9 byte-identical {fmt} output", outs[0] == outs[1] and len(outs[0]) > 0,
           f"{len(outs[0])} bytes")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
