"""Pure two-qubit states and the joint measurement of the four propositions.

Three ways to run one shot, all with the same outcome statistics:

* ``sample``: one projective measurement with four outcomes, inverse CDF on a
  single uniform draw (cumulative order P1 -> P4).
* ``sample_sequential``: the binary observables P_i measured one after the
  other in a given order, collapsing after each.
* ``measure_maximal``: measure H = sum c_i P_i, with the eigenprojectors
  obtained from H itself by Lagrange interpolation.

Randomness comes from a :class:`~bkssim.rng.ShotStream`; the ``*_batch``
functions are vectorised over shot indices and reproduce the scalar
functions draw for draw.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg as la
from .nchv import Pattern, classify
from .observables import MaximalObservable, PropositionBasis, recover_projectors
from .rng import NOISE_DRAW, NOISE_OUTCOME_DRAW, ShotStream, uniforms

NORM_TOL = 1e-12
PROB_FLOOR = 1e-14
DEGENERATE_NORM = 1e-9
UNIFORM_CDF = np.array([0.25, 0.5, 0.75, 1.0])


class StateSpecError(ValueError):
    """Malformed state descriptor."""


class MeasurementError(RuntimeError):
    """Numerically degenerate post-measurement state."""


@dataclass(frozen=True)
class TwoQubitState:
    amplitudes: np.ndarray
    provenance: str = "explicit"

    def __post_init__(self):
        n = la.norm(self.amplitudes)
        if self.amplitudes.shape != (4,) or abs(n - 1.0) > NORM_TOL:
            raise ValueError(f"state must be a unit 4-vector (norm {n!r})")


def from_amplitudes(amps: Sequence[complex], provenance: str = "explicit") -> TwoQubitState:
    v = np.asarray(amps, dtype=complex)
    if v.shape != (4,):
        raise StateSpecError(f"need four amplitudes, got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise StateSpecError("amplitudes must be finite")
    n = np.linalg.norm(v)
    if n < DEGENERATE_NORM:
        raise StateSpecError("zero vector is not a state")
    return TwoQubitState(la.vector(v / n), provenance)


def haar_random(seed: int) -> TwoQubitState:
    """Pure state from the unitarily invariant measure (normalised complex Gaussian)."""
    gen = np.random.default_rng(seed)
    z = gen.standard_normal(4) + 1j * gen.standard_normal(4)
    return from_amplitudes(z, provenance=f"random:{seed}")


_R2 = 1 / np.sqrt(2)
PRESETS = {
    "phi+": (_R2, 0, 0, _R2),
    "psi-": (0, _R2, -_R2, 0),
    "psi3": (0.5, 0.5, 0.5, -0.5),
    "psi4": (0.5, -0.5, -0.5, -0.5),
    "up-up": (1, 0, 0, 0),
    "plus-plus": (0.5, 0.5, 0.5, 0.5),
}


def prepare(spec: str) -> TwoQubitState:
    """Parse ``preset:<name>``, ``amps:re,im;re,im;re,im;re,im`` or ``random:<seed>``."""
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise StateSpecError(f"state descriptor {spec!r} has no ':'")
    if kind == "preset":
        if arg not in PRESETS:
            raise StateSpecError(f"unknown preset {arg!r}; choose from {sorted(PRESETS)}")
        return from_amplitudes(PRESETS[arg], provenance=spec)
    if kind == "amps":
        parts = arg.split(";")
        if len(parts) != 4:
            raise StateSpecError("amps needs four 're,im' pairs separated by ';'")
        amps = []
        for part in parts:
            pieces = part.split(",")
            if len(pieces) != 2:
                raise StateSpecError(f"bad amplitude {part!r}; expected 're,im'")
            try:
                re, im = (float(x) for x in pieces)
            except ValueError:
                raise StateSpecError(f"bad amplitude {part!r}") from None
            amps.append(complex(re, im))
        return from_amplitudes(amps, provenance=spec)
    if kind == "random":
        try:
            seed = int(arg)
        except ValueError:
            raise StateSpecError(f"random seed must be an integer, got {arg!r}") from None
        if seed < 0:
            raise StateSpecError("random seed must be non-negative")
        return haar_random(seed)
    raise StateSpecError(f"unknown descriptor kind {kind!r}")


@dataclass(frozen=True)
class BornDistribution:
    probs: tuple[float, float, float, float]


def clamp_probabilities(raw) -> np.ndarray:
    """Zero out rounding dust below PROB_FLOOR and renormalise."""
    p = np.asarray(raw, dtype=float).copy()
    if np.any(p < -1e-12):
        raise MeasurementError(f"negative probability {p.min():g}")
    p[p < PROB_FLOOR] = 0.0
    return p / p.sum()


def born(state: TwoQubitState, basis: PropositionBasis) -> BornDistribution:
    raw = [abs(la.inner(psi, state.amplitudes)) ** 2 for psi in basis.states]
    return BornDistribution(tuple(float(x) for x in clamp_probabilities(raw)))


def _probs_from_projectors(amplitudes: np.ndarray, projectors) -> np.ndarray:
    raw = [la.inner(amplitudes, la.matvec(p, amplitudes)).real for p in projectors]
    return clamp_probabilities(raw)


def _cdf(probs: np.ndarray) -> np.ndarray:
    c = np.cumsum(probs)
    c[-1] = 1.0
    return c


def _pick(cdf: np.ndarray, u) -> np.ndarray:
    """1-based outcome index for uniform(s) ``u``."""
    return np.searchsorted(cdf, u, side="right") + 1


def _one_hot(outcome: int) -> tuple[bool, bool, bool, bool]:
    return tuple(i == outcome for i in (1, 2, 3, 4))


def _collapse(amplitudes: np.ndarray, projector: np.ndarray, *, fallback: np.ndarray | None = None):
    proj = la.matvec(projector, amplitudes)
    n = la.norm(proj)
    if n < DEGENERATE_NORM:
        if fallback is not None:
            return fallback
        raise MeasurementError(f"post-measurement norm {n:.3g} is degenerate")
    return la.vector(proj / n)


@dataclass(frozen=True)
class MeasurementResult:
    outcome_index: int
    post_state: TwoQubitState
    truth: tuple[bool, bool, bool, bool]

    @property
    def pattern(self) -> Pattern:
        return classify(self.truth)


def _noisy(stream: ShotStream, noise_p: float) -> bool:
    return noise_p > 0 and stream.draw(NOISE_DRAW) < noise_p


def _depolarized_result(state: TwoQubitState, basis: PropositionBasis, stream: ShotStream) -> MeasurementResult:
    k = int(_pick(UNIFORM_CDF, stream.draw(NOISE_OUTCOME_DRAW)))
    post = _collapse(state.amplitudes, basis.projectors[k - 1], fallback=basis.states[k - 1])
    return MeasurementResult(k, TwoQubitState(post, "collapsed"), _one_hot(k))


def _joint_result(state, projectors, basis, stream) -> MeasurementResult:
    probs = _probs_from_projectors(state.amplitudes, projectors)
    k = int(_pick(_cdf(probs), stream.uniform()))
    post = _collapse(state.amplitudes, basis.projectors[k - 1])
    return MeasurementResult(k, TwoQubitState(post, "collapsed"), _one_hot(k))


def sample(state: TwoQubitState, basis: PropositionBasis, stream: ShotStream,
           noise_p: float = 0.0) -> MeasurementResult:
    """One joint measurement of P1..P4."""
    if _noisy(stream, noise_p):
        return _depolarized_result(state, basis, stream)
    return _joint_result(state, basis.projectors, basis, stream)


def _check_order(order: Sequence[int]) -> tuple[int, ...]:
    order = tuple(int(i) for i in order)
    if sorted(order) != [1, 2, 3, 4]:
        raise ValueError(f"order must be a permutation of 1..4, got {order}")
    return order


def _binary_prob(amplitudes: np.ndarray, projector: np.ndarray) -> float:
    p = la.inner(amplitudes, la.matvec(projector, amplitudes)).real
    if p < PROB_FLOOR:
        return 0.0
    if p > 1.0 - PROB_FLOOR:
        return 1.0
    return p


def _sequential_step(amplitudes, projector, hit: bool):
    if hit:
        return _collapse(amplitudes, projector)
    return _collapse(amplitudes, la.I4 - projector)


def sample_sequential(state: TwoQubitState, basis: PropositionBasis, order: Sequence[int],
                      stream: ShotStream, noise_p: float = 0.0) -> MeasurementResult:
    """Measure the yes/no observables P_i one by one in ``order`` with collapse."""
    order = _check_order(order)
    if _noisy(stream, noise_p):
        return _depolarized_result(state, basis, stream)
    psi = state.amplitudes
    truth = [False] * 4
    for idx in order:
        proj = basis.projectors[idx - 1]
        hit = stream.uniform() < _binary_prob(psi, proj)
        psi = _sequential_step(psi, proj, hit)
        truth[idx - 1] = hit
    if sum(truth) != 1:
        raise MeasurementError(f"sequential measurement produced truth {truth}")
    return MeasurementResult(truth.index(True) + 1, TwoQubitState(psi, "collapsed"), tuple(truth))


def measure_maximal(state: TwoQubitState, h: MaximalObservable, basis: PropositionBasis,
                    stream: ShotStream, noise_p: float = 0.0) -> tuple[float, MeasurementResult]:
    """Measure H; returns the eigenvalue c_i observed and the induced proposition outcome.

    Outcome probabilities come from the projectors reconstructed out of H;
    ``basis`` only supplies the collapse targets.
    """
    if _noisy(stream, noise_p):
        result = _depolarized_result(state, basis, stream)
    else:
        result = _joint_result(state, recover_projectors(h), basis, stream)
    return h.coefficients[result.outcome_index - 1], result


def expectation(state: TwoQubitState, m: np.ndarray) -> float:
    return la.inner(state.amplitudes, la.matvec(m, state.amplitudes)).real


# -- vectorised paths ---------------------------------------------------------

def _noise_mask(master_seed, shots, noise_p):
    if noise_p <= 0:
        return np.zeros(shots.shape, dtype=bool)
    return uniforms(master_seed, shots, NOISE_DRAW) < noise_p


def _one_hot_rows(outcomes: np.ndarray) -> np.ndarray:
    return outcomes[:, None] == np.arange(1, 5)[None, :]


def sample_batch(state: TwoQubitState, basis: PropositionBasis, master_seed: int, shot_indices,
                 *, mode: str = "joint", order: Sequence[int] = (1, 2, 3, 4),
                 h: MaximalObservable | None = None, noise_p: float = 0.0) -> np.ndarray:
    """Truth table (shots x 4, bool) matching the scalar function of ``mode`` per shot."""
    shots = np.asarray(shot_indices, dtype=np.uint64)
    noisy = _noise_mask(master_seed, shots, noise_p)
    if mode == "joint":
        truth = _one_hot_rows(_pick(_cdf(_probs_from_projectors(state.amplitudes, basis.projectors)),
                                    uniforms(master_seed, shots, 0)))
    elif mode == "maximal":
        if h is None:
            raise ValueError("maximal mode needs a MaximalObservable")
        probs = _probs_from_projectors(state.amplitudes, recover_projectors(h))
        truth = _one_hot_rows(_pick(_cdf(probs), uniforms(master_seed, shots, 0)))
    elif mode == "sequential":
        truth = _sequential_batch(state, basis, _check_order(order), master_seed, shots)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if noisy.any():
        noise_out = _pick(UNIFORM_CDF, uniforms(master_seed, shots[noisy], NOISE_OUTCOME_DRAW))
        truth[noisy] = _one_hot_rows(noise_out)
    return truth


def _sequential_batch(state, basis, order, master_seed, shots) -> np.ndarray:
    # Shots sharing a measurement history share a post-measurement state, so
    # each history group advances with one probability and a vector compare.
    truth = np.zeros((shots.shape[0], 4), dtype=bool)
    groups = [(state.amplitudes, np.arange(shots.shape[0]))]
    for step, idx in enumerate(order):
        proj = basis.projectors[idx - 1]
        u = uniforms(master_seed, shots, step)
        next_groups = []
        for psi, members in groups:
            p = _binary_prob(psi, proj)
            hit = u[members] < p
            truth[members[hit], idx - 1] = True
            for flag, sub in ((True, members[hit]), (False, members[~hit])):
                if sub.size:
                    next_groups.append((_sequential_step(psi, proj, flag), sub))
        groups = next_groups
    if np.any(truth.sum(axis=1) != 1):
        raise MeasurementError("sequential measurement produced a shot without exactly one true")
    return truth


# -- theorem checks -----------------------------------------------------------

@dataclass(frozen=True)
class QmReport:
    exclusive: bool
    exhaustive: bool
    exactly_one: bool
    max_overlap: float
    identity_deviation: float


def verify_qm_theorems(basis: PropositionBasis, tol: float = la.DEFAULT_TOL) -> QmReport:
    """Mutual orthogonality, resolution of the identity, and their conjunction."""
    ps = basis.projectors
    overlap = max(
        float(np.max(np.abs(la.matmul(ps[i], ps[j]))))
        for i in range(4) for j in range(4) if i != j
    )
    total = sum(ps, start=np.zeros((4, 4), dtype=complex))
    dev = la.max_abs_diff(total, la.I4)
    exclusive, exhaustive = overlap < tol, dev < tol
    return QmReport(exclusive, exhaustive, exclusive and exhaustive, overlap, dev)
