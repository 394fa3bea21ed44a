"""Product observables, the four joint eigenstates and the maximal observable.

Single-particle observables: A = sigma_z(1), B = sigma_z(2), a = sigma_x(1),
b = sigma_x(2). Each proposition state is the joint eigenvector of a pair of
commuting product observables with a common sign:

    psi1: AB = +1, ab = +1        psi2: AB = -1, ab = -1
    psi3: Ab = +1, aB = +1        psi4: Ab = -1, aB = -1
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import linalg as la

LABELS = ("AB", "ab", "Ab", "aB")
DEFAULT_COEFFICIENTS = (1.0, 2.0, 3.0, 4.0)
DISTINCT_RTOL = 1e-9
RECOVERY_TOL = 1e-9

# (first constraint, second constraint, sign) for psi1..psi4
PROPOSITION_CONSTRAINTS = (
    ("AB", "ab", +1),
    ("AB", "ab", -1),
    ("Ab", "aB", +1),
    ("Ab", "aB", -1),
)

DEFAULT_SINGLES = {"A": la.SIGMA_Z, "B": la.SIGMA_Z, "a": la.SIGMA_X, "b": la.SIGMA_X}


class ConstructionError(RuntimeError):
    """A constructed object fails the equations that define it."""


@dataclass(frozen=True)
class ProductObservable:
    label: str
    matrix: np.ndarray


@dataclass(frozen=True)
class PropositionBasis:
    states: tuple[np.ndarray, ...]
    projectors: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class MaximalObservable:
    coefficients: tuple[float, ...]
    matrix: np.ndarray


def product_matrix(label: str, singles: Mapping[str, np.ndarray] | None = None) -> np.ndarray:
    """Matrix of a two-particle product observable such as ``"Ab"``.

    ``singles`` overrides the one-particle operators (keys ``A``, ``B``, ``a``,
    ``b``); used for fault injection in the verification report.
    """
    if label not in LABELS:
        raise ValueError(f"unknown product observable {label!r}; expected one of {LABELS}")
    ops = dict(DEFAULT_SINGLES)
    if singles:
        ops.update(singles)
    first, second = label
    return la.tensor(ops[first], ops[second])


def build_product_observable(label: str) -> ProductObservable:
    m = product_matrix(label)
    if not la.is_hermitian(m) or la.max_abs_diff(la.matmul(m, m), la.I4) > la.DEFAULT_TOL:
        raise ConstructionError(f"{label} is not a Hermitian involution")
    return ProductObservable(label, m)


def eigen_residual(m: np.ndarray, state: np.ndarray, eigenvalue: float) -> float:
    """Euclidean norm of ``m|state> - eigenvalue*|state>``."""
    return la.norm(la.matvec(m, state) - eigenvalue * state)


def _fix_phase(v: np.ndarray, tol: float = la.DEFAULT_TOL) -> np.ndarray:
    # first amplitude above tol made real and positive
    idx = int(np.flatnonzero(np.abs(v) > tol)[0])
    return v * (abs(v[idx]) / v[idx])


def _joint_eigenvector(x: np.ndarray, y: np.ndarray, sign: int) -> np.ndarray:
    # For commuting involutions X, Y the joint (sign, sign) eigenspace projector
    # is (I + sign*X)(I + sign*Y)/4; here it has rank one.
    q = la.matmul(la.I4 + sign * x, la.I4 + sign * y) / 4
    rank = q.trace().real
    if abs(rank - 1.0) > 1e-9:
        raise ConstructionError(f"joint eigenspace has dimension {rank:.3g}, expected 1")
    col = q[:, int(np.argmax(np.linalg.norm(q, axis=0)))]
    v = col / np.linalg.norm(col)
    return la.vector(_fix_phase(v))


def build_proposition_basis(tol: float = la.DEFAULT_TOL) -> PropositionBasis:
    """Construct |psi_i> and P_i = |psi_i><psi_i|, re-checking the defining equations."""
    states = []
    for first, second, sign in PROPOSITION_CONSTRAINTS:
        x, y = product_matrix(first), product_matrix(second)
        psi = _joint_eigenvector(x, y, sign)
        for m in (x, y):
            r = eigen_residual(m, psi, sign)
            if r > tol:
                raise ConstructionError(f"eigen-equation residual {r:.3g} exceeds {tol:g}")
        states.append(psi)
    projectors = tuple(la.outer(s, s) for s in states)
    return PropositionBasis(tuple(states), projectors)


def check_distinct(coefficients: Sequence[float], rtol: float = DISTINCT_RTOL) -> tuple[float, ...]:
    cs = tuple(float(c) for c in coefficients)
    if len(cs) != 4:
        raise ValueError(f"need exactly four coefficients, got {len(cs)}")
    if not all(np.isfinite(cs)):
        raise ValueError("coefficients must be finite")
    scale = max(abs(c) for c in cs)
    gap = min(abs(cs[i] - cs[j]) for i in range(4) for j in range(i + 1, 4))
    if not gap > rtol * scale:
        raise ValueError(f"coefficients {cs} are not pairwise distinct (min gap {gap:g})")
    return cs


def build_maximal_observable(
    coefficients: Sequence[float] = DEFAULT_COEFFICIENTS,
    basis: PropositionBasis | None = None,
) -> MaximalObservable:
    """H = sum_i c_i P_i with pairwise distinct real c_i."""
    cs = check_distinct(coefficients)
    if basis is None:
        basis = build_proposition_basis()
    h = sum((c * p for c, p in zip(cs, basis.projectors)), start=np.zeros((4, 4), dtype=complex))
    return MaximalObservable(cs, la.matrix(h))


def recover_projectors(h: MaximalObservable) -> tuple[np.ndarray, ...]:
    """Rebuild each P_i as the Lagrange polynomial prod_{j!=i} (H - c_j)/(c_i - c_j)."""
    cs = h.coefficients
    out = []
    for i, ci in enumerate(cs):
        p = la.I4
        for j, cj in enumerate(cs):
            if j != i:
                p = la.matmul(p, (h.matrix - cj * la.I4) / (ci - cj))
        out.append(p)
    return tuple(out)
