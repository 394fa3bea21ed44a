"""Dense complex vectors and matrices of dimension 2 and 4.

Values are read-only numpy arrays. Basis ordering for two qubits is
``|m1 m2>`` -> ``2*m1 + m2`` with ``m = 0`` the +1 eigenstate of sigma_z.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

DEFAULT_TOL = 1e-12
ALLOWED_DIMS = (2, 4)


class DimensionError(ValueError):
    """Operand shapes are not compatible with the requested operation."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _check_finite(arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")


def vector(entries: Iterable[complex]) -> np.ndarray:
    """Build a read-only complex vector of length 2 or 4."""
    arr = np.array(list(entries), dtype=complex)
    if arr.ndim != 1 or arr.shape[0] not in ALLOWED_DIMS:
        raise DimensionError(f"vector length must be one of {ALLOWED_DIMS}, got shape {arr.shape}")
    _check_finite(arr)
    return _freeze(arr)


def matrix(entries) -> np.ndarray:
    """Build a read-only complex square matrix from nested rows or a flat row-major list."""
    arr = np.array(entries, dtype=complex)
    if arr.ndim == 1:
        n = int(round(np.sqrt(arr.shape[0])))
        if n * n != arr.shape[0]:
            raise DimensionError(f"flat entry list of length {arr.shape[0]} is not square")
        arr = arr.reshape(n, n)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] not in ALLOWED_DIMS:
        raise DimensionError(f"matrix must be 2x2 or 4x4, got shape {arr.shape}")
    _check_finite(arr)
    return _freeze(arr)


def identity(dim: int) -> np.ndarray:
    if dim not in ALLOWED_DIMS:
        raise DimensionError(f"dim must be one of {ALLOWED_DIMS}")
    return _freeze(np.eye(dim, dtype=complex))


def zeros(dim: int) -> np.ndarray:
    if dim not in ALLOWED_DIMS:
        raise DimensionError(f"dim must be one of {ALLOWED_DIMS}")
    return _freeze(np.zeros((dim, dim), dtype=complex))


SIGMA_Z = matrix([[1, 0], [0, -1]])
SIGMA_X = matrix([[0, 1], [1, 0]])
I2 = identity(2)
I4 = identity(4)


def _require_matrix(m: np.ndarray, dim: int | None = None) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise DimensionError(f"expected dimension {dim}, got {m.shape[0]}")


def tensor(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    """Kronecker product of two 2x2 matrices; particle 1 is the high-order index."""
    _require_matrix(m1, 2)
    _require_matrix(m2, 2)
    return _freeze(np.kron(m1, m2))


def matvec(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    _require_matrix(m)
    if v.ndim != 1 or v.shape[0] != m.shape[0]:
        raise DimensionError(f"cannot apply {m.shape} matrix to vector of shape {v.shape}")
    return _freeze(m @ v)


def matmul(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    _require_matrix(m1)
    _require_matrix(m2, m1.shape[0])
    return _freeze(m1 @ m2)


def adjoint(m: np.ndarray) -> np.ndarray:
    _require_matrix(m)
    return _freeze(m.conj().T.copy())


def inner(v1: np.ndarray, v2: np.ndarray) -> complex:
    """<v1|v2>, conjugate-linear in the first argument."""
    if v1.ndim != 1 or v1.shape != v2.shape:
        raise DimensionError(f"vector shapes differ: {v1.shape} vs {v2.shape}")
    return complex(np.vdot(v1, v2))


def norm(v: np.ndarray) -> float:
    return float(np.sqrt(inner(v, v).real))


def outer(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    """|v1><v2|."""
    if v1.ndim != 1 or v1.shape != v2.shape:
        raise DimensionError(f"vector shapes differ: {v1.shape} vs {v2.shape}")
    return _freeze(np.outer(v1, v2.conj()))


def max_abs_diff(m1: np.ndarray, m2: np.ndarray) -> float:
    """Largest entrywise modulus of ``m1 - m2``."""
    if m1.shape != m2.shape:
        raise DimensionError(f"shapes differ: {m1.shape} vs {m2.shape}")
    return float(np.max(np.abs(m1 - m2)))


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    _require_matrix(m)
    return max_abs_diff(m, adjoint(m)) <= tol


def is_projector(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Hermitian and idempotent, entrywise within ``tol``."""
    if not is_hermitian(m, tol):
        return False
    return max_abs_diff(matmul(m, m), m) <= tol
