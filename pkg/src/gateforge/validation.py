"""Input validation helpers for matrix-valued arguments.

All public entry points funnel array-likes through these checks so that
error messages are uniform and the special-unitary invariants are enforced
in exactly one place.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, NonUnitaryMatrixError

#: Default tolerance for the unitarity and determinant-one invariants.
UNITARY_ATOL = 1e-10


def as_square_complex(m, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a square complex128 ndarray or raise ``ValueError``."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


def unitarity_defect(u) -> float:
    """Frobenius norm of U†U - I."""
    a = as_square_complex(u)
    eye = np.eye(a.shape[0])
    return float(np.linalg.norm(a.conj().T @ a - eye, "fro"))


def determinant_defect(u) -> float:
    """Absolute deviation of det(U) from 1."""
    a = as_square_complex(u)
    return float(abs(np.linalg.det(a) - 1.0))


def check_special_unitary(m, tol: float = UNITARY_ATOL, name: str = "matrix") -> np.ndarray:
    """Validate that ``m`` is special unitary within ``tol``.

    Raises ``NonUnitaryMatrixError`` on failure, returns the coerced array on
    success.  User input is never silently repaired.
    """
    a = as_square_complex(m, name)
    ud = unitarity_defect(a)
    if ud > tol:
        raise NonUnitaryMatrixError(f"{name} is not unitary: ||U†U - I||_F = {ud:.3e} > {tol:.1e}")
    dd = determinant_defect(a)
    if dd > tol:
        raise NonUnitaryMatrixError(f"{name} has |det - 1| = {dd:.3e} > {tol:.1e}")
    return a


def check_same_dim(u: np.ndarray, v: np.ndarray) -> None:
    """Raise ``DimensionMismatchError`` unless both matrices share a shape."""
    if u.shape != v.shape:
        raise DimensionMismatchError(f"dimension mismatch: {u.shape} vs {v.shape}")


def readonly(a: np.ndarray) -> np.ndarray:
    """Return a contiguous, non-writeable copy of ``a``."""
    out = np.ascontiguousarray(a)
    if out is a:
        out = a.copy()
    out.flags.writeable = False
    return out
