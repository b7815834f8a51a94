"""Dense kernels for symmetric positive definite matrices.

Cholesky factorization, SPD inverse, a cyclic Jacobi eigensolver and the
inverse square root built on it.  Sizes handled here are small (n up to a
hundred or so), so the kernels favour determinism over raw speed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, McvError, NoConvergence, NotPositiveDefinite

__all__ = [
    "ConditioningWarning",
    "SpdFactorization",
    "SymEigen",
    "cholesky",
    "spd_inverse",
    "spd_log_det",
    "sym_eigen",
    "spd_inv_sqrt",
    "quadratic_form",
]

#: eigenvalue ratio above which callers are warned
CONDITION_WARN = 1e10

JACOBI_MAX_SWEEPS = 100
JACOBI_OFF_TOL = 1e-12


class ConditioningWarning(UserWarning):
    """Emitted when an SPD kernel sees an eigenvalue ratio above 1e10."""


def _square(S, name: str = "matrix") -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise McvError(f"{name} has non-finite entries")
    return S


def _symmetric(S, name: str = "matrix") -> np.ndarray:
    S = _square(S, name)
    scale = np.max(np.abs(S)) if S.size else 0.0
    if np.max(np.abs(S - S.T), initial=0.0) > 1e-10 * max(scale, 1e-300):
        raise McvError(f"{name} is not symmetric")
    return S


def _warn_condition(ratio: float) -> None:
    if ratio > CONDITION_WARN:
        warnings.warn(
            f"ill-conditioned matrix (eigenvalue ratio {ratio:.3g})",
            ConditioningWarning,
            stacklevel=3,
        )


@dataclass(frozen=True)
class SpdFactorization:
    """``S = lower @ lower.T`` with a strictly positive diagonal."""

    lower: np.ndarray

    @property
    def n(self) -> int:
        return self.lower.shape[0]

    @property
    def log_det(self) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(self.lower))))

    @property
    def condition_estimate(self) -> float:
        # cheap lower bound on the eigenvalue ratio
        d = np.diag(self.lower)
        return float((d.max() / d.min()) ** 2)


@dataclass(frozen=True)
class SymEigen:
    """Eigenpairs of a symmetric matrix; ``vectors[:, k]`` goes with ``values[k]``.

    Values are sorted in descending order.  Each eigenvector is signed so
    that its largest-magnitude entry is positive.
    """

    vectors: np.ndarray
    values: np.ndarray
    sweeps: int = 0

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def condition(self) -> float:
        a = np.abs(self.values)
        if a.min() == 0.0:
            return math.inf
        return float(a.max() / a.min())

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def cholesky(S) -> SpdFactorization:
    """Factor a symmetric positive definite matrix as ``L @ L.T``.

    Raises
    ------
    NotPositiveDefinite
        If a pivot falls below ``n * 1e-14 * max|S|``.
    """
    S = _symmetric(S)
    n = S.shape[0]
    tol = n * 1e-14 * np.max(np.abs(S), initial=0.0)
    L = np.zeros_like(S)
    for j in range(n):
        row = L[j, :j]
        pivot = S[j, j] - row @ row
        if not pivot > tol:
            raise NotPositiveDefinite(
                f"matrix is not positive definite (pivot {pivot:.3g} at column {j})"
            )
        L[j, j] = math.sqrt(pivot)
        if j + 1 < n:
            L[j + 1 :, j] = (S[j + 1 :, j] - L[j + 1 :, :j] @ row) / L[j, j]
    return SpdFactorization(L)


def spd_inverse(S) -> np.ndarray:
    """Inverse of an SPD matrix through its Cholesky factor."""
    fac = cholesky(S)
    _warn_condition(fac.condition_estimate)
    Linv = solve_triangular(fac.lower, np.eye(fac.n), lower=True)
    inv = Linv.T @ Linv
    return 0.5 * (inv + inv.T)


def spd_log_det(S) -> float:
    return cholesky(S).log_det


def sym_eigen(S, max_sweeps: int = JACOBI_MAX_SWEEPS) -> SymEigen:
    """Symmetric eigendecomposition by cyclic Jacobi rotations.

    Iterates until the off-diagonal Frobenius norm drops below
    ``1e-12 * ||S||_F``.

    Raises
    ------
    NoConvergence
        If ``max_sweeps`` sweeps are not enough.
    """
    A = _symmetric(S).copy()
    n = A.shape[0]
    V = np.eye(n)
    target = JACOBI_OFF_TOL * np.linalg.norm(A)
    sweeps = 0
    while True:
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= target:
            break
        if sweeps >= max_sweeps:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = A[:, p].copy()
                aq = A[:, q]
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :]
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    values = np.diag(A).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    V = V[:, order]
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.where(V[idx, np.arange(n)] < 0.0, -1.0, 1.0)
    return SymEigen(V * signs, values, sweeps)


def spd_inv_sqrt(S) -> np.ndarray:
    """Symmetric inverse square root ``G diag(theta^-1/2) G^T``.

    Raises
    ------
    NotPositiveDefinite
        If any eigenvalue is at most ``1e-12`` times the largest.
    """
    eig = sym_eigen(S)
    top = eig.values[0] if eig.n else 0.0
    if eig.n and not (eig.values[-1] > 1e-12 * top and top > 0.0):
        raise NotPositiveDefinite(
            f"matrix is not positive definite (eigenvalues {eig.values[-1]:.3g} .. {top:.3g})"
        )
    _warn_condition(eig.condition)
    R = (eig.vectors / np.sqrt(eig.values)) @ eig.vectors.T
    return 0.5 * (R + R.T)


def quadratic_form(S_inv, v) -> float:
    """``v^T S_inv v``."""
    S_inv = _square(S_inv, "S_inv")
    v = np.asarray(v, dtype=float)
    if v.shape != (S_inv.shape[0],):
        raise DimensionMismatch(f"vector of shape {v.shape} against {S_inv.shape} matrix")
    return float(v @ S_inv @ v)
