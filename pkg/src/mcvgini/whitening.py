"""Scale-stable whitening: ZCA-cor and Cholesky.

The whitened vector ``X* = W X`` has identity covariance; its entries are
the "principal components" that the G_q family and the harmonic-mean
bounds are phrased in.  Nothing is centered: means travel as ``W m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DegenerateColumn, DimensionMismatch, ZeroWhitenedMean
from .moments import DataSet, MomentSummary
from .spdlinalg import cholesky, spd_inv_sqrt

__all__ = [
    "WhiteningKind",
    "WhiteningTransform",
    "zca_cor_whitening",
    "cholesky_whitening",
    "whiten",
    "apply_whitening",
    "component_cvs",
]


class WhiteningKind(str, Enum):
    ZCA_COR = "zca_cor"
    CHOLESKY = "cholesky"


@dataclass(frozen=True)
class WhiteningTransform:
    matrix: np.ndarray
    kind: WhiteningKind
    source: MomentSummary

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def whitened_mean(self) -> np.ndarray:
        return self.matrix @ self.source.mean


def _check_variances(ms: MomentSummary) -> np.ndarray:
    v = ms.var_diag
    if np.any(v <= 0.0):
        raise DegenerateColumn(f"zero variance in column(s) {np.flatnonzero(v <= 0.0).tolist()}")
    return v


def zca_cor_whitening(ms: MomentSummary) -> WhiteningTransform:
    """``W = P^{-1/2} V^{-1/2}`` with P the correlation and V the variance diagonal."""
    v = _check_variances(ms)
    R = spd_inv_sqrt(ms.require_corr())
    W = R / np.sqrt(v)[None, :]
    return WhiteningTransform(W, WhiteningKind.ZCA_COR, ms)


def cholesky_whitening(ms: MomentSummary) -> WhiteningTransform:
    """``W = L^{-1}`` where ``Sigma = L L^T``."""
    _check_variances(ms)
    L = cholesky(ms.cov).lower
    W = solve_triangular(L, np.eye(ms.n), lower=True)
    return WhiteningTransform(W, WhiteningKind.CHOLESKY, ms)


def whiten(ms: MomentSummary, kind: WhiteningKind | str = WhiteningKind.ZCA_COR) -> WhiteningTransform:
    kind = WhiteningKind(kind)
    if kind is WhiteningKind.CHOLESKY:
        return cholesky_whitening(ms)
    return zca_cor_whitening(ms)


def apply_whitening(W: WhiteningTransform, data: DataSet) -> DataSet:
    if W.n != data.n:
        raise DimensionMismatch(f"{W.n}x{W.n} whitening against {data.n} columns")
    return DataSet(data.values @ W.matrix.T, tuple(f"{c}*" for c in data.column_names))


def component_cvs(W: WhiteningTransform, ms: MomentSummary | None = None) -> np.ndarray:
    """CVs of the whitened components, ``1 / |(W m)_i|``.

    Whitened components have unit variance, so only the whitened mean
    matters.
    """
    ms = W.source if ms is None else ms
    if ms.n != W.n:
        raise DimensionMismatch(f"{W.n}x{W.n} whitening against dimension {ms.n}")
    mstar = np.abs(W.matrix @ ms.mean)
    if np.any(mstar <= 1e-14):
        raise ZeroWhitenedMean(
            f"whitened mean vanishes in component(s) {np.flatnonzero(mstar <= 1e-14).tolist()}"
        )
    return 1.0 / mstar
