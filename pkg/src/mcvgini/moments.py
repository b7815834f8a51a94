"""First and second moments of empirical and analytic distributions.

Everything downstream consumes either a :class:`DataSet` (rows are
observations) or a :class:`MomentSummary`.  Linear maps act on column
vectors: ``A`` sends ``(m, Sigma)`` to ``(A m, A Sigma A^T)``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DegenerateColumn, DimensionMismatch, McvError, NonFinite, WeightSum

__all__ = [
    "Convention",
    "DataSet",
    "MomentSummary",
    "estimate_moments",
    "coupling_moments",
    "shift_moments",
    "scale_moments",
    "weighted_moments",
    "read_csv",
]


class Convention(str, Enum):
    POPULATION = "population"
    UNBIASED = "unbiased"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class DataSet:
    """N observations of an n-dimensional vector.

    ``values`` has shape ``(N, n)``; at least two rows and one column, all
    entries finite.
    """

    values: np.ndarray
    column_names: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2:
            raise DimensionMismatch(f"data must be 2-D, got {v.ndim}-D")
        if not np.all(np.isfinite(v)):
            raise NonFinite("data contains NaN or infinite entries")
        if v.shape[0] < 2 or v.shape[1] < 1:
            raise McvError(f"need N >= 2 observations and n >= 1 columns, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        names = tuple(self.column_names) or tuple(f"x{i + 1}" for i in range(v.shape[1]))
        if len(names) != v.shape[1]:
            raise DimensionMismatch(f"{len(names)} column names for {v.shape[1]} columns")
        object.__setattr__(self, "column_names", names)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def transformed(self, A) -> "DataSet":
        """Rows ``x`` replaced by ``A x``."""
        A = np.asarray(A, dtype=float)
        if A.shape != (self.n, self.n):
            raise DimensionMismatch(f"matrix {A.shape} against dimension {self.n}")
        return DataSet(self.values @ A.T, self.column_names)

    def shifted(self, c) -> "DataSet":
        c = np.asarray(c, dtype=float)
        if c.shape != (self.n,):
            raise DimensionMismatch(f"shift {c.shape} against dimension {self.n}")
        return DataSet(self.values + c, self.column_names)


def _correlation(cov: np.ndarray) -> np.ndarray:
    d = np.diag(cov)
    if np.any(d <= 0.0):
        bad = [i for i, x in enumerate(d) if x <= 0.0]
        raise DegenerateColumn(f"zero variance in column(s) {bad}; correlation undefined")
    s = np.sqrt(d)
    P = cov / np.outer(s, s)
    P = 0.5 * (P + P.T)
    np.fill_diagonal(P, 1.0)
    return P


@dataclass(frozen=True)
class MomentSummary:
    """Mean vector and covariance matrix with derived correlation.

    ``corr`` is ``None`` only for summaries with a zero variance (point
    masses), which no metric accepts.
    """

    mean: np.ndarray
    cov: np.ndarray
    convention: Convention = Convention.ANALYTIC
    corr: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        m = np.array(self.mean, dtype=float).reshape(-1)
        S = np.array(self.cov, dtype=float)
        if S.ndim == 0:
            S = S.reshape(1, 1)
        if S.shape != (m.size, m.size):
            raise DimensionMismatch(f"mean of length {m.size} with covariance {S.shape}")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(S))):
            raise NonFinite("moments contain NaN or infinite entries")
        scale = max(np.max(np.abs(S)), 1e-300)
        if np.max(np.abs(S - S.T)) > 1e-12 * scale:
            raise McvError("covariance is not symmetric")
        S = 0.5 * (S + S.T)
        for a in (m, S):
            a.setflags(write=False)
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "cov", S)
        object.__setattr__(self, "convention", Convention(self.convention))
        try:
            P = _correlation(S)
            P.setflags(write=False)
        except DegenerateColumn:
            P = None
        object.__setattr__(self, "corr", P)

    @property
    def n(self) -> int:
        return self.mean.size

    @property
    def var_diag(self) -> np.ndarray:
        return np.diag(self.cov).copy()

    def require_corr(self) -> np.ndarray:
        if self.corr is None:
            _correlation(self.cov)  # raises with the offending columns
        return self.corr

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "cov": self.cov.tolist(),
            "convention": self.convention.value,
        }

    def to_json(self) -> str:
        # repr of a Python float round-trips exactly (17 significant digits)
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "MomentSummary":
        try:
            return cls(d["mean"], d["cov"], d.get("convention", "analytic"))
        except KeyError as exc:
            raise McvError(f"moment summary JSON lacks field {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "MomentSummary":
        return cls.from_dict(json.loads(text))


def estimate_moments(data: DataSet, convention: Convention | str = Convention.POPULATION) -> MomentSummary:
    """Plug-in mean and covariance of a dataset.

    ``population`` divides by N, ``unbiased`` by N - 1.

    Raises
    ------
    DegenerateColumn
        If a column is constant.
    """
    convention = Convention(convention)
    if convention is Convention.ANALYTIC:
        raise McvError("empirical moments use the population or unbiased convention")
    X = data.values
    m = X.mean(axis=0)
    D = X - m
    ddof = 1 if convention is Convention.UNBIASED else 0
    S = (D.T @ D) / (data.N - ddof)
    ms = MomentSummary(m, S, convention)
    ms.require_corr()
    return ms


def coupling_moments(ms: MomentSummary) -> MomentSummary:
    """Moments of the independent coupling (X, X): mean (m, m), blockdiag(Sigma, Sigma)."""
    n = ms.n
    S = np.zeros((2 * n, 2 * n))
    S[:n, :n] = ms.cov
    S[n:, n:] = ms.cov
    return MomentSummary(np.concatenate([ms.mean, ms.mean]), S, ms.convention)


def shift_moments(ms: MomentSummary, c) -> MomentSummary:
    c = np.asarray(c, dtype=float)
    if c.shape != (ms.n,):
        raise DimensionMismatch(f"shift of shape {c.shape} against dimension {ms.n}")
    if not np.all(np.isfinite(c)):
        raise NonFinite("shift has non-finite entries")
    return MomentSummary(ms.mean + c, ms.cov, ms.convention)


def scale_moments(ms: MomentSummary, A) -> MomentSummary:
    """Moments of ``A X``: ``(A m, A Sigma A^T)``."""
    A = np.asarray(A, dtype=float)
    if A.shape != (ms.n, ms.n):
        raise DimensionMismatch(f"matrix of shape {A.shape} against dimension {ms.n}")
    if not np.all(np.isfinite(A)):
        raise NonFinite("matrix has non-finite entries")
    return MomentSummary(A @ ms.mean, A @ ms.cov @ A.T, ms.convention)


def weighted_moments(data: DataSet | np.ndarray, weights) -> MomentSummary:
    """Moments of the discrete measure putting mass ``weights[i]`` on row i.

    The covariance is the exact (population-style) covariance of that
    measure.  Degenerate results such as a point mass are allowed here.
    """
    X = data.values if isinstance(data, DataSet) else np.asarray(data, dtype=float)
    w = np.asarray(weights, dtype=float)
    if w.shape != (X.shape[0],):
        raise DimensionMismatch(f"{w.size} weights for {X.shape[0]} rows")
    if np.any(w < 0.0) or abs(w.sum() - 1.0) > 1e-12:
        raise WeightSum(f"weights must be non-negative and sum to 1 (sum={w.sum()!r})")
    m = w @ X
    D = X - m
    S = (D * w[:, None]).T @ D
    return MomentSummary(m, S, Convention.POPULATION)


def read_csv(path: str | Path) -> DataSet:
    """Header row, then one observation per row, comma separated."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise McvError(f"{path}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r]
    try:
        values = np.array([[float(x) for x in r] for r in body], dtype=float)
    except ValueError as exc:
        raise McvError(f"{path}: {exc}") from None
    if values.ndim != 2 or values.shape[1] != len(header):
        raise DimensionMismatch(f"{path}: ragged rows or header/column count mismatch")
    return DataSet(values, tuple(h.strip() for h in header))


def as_dataset(values: Sequence | np.ndarray | DataSet) -> DataSet:
    return values if isinstance(values, DataSet) else DataSet(np.asarray(values, dtype=float))
