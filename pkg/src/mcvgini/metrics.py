"""Dispersion coefficients: univariate CV and Gini, the classical MCVs, and
the Gini-based family G_2, G_q, G_inf and the T coefficient.

Moment-level metrics take a :class:`MomentSummary`.  Metrics that need
the whole distribution (pairwise sums) take a :class:`DataSet` and use
its plug-in moments, population convention unless told otherwise.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import McvError, ZeroMean, ZeroMeanForm, ZeroWhitenedMean
from .moments import Convention, DataSet, MomentSummary, estimate_moments, weighted_moments
from .spdlinalg import cholesky, spd_inverse
from .whitening import cholesky_whitening, zca_cor_whitening

log = logging.getLogger(__name__)

__all__ = [
    "MetricReport",
    "cv_univariate",
    "gini_univariate",
    "gamma_vn",
    "gamma_reyment",
    "gamma_vanvalen",
    "gamma_az",
    "g2",
    "g2_pairwise",
    "gq",
    "g_inf",
    "t_coefficient",
    "corrected_metrics",
    "influence_g2",
    "influence_fd",
    "MOMENT_METRICS",
    "DATA_METRICS",
    "compute_metric",
]

DEFAULT_BLOCK = 256


@dataclass(frozen=True)
class MetricReport:
    metric_id: str
    value: float
    n: int
    convention: str = Convention.ANALYTIC.value
    q: float | None = None
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0.0):
            raise McvError(f"{self.metric_id}: value {self.value!r} is not a finite non-negative number")

    def to_dict(self) -> dict:
        d = {"metric_id": self.metric_id, "value": self.value, "n": self.n, "convention": self.convention}
        if self.q is not None:
            d["q"] = self.q
        if self.flags:
            d["flags"] = list(self.flags)
        return d


def _conv(ms: MomentSummary) -> str:
    return ms.convention.value


# -- univariate ---------------------------------------------------------------


def cv_univariate(m: float, sigma: float) -> float:
    if m == 0.0:
        raise ZeroMean("coefficient of variation needs a non-zero mean")
    if sigma < 0.0:
        raise McvError("standard deviation must be non-negative")
    return sigma / abs(m)


def gini_univariate(values) -> MetricReport:
    """Plug-in Gini index ``E|X - Y| / (2 |m|)`` in O(N log N).

    Uses the identity ``sum_{i,j} |x_i - x_j| = 2 sum_k (2k - N - 1) x_(k)``
    on the sorted sample.  Negative observations are accepted; the report
    is then flagged because the [0, 1] reading no longer applies.
    """
    x = np.sort(np.asarray(values, dtype=float).ravel())
    N = x.size
    if N == 0:
        raise McvError("empty sample")
    m = x.mean()
    if m == 0.0:
        raise ZeroMean("Gini index needs a non-zero mean")
    ranks = 2.0 * np.arange(1, N + 1) - N - 1
    mean_abs_diff = 2.0 * float(ranks @ x) / (N * N)
    flags = ("outside_unit_interval",) if x[0] < 0.0 else ()
    return MetricReport("gini", max(mean_abs_diff, 0.0) / (2.0 * abs(m)), 1, Convention.POPULATION.value, flags=flags)


# -- classical multivariate coefficients --------------------------------------


def _mean_form(ms: MomentSummary) -> float:
    Q = float(ms.mean @ spd_inverse(ms.cov) @ ms.mean)
    if not Q > 1e-14:
        raise ZeroMeanForm(f"m^T Sigma^-1 m = {Q:.3g} vanishes")
    return Q


def _mean_norm2(ms: MomentSummary) -> float:
    mm = float(ms.mean @ ms.mean)
    if mm == 0.0:
        raise ZeroMean("mean vector is zero")
    return mm


def gamma_vn(ms: MomentSummary) -> MetricReport:
    """Voinov-Nikulin coefficient ``1 / sqrt(m^T Sigma^-1 m)``."""
    return MetricReport("gamma_vn", 1.0 / math.sqrt(_mean_form(ms)), ms.n, _conv(ms))


def gamma_reyment(ms: MomentSummary) -> MetricReport:
    """Reyment coefficient ``sqrt(det(Sigma)^(1/n) / m^T m)``; det in log space."""
    mm = _mean_norm2(ms)
    log_det = cholesky(ms.cov).log_det
    return MetricReport("gamma_r", math.sqrt(math.exp(log_det / ms.n) / mm), ms.n, _conv(ms))


def gamma_vanvalen(ms: MomentSummary) -> MetricReport:
    return MetricReport("gamma_vv", math.sqrt(float(np.trace(ms.cov)) / _mean_norm2(ms)), ms.n, _conv(ms))


def gamma_az(ms: MomentSummary) -> MetricReport:
    """Albert-Zhang coefficient ``sqrt(m^T Sigma m) / (m^T m)``."""
    mm = _mean_norm2(ms)
    return MetricReport("gamma_az", math.sqrt(float(ms.mean @ ms.cov @ ms.mean)) / mm, ms.n, _conv(ms))


def g2(ms: MomentSummary) -> MetricReport:
    """Squared Gini index in closed form, ``sqrt(n / m^T Sigma^-1 m)``."""
    return MetricReport("g2", math.sqrt(ms.n / _mean_form(ms)), ms.n, _conv(ms))


def corrected_metrics(ms: MomentSummary) -> tuple[MetricReport, MetricReport]:
    """``sqrt(n)`` times the Reyment and Albert-Zhang coefficients."""
    k = math.sqrt(ms.n)
    r = gamma_reyment(ms)
    az = gamma_az(ms)
    return (
        MetricReport("sqrtn_gamma_r", k * r.value, ms.n, _conv(ms)),
        MetricReport("sqrtn_gamma_az", k * az.value, ms.n, _conv(ms)),
    )


def sqrtn_gamma_r(ms: MomentSummary) -> MetricReport:
    return corrected_metrics(ms)[0]


def sqrtn_gamma_az(ms: MomentSummary) -> MetricReport:
    return corrected_metrics(ms)[1]


# -- pairwise kernels ---------------------------------------------------------


def _pairwise_sum(Y: np.ndarray, reduce: Callable[[np.ndarray], float], block: int) -> float:
    """Sum ``reduce`` over row blocks of all pairwise differences ``Y_i - Y_j``.

    Block partial sums are combined with ``math.fsum`` in block order, so
    the result only depends on ``block``.
    """
    if block < 1:
        raise McvError("block size must be positive")
    partials = []
    for start in range(0, Y.shape[0], block):
        D = Y[start : start + block, None, :] - Y[None, :, :]
        partials.append(reduce(D))
    return math.fsum(partials)


def _plugin(data: DataSet, convention) -> MomentSummary:
    return estimate_moments(data, convention)


def g2_pairwise(
    data: DataSet,
    convention: Convention | str = Convention.POPULATION,
    method: str = "pairwise",
    block: int = DEFAULT_BLOCK,
) -> MetricReport:
    """G_2 from its pairwise definition on the empirical measure.

    ``method="pairwise"`` is the literal O(N^2 n) double sum of squared
    Mahalanobis distances; ``method="trace"`` uses the one-pass identity
    ``(1/N^2) sum_ij d_ij^2 = 2 tr(Sigma^-1 S_pop)``.
    """
    ms = _plugin(data, convention)
    Q = _mean_form(ms)
    N = data.N
    if method == "pairwise":
        Y = data.values @ cholesky_whitening(ms).matrix.T
        total = _pairwise_sum(Y, lambda D: float(np.sum(D * D)), block) / (N * N)
    elif method == "trace":
        D = data.values - data.values.mean(axis=0)
        S_pop = D.T @ D / N
        total = 2.0 * float(np.sum(spd_inverse(ms.cov) * S_pop))
    else:
        raise McvError(f"unknown method {method!r}")
    return MetricReport("g2_pairwise", math.sqrt(total / (2.0 * Q)), data.n, _conv(ms))


def gq(
    data: DataSet,
    q: float,
    convention: Convention | str = Convention.POPULATION,
    block: int = DEFAULT_BLOCK,
) -> MetricReport:
    """L_q Gini coefficient on ZCA-cor whitened pairwise differences.

    ``(sum_ij ||W(x_i - x_j)||_q^q / (2 N^2 ||W m||_q^q))^(1/q)``.
    Differences are rescaled by the largest whitened range before taking
    powers so large ``q`` cannot overflow.
    """
    q = float(q)
    if not q >= 1.0:
        raise McvError(f"q must be >= 1, got {q}")
    ms = _plugin(data, convention)
    W = zca_cor_whitening(ms)
    mstar = np.abs(W.whitened_mean())
    mmax = float(mstar.max())
    if mmax <= 1e-14:
        raise ZeroWhitenedMean("whitened mean is zero")
    Y = data.values @ W.matrix.T
    s = float(np.max(Y.max(axis=0) - Y.min(axis=0)))
    Ys = Y / s
    total = _pairwise_sum(Ys, lambda D: float(np.sum(np.abs(D) ** q)), block) / data.N**2
    denom = 2.0 * float(np.sum((mstar / mmax) ** q))
    value = (s / mmax) * (total / denom) ** (1.0 / q)
    return MetricReport("gq", value, data.n, _conv(ms), q=q)


def g_inf(data: DataSet, convention: Convention | str = Convention.POPULATION) -> MetricReport:
    """Limit of G_q as q grows: largest whitened range over ``||W m||_inf``."""
    ms = _plugin(data, convention)
    W = zca_cor_whitening(ms)
    mstar = np.abs(W.whitened_mean())
    if mstar.max() <= 1e-14:
        raise ZeroWhitenedMean("whitened mean is zero")
    Y = data.values @ W.matrix.T
    return MetricReport("g_inf", float(np.max(Y.max(axis=0) - Y.min(axis=0)) / mstar.max()), data.n, _conv(ms))


def t_coefficient(
    data: DataSet,
    convention: Convention | str = Convention.POPULATION,
    block: int = DEFAULT_BLOCK,
) -> MetricReport:
    """Mean Mahalanobis distance between pairs, ``sqrt(1/(2Q)) E sqrt(d^2)``."""
    ms = _plugin(data, convention)
    Q = _mean_form(ms)
    Y = data.values @ cholesky_whitening(ms).matrix.T
    total = _pairwise_sum(Y, lambda D: float(np.sum(np.sqrt(np.sum(D * D, axis=-1)))), block)
    return MetricReport("t_coeff", math.sqrt(1.0 / (2.0 * Q)) * total / data.N**2, data.n, _conv(ms))


# -- influence function -------------------------------------------------------


def influence_g2(x, ms: MomentSummary) -> float:
    """Closed-form influence function of G_2 at ``x``:

    ``sqrt(n) / (2 Q^{3/2}) * (Q^2 - 2 m^T Sigma^-1 (x - m))`` with
    ``Q = m^T Sigma^-1 m``.  Evaluated verbatim; see :func:`influence_fd`
    for a numerical derivative of the functional itself.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (ms.n,):
        raise McvError(f"point of shape {x.shape} against dimension {ms.n}")
    Sinv = spd_inverse(ms.cov)
    Q = _mean_form(ms)
    lin = float(ms.mean @ Sinv @ (x - ms.mean))
    return math.sqrt(ms.n) / (2.0 * Q**1.5) * (Q * Q - 2.0 * lin)


@dataclass(frozen=True)
class FiniteDifference:
    eps: float
    estimate: float
    half_eps_estimate: float

    @property
    def relative_change(self) -> float:
        return abs(self.estimate - self.half_eps_estimate) / abs(self.half_eps_estimate)


def _g2_contaminated(X: np.ndarray, x: np.ndarray, eps: float) -> float:
    N = X.shape[0]
    rows = np.vstack([X, x[None, :]])
    w = np.full(N + 1, (1.0 - eps) / N)
    w[-1] = eps
    w /= math.fsum(w)
    return g2(weighted_moments(rows, w)).value


def influence_fd(x, data: DataSet, eps: float = 1e-4) -> FiniteDifference:
    """Forward difference ``(G_2(mu_eps) - G_2(mu)) / eps`` at ``eps`` and ``eps/2``.

    ``mu_eps = (1 - eps) mu + eps delta_x`` with ``mu`` the empirical
    measure of ``data``.
    """
    if not 0.0 < eps < 0.1:
        raise McvError(f"eps must lie in (0, 0.1), got {eps}")
    x = np.asarray(x, dtype=float)
    if x.shape != (data.n,):
        raise McvError(f"point of shape {x.shape} against dimension {data.n}")
    X = data.values
    base = g2(weighted_moments(X, np.full(data.N, 1.0 / data.N))).value
    est = [(_g2_contaminated(X, x, h) - base) / h for h in (eps, eps / 2.0)]
    fd = FiniteDifference(eps, est[0], est[1])
    log.info("influence_fd eps=%g: %.10g, eps/2: %.10g (rel. change %.3g)", eps, *est, fd.relative_change)
    return fd


# -- registry -----------------------------------------------------------------

MOMENT_METRICS: dict[str, Callable[[MomentSummary], MetricReport]] = {
    "gamma_vn": gamma_vn,
    "gamma_r": gamma_reyment,
    "gamma_vv": gamma_vanvalen,
    "gamma_az": gamma_az,
    "g2": g2,
    "sqrtn_gamma_r": sqrtn_gamma_r,
    "sqrtn_gamma_az": sqrtn_gamma_az,
}

DATA_METRICS: dict[str, Callable[..., MetricReport]] = {
    "g2_pairwise": g2_pairwise,
    "t_coeff": t_coefficient,
    "g_inf": g_inf,
    "gq": gq,
}


def compute_metric(metric_id: str, source, convention=Convention.POPULATION, q: float | None = None) -> MetricReport:
    """Evaluate a registered metric on a DataSet or a MomentSummary."""
    if metric_id in MOMENT_METRICS:
        ms = source if isinstance(source, MomentSummary) else estimate_moments(source, convention)
        return MOMENT_METRICS[metric_id](ms)
    if metric_id in DATA_METRICS:
        if not isinstance(source, DataSet):
            raise McvError(f"{metric_id} needs observations, not a moment summary")
        if metric_id == "gq":
            if q is None:
                raise McvError("gq needs a q value")
            return gq(source, q, convention)
        return DATA_METRICS[metric_id](source, convention)
    raise McvError(f"unknown metric {metric_id!r}")
