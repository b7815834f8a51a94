"""Multivariate coefficients of variation and Gini-based dispersion indices."""

from .errors import McvError
from .metrics import (
    MetricReport,
    compute_metric,
    g2,
    g2_pairwise,
    g_inf,
    gamma_az,
    gamma_reyment,
    gamma_vanvalen,
    gamma_vn,
    gini_univariate,
    gq,
    t_coefficient,
)
from .moments import Convention, DataSet, MomentSummary, estimate_moments, read_csv
from .whitening import WhiteningKind, whiten

__version__ = "0.1.0"

__all__ = [
    "McvError",
    "MetricReport",
    "compute_metric",
    "g2",
    "g2_pairwise",
    "g_inf",
    "gamma_az",
    "gamma_reyment",
    "gamma_vanvalen",
    "gamma_vn",
    "gini_univariate",
    "gq",
    "t_coefficient",
    "Convention",
    "DataSet",
    "MomentSummary",
    "estimate_moments",
    "read_csv",
    "WhiteningKind",
    "whiten",
]
