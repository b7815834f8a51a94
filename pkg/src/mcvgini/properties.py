"""Mechanical checks of the six MCV axioms and the golden counterexamples.

Each ``check_*`` function returns a :class:`PropertyVerdict`.  Moment-level
metrics are checked on analytic :class:`MomentSummary` instances, where the
arguments are exact.  Metrics without a moment collapse (``t_coeff`` and
the G_q family) are checked on small constructed datasets instead.

A "holds" verdict coming out of a randomized search means no violation was
found in the recorded number of trials; it is not a proof.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from . import metrics as M
from .errors import InvalidDirection, McvError, NonConvergentSpec, ZeroCV
from .moments import (
    DataSet,
    MomentSummary,
    coupling_moments,
    estimate_moments,
    scale_moments,
    shift_moments,
)
from .spdlinalg import spd_inverse

__all__ = [
    "Verdict",
    "PROPERTIES",
    "MATRIX_METRICS",
    "PropertyVerdict",
    "SequenceSpec",
    "harmonic_aggregator",
    "evaluate",
    "check_coherence",
    "check_scale_invariance",
    "check_suf",
    "check_rising_tide",
    "check_cloning",
    "check_dimension_stability",
    "verdict_matrix",
    "EXPECTED_MATRIX",
    "matrix_mismatches",
    "counterexample_suite",
    "golden_values",
    "format_table",
    "check_property",
    "default_sequences",
    "two_point",
    "product_dataset",
    "independent_coupling",
]

DEFAULT_SEED = 12345
PROPERTIES = ("coherence", "scale_invariance", "suf", "rising_tide", "cloning", "dimension_stability")
MATRIX_METRICS = ("gamma_vn", "gamma_r", "gamma_vv", "gamma_az", "g2", "sqrtn_gamma_r", "sqrtn_gamma_az", "t_coeff")

COHERENCE_TOL = 1e-12
SCALE_TOL = 1e-8
SUF_TOL = 1e-10
RISING_TOL = 1e-12
CLONING_TOL = 1e-12


class Verdict(str, Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PropertyVerdict:
    property_id: str
    metric_id: str
    verdict: Verdict
    witness: dict = field(default_factory=dict)
    tolerance: float = 1e-12
    note: str = ""
    expected: Verdict | None = None

    def __post_init__(self):
        if self.tolerance <= 0.0:
            raise McvError("tolerance must be positive")
        if self.verdict is Verdict.VIOLATED and not {"before", "after"} <= self.witness.keys():
            raise McvError("a violated verdict needs a witness with both metric values")

    @property
    def matches(self) -> bool | None:
        return None if self.expected is None else self.verdict is self.expected

    def to_dict(self) -> dict:
        d = {
            "property_id": self.property_id,
            "metric_id": self.metric_id,
            "verdict": self.verdict.value,
            "tolerance": self.tolerance,
            "witness": _jsonable(self.witness),
        }
        if self.note:
            d["note"] = self.note
        if self.expected is not None:
            d["expected"] = self.expected.value
        return d


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, MomentSummary):
        return {"mean": obj.mean.tolist(), "cov": obj.cov.tolist()}
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# -- metric evaluation --------------------------------------------------------


def _is_data_metric(metric_id: str) -> bool:
    return metric_id in M.DATA_METRICS or metric_id.startswith("gq")


def _parse_q(metric_id: str) -> float | None:
    if metric_id.startswith("gq"):
        try:
            return float(metric_id.split(":", 1)[1])
        except (IndexError, ValueError):
            raise McvError(f"write G_q metrics as 'gq:<q>', got {metric_id!r}") from None
    return None


def evaluate(metric_id: str, source: MomentSummary | DataSet) -> float:
    """Value of a registered metric; ``gq:<q>`` selects a member of the G_q family."""
    if _is_data_metric(metric_id):
        if not isinstance(source, DataSet):
            raise McvError(f"{metric_id} is evaluated on observations")
        q = _parse_q(metric_id)
        if q is not None:
            return M.gq(source, q).value
        return M.DATA_METRICS[metric_id](source).value
    if metric_id not in M.MOMENT_METRICS:
        raise McvError(f"unknown metric {metric_id!r}")
    ms = source if isinstance(source, MomentSummary) else estimate_moments(source)
    return M.MOMENT_METRICS[metric_id](ms).value


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


# -- constructed instances ----------------------------------------------------


def two_point(m: float, sigma: float) -> DataSet:
    """Symmetric two-point sample with population mean m and variance sigma^2."""
    return DataSet(np.array([[m - sigma], [m + sigma]]))


def product_dataset(supports: Sequence[Sequence[float]]) -> DataSet:
    """Empirical product measure: every combination of the component supports.

    Components are exactly independent (hence uncorrelated) under the
    uniform weights of the grid.
    """
    return DataSet(np.array(list(itertools.product(*supports)), dtype=float))


def independent_coupling(data: DataSet) -> DataSet:
    """Rows ``(x_i, x_j)`` for all i, j: the product of the empirical measure with itself."""
    X = data.values
    N = data.N
    return DataSet(np.hstack([np.repeat(X, N, axis=0), np.tile(X, (N, 1))]))


def _random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    A = rng.standard_normal((n, n))
    return A @ A.T + n * 0.1 * np.eye(n)


def _random_summaries(seed: int, count: int = 4, dims: Iterable[int] = (2, 3, 4)) -> list[MomentSummary]:
    rng = np.random.default_rng(seed)
    out = []
    for n in dims:
        for _ in range(count):
            out.append(MomentSummary(rng.uniform(0.5, 3.0, n) * rng.choice([-1.0, 1.0], n), _random_spd(rng, n)))
    return out


def _base_dataset(seed: int, N: int = 40, n: int = 3) -> DataSet:
    rng = np.random.default_rng(seed)
    L = np.tril(rng.standard_normal((n, n))) + 2.0 * np.eye(n)
    return DataSet(rng.standard_normal((N, n)) @ L.T + rng.uniform(1.0, 3.0, n))


# worked instances
SIGMA_RISING = np.array([[1.0, 1.0], [1.0, 2.0]])
MS_RISING = MomentSummary([3.0, 3.0], SIGMA_RISING)
C_RISING = np.array([1.0, -2.0])
MS_AZ_RISING = MomentSummary([1.0, 0.1], np.diag([1.0, 100.0]))
# c = (0, 0.99) is printed alongside a shifted mean of (1, 1); reaching (1, 1) needs (0, 0.9)
C_AZ_RISING = np.array([0.0, 0.9])
SUF_PAIRS = (
    (MomentSummary([1.0, 1.0], np.eye(2)), MomentSummary([2.0, 1.0], np.diag([4.0, 1.0]))),
    (MomentSummary([2.0, 1.0], np.eye(2)), MomentSummary([4.0, 1.0], np.diag([4.0, 1.0]))),
)


# -- coherence ----------------------------------------------------------------

COHERENCE_GRID = tuple(itertools.product((-2.0, -0.5, 0.5, 2.0), (0.1, 1.0, 3.0)))


def check_coherence(metric_id: str) -> PropertyVerdict:
    """Compare the metric with sigma/|m| on one-dimensional instances.

    Data-level metrics are evaluated on symmetric two-point samples for
    each (m, sigma) of the grid and on the skewed sample {0, 0, 3}.
    """
    cases: list[tuple[str, MomentSummary | DataSet, float]] = []
    if _is_data_metric(metric_id):
        for m, s in COHERENCE_GRID:
            cases.append((f"two_point(m={m}, sigma={s})", two_point(m, s), s / abs(m)))
        skew = DataSet(np.array([[0.0], [0.0], [3.0]]))
        cases.append(("sample {0, 0, 3}", skew, math.sqrt(2.0)))
    else:
        for m, s in COHERENCE_GRID:
            cases.append((f"m={m}, sigma={s}", MomentSummary([m], [[s * s]]), s / abs(m)))
    worst = None
    for label, src, cv in cases:
        value = evaluate(metric_id, src)
        err = _rel(value, cv)
        if worst is None or err > worst[0]:
            worst = (err, label, value, cv)
    err, label, value, cv = worst
    verdict = Verdict.HOLDS if err <= COHERENCE_TOL else Verdict.VIOLATED
    return PropertyVerdict(
        "coherence",
        metric_id,
        verdict,
        {"instance": label, "before": cv, "after": value, "relative_error": err, "cases": len(cases)},
        COHERENCE_TOL,
        "before = sigma/|m|, after = metric value",
    )


# -- scale invariance ---------------------------------------------------------


def _random_invertible(rng: np.random.Generator, n: int, max_cond: float = 1e4) -> np.ndarray:
    while True:
        A = rng.standard_normal((n, n))
        if np.linalg.cond(A) <= max_cond:
            return A


def check_scale_invariance(
    metric_id: str,
    source: MomentSummary | DataSet | None = None,
    trials: int = 20,
    seed: int = DEFAULT_SEED,
    matrices: Sequence | None = None,
) -> PropertyVerdict:
    """``metric(A X) == metric(X)`` for random well-conditioned invertible A.

    Extra matrices passed through ``matrices`` are tried first.
    """
    if source is None:
        source = _base_dataset(seed) if _is_data_metric(metric_id) else _random_summaries(seed, 1, (3,))[0]
    n = source.n
    rng = np.random.default_rng(seed)
    As = [np.asarray(A, dtype=float) for A in (matrices or ())]
    As += [_random_invertible(rng, n) for _ in range(trials)]
    before = evaluate(metric_id, source)
    worst = None
    for A in As:
        moved = source.transformed(A) if isinstance(source, DataSet) else scale_moments(source, A)
        after = evaluate(metric_id, moved)
        err = _rel(after, before)
        if worst is None or err > worst[0]:
            worst = (err, A, after)
    err, A, after = worst
    verdict = Verdict.HOLDS if err <= SCALE_TOL else Verdict.VIOLATED
    note = f"no violation found in {len(As)} trials" if verdict is Verdict.HOLDS else ""
    return PropertyVerdict(
        "scale_invariance",
        metric_id,
        verdict,
        {"A": A, "before": before, "after": after, "relative_change": err, "seed": seed},
        SCALE_TOL,
        note,
    )


# -- splitting uncorrelated features ------------------------------------------


def harmonic_aggregator(cvs) -> float:
    """``sqrt(n / sum y_i^-2)``: the aggregator G_2 applies to uncorrelated components."""
    y = np.asarray(cvs, dtype=float).ravel()
    if y.size == 0 or np.any(y <= 0.0):
        raise ZeroCV("component CVs must be positive")
    return math.sqrt(y.size / float(np.sum(y**-2.0)))


SUF_AGGREGATORS: dict[str, Callable[[np.ndarray], float]] = {
    "g2": harmonic_aggregator,
    "gamma_vn": lambda y: harmonic_aggregator(y) / math.sqrt(len(y)),
}


def _diag_cvs(ms: MomentSummary) -> np.ndarray:
    return np.sqrt(ms.var_diag) / np.abs(ms.mean)


def _same_cv_variant(ms: MomentSummary, a: np.ndarray) -> MomentSummary:
    # X_i -> a_i X_i keeps every component CV
    return MomentSummary(ms.mean * a, np.diag(ms.var_diag * a * a))


def _default_diag_summaries(seed: int, count: int = 6) -> list[MomentSummary]:
    rng = np.random.default_rng(seed)
    out = [pair[0] for pair in SUF_PAIRS]
    for _ in range(count):
        n = int(rng.integers(2, 6))
        out.append(MomentSummary(rng.uniform(0.5, 3.0, n) * rng.choice([-1.0, 1.0], n), np.diag(rng.uniform(0.2, 4.0, n))))
    return out


def check_suf(
    metric_id: str,
    diag_ms: Sequence[MomentSummary] | MomentSummary | None = None,
    seed: int = DEFAULT_SEED,
) -> PropertyVerdict:
    """Is the metric a function of the component CVs on uncorrelated vectors?

    Two routes, both must pass: where a closed-form aggregator is known
    (harmonic mean for G_2) the metric is compared with it; for every
    metric, pairs of instances with identical CV tuples must give
    identical values.  Data-level metrics use product measures of
    two-point versus three-point components with equal means and
    variances.
    """
    if _is_data_metric(metric_id):
        return _check_suf_data(metric_id)
    if diag_ms is None:
        diag_ms = _default_diag_summaries(seed)
    elif isinstance(diag_ms, MomentSummary):
        diag_ms = [diag_ms]
    for ms in diag_ms:
        if np.any(ms.cov != np.diag(ms.var_diag)):
            raise McvError("SUF instances need a diagonal covariance")
    rng = np.random.default_rng(seed)
    pairs: list[tuple[MomentSummary, MomentSummary]] = list(SUF_PAIRS)
    for ms in diag_ms:
        pairs.append((ms, _same_cv_variant(ms, rng.uniform(0.3, 3.0, ms.n))))
    agg = SUF_AGGREGATORS.get(metric_id)
    worst = None
    for ms in diag_ms:
        if agg is None:
            break
        value = evaluate(metric_id, ms)
        target = agg(_diag_cvs(ms))
        err = _rel(value, target)
        if worst is None or err > worst[0]:
            worst = (err, "aggregator", ms, value, target)
    for x, y in pairs:
        vx, vy = evaluate(metric_id, x), evaluate(metric_id, y)
        err = _rel(vy, vx)
        if worst is None or err > worst[0]:
            worst = (err, "same_cv_pair", (x, y), vx, vy)
    err, route, inst, before, after = worst
    verdict = Verdict.HOLDS if err <= SUF_TOL else Verdict.VIOLATED
    witness = {"route": route, "before": before, "after": after, "relative_error": err}
    if route == "same_cv_pair":
        witness.update(first=inst[0], second=inst[1], cvs=_diag_cvs(inst[0]))
    else:
        witness.update(instance=inst, cvs=_diag_cvs(inst))
    return PropertyVerdict("suf", metric_id, verdict, witness, SUF_TOL)


def _check_suf_data(metric_id: str) -> PropertyVerdict:
    means, sigmas = (2.0, 1.0, 3.0), (1.0, 0.5, 2.0)
    h = math.sqrt(1.5)
    two = product_dataset([(m - s, m + s) for m, s in zip(means, sigmas)])
    three = product_dataset([(m - h * s, m, m + h * s) for m, s in zip(means, sigmas)])
    before, after = evaluate(metric_id, two), evaluate(metric_id, three)
    err = _rel(after, before)
    verdict = Verdict.HOLDS if err <= SUF_TOL else Verdict.VIOLATED
    return PropertyVerdict(
        "suf",
        metric_id,
        verdict,
        {"route": "same_cv_pair", "means": means, "sigmas": sigmas, "before": before, "after": after,
         "relative_error": err, "first": "two-point components", "second": "three-point components"},
        SUF_TOL,
    )


# -- rising tide --------------------------------------------------------------


def _direction(source: MomentSummary | DataSet, c: np.ndarray) -> float:
    ms = source if isinstance(source, MomentSummary) else estimate_moments(source)
    return float(c @ spd_inverse(ms.cov) @ ms.mean)


def _shift(source, c):
    return source.shifted(c) if isinstance(source, DataSet) else shift_moments(source, c)


def check_rising_tide(
    metric_id: str,
    source: MomentSummary | DataSet | None = None,
    c=None,
    trials: int = 20,
    seed: int = DEFAULT_SEED,
) -> PropertyVerdict:
    """``metric(X + c) <= metric(X)`` whenever ``c^T Sigma^-1 m >= 0``.

    With ``c`` given, that single shift is checked (and rejected with
    :class:`InvalidDirection` if it points the wrong way).  Otherwise
    ``trials`` random shifts are drawn and reflected into the admissible
    half-space.
    """
    if source is None:
        source = _base_dataset(seed) if _is_data_metric(metric_id) else _random_summaries(seed, 1, (3,))[0]
    if c is not None:
        shifts = [np.asarray(c, dtype=float)]
        if _direction(source, shifts[0]) < 0.0:
            raise InvalidDirection(f"c^T Sigma^-1 m = {_direction(source, shifts[0]):.6g} < 0")
    else:
        rng = np.random.default_rng(seed)
        ms = source if isinstance(source, MomentSummary) else estimate_moments(source)
        scale = float(np.linalg.norm(ms.mean)) / math.sqrt(ms.n)
        shifts = []
        for _ in range(trials):
            cc = rng.standard_normal(ms.n) * scale * rng.uniform(0.1, 3.0)
            shifts.append(-cc if _direction(source, cc) < 0.0 else cc)
    before = evaluate(metric_id, source)
    worst = None
    for cc in shifts:
        after = evaluate(metric_id, _shift(source, cc))
        excess = after - before
        if worst is None or excess > worst[0]:
            worst = (excess, cc, after)
    excess, cc, after = worst
    verdict = Verdict.HOLDS if excess <= RISING_TOL else Verdict.VIOLATED
    note = f"no violation found in {len(shifts)} shifts" if verdict is Verdict.HOLDS and c is None else ""
    return PropertyVerdict(
        "rising_tide",
        metric_id,
        verdict,
        {"c": cc, "direction": _direction(source, cc), "before": before, "after": after, "source": source
         if isinstance(source, MomentSummary) else "dataset"},
        RISING_TOL,
        note,
    )


# -- cloning ------------------------------------------------------------------


def check_cloning(metric_id: str, source: MomentSummary | DataSet | None = None, seed: int = DEFAULT_SEED) -> PropertyVerdict:
    """``metric((X, X)) == metric(X)`` for the independent coupling."""
    if source is None:
        source = _base_dataset(seed, N=20) if _is_data_metric(metric_id) else MS_RISING
    if isinstance(source, DataSet):
        if not _is_data_metric(metric_id):
            source = estimate_moments(source)
            coupled = coupling_moments(source)
        else:
            coupled = independent_coupling(source)
    else:
        coupled = coupling_moments(source)
    before, after = evaluate(metric_id, source), evaluate(metric_id, coupled)
    ratio = after / before
    verdict = Verdict.HOLDS if abs(ratio - 1.0) <= CLONING_TOL else Verdict.VIOLATED
    return PropertyVerdict("cloning", metric_id, verdict, {"before": before, "after": after, "ratio": ratio}, CLONING_TOL)


# -- dimension stability ------------------------------------------------------


@dataclass(frozen=True)
class SequenceSpec:
    """Nested independent marginals: component i has mean ``mean(i)`` and variance ``var(i)``.

    Indices start at 1.  ``limit`` is the limiting marginal CV; when left
    out it is read off far along the sequence.
    """

    kind: str
    mean: Callable[[int], float]
    var: Callable[[int], float]
    n_max: int = 400
    limit: float | None = None

    @classmethod
    def iid(cls, m: float, var: float, n_max: int = 400) -> "SequenceSpec":
        return cls("iid", lambda i: m, lambda i: var, n_max, math.sqrt(var) / abs(m))

    def marginal_cv(self, i: int) -> float:
        m, v = self.mean(i), self.var(i)
        if m == 0.0 or v <= 0.0:
            raise NonConvergentSpec(f"component {i}: mean {m}, variance {v}")
        return math.sqrt(v) / abs(m)

    def limiting_cv(self) -> float:
        if self.limit is not None:
            return self.limit
        far, farther = self.marginal_cv(10**6), self.marginal_cv(10**9)
        if abs(far - farther) > 1e-3 * max(abs(farther), 1e-12):
            raise NonConvergentSpec("marginal CVs do not settle")
        return farther

    def summary(self, n: int) -> MomentSummary:
        idx = range(1, n + 1)
        for i in idx:
            self.marginal_cv(i)
        return MomentSummary([self.mean(i) for i in idx], np.diag([self.var(i) for i in idx]))


def _trajectory_dims(n_max: int, points: int = 40) -> list[int]:
    step = max(1, n_max // points)
    dims = set(range(1, n_max + 1, step)) | {max(1, n_max // 2), n_max}
    return sorted(dims)


def check_dimension_stability(metric_id: str, spec: SequenceSpec | None = None) -> PropertyVerdict:
    """Does the metric approach the limiting marginal CV along nested summaries?

    Holds iff ``|v(n_max) - L| <= max(0.02, 5 |v(n_max) - v(n_max / 2)|)``.
    The trajectory is sampled on about forty dimensions up to ``n_max``.
    """
    spec = spec or SequenceSpec.iid(2.0, 2.0)
    if _is_data_metric(metric_id):
        return PropertyVerdict("dimension_stability", metric_id, Verdict.INCONCLUSIVE, {}, 0.02,
                               "no moment collapse; sequence check not available for data-level metrics")
    L = spec.limiting_cv()
    dims = _trajectory_dims(spec.n_max)
    values = {n: evaluate(metric_id, spec.summary(n)) for n in dims}
    last, half = values[spec.n_max], values[max(1, spec.n_max // 2)]
    tol = max(0.02, 5.0 * abs(last - half))
    verdict = Verdict.HOLDS if abs(last - L) <= tol else Verdict.VIOLATED
    return PropertyVerdict(
        "dimension_stability",
        metric_id,
        verdict,
        {"kind": spec.kind, "limit": L, "before": L, "after": last, "trajectory": [[n, values[n]] for n in dims]},
        tol,
        "before = limiting marginal CV, after = value at n_max",
    )


def default_sequences(n_max: int = 400) -> list[SequenceSpec]:
    """An iid sequence plus one whose means and variances drift toward CV sqrt(2)/2."""
    return [
        SequenceSpec.iid(2.0, 2.0, n_max),
        SequenceSpec("custom_marginals", lambda i: 2.0 + 1.0 / i, lambda i: 2.0 * (1.0 + 1.0 / i), n_max,
                     math.sqrt(2.0) / 2.0),
    ]


# -- verdict matrix -----------------------------------------------------------

H, V = Verdict.HOLDS, Verdict.VIOLATED

#: (metric, property) -> (expected verdict, origin); origin is "claimed"
#: for outcomes asserted as known results and "derived" for ones that
#: follow by direct algebra (sqrt(n) corrections commute with coherence
#: and turn a 1/sqrt(2) cloning ratio into 1).
EXPECTED_MATRIX: dict[tuple[str, str], tuple[Verdict, str]] = {}
for _p in PROPERTIES:
    EXPECTED_MATRIX["g2", _p] = (H, "claimed")
EXPECTED_MATRIX.update({
    ("gamma_vn", "coherence"): (H, "claimed"),
    ("gamma_vn", "scale_invariance"): (H, "claimed"),
    ("gamma_vn", "suf"): (H, "claimed"),
    ("gamma_vn", "rising_tide"): (H, "claimed"),
    ("gamma_vn", "cloning"): (V, "claimed"),
    ("gamma_vn", "dimension_stability"): (V, "claimed"),
    ("gamma_vv", "coherence"): (H, "claimed"),
    ("gamma_vv", "scale_invariance"): (V, "claimed"),
    ("gamma_vv", "suf"): (V, "claimed"),
    ("gamma_vv", "rising_tide"): (V, "claimed"),
    ("gamma_vv", "cloning"): (H, "claimed"),
    ("gamma_vv", "dimension_stability"): (H, "claimed"),
    ("t_coeff", "coherence"): (V, "claimed"),
    ("t_coeff", "scale_invariance"): (H, "claimed"),
    ("t_coeff", "rising_tide"): (H, "claimed"),
    ("t_coeff", "cloning"): (H, "claimed"),
})
for _m in ("gamma_r", "gamma_az"):
    EXPECTED_MATRIX[_m, "coherence"] = (H, "claimed")
    for _p in PROPERTIES[1:]:
        EXPECTED_MATRIX[_m, _p] = (V, "claimed")
for _m in ("sqrtn_gamma_r", "sqrtn_gamma_az"):
    EXPECTED_MATRIX[_m, "dimension_stability"] = (H, "claimed")
    EXPECTED_MATRIX[_m, "coherence"] = (H, "derived")
    EXPECTED_MATRIX[_m, "cloning"] = (H, "derived")
    for _p in ("scale_invariance", "suf", "rising_tide"):
        EXPECTED_MATRIX[_m, _p] = (V, "derived")


def _worst_of(verdicts: list[PropertyVerdict]) -> PropertyVerdict:
    for v in verdicts:
        if v.verdict is Verdict.VIOLATED:
            return v
    for v in verdicts:
        if v.verdict is Verdict.INCONCLUSIVE:
            return v
    return verdicts[0]


def _rising_witnesses(metric_id: str, seed: int) -> list[PropertyVerdict]:
    if _is_data_metric(metric_id):
        return [check_rising_tide(metric_id, seed=seed)]
    out = [
        check_rising_tide(metric_id, MS_RISING, C_RISING),
        check_rising_tide(metric_id, MS_AZ_RISING, C_AZ_RISING),
    ]
    out += [check_rising_tide(metric_id, ms, seed=seed + k) for k, ms in enumerate(_random_summaries(seed, 2))]
    return out


def check_property(metric_id: str, property_id: str, seed: int = DEFAULT_SEED) -> PropertyVerdict:
    """Run one cell of the verdict matrix with its default instances."""
    if property_id == "coherence":
        v = check_coherence(metric_id)
    elif property_id == "scale_invariance":
        if _is_data_metric(metric_id):
            v = check_scale_invariance(metric_id, seed=seed)
        else:
            v = _worst_of([check_scale_invariance(metric_id, ms, seed=seed + k)
                           for k, ms in enumerate([MS_RISING] + _random_summaries(seed, 1))])
    elif property_id == "suf":
        v = check_suf(metric_id, seed=seed)
    elif property_id == "rising_tide":
        v = _worst_of(_rising_witnesses(metric_id, seed))
    elif property_id == "cloning":
        if _is_data_metric(metric_id):
            v = check_cloning(metric_id, seed=seed)
        else:
            v = _worst_of([check_cloning(metric_id, ms) for ms in [MS_RISING] + _random_summaries(seed, 1)])
    elif property_id == "dimension_stability":
        v = _worst_of([check_dimension_stability(metric_id, s) for s in default_sequences()])
    else:
        raise McvError(f"unknown property {property_id!r}")
    expected = EXPECTED_MATRIX.get((metric_id, property_id))
    return PropertyVerdict(v.property_id, v.metric_id, v.verdict, v.witness, v.tolerance, v.note,
                           expected[0] if expected else None)


def verdict_matrix(seed: int = DEFAULT_SEED, metrics: Sequence[str] = MATRIX_METRICS) -> list[PropertyVerdict]:
    return [check_property(m, p, seed) for m in metrics for p in PROPERTIES]


def matrix_mismatches(verdicts: Iterable[PropertyVerdict]) -> list[PropertyVerdict]:
    return [v for v in verdicts if v.matches is False]


def format_table(verdicts: Sequence[PropertyVerdict]) -> str:
    """Aligned text table, metrics as rows and properties as columns.

    Cells read ``holds``/``violated``/``inconclusive``; a trailing ``!``
    marks disagreement with the expected outcome.
    """
    cell = {(v.metric_id, v.property_id): v for v in verdicts}
    metric_ids = list(dict.fromkeys(v.metric_id for v in verdicts))
    width = max(len(p) for p in PROPERTIES) + 1
    head = "metric".ljust(16) + "".join(p.ljust(width) for p in PROPERTIES)
    lines = [head, "-" * len(head)]
    for m in metric_ids:
        row = m.ljust(16)
        for p in PROPERTIES:
            v = cell.get((m, p))
            txt = "" if v is None else v.verdict.value + ("!" if v.matches is False else "")
            row += txt.ljust(width)
        lines.append(row.rstrip())
    return "\n".join(lines)


# -- golden counterexamples ---------------------------------------------------


def golden_values() -> list[tuple[str, float, float]]:
    """(label, computed, exact) for every closed-form number in the worked examples."""
    r = M.gamma_reyment
    vv = M.gamma_vanvalen
    az = M.gamma_az
    shifted = shift_moments(MS_RISING, C_RISING)
    (a1, a2), (b1, b2) = SUF_PAIRS
    out = [
        ("gamma_r rising tide, X", r(MS_RISING).value, math.sqrt(1 / 18)),
        ("gamma_r rising tide, X + c", r(shifted).value, math.sqrt(1 / 17)),
        ("rising tide direction c^T Sigma^-1 m", _direction(MS_RISING, C_RISING), 3.0),
        ("gamma_r SUF, m=(1,1)", r(a1).value, 1 / math.sqrt(2)),
        ("gamma_r SUF, m=(2,1)", r(a2).value, math.sqrt(2 / 5)),
        ("gamma_vv SUF, m=(2,1)", vv(b1).value, math.sqrt(2 / 5)),
        ("gamma_vv SUF, m=(4,1)", vv(b2).value, math.sqrt(5 / 17)),
        ("gamma_az SUF, m=(1,1)", az(a1).value, math.sqrt(1 / 2)),
        ("gamma_az SUF, m=(2,1)", az(a2).value, math.sqrt(17 / 25)),
        ("gamma_az rising tide, X", az(MS_AZ_RISING).value, math.sqrt(2.0) / 1.01),
        ("gamma_az rising tide, X + c", az(shift_moments(MS_AZ_RISING, C_AZ_RISING)).value, math.sqrt(101.0) / 2.0),
    ]
    for metric_id, ratio in (("gamma_vn", 1 / math.sqrt(2)), ("gamma_r", 1 / math.sqrt(2)),
                             ("gamma_az", 1 / math.sqrt(2)), ("gamma_vv", 1.0), ("g2", 1.0)):
        f = M.MOMENT_METRICS[metric_id]
        out.append((f"{metric_id} cloning ratio", f(coupling_moments(MS_RISING)).value / f(MS_RISING).value, ratio))
    return out


def counterexample_suite() -> list[PropertyVerdict]:
    """Every worked instance as a verdict with its expected outcome attached."""
    cases: list[tuple[PropertyVerdict, Verdict]] = [
        (check_coherence("gamma_vn"), H),
        (check_coherence("g2"), H),
        (check_coherence("gamma_r"), H),
        (check_coherence("gamma_vv"), H),
        (check_coherence("gamma_az"), H),
        (check_coherence("gq:1"), V),
        (check_coherence("t_coeff"), V),
        (check_scale_invariance("gamma_vn"), H),
        (check_scale_invariance("g2"), H),
        (check_scale_invariance("gamma_vv", SUF_PAIRS[1][0], trials=0, matrices=[np.diag([2.0, 1.0])]), V),
        (check_suf("g2"), H),
        (check_suf("gamma_r", list(SUF_PAIRS[0])), V),
        (check_suf("gamma_vv", list(SUF_PAIRS[1])), V),
        (check_suf("gamma_az", list(SUF_PAIRS[0])), V),
        (check_rising_tide("g2", MS_RISING, C_RISING), H),
        (check_rising_tide("gamma_vn", MS_RISING, C_RISING), H),
        (check_rising_tide("gamma_r", MS_RISING, C_RISING), V),
        (check_rising_tide("gamma_vv", MS_RISING, C_RISING), V),
        (check_rising_tide("gamma_az", MS_AZ_RISING, C_AZ_RISING), V),
        (check_cloning("g2"), H),
        (check_cloning("gamma_vv"), H),
        (check_cloning("gamma_vn"), V),
        (check_cloning("gamma_r"), V),
        (check_cloning("gamma_az"), V),
        (check_dimension_stability("g2"), H),
        (check_dimension_stability("gamma_vv"), H),
        (check_dimension_stability("gamma_vn"), V),
        (check_dimension_stability("gamma_r"), V),
        (check_dimension_stability("gamma_az"), V),
        (check_dimension_stability("sqrtn_gamma_r"), H),
        (check_dimension_stability("sqrtn_gamma_az"), H),
    ]
    return [
        PropertyVerdict(v.property_id, v.metric_id, v.verdict, v.witness, v.tolerance, v.note, exp)
        for v, exp in cases
    ]
