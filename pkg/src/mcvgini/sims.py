"""Seeded simulation studies: Gaussian dimension sweeps and Galton-like walks.

Random numbers come from counter-based Philox streams keyed by
``(seed, experiment, cell)``, so every cell has its own stream and a
result does not depend on the order cells are run in.  Normal deviates
are produced with the Box-Muller transform.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import McvError
from .metrics import compute_metric
from .moments import Convention, DataSet, MomentSummary, estimate_moments

__all__ = [
    "NormalStream",
    "substream",
    "Experiment",
    "ExperimentConfig",
    "ExperimentResult",
    "simulate_gaussian",
    "simulate_galton",
    "galton_analytic_moments",
    "galton_positions",
    "run_experiment",
    "DEFAULT_METRICS",
]

DEFAULT_METRICS = ("gamma_vn", "gamma_r", "gamma_vv", "gamma_az", "g2")


class Experiment(str, Enum):
    GAUSSIAN_CONSTANT_MEAN = "gaussian_constant_mean"
    GAUSSIAN_UNIFORM_MEAN = "gaussian_uniform_mean"
    GALTON = "galton"


_EXPERIMENT_CODE = {
    Experiment.GAUSSIAN_CONSTANT_MEAN: 1,
    Experiment.GAUSSIAN_UNIFORM_MEAN: 2,
    Experiment.GALTON: 3,
}


class NormalStream:
    """Uniform and standard normal deviates from one Philox key.

    >>> a, b = NormalStream(7), NormalStream(7)
    >>> bool(np.array_equal(a.normal(5), b.normal(5)))
    True
    """

    def __init__(self, key: int | Sequence[int]):
        words = [key] if isinstance(key, (int, np.integer)) else list(key)
        state = np.random.SeedSequence([int(w) for w in words]).generate_state(2, np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=state))

    def uniform(self, size) -> np.ndarray:
        return self._gen.random(size)

    def normal(self, size) -> np.ndarray:
        shape = (size,) if isinstance(size, (int, np.integer)) else tuple(size)
        count = int(np.prod(shape))
        half = (count + 1) // 2
        u1 = 1.0 - self._gen.random(half)  # (0, 1]
        u2 = self._gen.random(half)
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * half)
        z[0::2] = r * np.cos(2.0 * np.pi * u2)
        z[1::2] = r * np.sin(2.0 * np.pi * u2)
        return z[:count].reshape(shape)


def substream(seed: int, *labels: int) -> NormalStream:
    """Independent stream for ``(seed, *labels)``; distinct labels give distinct keys."""
    return NormalStream([seed, *labels])


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: Experiment
    seed: int
    xs: tuple[int, ...] = ()
    sample_count: int = 0
    metrics: tuple[str, ...] = DEFAULT_METRICS
    nested_means: bool = False
    include_start: bool = False
    ridge: float = 1e-8

    def __post_init__(self):
        exp = Experiment(self.experiment)
        object.__setattr__(self, "experiment", exp)
        if not self.xs:
            xs = range(10, 95, 5) if exp is Experiment.GALTON else range(10, 55, 5)
            object.__setattr__(self, "xs", tuple(xs))
        if not self.sample_count:
            object.__setattr__(self, "sample_count", 100 if exp is Experiment.GALTON else 500)
        xs = tuple(int(x) for x in self.xs)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if any(b <= a for a, b in zip(xs, xs[1:])) or xs[0] < 1:
            raise McvError(f"dimensions/horizons must be positive and strictly increasing: {xs}")
        if self.sample_count < 2:
            raise McvError("sample_count must be at least 2")
        if exp is Experiment.GALTON and xs[-1] < 2:
            raise McvError("Galton runs need a horizon of at least 2")


@dataclass
class ExperimentResult:
    """One value per (x, metric) cell, where x is a dimension or a horizon."""

    config: ExperimentConfig
    rows: list[tuple[int, str, float]]
    metadata: dict = field(default_factory=dict)
    wall_time: dict[int, float] = field(default_factory=dict, compare=False)

    @property
    def seed(self) -> int:
        return self.config.seed

    def value(self, x: int, metric_id: str) -> float:
        for xv, mid, v in self.rows:
            if xv == x and mid == metric_id:
                return v
        raise KeyError((x, metric_id))

    def series(self, metric_id: str) -> list[tuple[int, float]]:
        return [(x, v) for x, mid, v in self.rows if mid == metric_id]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x_value", "metric_id", "value"])
        for x, mid, v in self.rows:
            w.writerow([x, mid, repr(v)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        cfg = asdict(self.config)
        cfg["experiment"] = self.config.experiment.value
        return {
            "config": cfg,
            "seed": self.seed,
            "rows": [{"x_value": x, "metric_id": m, "value": v} for x, m, v in self.rows],
            "metadata": self.metadata,
            "wall_time": {str(k): v for k, v in self.wall_time.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _metric_rows(x: int, ms: MomentSummary, data: DataSet, metrics: Sequence[str]) -> list[tuple[int, str, float]]:
    out = []
    for mid in metrics:
        src = data if mid in ("g2_pairwise", "t_coeff", "g_inf") else ms
        out.append((x, mid, compute_metric(mid, src).value))
    return out


def simulate_gaussian(config: ExperimentConfig) -> ExperimentResult:
    """Sample ``sample_count`` points of N(m, 2 Id_n) for each n in ``config.xs``.

    Means are all 2, or drawn from U[1, 2] per coordinate.  Uniform means
    are redrawn for every n unless ``nested_means`` is set, in which case
    they are prefixes of one draw.
    """
    exp = config.experiment
    if exp is Experiment.GALTON:
        raise McvError("simulate_gaussian needs a Gaussian experiment")
    code = _EXPERIMENT_CODE[exp]
    nested = None
    if exp is Experiment.GAUSSIAN_UNIFORM_MEAN and config.nested_means:
        nested = 1.0 + substream(config.seed, code, 0).uniform(config.xs[-1])
    rows, walls = [], {}
    for n in config.xs:
        t0 = time.perf_counter()
        stream = substream(config.seed, code, n)
        if exp is Experiment.GAUSSIAN_CONSTANT_MEAN:
            m = np.full(n, 2.0)
        elif nested is not None:
            m = nested[:n]
        else:
            m = 1.0 + stream.uniform(n)
        X = m + math.sqrt(2.0) * stream.normal((config.sample_count, n))
        data = DataSet(X)
        ms = estimate_moments(data, Convention.POPULATION)
        rows += _metric_rows(n, ms, data, config.metrics)
        walls[n] = time.perf_counter() - t0
    return ExperimentResult(config, rows, {"covariance": "2 Id", "convention": "population",
                                           "nested_means": config.nested_means}, walls)


def galton_positions(particles: int, horizon: int, stream: NormalStream, include_start: bool = False) -> np.ndarray:
    """``(particles, horizon)`` array of +-1 fair-coin walk positions from a U[1, 2] start.

    Column t holds the position after t + 1 steps, or after t steps when
    ``include_start`` puts the starting point in column 0.
    """
    x0 = 1.0 + stream.uniform(particles)
    steps = np.where(stream.uniform((particles, horizon)) < 0.5, 1.0, -1.0)
    pos = x0[:, None] + np.cumsum(steps, axis=1)
    if include_start:
        pos = np.hstack([x0[:, None], pos[:, :-1]])
    return pos


def galton_analytic_moments(T: int, include_start: bool = False) -> MomentSummary:
    """Exact moments of the walk: mean 1.5 everywhere, Cov(X_s, X_t) = 1/12 + min(s, t)."""
    if T < 1:
        raise McvError("horizon must be at least 1")
    t = np.arange(0, T) if include_start else np.arange(1, T + 1)
    cov = 1.0 / 12.0 + np.minimum.outer(t, t).astype(float)
    return MomentSummary(np.full(T, 1.5), cov, Convention.ANALYTIC)


def simulate_galton(config: ExperimentConfig) -> ExperimentResult:
    """One simulation to the largest horizon; shorter horizons are prefixes of it.

    A ridge of ``config.ridge * trace / T`` is added to the plug-in
    covariance diagonal before the metrics are taken, since with a hundred
    particles and horizons near ninety the covariance is close to singular.
    """
    if config.experiment is not Experiment.GALTON:
        raise McvError("simulate_galton needs the galton experiment")
    stream = substream(config.seed, _EXPERIMENT_CODE[Experiment.GALTON], 0)
    pos = galton_positions(config.sample_count, config.xs[-1], stream, config.include_start)
    rows, walls, ridges = [], {}, {}
    for T in config.xs:
        t0 = time.perf_counter()
        data = DataSet(pos[:, :T])
        raw = estimate_moments(data, Convention.POPULATION)
        lam = config.ridge * float(np.trace(raw.cov)) / T
        ms = MomentSummary(raw.mean, raw.cov + lam * np.eye(T), Convention.POPULATION)
        rows += _metric_rows(T, ms, data, config.metrics)
        ridges[T] = lam
        walls[T] = time.perf_counter() - t0
    meta = {"ridge_factor": config.ridge, "ridge": {str(k): v for k, v in ridges.items()},
            "include_start": config.include_start, "convention": "population"}
    return ExperimentResult(config, rows, meta, walls)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    if config.experiment is Experiment.GALTON:
        return simulate_galton(config)
    return simulate_gaussian(config)
