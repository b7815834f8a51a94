import json

import numpy as np
import pytest

from mcvgini.errors import McvError
from mcvgini.moments import Convention, DataSet, estimate_moments
from mcvgini.sims import (
    ExperimentConfig,
    NormalStream,
    galton_analytic_moments,
    galton_positions,
    run_experiment,
    substream,
)


def test_stream_moments():
    z = NormalStream(3).normal(100_000)
    assert abs(z.mean()) < 0.015
    assert abs(z.var() - 1.0) < 0.02
    u = NormalStream(3).uniform(100_000)
    assert 0.0 <= u.min() and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.005


def test_substreams_are_distinct_and_repeatable():
    a = substream(42, 1, 10).normal(8)
    assert np.array_equal(a, substream(42, 1, 10).normal(8))
    assert not np.array_equal(a, substream(42, 1, 15).normal(8))
    assert not np.array_equal(a, substream(43, 1, 10).normal(8))


def test_normal_odd_count_and_shape():
    assert NormalStream(1).normal(7).shape == (7,)
    assert NormalStream(1).normal((3, 5)).shape == (3, 5)


def test_galton_analytic_examples():
    m1 = galton_analytic_moments(1)
    assert m1.mean[0] == 1.5 and m1.cov[0, 0] == pytest.approx(1 / 12 + 1)
    np.testing.assert_allclose(galton_analytic_moments(2).cov, [[13 / 12, 13 / 12], [13 / 12, 25 / 12]])
    assert galton_analytic_moments(3, include_start=True).cov[0, 0] == pytest.approx(1 / 12)


def test_galton_covariance_monte_carlo():
    pos = galton_positions(100_000, 5, NormalStream(11))
    ms = estimate_moments(DataSet(pos), Convention.POPULATION)
    oracle = galton_analytic_moments(5)
    np.testing.assert_allclose(ms.cov, oracle.cov, atol=0.05)
    np.testing.assert_allclose(ms.mean, oracle.mean, atol=0.05)


def test_galton_steps_are_unit():
    pos = galton_positions(50, 10, NormalStream(2))
    np.testing.assert_allclose(np.abs(np.diff(pos, axis=1)), 1.0, atol=1e-12)


def test_gaussian_shape_and_determinism():
    cfg = ExperimentConfig("gaussian_constant_mean", 7, (3, 5), 50)
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a == b
    assert len(a.rows) == 10
    assert a.to_csv().splitlines()[0] == "x_value,metric_id,value"
    assert json.loads(a.to_json())["seed"] == 7


def test_default_gaussian_row_count():
    cfg = ExperimentConfig("gaussian_constant_mean", 1, sample_count=20)
    assert cfg.xs == tuple(range(10, 55, 5))


def test_uniform_means_nested_option():
    a = run_experiment(ExperimentConfig("gaussian_uniform_mean", 5, (2, 4), 30, nested_means=True))
    b = run_experiment(ExperimentConfig("gaussian_uniform_mean", 5, (2, 4), 30))
    assert a.metadata["nested_means"] and not b.metadata["nested_means"]


def test_galton_prefixes_and_ridge():
    r = run_experiment(ExperimentConfig("galton", 3, (5, 10), 40))
    assert set(r.metadata["ridge"]) == {"5", "10"}
    assert r.value(5, "g2") > 0


@pytest.mark.parametrize("kw", [dict(xs=(5, 3)), dict(xs=(0, 2)), dict(sample_count=1)])
def test_config_validation(kw):
    with pytest.raises(McvError):
        ExperimentConfig("gaussian_constant_mean", 1, **kw)
