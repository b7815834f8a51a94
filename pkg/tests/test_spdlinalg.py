import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcvgini.errors import NoConvergence, NotPositiveDefinite
from mcvgini.spdlinalg import (
    ConditioningWarning,
    cholesky,
    quadratic_form,
    spd_inv_sqrt,
    spd_inverse,
    spd_log_det,
    sym_eigen,
)

from conftest import random_spd


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 2**32 - 1), logcond=st.floats(0.0, 6.0))
def test_cholesky_matches_numpy(n, seed, logcond):
    S = random_spd(np.random.default_rng(seed), n, 10.0**logcond)
    L = cholesky(S).lower
    np.testing.assert_allclose(L, np.linalg.cholesky(S), rtol=1e-8, atol=1e-10 * np.abs(S).max())
    assert np.allclose(np.triu(L, 1), 0.0)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 2**32 - 1))
def test_eigen_matches_eigh(n, seed):
    S = random_spd(np.random.default_rng(seed), n, 1e3)
    e = sym_eigen(S)
    np.testing.assert_allclose(e.values, np.linalg.eigvalsh(S)[::-1], rtol=1e-10)
    np.testing.assert_allclose(e.reconstruct(), S, atol=1e-10 * np.abs(S).max())
    np.testing.assert_allclose(e.vectors.T @ e.vectors, np.eye(n), atol=1e-12)
    assert np.all(np.diff(e.values) <= 0)


def test_eigen_sign_convention(rng):
    e = sym_eigen(random_spd(rng, 5))
    for v in e.vectors.T:
        assert v[np.argmax(np.abs(v))] > 0


def test_eigen_sweep_cap(rng):
    with pytest.raises(NoConvergence):
        sym_eigen(random_spd(rng, 12), max_sweeps=1)


def test_inverse_and_log_det(rng):
    S = random_spd(rng, 6, 1e4)
    np.testing.assert_allclose(spd_inverse(S) @ S, np.eye(6), atol=1e-9)
    assert spd_log_det(S) == pytest.approx(np.linalg.slogdet(S)[1], rel=1e-12)


def test_inv_sqrt(rng):
    S = random_spd(rng, 5, 50.0)
    R = spd_inv_sqrt(S)
    np.testing.assert_allclose(R, R.T, atol=1e-13)
    np.testing.assert_allclose(R @ S @ R, np.eye(5), atol=1e-10)


def test_quadratic_form():
    Sinv = np.array([[2.0, 1.0], [1.0, 3.0]])
    assert quadratic_form(Sinv, [1.0, 2.0]) == 2 + 4 + 12


@pytest.mark.parametrize("S", [
    [[1.0, 2.0], [2.0, 1.0]],
    [[1.0, 1.0], [1.0, 1.0]],
    [[0.0, 0.0], [0.0, 1.0]],
])
def test_not_positive_definite(S):
    with pytest.raises(NotPositiveDefinite):
        cholesky(S)
    with pytest.raises(NotPositiveDefinite):
        spd_inv_sqrt(S)


def test_asymmetric_rejected():
    with pytest.raises(ValueError):
        cholesky([[1.0, 0.5], [0.0, 1.0]])


def test_conditioning_warning():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        spd_inverse(np.diag([1.0, 1e-11]))
    assert any(issubclass(x.category, ConditioningWarning) for x in w)
