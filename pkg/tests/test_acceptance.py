"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line that is printed in the pytest
terminal summary (and directly when this file is run as a script).
"""

import itertools
import math
import time

import numpy as np
import pytest

from mcvgini import metrics as M
from mcvgini import properties as P
from mcvgini.cli import run
from mcvgini.moments import DataSet, MomentSummary, estimate_moments
from mcvgini.sims import ExperimentConfig, galton_analytic_moments, run_experiment
from mcvgini.whitening import apply_whitening, component_cvs, whiten

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance

SIM_SEED = 42


def record(k: int, ok: bool, detail: str) -> None:
    line = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[k] = line
    print(line)


def check(k: int, failures: list[str], elapsed: float, budget: float, detail: str) -> None:
    if elapsed >= budget:
        failures.append(f"runtime {elapsed:.2f}s >= {budget}s")
    ok = not failures
    record(k, ok, f"{detail} ({elapsed:.2f}s)" + ("" if ok else " | " + "; ".join(failures)))
    assert ok, "; ".join(failures)


def test_c01_pairwise_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst, failures = 0.0, []
    for n, N in itertools.product(range(1, 7), (10, 50, 200)):
        for _ in range(50):
            X = rng.normal(size=(N, n)) @ rng.normal(size=(n, n)) + rng.uniform(0.5, 3.0, n)
            d = DataSet(X)
            a = M.g2_pairwise(d).value
            b = math.sqrt(n) * M.gamma_vn(estimate_moments(d)).value
            err = abs(a - b) / (1.0 + b)
            worst = max(worst, err)
            if err > 1e-10:
                failures.append(f"n={n} N={N}: {a!r} vs {b!r}")
    check(1, failures[:3], time.perf_counter() - t0, 5.0, f"900 datasets, worst scaled error {worst:.2e}")


def test_c02_counterexample_values():
    t0 = time.perf_counter()
    failures = [f"{label}: {c!r} vs {e!r}" for label, c, e in P.golden_values()
                if label != "rising tide direction c^T Sigma^-1 m" and abs(c - e) > 1e-12]
    worst = max(abs(c - e) for _, c, e in P.golden_values())
    check(2, failures, time.perf_counter() - t0, 1.0, f"{len(P.golden_values())} closed forms, worst error {worst:.1e}")


def test_c03_verdict_matrix(capsys):
    t0 = time.perf_counter()
    code = run(["verify", "--all", "--format", "json"])
    import json
    out = json.loads(capsys.readouterr().out)
    failures = [] if code == 0 else [f"exit code {code}"]
    for v in out["matrix"] + out["counterexamples"]:
        if "expected" in v and v["verdict"] != v["expected"]:
            failures.append(f"{v['metric_id']} {v['property_id']}: {v['verdict']} (expected {v['expected']})")
    check(3, failures, time.perf_counter() - t0, 30.0,
          f"{len(out['matrix'])} matrix cells + {len(out['counterexamples'])} instances, {out['mismatches']} mismatches")


def _band(failures, label, value, target, tol):
    if abs(value - target) > tol:
        failures.append(f"{label} = {value:.4f} outside {target:.4f} +- {tol}")


def test_c04_gaussian():
    t0 = time.perf_counter()
    const = run_experiment(ExperimentConfig("gaussian_constant_mean", SIM_SEED))
    unif = run_experiment(ExperimentConfig("gaussian_uniform_mean", SIM_SEED))
    failures: list[str] = []
    _band(failures, "const G2(50)", const.value(50, "g2"), 1 / math.sqrt(2), 0.05)
    _band(failures, "const gamma_vv(50)", const.value(50, "gamma_vv"), 1 / math.sqrt(2), 0.05)
    for mid in ("gamma_vn", "gamma_az", "gamma_r"):
        _band(failures, f"const {mid}(50)", const.value(50, mid), 0.1, 0.02)
    _band(failures, "uniform G2(50)", unif.value(50, "g2"), math.sqrt(6 / 7), 0.06)
    check(4, failures, time.perf_counter() - t0, 60.0, f"seed {SIM_SEED}, N=500, n=50")


def test_c05_galton():
    t0 = time.perf_counter()
    r = run_experiment(ExperimentConfig("galton", SIM_SEED))
    failures: list[str] = []
    for mid in ("gamma_vn", "gamma_r"):
        if not r.value(90, mid) < r.value(10, mid) / 2:
            failures.append(f"{mid}(90) = {r.value(90, mid):.4f} not below half of {r.value(10, mid):.4f}")
    if not r.value(90, "gamma_az") > 0.1:
        failures.append(f"gamma_az(90) = {r.value(90, 'gamma_az'):.4f}")
    oracle = M.g2(galton_analytic_moments(40)).value
    _band(failures, "G2(40)", r.value(40, "g2"), oracle, 0.15)
    check(5, failures, time.perf_counter() - t0, 60.0, f"seed {SIM_SEED}, 100 particles, T <= 90")


def test_c06_jensen_bound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(606)
    failures, worst = [], 0.0
    for k in range(100):
        n = 2 + k % 4
        X = rng.normal(size=(60, n)) @ rng.normal(size=(n, n)) + rng.uniform(-2.0, 3.0, n)
        d = DataSet(X)
        t, g = M.t_coefficient(d).value, M.g2_pairwise(d).value
        worst = max(worst, t / g)
        if t > g * (1 + 1e-9):
            failures.append(f"dataset {k}: {t!r} > {g!r}")
    check(6, failures[:3], time.perf_counter() - t0, 10.0, f"100 datasets, max T/G2 = {worst:.4f}")


def factorial_dataset(seed: int, n: int = 3) -> DataSet:
    """Full two-level factorial design with levels drawn from the seed."""
    levels = np.random.default_rng(seed).uniform(1.0, 3.0, (n, 2))
    rows = [[levels[i, b[i]] for i in range(n)] for b in itertools.product((0, 1), repeat=n)]
    return DataSet(np.array(rows))


def test_c07_gq_family():
    t0 = time.perf_counter()
    failures: list[str] = []
    rng = np.random.default_rng(707)
    for _ in range(10):
        d = DataSet(rng.normal(size=(40, 3)) @ rng.normal(size=(3, 3)) + 2.0)
        a, b = M.gq(d, 2).value, M.g2_pairwise(d).value
        if abs(a - b) > 1e-9:
            failures.append(f"gq(2) {a!r} vs g2_pairwise {b!r}")
    d = factorial_dataset(7)
    ginf = M.g_inf(d).value
    seq = [M.gq(d, q).value for q in (2, 4, 8, 16, 32, 64)]
    rel = abs(seq[-1] - ginf) / ginf
    if rel > 0.05:
        failures.append(f"|gq(64) - g_inf| / g_inf = {rel:.4f}")
    gaps = [abs(v - ginf) for v in seq]
    for i in range(1, len(gaps)):
        if gaps[i] > gaps[i - 1] + 1e-6:
            failures.append(f"gap grows at step {i}")
    check(7, failures, time.perf_counter() - t0, 60.0, f"g_inf = {ginf:.5f}, gq(64) off by {rel:.2%}")


def test_c08_harmonic_structure():
    t0 = time.perf_counter()
    rng = np.random.default_rng(808)
    failures, worst = [], 0.0
    for _ in range(100):
        n = int(rng.integers(1, 8))
        ms = MomentSummary(rng.uniform(0.2, 5.0, n) * rng.choice([-1, 1], n), np.diag(rng.uniform(0.1, 10.0, n)))
        y = component_cvs(whiten(ms))
        g, h = M.g2(ms).value, P.harmonic_aggregator(y)
        err = abs(g - h) / h
        worst = max(worst, err)
        if err > 1e-10:
            failures.append(f"g2 {g!r} vs aggregator {h!r}")
        if not y.min() * (1 - 1e-12) <= g <= y.max() * (1 + 1e-12):
            failures.append(f"g2 {g!r} outside [{y.min()!r}, {y.max()!r}]")
    check(8, failures[:3], time.perf_counter() - t0, 60.0, f"100 diagonal summaries, worst error {worst:.1e}")


def test_c09_whitening_scale_stability():
    t0 = time.perf_counter()
    rng = np.random.default_rng(909)
    failures, worst = [], 0.0
    for _ in range(50):
        n = int(rng.integers(2, 6))
        X = rng.normal(size=(40, n)) @ rng.normal(size=(n, n)) + rng.uniform(1.0, 3.0, n)
        D = np.exp(rng.uniform(-3.0, 3.0, n))
        d, ds = DataSet(X), DataSet(X * D)
        for kind in ("zca_cor", "cholesky"):
            a = apply_whitening(whiten(estimate_moments(d), kind), d).values
            b = apply_whitening(whiten(estimate_moments(ds), kind), ds).values
            diff = float(np.max(np.abs(a - b)))
            worst = max(worst, diff)
            if diff > 1e-8:
                failures.append(f"{kind}: max difference {diff:.2e}")
    check(9, failures[:3], time.perf_counter() - t0, 60.0, f"50 datasets x 2 kinds, worst difference {worst:.1e}")


def test_c10_influence(tmp_path, capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1010)
    X = rng.normal(size=(50, 2)) @ np.array([[1.0, 0.3], [0.0, 0.8]]) + np.array([3.0, 2.0])
    d = DataSet(X)
    failures: list[str] = []
    x = np.array([4.5, 1.0])
    fd = M.influence_fd(x, d, 1e-4)
    if fd.relative_change > 0.01:
        failures.append(f"eps vs eps/2 relative change {fd.relative_change:.3g}")
    path = tmp_path / "d.csv"
    np.savetxt(path, X, delimiter=",", header="a,b", comments="")
    code = run(["influence", "--input", str(path), "--point", "4.5,1.0"])
    out = capsys.readouterr().out
    if code != 0 or "formula" not in out or "fd_eps" not in out:
        failures.append("side-by-side report missing")
    formula = M.influence_g2(x, estimate_moments(d))
    check(10, failures, time.perf_counter() - t0, 60.0,
          f"fd {fd.half_eps_estimate:.6g} (rel. change {fd.relative_change:.1e}), printed formula {formula:.6g}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
