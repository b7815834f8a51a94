import math

import numpy as np
import pytest

from mcvgini import properties as P
from mcvgini.errors import InvalidDirection, NonConvergentSpec, ZeroCV
from mcvgini.moments import MomentSummary
from mcvgini.properties import Verdict


@pytest.mark.parametrize("label,computed,exact", P.golden_values())
def test_golden_values(label, computed, exact):
    assert abs(computed - exact) <= 1e-12 * max(1.0, abs(exact)), label


def test_counterexample_suite_matches():
    suite = P.counterexample_suite()
    assert P.matrix_mismatches(suite) == []
    for v in suite:
        if v.verdict is Verdict.VIOLATED:
            assert {"before", "after"} <= v.witness.keys()


def test_harmonic_aggregator():
    assert P.harmonic_aggregator([1.0, 1.0]) == 1.0
    assert P.harmonic_aggregator([1.0, 2.0]) == pytest.approx(math.sqrt(2 / 1.25))
    with pytest.raises(ZeroCV):
        P.harmonic_aggregator([1.0, 0.0])


def test_rising_tide_rejects_wrong_direction():
    with pytest.raises(InvalidDirection):
        P.check_rising_tide("g2", P.MS_RISING, -P.C_RISING)


def test_scale_invariance_verdicts():
    assert P.check_scale_invariance("g2").verdict is Verdict.HOLDS
    v = P.check_scale_invariance("gamma_vv", MomentSummary([2.0, 1.0], np.eye(2)), trials=0,
                                 matrices=[np.diag([2.0, 1.0])])
    assert v.verdict is Verdict.VIOLATED
    assert v.witness["before"] == pytest.approx(math.sqrt(2 / 5))
    assert v.witness["after"] == pytest.approx(math.sqrt(5 / 17))


def test_data_metric_checks():
    assert P.check_coherence("g2_pairwise").verdict is Verdict.HOLDS
    assert P.check_coherence("t_coeff").verdict is Verdict.VIOLATED
    assert P.check_scale_invariance("t_coeff").verdict is Verdict.HOLDS
    assert P.check_dimension_stability("t_coeff").verdict is Verdict.INCONCLUSIVE


def test_t_coefficient_cloning_ratio_two_point():
    v = P.check_cloning("t_coeff", P.two_point(2.0, 1.0))
    assert v.verdict is Verdict.VIOLATED
    assert v.witness["ratio"] == pytest.approx((math.sqrt(2) + 1) / 2, rel=1e-13)


def test_dimension_stability_custom_sequence():
    spec = P.default_sequences()[1]
    assert P.check_dimension_stability("g2", spec).verdict is Verdict.HOLDS
    assert P.check_dimension_stability("gamma_vn", spec).verdict is Verdict.VIOLATED


def test_sequence_spec_validation():
    with pytest.raises(NonConvergentSpec):
        P.SequenceSpec("bad", lambda i: 0.0, lambda i: 1.0).summary(3)
    with pytest.raises(NonConvergentSpec):
        P.SequenceSpec("drift", lambda i: 1.0, lambda i: float(i)).limiting_cv()


def test_product_and_coupling_shapes():
    d = P.product_dataset([(1.0, 3.0), (0.0, 1.0, 2.0)])
    assert d.values.shape == (6, 2)
    assert P.independent_coupling(P.two_point(2.0, 1.0)).values.shape == (4, 2)


def test_verdict_json():
    v = P.check_property("gamma_vn", "cloning")
    d = v.to_dict()
    assert d["verdict"] == "violated" and d["expected"] == "violated"
