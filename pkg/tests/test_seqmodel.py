import math

import numpy as np
import pytest

from stdsub.hilbert import classify_subspace, inclusion_defect
from stdsub.seqmodel import (
    AngleSequenceModel,
    ApproachHalfPi,
    CoefficientSequence,
    Constant,
    GoalInfeasible,
    Interleave,
    PowerLaw,
    Table,
    Weight,
    construct_extension,
    itpfi_classify,
    materialize,
    partial_sum,
    predicted_partial_sum,
    weighted_sum_test,
)

# partial sums at n = 10^4 for c_n = 1/n on the large branch of theta_n = 1/n
UNIT_PARTIAL_1E4 = 1.6448340718480603
DELTA_PARTIAL_1E4 = 39998.92217953742


@pytest.fixture
def one_over_n():
    return AngleSequenceModel(PowerLaw(1.0, 1.0))


def test_descriptors_evaluate():
    n = np.arange(1, 6)
    assert np.allclose(PowerLaw(2.0, 1.0)(n), 2.0 / n)
    assert np.allclose(Constant(0.3)(n), 0.3)
    assert np.allclose(ApproachHalfPi(1.0, 1.0)(n), np.pi / 2 - 1.0 / n)
    inter = Interleave(Constant(0.1), Constant(0.2))(n)
    assert np.allclose(inter, [0.1, 0.2, 0.1, 0.2, 0.1])
    tab = Table((0.5, 0.4), tail=PowerLaw(1.0, 1.0))(n)
    assert np.allclose(tab[:2], [0.5, 0.4])


def test_standard_extension_certificate(one_over_n):
    y = construct_extension(one_over_n, "Standard")
    assert y.branch == "large"
    assert weighted_sum_test(y, Weight("delta", one_over_n)).verdict == "Diverges"
    assert weighted_sum_test(y, Weight("unit", one_over_n)).verdict == "Converges"


def test_partial_sums_frozen(one_over_n):
    y = construct_extension(one_over_n, "Standard")
    n = np.arange(1, 10**4 + 1)
    assert partial_sum(y, Weight("unit", one_over_n), 10**4) == pytest.approx(UNIT_PARTIAL_1E4, rel=1e-12)
    assert partial_sum(y, Weight("delta", one_over_n), 10**4) == pytest.approx(DELTA_PARTIAL_1E4, rel=1e-12)
    direct = float(np.sum(1 / np.tan(0.5 / n) ** 2 / n**2))
    assert DELTA_PARTIAL_1E4 == pytest.approx(direct, rel=1e-12)


def test_prediction_tracks_partial_sums(one_over_n):
    y = construct_extension(one_over_n, "Standard")
    for kind in ("unit", "delta"):
        w = Weight(kind, one_over_n)
        v = weighted_sum_test(y, w)
        assert partial_sum(y, w, 10**5) == pytest.approx(predicted_partial_sum(v, 10**5), rel=1e-2)


def test_irreducible_extension():
    m = AngleSequenceModel(ApproachHalfPi(1.0, 1.0))
    y = construct_extension(m, "Irreducible")
    assert y.branch == "d_large"
    assert weighted_sum_test(y, Weight("d", m)).verdict == "Diverges"
    assert weighted_sum_test(y, Weight("delta", m)).verdict == "Converges"


def test_both_extension_is_one_interleaved_sequence():
    m = AngleSequenceModel(Interleave(PowerLaw(1.0, 1.0), ApproachHalfPi(1.0, 1.0)))
    z = construct_extension(m, "Both")
    assert isinstance(z, CoefficientSequence)
    assert z.branch == ("large", "d_large")
    assert weighted_sum_test(z, Weight("delta", m)).verdict == "Diverges"
    assert weighted_sum_test(z, Weight("d", m)).verdict == "Diverges"
    assert weighted_sum_test(z, Weight("unit", m)).verdict == "Converges"


@pytest.mark.parametrize("goal", ["Standard", "Irreducible", "Both"])
def test_constant_models_are_infeasible(goal):
    with pytest.raises(GoalInfeasible) as exc:
        construct_extension(AngleSequenceModel(Constant(math.pi / 3)), goal)
    assert exc.value.trend is not None


def test_series_threshold():
    m = AngleSequenceModel(Constant(1.0))
    assert weighted_sum_test(CoefficientSequence(PowerLaw(1.0, 0.5)), Weight("unit", m)).verdict == "Diverges"
    assert weighted_sum_test(CoefficientSequence(PowerLaw(1.0, 0.51)), Weight("unit", m)).verdict == "Converges"
    assert weighted_sum_test(CoefficientSequence(PowerLaw(1.0, 1.0)), Weight("power", beta=1.0)).verdict == "Diverges"


def test_materialize_dimensions(one_over_n):
    y = construct_extension(one_over_n, "Standard")
    M0, M1 = materialize(AngleSequenceModel(PowerLaw(1.0, 1.0), extension_vectors=(y,)), 8)
    assert (M0.r, M1.r) == (16, 17)
    assert inclusion_defect(M0, M1) < 1e-12
    assert classify_subspace(M0).is_standard
    assert classify_subspace(M1).dim_complex_part == 2


@pytest.mark.parametrize("theta", np.linspace(0.05, 1.5, 7))
def test_classifier_constant(theta):
    lab = itpfi_classify(Constant(theta))
    assert lab.kind == "III_lambda"
    assert lab.lam == pytest.approx(math.tan(theta / 2) ** 2, abs=1e-12)


def test_classifier_examples():
    assert str(itpfi_classify(AngleSequenceModel(Constant(math.pi / 3)))) == "III_0.333333333333"
    assert itpfi_classify(Constant(math.pi / 2)).kind == "lambda_one"
    assert itpfi_classify(PowerLaw(1.0, 1.0)).kind == "unknown"
