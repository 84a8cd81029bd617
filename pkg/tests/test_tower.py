import numpy as np
import pytest

from stdsub.acceptance import standard_extension_model
from stdsub.hilbert import ComplexSpace, classify_subspace, distance, random_standard, span
from stdsub.seqmodel import AngleSequenceModel, Constant
from stdsub.tower import (
    IndexOutOfRange,
    NotStandardAtStep,
    b_space,
    commutativity_residual,
    crossproduct_checks,
    extend_tower,
    fiberwise_relative_commutant,
    b_identity_report,
    recursion_residual,
    relative_commutant,
    truncated_tower,
)

RECURSION_TOL = 1e-8


@pytest.fixture(params=[2, 4, 6])
def constant(request):
    M = random_standard(ComplexSpace(request.param), rng_seed=request.param)
    return M, extend_tower(M, M)


def test_constant_tower_levels(constant):
    M, t = constant
    for k in t.indices:
        assert distance(t[k], M) < RECURSION_TOL
    assert recursion_residual(t) < RECURSION_TOL


def test_constant_tower_b_spaces_vanish(constant):
    _, t = constant
    for k in (0, 1):
        assert b_space(t, k).r == 0


def test_constant_tower_relative_commutants(constant):
    _, t = constant
    A00 = relative_commutant(t, 0, 0)
    assert A00.r == 0  # factor
    assert relative_commutant(t, 0, 2).r == A00.r
    with pytest.raises(ValueError):
        relative_commutant(t, 2, 0)


def test_constant_tower_identities(constant):
    _, t = constant
    rep = b_identity_report(t, 1, 1)
    for name, item in rep.items.items():
        if item.residual is not None:
            assert item.residual == pytest.approx(0, abs=1e-8), name


def test_constant_crossproduct(constant):
    _, t = constant
    out = crossproduct_checks(t)
    assert out["fixedpoint_residual"] < RECURSION_TOL
    assert out["pairing_nondegenerate"] and out["pairing_rank"] == 0


def test_out_of_range(constant):
    _, t = constant
    with pytest.raises(IndexOutOfRange):
        t[99]


def test_proper_inclusion_is_obstructed():
    space = ComplexSpace(2)
    M0 = span(space, np.array([[1.0], [0.0], [0.0], [0.0]]))
    M1 = random_standard(space, rng_seed=1)
    M1 = span(space, np.hstack([M0.frame, M1.frame]))
    with pytest.raises(NotStandardAtStep) as exc:
        extend_tower(M0, M1)
    assert "real dimension" in str(exc.value)
    assert exc.value.classification is not None


def test_constant_angle_model():
    t = truncated_tower(AngleSequenceModel(Constant(0.7)), 6)
    assert t.defects["recursion"] < RECURSION_TOL
    assert all(r.stripped_complex_dim == 0 for r in t.defects["repairs"].values())
    assert distance(t[2], t[0]) < RECURSION_TOL


@pytest.fixture(scope="module")
def truncated():
    model = standard_extension_model()
    return {D: truncated_tower(model, D) for D in (8, 16, 32)}


def test_truncated_stripped_dimension(truncated):
    for D, t in truncated.items():
        assert t.defects["repairs"][1].stripped_complex_dim == 1, D
        assert classify_subspace(t[1]).dim_complex_part == 2


def test_truncated_b0(truncated):
    for t in truncated.values():
        B0 = b_space(t, 0)
        assert B0.r == 1
        assert commutativity_residual(B0) < 1e-12


def test_truncated_b1_commutative(truncated):
    for t in truncated.values():
        assert commutativity_residual(b_space(t, 1)) < 1e-12


def test_truncated_convergence(truncated):
    res = [crossproduct_checks(truncated[D])["fixedpoint_residual"] for D in (8, 16, 32)]
    assert res[0] > res[1] > res[2]
    angles = [truncated[D].defects["b_angle"][1] for D in (8, 16, 32)]
    assert angles[0] > angles[1] > angles[2]


def test_truncated_pairing_nondegenerate(truncated):
    out = crossproduct_checks(truncated[16])
    assert out["pairing_nondegenerate"]
    assert out["pairing_rank"] == 1


def test_truncated_identity_report(truncated):
    rep = b_identity_report(truncated[16], 0, 1)
    assert rep.regime == "truncated"
    assert rep.items["iii"].residual < 1e-12


@pytest.mark.parametrize("D", [3, 8])
def test_fiberwise_relative_commutant(D):
    thetas = 1.0 / np.arange(1, D + 1)
    A, pieces, defect = fiberwise_relative_commutant(thetas)
    assert defect == 0
    assert A.r == 2 * D
    for (r, angle), theta in zip(pieces, thetas):
        assert r == 2
        assert angle == pytest.approx(theta, abs=1e-10)
