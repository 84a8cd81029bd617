import math

import numpy as np
import pytest

from stdsub.hilbert import (
    ComplexSpace,
    distance,
    fiber_subspace,
    random_standard,
    span,
    symplectic_complement,
)
from stdsub.modular import (
    TwoAngleReport,
    NotStandard,
    NotStandardPair,
    Operator,
    angle_operator,
    angle_projection,
    commutant_via_j,
    fiber_modular_closed_form,
    graph_norm_residual,
    kernel_j_plus_I,
    two_angle_report,
    linearity,
    polar,
    spectral_flags,
    tomita,
    tomita_pair,
)

# sup |Re<h,k>| over unit h in K(theta), k in Ker(j+1); closed form |cos(theta/2 + pi/4)|
TWO_ANGLE_SUP = {0.4: 0.5525312921868542, 1.0: 0.2815395311427007, 1.4: 0.08529440196032753}


def test_real_line_has_trivial_modular_data():
    R = span(ComplexSpace(1), np.array([[1.0], [0.0]]))
    md = tomita(R)
    assert np.allclose(md.delta_eigvals, 1.0)
    assert np.allclose(md.j.A, md.s.A)


def test_not_standard_raises():
    with pytest.raises(NotStandard):
        tomita(ComplexSpace(1).full())


@pytest.mark.parametrize("d", [1, 2, 3, 4, 6])
def test_tomita_relations(d):
    K = random_standard(ComplexSpace(d), d)
    md = tomita(K)
    I = np.eye(2 * d)
    assert np.linalg.norm(md.s.A @ md.s.A - I) < 1e-9
    assert np.linalg.norm(md.j.A @ md.j.A - I) < 1e-9
    assert np.linalg.norm(md.s.A - md.j.A @ md.delta_power(0.5).A) < 1e-9 * np.linalg.norm(md.s.A)
    jdj = md.j.A @ md.delta_power(0.5).A @ md.j.A
    assert np.linalg.norm(jdj - md.delta_power(-0.5).A) < 1e-8 * np.linalg.norm(jdj)
    assert distance(commutant_via_j(md), symplectic_complement(K)) < 1e-9
    assert distance(md.delta_it(1.3)(K), K) < 1e-9
    assert md.s.tag == "conjugate" and md.j.tag == "conjugate" and md.delta.tag == "complex"


def test_s_fixes_K():
    K = random_standard(ComplexSpace(3), 5)
    md = tomita(K)
    assert np.allclose(md.s.A @ K.frame, K.frame)


@pytest.mark.parametrize("theta", [0.1, 0.5, 1.0, 1.5, np.pi / 2])
def test_fiber_closed_form(theta):
    md = tomita(fiber_subspace(theta))
    assert np.allclose(md.delta_spectrum, np.sort(fiber_modular_closed_form(theta)), rtol=1e-10)
    assert np.allclose(md.theta_spectrum, theta, atol=1e-9)
    Th = angle_operator(md)
    assert np.allclose(np.linalg.eigvalsh(Th.A), theta, atol=1e-9)


def test_polar_of_tomita_operator_matches_modular_operator():
    md = tomita(fiber_subspace(0.8))
    u, P = polar(Operator(md.space, md.s.A))
    assert np.allclose(u.A, md.j.A, atol=1e-10)
    assert np.allclose(P.A, md.delta_power(0.5).A, atol=1e-10)


@pytest.mark.parametrize("theta", [0.3, 1.0, 1.4])
def test_pair_polar_decomposition(theta):
    K = fiber_subspace(theta)
    s = tomita_pair(K, symplectic_complement(K))
    u, P = polar(s)
    d = P.A @ P.A
    q = (1 + math.sin(theta)) / (1 - math.sin(theta))
    assert np.allclose(np.sort(np.linalg.eigvalsh(d)), [1 / q, 1 / q, q, q], rtol=1e-10)
    # sin Theta = |d - 1| (d + 1)^{-1} on the spectrum of d
    w = np.linalg.eigvalsh(d)
    assert np.allclose(np.abs(w - 1) / (w + 1), math.sin(theta), atol=1e-10)
    assert linearity(u.A, K.space.Jc) == "complex"


def test_pair_must_be_standard():
    K = fiber_subspace(0.5)
    with pytest.raises(NotStandardPair):
        tomita_pair(K, K)


def test_graph_norm_identity(rng):
    K = fiber_subspace(0.6)
    Kp = symplectic_complement(K)
    s = tomita_pair(K, Kp)
    assert graph_norm_residual(K, Kp, s.A, rng) > 0  # the pair is not orthogonal
    E = span(ComplexSpace(2), np.eye(4)[:, :2])
    F = span(ComplexSpace(2), np.eye(4)[:, 2:])
    assert graph_norm_residual(E, F, tomita_pair(E, F).A, rng) < 1e-12


def test_kernel_j_plus_one_is_half_dimensional():
    md = tomita(fiber_subspace(0.9))
    L = kernel_j_plus_I(md.j)
    assert L.r == 2
    assert np.allclose(md.j.A @ L.frame, -L.frame)


def test_angle_projections_split_at_quarter_pi():
    md = tomita(fiber_subspace(0.5))
    lo = angle_projection(md, 0, np.pi / 4)
    hi = angle_projection(md, np.pi / 4, np.pi / 2, closed_low=False)
    assert np.allclose(lo.A + hi.A, np.eye(4))
    assert np.allclose(hi.A, 0)


@pytest.mark.parametrize("theta", sorted(TWO_ANGLE_SUP))
def test_two_angle_frozen(theta):
    r = two_angle_report(fiber_subspace(theta))
    assert r.sup_re_pairing == pytest.approx(TWO_ANGLE_SUP[theta], abs=1e-9)
    assert r.sup_re_pairing == pytest.approx(abs(math.cos(theta / 2 + math.pi / 4)), abs=1e-9)
    assert r.min_graph_ratio == pytest.approx(1 - TWO_ANGLE_SUP[theta], abs=1e-9)
    assert r.kernel_dim == 2


def test_two_angle_bound_on_random_sums():
    for seed in range(5):
        r = two_angle_report(random_standard(ComplexSpace(4), seed, angle_range=(1e-3, np.pi / 2)))
        assert r.sup_re_pairing <= TwoAngleReport.SUP_BOUND + 1e-9
        assert abs(r.sup_re_pairing - r.svd_sup) < 1e-7


def test_spectral_flags():
    f = spectral_flags(tomita(fiber_subspace(0.2)))
    assert f.lambda_min == pytest.approx(math.tan(0.1) ** 2)
    assert "sequence models" in f.note
