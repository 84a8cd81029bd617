import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stdsub.fock import (
    RadiusExceeded,
    TruncatedFock,
    ccr_defect,
    coherent,
    commutator_norm,
    commutator_prediction,
    displaced_tail,
    field_self_test,
    gamma,
    gamma_antilinear,
    graded_lex_basis,
    number_phase_defect,
    tail_bound,
    vacuum_amplitude,
    vacuum_coherent_defect,
    weyl,
)
from stdsub.hilbert import random_unitary

FOCK_TOL = 1e-10


@pytest.fixture(scope="module")
def fock1():
    return TruncatedFock(1, 32, radius=1.0)


@pytest.fixture(scope="module")
def fock2():
    return TruncatedFock(2, 14, radius=1.0)


def cvec(rng, d, r):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return r * v / np.linalg.norm(v)


def test_basis_order():
    assert graded_lex_basis(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(graded_lex_basis(3, 4)) == math.comb(7, 3)


def test_tail_bound_closed_form():
    # 1 - e^{-r^2} sum_{n<=N} r^{2n}/n!, times e^{r^2}
    r, N = 0.9, 6
    direct = sum(r ** (2 * n) / math.factorial(n) for n in range(N + 1, 80))
    assert tail_bound(N, r) == pytest.approx(direct, rel=1e-10)
    assert tail_bound(32, 1.0) < 1e-36


def test_displaced_tail_vacuum():
    # displaced vacuum is coherent: tail of a Poisson weight
    a = 0.7
    direct = math.exp(-a * a) * sum(a ** (2 * n) / math.factorial(n) for n in range(11, 80))
    assert displaced_tail(0, 10, a) == pytest.approx(direct, rel=1e-8)


def test_coherent_inner_products(fock2, rng):
    for _ in range(5):
        f, g = cvec(rng, 2, 0.8), cvec(rng, 2, 0.6)
        ef, eg = coherent(f, fock2), coherent(g, fock2)
        assert ef.inner(eg) == pytest.approx(np.exp(np.vdot(f, g)), abs=1e-9)


def test_radius_guard(fock1):
    with pytest.raises(RadiusExceeded):
        coherent([2.0], fock1)
    with pytest.raises(RadiusExceeded):
        weyl([1.5], fock1)


def test_weyl_zero_is_identity(fock2):
    assert np.allclose(weyl([0, 0], fock2).matrix, np.eye(fock2.dim))


def test_field_convention(fock2):
    assert field_self_test(np.array([0.3, 0.4j]), fock2) < FOCK_TOL


def test_vacuum_amplitude(fock1, rng):
    for _ in range(10):
        h = cvec(rng, 1, rng.uniform(0.1, 1.0))
        got, exact, tol = vacuum_amplitude(h, fock1)
        assert abs(got - exact) <= tol


def test_vacuum_coherent(fock1):
    assert vacuum_coherent_defect(np.array([0.8 + 0.2j]), fock1) < 1e-12


def test_ccr_trivial(fock1):
    assert ccr_defect([0.0], [0.4], fock1) == 0.0


def test_ccr_calibrated(fock1, rng):
    for _ in range(5):
        h, k = cvec(rng, 1, 0.45), cvec(rng, 1, 0.45)
        rep = ccr_defect(h, k, fock1, report=True)
        assert rep.defect <= rep.tolerance


def test_ccr_swap_symmetry(fock1):
    h, k = np.array([0.3 + 0.1j]), np.array([-0.2 + 0.35j])
    assert ccr_defect(h, k, fock1) == pytest.approx(ccr_defect(k, h, fock1), abs=1e-9)


def test_commutator_prediction(fock1):
    h, k = np.array([0.5]), np.array([0.45j])
    assert commutator_norm(h, k, fock1) == pytest.approx(commutator_prediction(h, k, fock1), rel=1e-6)
    assert commutator_norm(h, 0.8 * h, fock1) < 1e-12


@settings(max_examples=10, deadline=None)
@given(theta=st.floats(-math.pi, math.pi))
def test_number_grading(theta):
    assert number_phase_defect(theta, TruncatedFock(2, 6)) < 1e-12


def test_gamma_identity(fock2):
    assert np.allclose(gamma(np.eye(2), fock2).matrix, np.eye(fock2.dim))


def test_gamma_functorial(rng):
    fock = TruncatedFock(2, 5)
    U, V = random_unitary(2, rng), random_unitary(2, rng)
    lhs = gamma(U @ V, fock).matrix
    rhs = gamma(U, fock).matrix @ gamma(V, fock).matrix
    assert np.allclose(lhs, rhs, atol=1e-12)
    G = gamma(U, fock).matrix
    assert np.allclose(G.conj().T @ G, np.eye(fock.dim), atol=1e-12)


def test_gamma_on_coherent(fock2, rng):
    A = 0.7 * random_unitary(2, rng)
    G = gamma(A, fock2)
    assert G.unitarity_defect is None
    for _ in range(3):
        f, g = cvec(rng, 2, 0.7), cvec(rng, 2, 0.7)
        val = coherent(f, fock2).inner(G @ coherent(g, fock2))
        assert val == pytest.approx(np.exp(np.vdot(f, A @ g)), abs=1e-9)


def test_gamma_delta_power(fock2):
    # Gamma of a positive contraction d acts on e^g as e^{d g}
    dvals = np.array([0.3, 0.8])
    g = np.array([0.5, -0.4j])
    lhs = gamma(np.diag(dvals), fock2) @ coherent(g, fock2)
    rhs = coherent(dvals * g, fock2)
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-14)


def test_gamma_antilinear(fock2, rng):
    B = random_unitary(2, rng)
    G = gamma_antilinear(B, fock2).matrix
    g = cvec(rng, 2, 0.6)
    # J e^g = e^{B conj(g)}
    lhs = G @ np.conj(coherent(g, fock2).coeffs)
    assert np.allclose(lhs, coherent(B @ np.conj(g), fock2).coeffs, atol=1e-12)
