import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stdsub.hilbert import (
    ComplexSpace,
    DimensionMismatch,
    RealSubspace,
    canonical_parts,
    classify_pair,
    classify_subspace,
    complexify_matrix,
    complexify_vector,
    distance,
    fiber_subspace,
    inclusion_defect,
    join,
    meet,
    principal_angles,
    random_standard,
    random_subspace,
    realify_matrix,
    realify_vector,
    span,
    symplectic_complement,
    symplectic_complement_bruteforce,
    times_i,
)


def test_realification_roundtrip(rng):
    z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert np.allclose(complexify_vector(realify_vector(z)), z)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.allclose(complexify_matrix(realify_matrix(A)), A)
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    assert np.allclose(realify_matrix(A) @ realify_vector(x), realify_vector(A @ x))


def test_symplectic_form_is_imaginary_part(space, rng):
    x, y = rng.standard_normal(space.n), rng.standard_normal(space.n)
    zx, zy = complexify_vector(x), complexify_vector(y)
    assert space.sympl(x, y) == pytest.approx(np.vdot(zx, zy).imag)
    assert space.self_test()


def test_complement_of_real_line():
    sp = ComplexSpace(1)
    R = span(sp, np.array([[1.0], [0.0]]))
    assert symplectic_complement(R) == R


def test_complement_agrees_with_bruteforce(space, rng):
    for _ in range(10):
        K = random_subspace(space, rng)
        assert distance(symplectic_complement(K), symplectic_complement_bruteforce(K)) < 1e-10


def test_full_and_zero_are_dual(space):
    assert symplectic_complement(space.full()).r == 0
    assert symplectic_complement(space.zero()).r == space.n


@settings(max_examples=40, deadline=None)
@given(d=st.integers(1, 6), seed=st.integers(0, 2**31))
def test_lattice_anti_isomorphism(d, seed):
    rng = np.random.default_rng(seed)
    sp = ComplexSpace(d)
    E, F = random_subspace(sp, rng), random_subspace(sp, rng)
    Ep, Fp = symplectic_complement(E), symplectic_complement(F)
    assert distance(symplectic_complement(Ep), E) < 1e-8
    assert distance(symplectic_complement(join(E, F)), meet(Ep, Fp)) < 1e-8
    assert distance(symplectic_complement(meet(E, F)), join(Ep, Fp)) < 1e-8
    assert E.r + Ep.r == 2 * d


def test_principal_angles_of_fiber_with_its_rotation():
    for theta in (0.2, 0.9, np.pi / 2):
        K = fiber_subspace(theta)
        assert np.allclose(principal_angles(K, times_i(K)), theta)


def test_meet_of_transverse_planes_is_zero(rng):
    sp = ComplexSpace(2)
    E = span(sp, np.eye(4)[:, :2])
    F = span(sp, np.eye(4)[:, 2:])
    assert meet(E, F).r == 0
    assert join(E, F).r == 4
    assert inclusion_defect(E, join(E, F)) < 1e-14


def test_classification_flags(space):
    K = random_standard(space, 3)
    c = classify_subspace(K)
    assert c.is_standard and c.dim_complex_part == 0 and c.dim_cyclic_defect == 0
    assert classify_subspace(space.full()).dim_complex_part == space.n
    assert classify_subspace(space.zero()).dim_cyclic_defect == space.n


def test_fiber_is_a_factor():
    c = classify_subspace(fiber_subspace(0.7))
    assert c.is_standard and c.is_factor and c.dim_center == 0


def test_real_line_is_abelian():
    sp = ComplexSpace(1)
    R = span(sp, np.array([[1.0], [0.0]]))
    c = classify_subspace(R)
    assert c.is_standard and not c.is_factor and c.dim_center == 1


def test_standard_pair():
    K = fiber_subspace(0.7)
    assert classify_pair(K, symplectic_complement(K)).standard
    assert not classify_pair(K, K).standard


def test_canonical_parts_split_complex_part():
    sp = ComplexSpace(2)
    M = span(sp, np.column_stack([np.eye(4)[:, 0], np.eye(4)[:, 1], np.eye(4)[:, 2]]))
    C, R = canonical_parts(M)
    assert C.r == 2 and R.r == 1
    assert distance(join(C, R), M) < 1e-12


def test_json_roundtrip(rng):
    K = random_subspace(ComplexSpace(3), rng, r=4)
    text = K.to_json()
    assert json.loads(text)["dim_complex"] == 3
    assert RealSubspace.from_json(text) == K


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        distance(ComplexSpace(1).full(), ComplexSpace(2).full())
