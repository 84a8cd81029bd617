import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stdsub.skeleton import (
    DegeneratePairing,
    MissingInvolutions,
    SkeletonTower,
    check_axioms,
    dm,
    equal,
    is_zero,
    rank,
    skeleton_build,
    skeleton_verify,
)
from stdsub.tower import crossproduct_checks, b_identity_report


def test_symplectic_plane():
    sk = skeleton_build((1, 1), pairings=[dm([[1]])])
    assert sk.N == 2
    assert equal(sk.omega, dm([[0, 1], [-1, 0]]))
    v = skeleton_verify(sk)
    assert v.iii_ok and v.iv_radical_dim == 0


def test_far_blocks_commute():
    sk = skeleton_build((1, 1, 1), seed=3)
    assert is_zero(sk.form(sk.block(1), sk.block(3)))
    assert rank(sk.form(sk.block(1), sk.block(2))) == 1


def test_seed7_axioms():
    sk = skeleton_build((2, 2, 2, 2), seed=7, with_involutions=True)
    fails = check_axioms(sk)
    assert all(not v for v in fails.values()), fails


def test_center_of_length_three():
    sk = skeleton_build((1, 1, 1), seed=0, with_involutions=True)
    v = skeleton_verify(sk)
    assert v.v_center_dim == 1
    assert v.v_proof_relation_ok
    assert v.v_stated_formula == "matches"


def test_zero_pairing_rejected():
    with pytest.raises(DegeneratePairing):
        skeleton_build((1, 1), pairings=[dm([[0]])])


def test_unequal_dims_rejected():
    with pytest.raises(DegeneratePairing):
        skeleton_build((1, 2))


def test_center_needs_involutions():
    sk = skeleton_build((1, 1, 1), seed=0)
    with pytest.raises(MissingInvolutions):
        skeleton_verify(sk)


def test_involution_domain():
    sk = skeleton_build((1, 1, 1), seed=0, with_involutions=True)
    x = sk.block(3)
    assert equal(sk.apply_J(2, sk.apply_J(2, x)), x)
    sk4 = skeleton_build((1, 1, 1, 1), seed=0, with_involutions=True)
    with pytest.raises(ValueError):
        sk4.apply_J(2, sk4.block(4))


@settings(max_examples=25, deadline=None)
@given(d=st.integers(1, 3), p=st.integers(1, 3), seed=st.integers(0, 10**6))
def test_even_sums_are_factors(d, p, seed):
    sk = skeleton_build((d,) * (2 * p), seed=seed)
    assert skeleton_verify(sk).iv_radical_dim == 0


@settings(max_examples=15, deadline=None)
@given(d=st.integers(1, 2), p=st.integers(1, 3), seed=st.integers(0, 10**6))
def test_odd_center_formula(d, p, seed):
    sk = skeleton_build((d,) * (2 * p + 1), seed=seed, with_involutions=True)
    v = skeleton_verify(sk)
    assert v.v_center_dim == d
    assert v.v_proof_relation_ok
    assert v.v_stated_formula == ("matches" if p == 1 else "undefined")


def test_skeleton_tower_identities():
    sk = skeleton_build((1,) * 6, seed=1, with_involutions=True)
    st_ = SkeletonTower(sk, origin=1)
    rep = b_identity_report(st_, 1, 1)
    for item in ("iii", "iv", "v"):
        assert rep.items[item].residual == 0
    cp = crossproduct_checks(st_)
    assert cp["pairing_rank"] == 1 and cp["pairing_nondegenerate"]
    assert cp["fixedpoint_residual"] == 0
