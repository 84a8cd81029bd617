"""Towers and tunnels of standard subspaces, relative commutants and B-spaces.

Three regimes are offered, each named in every report:

``constant``
    exact finite-dimensional towers.  A standard subspace of C^d has real
    dimension d, so a standard inclusion ``M0 <= M1`` forces ``M0 = M1``.
``truncated``
    the first D fibers of a sequence model with its extension vectors.  The
    non-standard levels are repaired before each Tomita step and the
    repair is accounted for in the defects.
``skeleton``
    exact real symplectic models of the B-spaces (see :mod:`stdsub.skeleton`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import (
    ComplexSpace,
    canonical_parts,
    classify_subspace,
    distance,
    inclusion_defect,
    join,
    meet,
    orthogonal_complement,
    principal_angles,
    span,
    symplectic_complement,
    times_i,
)
from .modular import kernel_j_plus_I, tomita
from .seqmodel import materialize

TOWER_TOL = 1e-8


class NotStandardAtStep(ValueError):
    def __init__(self, k, classification=None, note=""):
        self.k = k
        self.classification = classification
        msg = f"M_{k} is not standard"
        if classification is not None:
            msg += (f": dim(M /\\ iM) = {classification.dim_complex_part}, "
                    f"codim(M + iM) = {classification.dim_cyclic_defect}")
        if note:
            msg += f" ({note})"
        super().__init__(msg)


class IndexOutOfRange(KeyError):
    pass


@dataclass
class TowerState:
    """Indexed family M_k with modular conjugations j_k and defect records."""

    regime: str
    M: dict = field(default_factory=dict)
    modular: dict = field(default_factory=dict)
    defects: dict = field(default_factory=dict)

    def __getitem__(self, k):
        try:
            return self.M[k]
        except KeyError:
            raise IndexOutOfRange(f"M_{k} not computed (range {min(self.M)}..{max(self.M)})")

    def j(self, k):
        try:
            return self.modular[k].j
        except KeyError:
            raise IndexOutOfRange(f"j_{k} not available")

    @property
    def indices(self):
        return sorted(self.M)

    @property
    def space(self):
        return next(iter(self.M.values())).space


def _standard_modular(M, k):
    cls = classify_subspace(M)
    if not cls.is_standard:
        note = ""
        if M.r != M.space.d:
            note = (f"a standard subspace of C^{M.space.d} has real dimension "
                    f"{M.space.d}, this one has {M.r}")
        raise NotStandardAtStep(k, cls, note)
    return tomita(M)


def extend_tower(M0, M1, k_min=-2, k_max=3):
    """Exact tower/tunnel ``M_{k+1} = j_k M'_{k-1}`` and ``M_{k-1} = j_k M'_{k+1}``."""
    if inclusion_defect(M0, M1) > TOWER_TOL:
        raise ValueError("M0 is not contained in M1")
    t = TowerState("constant", {0: M0, 1: M1})
    t.modular[0] = _standard_modular(M0, 0)
    t.modular[1] = _standard_modular(M1, 1)
    for k in range(1, k_max):
        t.M[k + 1] = t.j(k)(symplectic_complement(t.M[k - 1]))
        t.modular[k + 1] = _standard_modular(t.M[k + 1], k + 1)
    for k in range(0, k_min, -1):
        t.M[k - 1] = t.j(k)(symplectic_complement(t.M[k + 1]))
        t.modular[k - 1] = _standard_modular(t.M[k - 1], k - 1)
    t.defects["recursion"] = recursion_residual(t)
    return t


def recursion_residual(t):
    """Max distance between stored levels and the ones re-derived from neighbours."""
    worst = 0.0
    for k in t.indices:
        if k - 1 in t.M and k + 1 in t.M and k in t.modular:
            fwd = t.j(k)(symplectic_complement(t.M[k - 1]))
            bwd = t.j(k)(symplectic_complement(t.M[k + 1]))
            worst = max(worst, distance(fwd, t.M[k + 1]), distance(bwd, t.M[k - 1]))
    return worst


# -- truncated regime ---------------------------------------------------------------

@dataclass(frozen=True)
class RepairRecord:
    stripped_complex_dim: int      # complex dimension of M /\ iM
    cyclic_defect_dim: int         # complex codimension of M + iM
    repaired_distance: float       # distance between M and the repaired standard space


def aligned_real_form(X, M_ref):
    """The dim_C(X) directions of the complex subspace X closest to M_ref.

    Taken from the principal vectors of the pair (X, M_ref); the result is a
    candidate real form of X.
    """
    m = X.r // 2
    if m == 0:
        return X
    U, _, _ = np.linalg.svd(X.frame.T @ M_ref.frame, full_matrices=True)
    return span(X.space, X.frame @ U[:, :m])


def repair(M, M_ref, k):
    """A standard subspace standing in for the non-standard level ``M``.

    ``M`` splits as ``C + R`` with ``C = M /\\ iM`` and ``R`` standard in its
    own complex span.  What ``R`` misses is ``C`` together with the cyclic
    defect ``Q = (M + iM)^perp``; each receives the real form best aligned
    with the neighbouring level ``M_ref``.  The repair fails when the
    assembled space is not standard.
    """
    cls = classify_subspace(M)
    if cls.is_standard:
        return tomita(M), M, RepairRecord(0, 0, 0.0)
    C, R = canonical_parts(M)
    Q = orthogonal_complement(join(M, times_i(M)))
    pieces = [R, aligned_real_form(C, M_ref), aligned_real_form(Q, M_ref)]
    repaired = span(M.space, np.hstack([p.frame for p in pieces]))
    rcls = classify_subspace(repaired)
    if not rcls.is_standard:
        raise NotStandardAtStep(k, rcls, "repair left a non-standard residual")
    rec = RepairRecord(C.r // 2, Q.r // 2, distance(M, repaired))
    return tomita(repaired), repaired, rec


def truncated_tower(model, D, k_min=-1, k_max=3):
    """Tower of the first D fibers of a sequence model, with repair accounting."""
    M0, M1 = materialize(model, D)
    t = TowerState("truncated", {0: M0, 1: M1})
    t.defects["D"] = D
    t.defects["repairs"] = {}
    t.defects["repaired"] = {}

    def modular_at(k, ref):
        md, rep, rec = repair(t.M[k], t.M[ref], k)
        t.modular[k] = md
        t.defects["repairs"][k] = rec
        t.defects["repaired"][k] = rep

    modular_at(0, 1)
    modular_at(1, 0)
    for k in range(1, k_max):
        t.M[k + 1] = t.j(k)(symplectic_complement(t.M[k - 1]))
        if k + 1 < k_max:
            modular_at(k + 1, k)
    for k in range(0, k_min, -1):
        t.M[k - 1] = t.j(k)(symplectic_complement(t.M[k + 1]))
        if k - 1 > k_min:
            modular_at(k - 1, k)
    t.defects["inclusion"] = {
        k: inclusion_defect(t.M[k], t.M[k + 1]) for k in t.indices if k + 1 in t.M}
    t.defects["recursion"] = recursion_residual(t)
    return t


# -- derived spaces ---------------------------------------------------------------

def relative_commutant(t, k, l):
    """A_{k,l} = M'_k /\\ M_l."""
    if k > l:
        raise ValueError("need k <= l")
    return meet(symplectic_complement(t[k]), t[l])


def expected_b_dim(t):
    """Codimension of M_0 in M_1, the dimension every B_k has in the limit."""
    return t[1].r - t[0].r


def b_space(t, k):
    """B_k = M_{k+1} /\\ Ker(j_k + 1).

    In the truncated regime the exact intersection can fall short of the
    expected dimension; it is then replaced by the principal directions of
    Ker(j_k + 1) closest to M_{k+1}, and the largest angle used is stored in
    ``t.defects["b_angle"][k]``.  These directions are exactly
    j_k-anti-invariant, so omega still vanishes on them.
    """
    if k + 1 not in t.M:
        raise IndexOutOfRange(f"M_{k + 1} not computed")
    K = kernel_j_plus_I(t.j(k))
    B = meet(t[k + 1], K)
    angles = t.defects.setdefault("b_angle", {})
    want = expected_b_dim(t)
    if t.regime != "truncated" or B.r >= want:
        angles[k] = 0.0
        return B
    U, sv, _ = np.linalg.svd(K.frame.T @ t[k + 1].frame, full_matrices=False)
    angles[k] = float(np.arccos(np.clip(sv[want - 1], -1.0, 1.0)))
    return span(K.space, K.frame @ U[:, :want])


def omega_on(space_frame_a, space_frame_b, Omega):
    return space_frame_a.T @ Omega @ space_frame_b


def commutativity_residual(B):
    """max |omega| on unit vectors of B x B."""
    if B.r == 0:
        return 0.0
    return float(np.max(np.abs(B.frame.T @ B.space.omega @ B.frame)))


def radical_dim(S, rtol=1e-9):
    """Dimension of {x in S : omega(x, S) = 0} and the smallest nonzero-test value."""
    if S.r == 0:
        return 0, 0.0
    G = S.frame.T @ S.space.omega @ S.frame
    sv = np.linalg.svd(G, compute_uv=False)
    return int(np.sum(sv <= rtol * max(1.0, sv[0]))), float(sv[-1])


def subspace_gap(E, F):
    """Distance between subspaces that is 1 whenever the dimensions differ."""
    if E.r != F.r:
        return 1.0
    return distance(E, F)


def _dims_note(E, F):
    note = f"dims {E.r} vs {F.r}"
    if E.r != F.r:
        small, large = (E, F) if E.r < F.r else (F, E)
        note += f"; smaller-in-larger defect {inclusion_defect(small, large):.3e}"
    return note


def _sum(spaces, space):
    frames = [X.frame for X in spaces if X.r]
    if not frames:
        return space.zero()
    return span(space, np.hstack(frames))


# -- identity report ------------------------------------------------------------------

@dataclass(frozen=True)
class ItemResult:
    residual: float | None
    measure: str
    note: str = ""

    def to_dict(self):
        return {"residual": self.residual, "measure": self.measure, "note": self.note}


@dataclass(frozen=True)
class IdentityReport:
    regime: str
    k: int
    p: int
    items: dict

    def to_dict(self):
        return {"regime": self.regime, "k": self.k, "p": self.p,
                "items": {name: r.to_dict() for name, r in sorted(self.items.items())}}


def _unavailable(exc):
    return ItemResult(None, "unavailable", str(exc).strip("'\""))


def b_identity_report(t, k, p, strict=False):
    """Residuals of the B-decomposition identities at level k, length p.

    Items: (i) M_{k+p} = M_k + sum_{j<p} B_{k+j}; (ii) the same for
    A_{k-1,k+p}; (iii) commutativity of B_k; (iv) radical of
    sum_{j=1}^{2p} B_{k+j}; (v) center of sum_{j=1}^{2p+1} B_{k+j} against
    the alternating-involution formula; (vi) A_{k-1,k+1} = B_k; (vii)
    A_{k-1,k+2} = B_k + B_{k+1} and its radical.
    """
    from .skeleton import SkeletonTower
    if isinstance(t, SkeletonTower):
        return _identities_skeleton(t, k, p)
    items = {}
    space = t.space
    cache = {}

    def B(m):
        if m not in cache:
            cache[m] = b_space(t, m)
        return cache[m]

    def run(name, fn):
        try:
            items[name] = fn()
        except (IndexOutOfRange, KeyError) as exc:
            if strict:
                raise
            items[name] = _unavailable(exc)

    def item_i():
        rhs = _sum([t[k]] + [B(k + j) for j in range(p)], space)
        return ItemResult(subspace_gap(t[k + p], rhs), "distance", _dims_note(t[k + p], rhs))

    def item_ii():
        lhs = relative_commutant(t, k - 1, k + p)
        rhs = _sum([relative_commutant(t, k - 1, k)] + [B(k + j) for j in range(p)], space)
        return ItemResult(subspace_gap(lhs, rhs), "distance", _dims_note(lhs, rhs))

    def item_iii():
        return ItemResult(commutativity_residual(B(k)), "max |omega| on B_k x B_k")

    def item_iv():
        S = _sum([B(k + j) for j in range(1, 2 * p + 1)], space)
        rd, smin = radical_dim(S)
        return ItemResult(float(rd), "radical dimension", f"dim {S.r}, smallest singular {smin:.3e}")

    def item_v():
        S = _sum([B(k + j) for j in range(1, 2 * p + 2)], space)
        G = S.frame.T @ space.omega @ S.frame
        Z = span(space, S.frame @ null_space_tol(G))
        X = B(k + 1)
        stated = X.frame.copy()
        composed, b = X.frame.copy(), X.frame.copy()
        for i in range(1, p + 1):
            Ji = t.j(k + 2 * i).A
            stated = stated + (-1) ** i * (Ji @ X.frame)
            b = -(Ji @ b)
            composed = composed + b
        d_stated = subspace_gap(Z, span(space, stated))
        d_comp = subspace_gap(Z, span(space, composed))
        return ItemResult(d_stated, "distance",
                          f"center dim {Z.r}; composed recursion distance {d_comp:.3e}")

    def item_vi():
        A = relative_commutant(t, k - 1, k + 1)
        return ItemResult(subspace_gap(A, B(k)), "distance",
                          _dims_note(A, B(k)) + "; expected only for irreducible inclusions")

    def item_vii():
        A = relative_commutant(t, k - 1, k + 2)
        S = _sum([B(k), B(k + 1)], space)
        rd, _ = radical_dim(A)
        return ItemResult(subspace_gap(A, S), "distance",
                          _dims_note(A, S) + f"; radical dim {rd}; expected only for "
                          "irreducible inclusions")

    for name, fn in [("i", item_i), ("ii", item_ii), ("iii", item_iii), ("iv", item_iv),
                     ("v", item_v), ("vi", item_vi), ("vii", item_vii)]:
        run(name, fn)
    return IdentityReport(t.regime, k, p, items)


def null_space_tol(G, rtol=1e-9):
    if G.size == 0:
        return np.zeros((G.shape[1], G.shape[1]))
    U, sv, Vt = np.linalg.svd(G)
    keep = sv > rtol * max(1.0, sv[0] if sv.size else 1.0)
    return Vt[int(np.sum(keep)):].T


def _identities_skeleton(st, k, p):
    from .skeleton import hstack, same_span, skeleton_verify
    items = {}

    def exact(flag):
        return 0.0 if flag else 1.0

    def blocks(ks):
        return hstack(*[st.B(m) for m in ks])

    def attempt(name, fn):
        try:
            items[name] = fn()
        except (KeyError, ValueError) as exc:
            items[name] = _unavailable(exc)

    def item_i():
        rhs = hstack(st.M(k), blocks(range(k, k + p)))
        return ItemResult(exact(same_span(st.M(k + p), rhs)), "exact")

    def item_ii():
        rhs = hstack(st.A(k - 1, k), blocks(range(k, k + p)))
        return ItemResult(exact(same_span(st.A(k - 1, k + p), rhs)), "exact")

    def item_iii():
        st.block_of(k)
        v = skeleton_verify(st.sk, p=None)
        return ItemResult(exact(v.iii_ok), "exact")

    def item_iv():
        first = st.block_of(k + 1)
        st.block_of(k + 2 * p)
        v = skeleton_verify(st.sk, p=p, start=first)
        return ItemResult(float(v.iv_radical_dim), "exact radical dimension")

    def item_v():
        first = st.block_of(k + 1)
        st.block_of(k + 2 * p + 1)
        v = skeleton_verify(st.sk, p=p, start=first)
        return ItemResult(exact(v.v_proof_relation_ok), "exact",
                          f"center dim {v.v_center_dim}; stated sum: {v.v_stated_formula}")

    def item_vi():
        return ItemResult(exact(same_span(st.A(k - 1, k + 1), st.B(k))), "exact",
                          "holds only for irreducible inclusions")

    def item_vii():
        A = st.A(k - 1, k + 2)
        return ItemResult(exact(same_span(A, blocks([k, k + 1]))), "exact",
                          "holds only for irreducible inclusions")

    for name, fn in [("i", item_i), ("ii", item_ii), ("iii", item_iii), ("iv", item_iv),
                     ("v", item_v), ("vi", item_vi), ("vii", item_vii)]:
        attempt(name, fn)
    return IdentityReport("skeleton", k, p, items)


# -- crossed-product checks ---------------------------------------------------------

PAIRING_RTOL = 1e-9


def crossproduct_checks(t):
    """Fixed-point identity M_1 /\\ B_1' = M_0 and the B_0 x B_1 duality."""
    from .skeleton import SkeletonTower, skeleton_crossproduct_checks
    if isinstance(t, SkeletonTower):
        out = skeleton_crossproduct_checks(t)
        out["regime"] = "skeleton"
        return out
    B0, B1 = b_space(t, 0), b_space(t, 1)
    fixed = meet(t[1], symplectic_complement(B1))
    P = B0.frame.T @ t.space.omega @ B1.frame
    if P.size:
        sv = np.linalg.svd(P, compute_uv=False)
        r = int(np.sum(sv > PAIRING_RTOL * max(1.0, sv[0])))
        smin = float(sv[-1])
    else:
        r, smin = 0, 0.0
    return {
        "regime": t.regime,
        "fixedpoint_residual": subspace_gap(fixed, t[0]),
        "pairing_rank": r,
        "pairing_smallest_singular": smin,
        "pairing_nondegenerate": r == min(B0.r, B1.r),
        "pairing_bounded": True,
        "b_angles": {str(k): v for k, v in sorted(t.defects.get("b_angle", {}).items())},
        "note": "finite-dimensional B_0 and B_1: the pairing is automatically continuous",
    }


# -- fiberwise relative commutant ---------------------------------------------------

def fiberwise_relative_commutant(thetas):
    """A_{0,3} as the direct sum of two-dimensional pieces with angles theta_n.

    Each piece is spanned by a vector of B_1 and a vector of B_2 in its own
    C^2, and the summands are complex orthogonal.  The decomposition is
    recovered by intersecting with each coordinate C^2; returns the subspace,
    the per-fiber (real dimension, angle between piece and i * piece) and the
    direct-sum defect dim A - sum of piece dimensions.
    """
    from .hilbert import fiber_sum_frame
    thetas = np.asarray(thetas, dtype=float)
    D = thetas.size
    space = ComplexSpace(2 * D)
    A = span(space, fiber_sum_frame(thetas))
    pieces = []
    for n in range(D):
        C = span(space, np.eye(4 * D)[:, 4 * n:4 * n + 4])
        piece = meet(A, C)
        angle = float(np.min(principal_angles(piece, times_i(piece)))) if piece.r else None
        pieces.append((piece.r, angle))
    return A, pieces, A.r - sum(r for r, _ in pieces)
