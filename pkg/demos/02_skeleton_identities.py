"""
Exact symplectic skeletons
==========================

The spaces B_k of a tower can be modelled by finite blocks paired only with
their neighbours. Over the rationals every identity is checked exactly.
"""

# %%
from stdsub.skeleton import SkeletonTower, check_axioms, skeleton_build, skeleton_verify
from stdsub.tower import crossproduct_checks, b_identity_report

# %%
# An even number of blocks gives a factor; the radical is trivial.
sk = skeleton_build((2, 2, 2, 2), seed=7, with_involutions=True)
print("axiom failures:", {k: len(v) for k, v in check_axioms(sk).items()})
print("radical dimension:", skeleton_verify(sk).iv_radical_dim)

# %%
# An odd number of blocks has a center as large as one block.
for p in (1, 2, 3):
    v = skeleton_verify(skeleton_build((1,) * (2 * p + 1), seed=p, with_involutions=True))
    print(f"p={p}: center dim {v.v_center_dim}, recursion image matches: {v.v_proof_relation_ok}, "
          f"literal alternating sum: {v.v_stated_formula}")

# %%
# The same blocks seen as a tower.
st = SkeletonTower(skeleton_build((1,) * 6, seed=1, with_involutions=True), origin=3)
for name, item in sorted(b_identity_report(st, 0, 1).items.items()):
    print(name, item.residual, item.note)
print(crossproduct_checks(st))
