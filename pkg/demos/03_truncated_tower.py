"""
A proper inclusion, truncated
=============================

In C^d a standard subspace has real dimension d, so two different standard
subspaces are never nested. Taking the first D fibers of the angle sequence
theta_n = 1/n together with one extension vector gives a proper inclusion
that is only approximately standard. We watch the defects shrink as D grows.
"""

# %%
from stdsub.acceptance import standard_extension_model
from stdsub.tower import b_space, crossproduct_checks, truncated_tower

# %%
model = standard_extension_model()
print(f"{'D':>4} {'stripped':>8} {'dim B_0':>8} {'B_1 angle':>10} {'fixed point':>12}")
for D in (8, 16, 32):
    t = truncated_tower(model, D)
    B0 = b_space(t, 0)
    cp = crossproduct_checks(t)
    print(f"{D:4d} {t.defects['repairs'][1].stripped_complex_dim:8d} {B0.r:8d} "
          f"{t.defects['b_angle'][1]:10.4f} {cp['fixedpoint_residual']:12.4f}")
