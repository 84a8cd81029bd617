"""
Two-dimensional standard subspaces
==================================

A standard subspace of C^2 is fixed, up to unitaries, by the angle theta
between K and iK. Here we compute its modular data numerically and compare
with the closed forms.
"""

# %%
import numpy as np

from stdsub.hilbert import ComplexSpace, fiber_subspace, principal_angles, random_standard, times_i
from stdsub.modular import angle_operator, two_angle_report, tomita

# %%
# The angle between K and iK is read off from principal angles.
for theta in (0.3, 0.8, 1.4):
    K = fiber_subspace(theta)
    angle = principal_angles(K, times_i(K)).min()
    print(f"theta={theta:.2f}  angle(K, iK)={angle:.12f}")

# %%
# Modular eigenvalues come in a pair tan^2(theta/2), cot^2(theta/2).
for theta in (0.3, 0.8, 1.4):
    md = tomita(fiber_subspace(theta))
    closed = np.array([np.tan(theta / 2) ** 2, 1 / np.tan(theta / 2) ** 2])
    print(f"theta={theta:.2f}  delta={np.unique(np.round(md.delta_eigvals, 12))}  closed form={closed}")

# %%
# The angle operator recovers theta from delta.
md = tomita(fiber_subspace(0.8))
print("angle operator spectrum:", np.unique(np.round(np.linalg.eigvalsh(angle_operator(md).A), 12)))

# %%
# K and Ker(j + 1) never come closer than 45 degrees: the pairing of unit
# vectors stays below sqrt(2)/2, for single fibers and for random sums.
for K in (fiber_subspace(0.4), fiber_subspace(1.4), random_standard(ComplexSpace(5), 3)):
    rep = two_angle_report(K)
    print(f"real dim {K.r}: sup |Re<h,k>| = {rep.sup_re_pairing:.6f}  (bound {rep.SUP_BOUND:.6f})")
