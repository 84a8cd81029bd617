"""
Weyl operators on a truncated Fock space
========================================

Second quantization turns symplectic complements into commutants. On a
Fock space cut at N particles the relations hold up to a tail that we can
compute exactly.
"""

# %%
import numpy as np

from stdsub.fock import (
    TruncatedFock,
    ccr_defect,
    commutator_norm,
    commutator_prediction,
    tail_bound,
    vacuum_amplitude,
)

fock = TruncatedFock(1, 32, radius=1.0)

# %%
# Vacuum amplitude against exp(-|h|^2 / 4).
for r in (0.2, 0.6, 1.0):
    got, exact, tol = vacuum_amplitude(np.array([r]), fock)
    print(f"|h|={r}: error {abs(got - exact):.2e}  tolerance {tol:.2e}")
print(f"coherent tail at N=32, r=1: {tail_bound(32, 1.0):.3e}")

# %%
# The Weyl relation on the low-particle sector.
rep = ccr_defect(np.array([0.3 + 0.2j]), np.array([-0.1 + 0.4j]), fock, report=True)
print(f"CCR defect {rep.defect:.2e}  tolerance {rep.tolerance:.2e}  ({rep.note})")

# %%
# Real h and k commute; h and ik do not.
h = np.array([0.5])
print("commuting pair:", commutator_norm(h, 0.9 * h, fock))
print("control pair:  ", commutator_norm(h, 0.5j * h / 0.5, fock),
      "predicted", commutator_prediction(h, 0.5j * h / 0.5, fock))
