"""
The six-qubit GHZ mixture and its correlation tensor
=====================================================

Three GHZ states, rotated into each other by a local unitary, are mixed
with white noise.  The correlation tensor turns out to have a very sparse
and regular structure.
"""

import numpy as np

from omnibell import correlation_tensor, ghz_noise_mixture
from omnibell.tensorlab import nonzero_components
from omnibell.qcore import mixed_ghz_states

###############################################################################
# The three pure components are GHZ states in the z, x and y bases.

for k, psi in enumerate(mixed_ghz_states(), start=1):
    t = correlation_tensor(psi).values
    print(f"psi_{k}: T_xxxxxx={t[0, 0, 0, 0, 0, 0]:+.3f}  "
          f"T_yyyyyy={t[1, 1, 1, 1, 1, 1]:+.3f}  T_zzzzzz={t[2, 2, 2, 2, 2, 2]:+.3f}")

###############################################################################
# Mixing with noise at visibility f scales every entry by f.  Only 93 of the
# 729 entries survive and each has size f/3.

f = 0.9
tensor = correlation_tensor(ghz_noise_mixture(f))
print(f"\nf = {f}: {tensor.nonzero_count()} nonzero entries, "
      f"sum of squares {tensor.frobenius_sq():.4f} (93 f^2 / 9 = {93 * f**2 / 9:.4f})")

###############################################################################
# A few of them, with 1-based indices (1 = x, 2 = y, 3 = z).

for idx, value in nonzero_components(tensor)[:6]:
    print("  T_" + "".join(map(str, idx)), f"{value:+.4f}")

###############################################################################
# Every index multiset is either all-equal or two of one axis and four of
# another.

patterns = {tuple(sorted(np.bincount(idx, minlength=4)[1:].tolist())) for idx, _ in
            nonzero_components(tensor)}
print("\nindex count patterns:", sorted(patterns))
