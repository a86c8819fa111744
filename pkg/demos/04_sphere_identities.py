"""
Sphere integrals behind the bound
=================================

The bound on local models rests on three facts about integrals over the
Bloch sphere.  Each is checked here by quadrature.
"""

import math

import numpy as np

from omnibell import correlation_tensor, ghz_noise_mixture
from omnibell.sphereint import (PROJECTION_BOUND, inner_product_EE, project_response,
                                random_sign_of_dot, random_two_caps, sign_of_dot,
                                verify_lhv_bound)

tensor = correlation_tensor(ghz_noise_mixture(1.0))

###############################################################################
# The overlap of E with itself is (4 pi / 3)^N times the sum of squares.

ee = inner_product_EE(tensor)
print(f"(E, E) = {ee:.6f}, expected {(4 * math.pi / 3) ** 6 * tensor.frobenius_sq():.6f}")

###############################################################################
# A +-1 response projects onto the linear functions with length at most
# sqrt(3 pi); the hemisphere response reaches it.

rng = np.random.default_rng(0)
print(f"\nbound sqrt(3 pi)      {PROJECTION_BOUND:.5f}")
print(f"hemisphere response   {project_response(sign_of_dot([0, 0, 1])).norm:.5f}")
print(f"random two-cap (max)  "
      f"{max(project_response(random_two_caps(rng)).norm for _ in range(20)):.5f}")

###############################################################################
# A deterministic local model overlaps with E by at most (2 pi)^N T_max.

worst = max(np.subtract(*verify_lhv_bound([random_sign_of_dot(rng) for _ in range(6)],
                                          tensor, seed=0))
            for _ in range(10))
print(f"\nlargest lhs - rhs over 10 models: {worst:.4g}")
