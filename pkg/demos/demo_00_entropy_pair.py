"""
The entropy pair and the tangent intersection
=============================================

The entropy of a perfect gas splits into a density part ``z log z`` and an
internal-energy part ``-log z / (gamma - 1)``. Both are strictly convex, and
the pair satisfies a pointwise identity that lets the mass and energy
estimates combine into an entropy estimate.
"""

import numpy as np

from eulerent import entropy_identity_residual, eta, phi_e, phi_rho, phi_square, solve_xkl
from eulerent.entropy import delta_phi

# %%
# The identity rho phi_rho'(rho) - phi_rho(rho) + phi_e'(e) p = 0 holds for
# every state, up to rounding.
rng = np.random.default_rng(0)
rho, e = np.exp(rng.uniform(-2, 2, (2, 5)))
print("identity residuals:", entropy_identity_residual(rho, e, 1.4))
print("eta(1, 1) =", eta(1.0, 1.0, 1.4))

# %%
# Tangents of a convex function at two points meet between them. For
# ``z log z`` the meeting point is the logarithmic mean; for ``z^2`` it is
# the midpoint.
for phi in (phi_rho(), phi_e(1.4), phi_square()):
    print(f"{phi.name:>8}: x_KL(1, 3) = {solve_xkl(phi, 1.0, 3.0):.10f}")

# %%
# The conservative part of the face remainder, for a face value between the
# two cell values.
for x_sigma in (1.0, solve_xkl(phi_rho(), 1.0, 2.0), 2.0):
    print(f"delta_phi(1, 2, {x_sigma:.6f}) = {delta_phi(phi_rho(), 1.0, 2.0, x_sigma):+.10f}")
