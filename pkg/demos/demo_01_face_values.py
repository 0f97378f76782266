"""
Face values and admissible intervals
====================================

A face value is admissible when it lies between the upwind value and the
tangent intersection ``x_KL``. Upwind values are admissible by construction;
the limited strategy clips a centered candidate into the interval; the
centered strategy is kept as an unlimited reference.
"""

import numpy as np

from eulerent import face_value, phi_rho
from eulerent.face_values import FaceStrategy, admissible_interval

x_k, x_l = 1.0, np.e
for u in (1.0, -1.0):
    lo, hi = admissible_interval(phi_rho(), x_k, x_l, u)
    print(f"u = {u:+.0f}: admissible interval [{lo:.6f}, {hi:.6f}]")
    for kind in ("upwind", "centered", "limited"):
        rec = face_value(kind, phi_rho(), x_k, x_l, u)
        inside = bool(rec.contains()) if FaceStrategy(kind).satisfies_hypothesis else "n/a"
        print(f"   {kind:>8}: x_sigma = {float(rec.x_sigma):.6f}  admissible: {inside}")

# %%
# Any candidate reconstruction can be limited, for instance the downwind value.
downwind = FaceStrategy("limited", candidate=lambda a, b: b)
print("limited downwind:", float(face_value(downwind, phi_rho(), x_k, x_l, 1.0).x_sigma))
