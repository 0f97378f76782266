"""
Staggered momentum and q-Laplacian stabilization
================================================

A nonlinear viscosity ``- h^alpha Delta_q u`` in the momentum balance
controls a discrete W^{1,q} norm of the velocity through a summation by
parts identity. The estimate only closes for ``alpha < q - 1``.
"""

import numpy as np

from eulerent import ConfigError, RunConfig, run
from eulerent.diagnostics import norm_summary
from eulerent.mesh import build_1d
from eulerent.schemes import check_stabilization, dual_measure, q_laplacian_1d

# %%
# Summation by parts on a random velocity field.
rng = np.random.default_rng(1)
mesh = build_1d(10, 1.0)
u = np.where(mesh.interior, rng.normal(size=11), 0.0)
for q in (2, 3, 4):
    lhs = (dual_measure(mesh) * q_laplacian_1d(mesh, u, q) * u).sum()
    du = np.diff(u)
    rhs = (0.1 * np.abs(du / 0.1) ** q).sum()
    print(f"q = {q}: {lhs:.12e} vs {rhs:.12e}")

# %%
# Parameter check.
check_stabilization(1.5, 3.0)
try:
    check_stabilization(1.0, 2.0)
except ConfigError as exc:
    print("rejected:", exc)

# %%
# An evolved-velocity run with the default stabilization.
summary, history = run(RunConfig(nx=64, scheme="explicit", velocity_mode="evolved_1d",
                                 velocity_amplitude=0.3, t_end=0.2))
print(f"{summary['steps']} steps, velocity norm {norm_summary(history)['u_w1q']:.4f}")
for b in summary["bound_report"]:
    print(f"    {b['name']:<24} {b['satisfied']}")
