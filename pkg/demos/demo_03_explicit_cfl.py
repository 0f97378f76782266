"""
Explicit schemes: CFL conditions and remainder signs
====================================================

The explicit scheme produces an entropy inequality up to a remainder. For
upwind face values the time step from the CFL conditions makes the
non-conservative parts of the mass and energy remainders non-negative.
"""

from eulerent import RunConfig, run
from eulerent.mesh import build_1d
from eulerent.schemes import SchemeConfig, State, cfl_dt_energy, cfl_dt_mass

# %%
# A hand-sized check: two unit cells, uniform state, inflow speed 2.
mesh = build_1d(2, 2.0)
state = State.from_fields(mesh, [1.0, 1.0], [1.0, 1.0], [[0.0], [2.0], [0.0]], 2.0)
cfg = SchemeConfig(gamma=2.0, cfl_safety=1.0, cfl_margin=0.0)
print("mass CFL:", cfl_dt_mass(mesh, state, cfg), " energy CFL:",
      cfl_dt_energy(mesh, state, state.rho, cfg))

# %%
# A full run with the time step chosen by the CFL conditions.
summary, history = run(RunConfig(nx=64, scheme="explicit", n_steps=200))
mass = min((s.remainders["R1_rho"] + s.remainders["R2_rho"] + s.remainders["R02_rho"]).min()
           for s in history.steps)
energy = min((s.remainders["R1_e"] + s.remainders["R2_e"] + s.remainders["R_e"]).min()
             for s in history.steps)
print(f"t = {summary['t_final']:.4f} after {summary['steps']} steps")
print(f"min mass part {mass:.3e}, min energy part {energy:.3e}")
print(f"mass drift {summary['mass_relative_drift']:.1e}")
