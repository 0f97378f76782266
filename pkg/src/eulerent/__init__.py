"""
eulerent
========

Finite-volume schemes for the compressible Euler equations in
internal-energy form, with tools to evaluate their discrete entropy
inequalities, remainder terms and the associated estimates.

Modules: :mod:`~eulerent.mesh`, :mod:`~eulerent.entropy`,
:mod:`~eulerent.face_values`, :mod:`~eulerent.schemes`,
:mod:`~eulerent.diagnostics`, :mod:`~eulerent.harness`.
"""

from .errors import (ConfigError, ConsistencyError, ConvergenceError, DomainError,
                     EulerEntError, MeshError, PositivityError)
from .mesh import Mesh, build, build_1d, build_2d, h_max, h_underline, regularity_cm
from .entropy import (ConvexFunction, GasParameters, delta_phi, eos_pressure, eta,
                      entropy_identity_residual, phi_e, phi_rho, phi_square, solve_xkl)
from .face_values import FaceStrategy, FaceValueRecord, admissible_interval, face_value
from .schemes import (SchemeConfig, StabilizationParams, State, explicit_step,
                      implicit_step, prescribed_velocity, select_dt_explicit)
from .harness import RunConfig, load_config, refinement_study, run

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ConsistencyError", "ConvergenceError", "DomainError",
    "EulerEntError", "MeshError", "PositivityError",
    "Mesh", "build", "build_1d", "build_2d", "h_max", "h_underline", "regularity_cm",
    "ConvexFunction", "GasParameters", "delta_phi", "eos_pressure", "eta",
    "entropy_identity_residual", "phi_e", "phi_rho", "phi_square", "solve_xkl",
    "FaceStrategy", "FaceValueRecord", "admissible_interval", "face_value",
    "SchemeConfig", "StabilizationParams", "State", "explicit_step", "implicit_step",
    "prescribed_velocity", "select_dt_explicit",
    "RunConfig", "load_config", "refinement_study", "run",
]
