"""
Time steppers for the mass and internal-energy balances
-------------------------------------------------------

Explicit scheme, for each cell K:

.. math::

    \\frac{|K|}{\\delta t}(\\rho_K^{n+1} - \\rho_K^n) + \\sum_\\sigma F_{K,\\sigma}^n = 0,

    \\frac{|K|}{\\delta t}(\\rho_K^{n+1} e_K^{n+1} - \\rho_K^n e_K^n)
    + \\sum_\\sigma F_{K,\\sigma}^n e_\\sigma^n
    + p_K^n \\sum_\\sigma |\\sigma| u_{K,\\sigma}^n = |K| S_K^n,

with :math:`F_{K,\\sigma} = |\\sigma| \\rho_\\sigma u_{K,\\sigma}` and a
non-negative source :math:`S` (zero by default). The implicit scheme evaluates
every flux, face value and the pressure at level ``n+1``.

Velocities are stored on faces: ``u_vec`` holds Cartesian components at face
centers, ``u_face = u_vec . face_normal`` the normal component used by the
fluxes (zero on boundary faces).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .entropy import GasParameters, phi_e, phi_rho
from .errors import ConfigError, ConvergenceError, PositivityError
from .face_values import FaceStrategy, FaceValueRecord, admissible_interval, mesh_face_values
from .mesh import Mesh, h_max

VELOCITY_FIELDS = ("zero", "sine", "sine2d")


# {{{ velocity fields

def prescribed_velocity(mesh: Mesh, name: str = "sine", amplitude: float = 1.0) -> np.ndarray:
    """Cartesian velocity components at face centers, shape ``(n_faces, dim)``.

    ``"sine"`` is ``A sin(pi x / L_x)`` along x; ``"sine2d"`` puts
    ``A sin(pi x / L_x) sin(pi y / L_y)`` in both components. Both vanish on
    the walls they are normal to.
    """
    x = mesh.face_center
    u = np.zeros((mesh.n_faces, mesh.dim))
    if name == "zero":
        pass
    elif name == "sine":
        u[:, 0] = amplitude * np.sin(np.pi * x[:, 0] / mesh.lengths[0])
    elif name == "sine2d":
        if mesh.dim != 2:
            raise ConfigError("'sine2d' velocity needs a 2D mesh")
        s = (np.sin(np.pi * x[:, 0] / mesh.lengths[0])
             * np.sin(np.pi * x[:, 1] / mesh.lengths[1]))
        u[:, 0] = u[:, 1] = amplitude * s
    else:
        raise ConfigError(f"unknown velocity field {name!r}; expected one of {VELOCITY_FIELDS}")
    return u


def normal_velocity(mesh: Mesh, u_vec: np.ndarray) -> np.ndarray:
    """Normal component along ``face_normal``; forced to zero on the boundary."""
    u_vec = np.asarray(u_vec, dtype=np.float64).reshape(mesh.n_faces, -1)
    un = (u_vec * mesh.face_normal).sum(axis=1)
    return np.where(mesh.interior, un, 0.0)

# }}}


# {{{ state and configuration

@dataclass(frozen=True)
class State:
    """Cell densities and internal energies, face velocities, time level."""

    rho: np.ndarray
    e: np.ndarray
    u_face: np.ndarray
    gamma: float
    u_vec: Optional[np.ndarray] = None
    n: int = 0
    t: float = 0.0

    @classmethod
    def from_fields(cls, mesh: Mesh, rho, e, u_vec, gamma, n=0, t=0.0) -> "State":
        rho = np.array(rho, dtype=np.float64).reshape(mesh.n_cells)
        e = np.array(e, dtype=np.float64).reshape(mesh.n_cells)
        u_vec = np.array(u_vec, dtype=np.float64).reshape(mesh.n_faces, -1)
        u_vec[mesh.boundary] = 0.0
        state = cls(rho=rho, e=e, u_face=normal_velocity(mesh, u_vec),
                    gamma=float(gamma), u_vec=u_vec, n=n, t=t)
        state.check_positive()
        return state

    @property
    def p(self) -> np.ndarray:
        return (self.gamma - 1.0) * self.rho * self.e

    def check_positive(self, step=None):
        for name, x in (("density", self.rho), ("internal energy", self.e)):
            bad = np.flatnonzero(~(x > 0))
            if bad.size:
                raise PositivityError(
                    f"non-positive {name} in cell {bad[0]} (value {x[bad[0]]!r})",
                    cell=int(bad[0]), step=step)


@dataclass(frozen=True)
class StabilizationParams:
    """Nonlinear momentum viscosity ``- h^alpha Delta_q u``."""

    alpha: float = 1.5
    q: float = 3.0
    enabled: bool = True

    def __post_init__(self):
        check_stabilization(self.alpha, self.q)


def check_stabilization(alpha: float, q: float):
    """Reject exponents for which the velocity estimate does not close.

    The W^{1,q} velocity bound obtained from the momentum balance grows like
    ``h^{-alpha/q}``; paired with ``dt^{1/p}`` under a fixed CFL number it
    vanishes only if ``alpha < q - 1``.
    """
    if not q >= 2:
        raise ConfigError(f"stabilization exponent q must be >= 2, got {q}")
    if not alpha >= 0:
        raise ConfigError(f"stabilization power alpha must be >= 0, got {alpha}")
    if not alpha < q - 1:
        raise ConfigError(
            f"stabilization needs alpha < q - 1, got alpha={alpha}, q={q}")


SourceHook = Union[None, float, Callable[[Mesh, State], np.ndarray]]


@dataclass(frozen=True)
class SchemeConfig:
    gamma: float = 1.4
    #: fixed time step; ``None`` selects it from the CFL bounds
    dt: Optional[float] = None
    cfl_safety: float = 0.5
    #: relative widening of the stencil extrema used by the CFL bounds
    cfl_margin: float = 0.1
    strategy_rho: FaceStrategy = field(default_factory=FaceStrategy)
    strategy_e: FaceStrategy = field(default_factory=FaceStrategy)
    source_e: SourceHook = None
    velocity_mode: str = "prescribed"
    stabilization: StabilizationParams = field(default_factory=StabilizationParams)
    picard_tol: float = 1.0e-9
    picard_max_iter: int = 100
    linear_tol: float = 1.0e-10

    def __post_init__(self):
        GasParameters(self.gamma)
        object.__setattr__(self, "strategy_rho", FaceStrategy.from_name(self.strategy_rho))
        object.__setattr__(self, "strategy_e", FaceStrategy.from_name(self.strategy_e))
        if not 0 < self.cfl_safety <= 1:
            raise ConfigError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if self.cfl_margin < 0:
            raise ConfigError("cfl_margin must be non-negative")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.velocity_mode not in ("prescribed", "evolved_1d"):
            raise ConfigError(f"unknown velocity mode {self.velocity_mode!r}")
        if isinstance(self.source_e, (int, float)) and self.source_e < 0:
            raise ConfigError("energy source must be non-negative")

    @property
    def phi_rho(self):
        return phi_rho()

    @property
    def phi_e(self):
        return phi_e(self.gamma)


def energy_source(mesh: Mesh, state: State, config: SchemeConfig) -> np.ndarray:
    """Evaluate the source hook; raises if any value is negative."""
    src = config.source_e
    if src is None:
        return np.zeros(mesh.n_cells)
    if callable(src):
        s = np.asarray(src(mesh, state), dtype=np.float64)
    else:
        s = np.full(mesh.n_cells, float(src))
    s = np.broadcast_to(s, (mesh.n_cells,)).astype(np.float64)
    if np.any(s < 0):
        raise ConfigError(f"energy source must be non-negative, got min {s.min()!r}")
    return s


@dataclass(frozen=True)
class StepInfo:
    """What a step used: face values, fluxes, source and step size."""

    dt: float
    u_face: np.ndarray
    rho_face: FaceValueRecord
    e_face: FaceValueRecord
    mass_flux: np.ndarray
    source: np.ndarray
    iterations: int = 1
    implicit: bool = False

# }}}


# {{{ helpers

def _div(mesh, u_face):
    """sum_sigma |sigma| u_{K,sigma}"""
    return mesh.cell_sum(mesh.face_area * u_face)


def _check(x, name, step=None):
    bad = np.flatnonzero(~(x > 0))
    if bad.size:
        raise PositivityError(
            f"non-positive {name} in cell {bad[0]} (value {x[bad[0]]!r}); "
            "time step too large for the CFL condition?", cell=int(bad[0]), step=step)


def _step_dt(config, dt):
    dt = config.dt if dt is None else dt
    if dt is None or not dt > 0:
        raise ConfigError("a positive time step is required")
    return float(dt)


def _face_fluxes(mesh, state, config):
    rho_rec = mesh_face_values(mesh, config.strategy_rho, config.phi_rho, state.rho, state.u_face)
    flux = mesh.face_area * rho_rec.x_sigma * state.u_face
    return rho_rec, flux

# }}}


# {{{ explicit scheme

def explicit_mass_step(mesh: Mesh, state: State, config: SchemeConfig, dt=None) -> np.ndarray:
    """Density at ``n+1``; raises :class:`PositivityError` naming the cell."""
    dt = _step_dt(config, dt)
    _, flux = _face_fluxes(mesh, state, config)
    rho = state.rho - dt / mesh.cell_volume * mesh.cell_sum(flux)
    _check(rho, "density", state.n)
    return rho


def explicit_energy_step(mesh: Mesh, state: State, rho_np1, config: SchemeConfig,
                         dt=None) -> np.ndarray:
    """Internal energy at ``n+1`` given the new density."""
    dt = _step_dt(config, dt)
    _, flux = _face_fluxes(mesh, state, config)
    e_rec = mesh_face_values(mesh, config.strategy_e, config.phi_e, state.e, state.u_face)
    src = energy_source(mesh, state, config)
    return _explicit_energy(mesh, state, np.asarray(rho_np1), flux, e_rec.x_sigma, src, dt)


def _explicit_energy(mesh, state, rho_np1, flux, e_sigma, src, dt):
    vol = mesh.cell_volume
    rhs = (mesh.cell_sum(flux * e_sigma) + state.p * _div(mesh, state.u_face)
           - vol * src)
    e = (state.rho * state.e - dt / vol * rhs) / rho_np1
    _check(e, "internal energy", state.n)
    return e


def explicit_step(mesh: Mesh, state: State, config: SchemeConfig, dt=None):
    """One explicit step: mass, energy, then (evolved mode) momentum.

    Returns ``(new_state, StepInfo)``.
    """
    dt = _step_dt(config, dt)
    rho_rec, flux = _face_fluxes(mesh, state, config)
    e_rec = mesh_face_values(mesh, config.strategy_e, config.phi_e, state.e, state.u_face)
    src = energy_source(mesh, state, config)

    rho = state.rho - dt / mesh.cell_volume * mesh.cell_sum(flux)
    _check(rho, "density", state.n)
    e = _explicit_energy(mesh, state, rho, flux, e_rec.x_sigma, src, dt)

    u_face, u_vec = state.u_face, state.u_vec
    if config.velocity_mode == "evolved_1d":
        u_face = momentum_step_1d(mesh, state, rho, config, dt, flux=flux)
        u_vec = (u_face * mesh.face_normal[:, 0])[:, None]

    new = State(rho=rho, e=e, u_face=u_face, gamma=state.gamma, u_vec=u_vec,
                n=state.n + 1, t=state.t + dt)
    info = StepInfo(dt=dt, u_face=state.u_face, rho_face=rho_rec, e_face=e_rec,
                    mass_flux=flux, source=src)
    return new, info

# }}}


# {{{ implicit scheme

def _weights(mesh, rec, x):
    """Convex weights (w0, w1) on the two face cells reproducing ``rec.x_sigma``."""
    c0 = mesh.face_cells[:, 0]
    c1 = np.where(mesh.interior, mesh.face_cells[:, 1], c0)
    up = np.where(rec.upwind_first, x[c0], x[c1])
    down = np.where(rec.upwind_first, x[c1], x[c0])
    gap = down - up
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = np.where(gap != 0, (rec.x_sigma - up) / gap, 0.0)
    theta = np.clip(theta, 0.0, 1.0)
    w0 = np.where(rec.upwind_first, 1.0 - theta, theta)
    return w0, 1.0 - w0


def _convection_matrix(mesh, coef, w0, w1):
    """Matrix of x -> sum_sigma coef_sigma x_sigma (oriented, interior faces)."""
    f = mesh.interior_faces
    c0, c1 = mesh.face_cells[f, 0], mesh.face_cells[f, 1]
    a = coef[f]
    rows = np.concatenate([c0, c0, c1, c1])
    cols = np.concatenate([c0, c1, c0, c1])
    vals = np.concatenate([a * w0[f], a * w1[f], -a * w0[f], -a * w1[f]])
    n = mesh.n_cells
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsc()


def _linear_solve(A, b, x0, tol):
    """Direct solve for the increment from ``x0``, iteratively refined until
    ``|b - Ax|_inf <= tol (|b - A x0|_inf + 1)``. A consistent ``x0`` (e.g. a
    state at rest) is returned bit for bit."""
    lu = spla.splu(A.tocsc())
    r = b - A @ x0
    target = tol * (np.abs(r).max() + 1.0)
    x = x0 + lu.solve(r)
    for _ in range(5):
        r = b - A @ x
        if np.abs(r).max() <= target:
            return x
        x = x + lu.solve(r)
    r = np.abs(b - A @ x).max()
    if r > target:
        raise ConvergenceError(f"linear solve residual {r:.3e} above {target:.3e}", residual=r)
    return x


def _implicit_transport(mesh, strategy, phi, x_init, build, config, what):
    """Solve ``A(theta) x = b`` where face values ``x_sigma`` are the convex
    combinations of the two face cells with weights frozen at the previous
    iterate (Picard); a single solve for linear strategies."""
    x = x_init
    nonlinear = strategy.kind == "limited"
    iters = config.picard_max_iter if nonlinear else 1
    delta = np.inf
    for k in range(1, iters + 1):
        rec = mesh_face_values(mesh, strategy, phi, x, build.u_face)
        w0, w1 = _weights(mesh, rec, x)
        A, b = build(w0, w1)
        x_new = _linear_solve(A, b, x_init, config.linear_tol)
        _check(x_new, what)
        delta = np.abs(x_new - x).max()
        x = x_new
        if not nonlinear or delta <= config.picard_tol:
            break
    else:
        raise ConvergenceError(
            f"Picard iteration for {what} did not converge in {iters} iterations "
            f"(last update {delta:.3e})", residual=delta)

    c0 = mesh.face_cells[:, 0]
    c1 = np.where(mesh.interior, mesh.face_cells[:, 1], c0)
    x_sigma = w0 * x[c0] + w1 * x[c1]
    if strategy.kind == "upwind":
        lo = hi = x_sigma
    elif strategy.kind == "centered":
        lo = hi = np.full_like(x_sigma, np.nan)
    else:
        lo, hi = admissible_interval(phi, x[c0], x[c1], np.where(rec.upwind_first, 1.0, -1.0))
    record = FaceValueRecord(x_sigma=x_sigma, interval_lo=lo, interval_hi=hi,
                             upwind_first=rec.upwind_first)
    return x, record, k


def implicit_step(mesh: Mesh, state: State, u_np1, config: SchemeConfig, dt=None,
                  u_vec_np1=None):
    """Backward Euler step for mass and internal energy with prescribed
    velocity ``u_np1`` (normal components, zero on the boundary).

    Returns ``(new_state, StepInfo)``.
    """
    dt = _step_dt(config, dt)
    u = np.where(mesh.interior, np.asarray(u_np1, dtype=np.float64), 0.0)
    vol = mesh.cell_volume

    def mass_system(w0, w1):
        A = sp.diags(vol / dt, format="csc") + _convection_matrix(mesh, mesh.face_area * u, w0, w1)
        return A, vol / dt * state.rho

    mass_system.u_face = u
    rho, rho_rec, it_m = _implicit_transport(
        mesh, config.strategy_rho, config.phi_rho, state.rho, mass_system, config, "density")
    flux = mesh.face_area * rho_rec.x_sigma * u

    provisional = State(rho=rho, e=state.e, u_face=u, gamma=state.gamma,
                        u_vec=u_vec_np1, n=state.n + 1, t=state.t + dt)
    src = energy_source(mesh, provisional, config)
    div = _div(mesh, u)

    def energy_system(w0, w1):
        diag = vol / dt * rho + (state.gamma - 1.0) * rho * div
        A = sp.diags(diag, format="csc") + _convection_matrix(mesh, flux, w0, w1)
        return A, vol / dt * state.rho * state.e + vol * src

    energy_system.u_face = u
    e, e_rec, it_e = _implicit_transport(
        mesh, config.strategy_e, config.phi_e, state.e, energy_system, config, "internal energy")

    new = State(rho=rho, e=e, u_face=u, gamma=state.gamma,
                u_vec=state.u_vec if u_vec_np1 is None else u_vec_np1,
                n=state.n + 1, t=state.t + dt)
    info = StepInfo(dt=dt, u_face=u, rho_face=rho_rec, e_face=e_rec, mass_flux=flux,
                    source=src, iterations=max(it_m, it_e), implicit=True)
    return new, info

# }}}


# {{{ CFL conditions

def _stencil_bounds(mesh, x, margin):
    nb = mesh.neighbors()
    vals = np.where(nb >= 0, x[np.maximum(nb, 0)], x[:, None])
    lo = np.minimum(vals.min(axis=1), x) / (1.0 + margin)
    hi = np.maximum(vals.max(axis=1), x) * (1.0 + margin)
    return lo, hi


def _face_pair(mesh, x):
    nb = mesh.neighbors()
    other = np.where(nb >= 0, x[np.maximum(nb, 0)], x[:, None])
    own = np.broadcast_to(x[:, None], other.shape)
    return np.minimum(own, other), np.maximum(own, other)


def _young_weight(phi, lo, hi, pair_lo, pair_hi):
    """Upper bound of phi''(a)^2 / phi''(b), a in [lo, hi], b in [pair_lo, pair_hi]."""
    top = phi.second_range(lo, hi)[1]
    bottom = phi.second_range(pair_lo, pair_hi)[0]
    return top[:, None] ** 2 / bottom


def _min_ratio(num, den, safety):
    with np.errstate(divide="ignore"):
        ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    return float(safety * ratio.min())


def cfl_dt_mass(mesh: Mesh, state: State, config: SchemeConfig) -> float:
    """Time step making R1 + R2 + R02 >= 0 for the upwind mass balance.

    Intermediate points are unknown before the step; they are bounded by the
    stencil extrema of ``rho^n`` widened by ``config.cfl_margin``. The
    numerator carries the lower bound of ``phi''`` that comes from the time
    remainder R1. Returns ``inf`` when no face has inflow.
    """
    phi = config.phi_rho
    lo, hi = _stencil_bounds(mesh, state.rho, config.cfl_margin)
    w = _young_weight(phi, lo, hi, *_face_pair(mesh, state.rho))
    u_k = mesh.cell_face_sign * state.u_face[mesh.cell_faces]
    den = (w * mesh.face_area[mesh.cell_faces] * np.maximum(-u_k, 0.0)).sum(axis=1)
    num = mesh.cell_volume * phi.second_range(lo, hi)[0]
    return _min_ratio(num, den, config.cfl_safety)


def cfl_dt_energy(mesh: Mesh, state: State, rho_np1, config: SchemeConfig) -> float:
    """Time step making R1 + R2 + R >= 0 for the upwind internal-energy balance."""
    phi = config.phi_e
    lo, hi = _stencil_bounds(mesh, state.e, config.cfl_margin)
    w = _young_weight(phi, lo, hi, *_face_pair(mesh, state.e))
    _, flux = _face_fluxes(mesh, state, config)
    f_k = mesh.cell_face_sign * flux[mesh.cell_faces]
    den = (w * np.maximum(-f_k, 0.0)).sum(axis=1)
    num = phi.second_range(lo, hi)[0] * mesh.cell_volume * np.asarray(rho_np1)
    return _min_ratio(num, den, config.cfl_safety)


def cfl_dt_positivity(mesh: Mesh, state: State, config: SchemeConfig) -> float:
    """Outflow bound keeping the explicit density and energy positive.

    The inflow-based CFL bounds say nothing about cells that only lose mass;
    this covers them.
    """
    _, flux = _face_fluxes(mesh, state, config)
    e_rec = mesh_face_values(mesh, config.strategy_e, config.phi_e, state.e, state.u_face)
    f_k = mesh.cell_face_sign * flux[mesh.cell_faces]
    out = np.maximum(f_k, 0.0)
    vol = mesh.cell_volume
    dt_rho = _min_ratio(vol * state.rho, out.sum(axis=1), config.cfl_safety)
    e_out = (out * e_rec.x_sigma[mesh.cell_faces]).sum(axis=1)
    e_out = e_out + state.p * np.maximum(_div(mesh, state.u_face), 0.0)
    dt_e = _min_ratio(vol * state.rho * state.e, e_out, config.cfl_safety)
    return min(dt_rho, dt_e)


def cfl_dt_momentum(mesh: Mesh, state: State, config: SchemeConfig) -> float:
    """Acoustic and stabilization-diffusion limits for the evolved 1D velocity."""
    h = mesh.cell_diameter.min()
    c = np.sqrt(state.gamma * state.p / state.rho)
    speed = np.abs(state.u_face).max() + c.max()
    dt = config.cfl_safety * h / speed
    stab = config.stabilization
    if stab.enabled:
        ux = state.u_face * mesh.face_normal[:, 0]
        grad = np.abs(ux[mesh.cell_faces[:, 1]] - ux[mesh.cell_faces[:, 0]]) / mesh.cell_diameter
        nu = (stab.q - 1.0) * h_max(mesh) ** stab.alpha * grad.max() ** (stab.q - 2.0)
        if nu > 0:
            dt = min(dt, config.cfl_safety * state.rho.min() * h * h / (2.0 * nu))
    return float(dt)


def select_dt_explicit(mesh: Mesh, state: State, config: SchemeConfig,
                       t_remaining: float = math.inf, dt_cap: Optional[float] = None) -> float:
    """CFL-driven step: min of mass, positivity (and momentum) bounds, then
    shrunk until the energy bound, which depends on ``rho^{n+1}``, holds."""
    dt = min(cfl_dt_mass(mesh, state, config), cfl_dt_positivity(mesh, state, config))
    if config.velocity_mode == "evolved_1d":
        dt = min(dt, cfl_dt_momentum(mesh, state, config))
    dt = min(dt, t_remaining)
    if not math.isfinite(dt):
        dt = dt_cap if dt_cap is not None else h_max(mesh)
    _, flux = _face_fluxes(mesh, state, config)
    div_flux = mesh.cell_sum(flux) / mesh.cell_volume
    for _ in range(60):
        rho_np1 = state.rho - dt * div_flux
        if np.all(rho_np1 > 0):
            dt_e = cfl_dt_energy(mesh, state, rho_np1, config)
            if dt <= dt_e:
                return float(dt)
            dt = min(dt_e, 0.9 * dt)
        else:
            dt *= 0.5
    raise ConvergenceError("could not find a time step satisfying the CFL bounds")

# }}}


# {{{ staggered 1D momentum

def _require_1d(mesh):
    if mesh.dim != 1:
        raise ConfigError("the momentum driver is one-dimensional")


def dual_measure(mesh: Mesh) -> np.ndarray:
    """|D_sigma| = (|K| + |L|) / 2 on interior faces, 0 on the boundary."""
    _require_1d(mesh)
    c0 = mesh.face_cells[:, 0]
    c1 = np.where(mesh.interior, mesh.face_cells[:, 1], c0)
    return np.where(mesh.interior, 0.5 * (mesh.cell_volume[c0] + mesh.cell_volume[c1]), 0.0)


def dual_density(mesh: Mesh, rho) -> np.ndarray:
    """Measure-weighted average of the two adjacent cell densities."""
    _require_1d(mesh)
    rho = np.asarray(rho)
    c0 = mesh.face_cells[:, 0]
    c1 = np.where(mesh.interior, mesh.face_cells[:, 1], c0)
    v0, v1 = mesh.cell_volume[c0], mesh.cell_volume[c1]
    return (v0 * rho[c0] + v1 * rho[c1]) / (v0 + v1)


def q_laplacian_1d(mesh: Mesh, u_face, q: float) -> np.ndarray:
    """Discrete ``-Delta_q u`` on faces.

    With ``tau_K = |du_K|^{q-2} du_K / h_K^{q-1}`` and ``du_K`` the jump of
    the velocity across cell K, ``|D_sigma| (-Delta_q u)_sigma = -(tau_L - tau_K)``
    for ``sigma = K|L``. Summation by parts gives
    ``sum_sigma |D_sigma| (-Delta_q u)_sigma u_sigma = sum_K h_K |du_K / h_K|^q``.
    """
    _require_1d(mesh)
    ux = np.where(mesh.interior, np.asarray(u_face) * mesh.face_normal[:, 0], 0.0)
    du = ux[mesh.cell_faces[:, 1]] - ux[mesh.cell_faces[:, 0]]
    tau = np.abs(du) ** (q - 2.0) * du / mesh.cell_diameter ** (q - 1.0)
    f = mesh.interior_faces
    out = np.zeros(mesh.n_faces)
    out[f] = -(tau[mesh.face_cells[f, 1]] - tau[mesh.face_cells[f, 0]]) / dual_measure(mesh)[f]
    return out


def momentum_step_1d(mesh: Mesh, state: State, rho_np1, config: SchemeConfig, dt=None,
                     flux=None) -> np.ndarray:
    """Explicit staggered momentum update, returns the new face velocities.

    Dual cells are centered on interior faces; dual mass fluxes at cell
    centers are half-sums of the primal ones, which keeps the dual mass
    balance consistent with the primal one. Convection is upwind, the pressure
    gradient is ``p_L - p_K`` and the stabilization is ``h_M^alpha (-Delta_q u)``.
    Boundary velocities stay zero.
    """
    _require_1d(mesh)
    dt = _step_dt(config, dt)
    if flux is None:
        _, flux = _face_fluxes(mesh, state, config)
    nx = mesh.face_normal[:, 0]
    ux = np.where(mesh.interior, state.u_face * nx, 0.0)
    fx = flux * nx

    left, right = mesh.cell_faces[:, 0], mesh.cell_faces[:, 1]
    fc = 0.5 * (fx[left] + fx[right])
    uc = np.where(fc >= 0, ux[left], ux[right])

    f = mesh.interior_faces
    k, l = mesh.face_cells[f, 0], mesh.face_cells[f, 1]
    d = dual_measure(mesh)[f]
    rho_d_old = dual_density(mesh, state.rho)[f]
    rho_d_new = dual_density(mesh, rho_np1)[f]
    bad = np.flatnonzero(~(rho_d_new > 0))
    if bad.size:
        raise PositivityError(f"non-positive dual density at face {f[bad[0]]}",
                              cell=int(f[bad[0]]), step=state.n)

    rhs = fc[l] * uc[l] - fc[k] * uc[k] + (state.p[l] - state.p[k])
    stab = config.stabilization
    if stab.enabled:
        rhs = rhs + h_max(mesh) ** stab.alpha * d * q_laplacian_1d(mesh, state.u_face, stab.q)[f]

    u_new = np.zeros(mesh.n_faces)
    u_new[f] = (rho_d_old * ux[f] - dt / d * rhs) / rho_d_new
    return u_new * nx

# }}}


def velocity_norm_w1q(mesh: Mesh, u_series, dt, q: float) -> float:
    """Discrete L^q(0,T; W^{1,q}) velocity norm.

    ``u_series`` holds Cartesian face velocities per time level, each of shape
    ``(n_faces,)`` or ``(n_faces, dim)``; ``dt`` is a scalar or one weight per
    level. Differences run over ordered face pairs of each cell.
    """
    if q < 1:
        raise ConfigError("q must be >= 1")
    u_series = [np.asarray(u, dtype=np.float64).reshape(mesh.n_faces, -1) for u in u_series]
    weights = np.broadcast_to(np.asarray(dt, dtype=np.float64), (len(u_series),))
    vol, h = mesh.cell_volume, mesh.cell_diameter
    total = 0.0
    for w, u in zip(weights, u_series):
        v = u[mesh.cell_faces]                      # (cells, faces, comps)
        diff = np.abs(v[:, :, None, :] - v[:, None, :, :]) / h[:, None, None, None]
        total += w * float((vol[:, None, None, None] * diff ** q).sum())
    return total ** (1.0 / q)


def with_dt(config: SchemeConfig, dt) -> SchemeConfig:
    return replace(config, dt=dt)
