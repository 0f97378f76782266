"""
Entropy residuals, remainders, discrete norms and bound checks
--------------------------------------------------------------

Every remainder is evaluated exactly from quantities the scheme produces.
Terms whose textbook form involves an unknown mean-value point are computed
through the equivalent exact expression; for instance the time remainder

.. math::

    (R_1)_K = \\frac{1}{\\delta t}\\bigl[\\varphi'(x^{n+1})(x^{n+1} - x^n)
    - \\varphi(x^{n+1}) + \\varphi(x^n)\\bigr]
    = \\frac{1}{2\\delta t}\\varphi''(\\xi)(x^{n+1} - x^n)^2

is a Bregman divergence. Its midpoint evaluation and a rigorous lower bound
are reported next to it.

Per-cell fields carry the ``1/|K|`` normalization, so cell sums are
``sum_K |K| R_K``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .entropy import delta_phi, phi_e, phi_rho
from .face_values import FaceValueRecord, mesh_face_values
from .mesh import Mesh, h_max, h_underline, regularity_cm

#: absolute slack for sign checks of remainders that vanish analytically
SIGN_TOL = 1.0e-12
GLOBAL_ENTROPY_TOL = 1.0e-8


# {{{ records

@dataclass
class StepDiagnostics:
    """Diagnostics of the step ``n -> n+1``."""

    step: int
    time: float
    dt: float
    local_entropy_residual: np.ndarray
    global_entropy: float
    remainders: Dict[str, np.ndarray] = field(default_factory=dict)
    bound_report: list = field(default_factory=list)

    def scalars(self, mesh: Mesh) -> Dict[str, float]:
        """Per-step scalar summaries, used for CSV output."""
        vol = mesh.cell_volume
        out = {
            "dt": self.dt,
            "global_entropy": self.global_entropy,
            "residual_max": float(self.local_entropy_residual.max()),
        }
        for name, r in self.remainders.items():
            out[f"{name}_l1"] = float((vol * np.abs(r)).sum())
            out[f"{name}_sum"] = float((vol * r).sum())
            out[f"{name}_min"] = float(r.min())
        return out


@dataclass(frozen=True)
class BoundConstants:
    """Bounds of the run in the form the estimates use them.

    ``M`` bounds ``rho, 1/rho, e, 1/e`` and ``|u|`` over all levels.
    """

    M: float
    phi_rho_prime_inf: float
    phi_e_prime_inf: float
    phi_rho_second_inf: float
    phi_e_second_inf: float

    @classmethod
    def from_states(cls, states, gamma) -> "BoundConstants":
        m = 1.0
        for s in states:
            m = max(m, s.rho.max(), 1.0 / s.rho.min(), s.e.max(), 1.0 / s.e.min(),
                    np.abs(s.u_face).max())
            if s.u_vec is not None:
                m = max(m, np.abs(s.u_vec).max())
        fr, fe = phi_rho(), phi_e(gamma)
        return cls(M=float(m),
                   phi_rho_prime_inf=fr.deriv_sup(m), phi_e_prime_inf=fe.deriv_sup(m),
                   phi_rho_second_inf=fr.second_sup(m), phi_e_second_inf=fe.second_sup(m))


def bound_entry(name, lhs, rhs, guaranteed=True, note=""):
    lhs, rhs = float(lhs), float(rhs)
    return {"name": name, "lhs": lhs, "rhs": rhs, "satisfied": bool(lhs <= rhs),
            "guaranteed": bool(guaranteed), "note": note}

# }}}


# {{{ entropy

def global_entropy(mesh: Mesh, state) -> float:
    """sum_K |K| eta(rho_K, e_K)."""
    fe = phi_e(state.gamma)
    eta = phi_rho().eval(state.rho) + state.rho * fe.eval(state.e)
    return float((mesh.cell_volume * eta).sum())


def _face_entropy_flux(mesh, rho_sigma, e_sigma, u_face, gamma):
    eta_s = phi_rho().eval(rho_sigma) + rho_sigma * phi_e(gamma).eval(e_sigma)
    return mesh.cell_sum(mesh.face_area * eta_s * u_face)


def _records(mesh, state, rho_face, e_face, strategies):
    if rho_face is None:
        rho_face = mesh_face_values(mesh, strategies[0], phi_rho(), state.rho, state.u_face)
    if e_face is None:
        e_face = mesh_face_values(mesh, strategies[1], phi_e(state.gamma), state.e, state.u_face)
    return rho_face, e_face


def _eta(state):
    return phi_rho().eval(state.rho) + state.rho * phi_e(state.gamma).eval(state.e)


def entropy_residual_implicit(mesh: Mesh, state_n, state_np1, dt, info=None,
                              strategies=("upwind", "upwind")) -> np.ndarray:
    """(|K|/dt)(eta^{n+1} - eta^n) + sum_sigma |sigma| eta_sigma^{n+1} u^{n+1}.

    Face values come from ``info`` when given (the ones the stepper used),
    otherwise they are rebuilt from ``state_np1`` with ``strategies``.
    """
    rho_f, e_f = (info.rho_face, info.e_face) if info is not None else (None, None)
    rho_f, e_f = _records(mesh, state_np1, rho_f, e_f, strategies)
    return (mesh.cell_volume / dt * (_eta(state_np1) - _eta(state_n))
            + _face_entropy_flux(mesh, rho_f.x_sigma, e_f.x_sigma, state_np1.u_face,
                                 state_n.gamma))


def entropy_residual_explicit(mesh: Mesh, state_n, state_np1, dt, info=None,
                              strategies=("upwind", "upwind")) -> np.ndarray:
    """(|K|/dt)(eta^{n+1} - eta^n) + sum_sigma |sigma| eta_sigma^n u^n, no remainder."""
    rho_f, e_f = (info.rho_face, info.e_face) if info is not None else (None, None)
    rho_f, e_f = _records(mesh, state_n, rho_f, e_f, strategies)
    return (mesh.cell_volume / dt * (_eta(state_np1) - _eta(state_n))
            + _face_entropy_flux(mesh, rho_f.x_sigma, e_f.x_sigma, state_n.u_face,
                                 state_n.gamma))

# }}}


# {{{ remainders

def _per_slot(mesh, face_array):
    """Face quantity seen from each cell, oriented outward."""
    return mesh.cell_face_sign * np.asarray(face_array)[mesh.cell_faces]


def _slot_sum(mesh, slot_values):
    return slot_values.sum(axis=1) / mesh.cell_volume


def _tangent_gap(phi, x_k, x_s):
    """phi(x_K) + phi'(x_K)(x_s - x_K) - phi(x_s), which is <= 0."""
    return phi.eval(x_k) + phi.deriv(x_k) * (x_s - x_k) - phi.eval(x_s)


def time_remainder(phi, x_old, x_new, dt, weight=1.0):
    """Exact R1, its midpoint evaluation and a lower bound, in that order."""
    d = x_new - x_old
    exact = weight * (phi.deriv(x_new) * d - phi.eval(x_new) + phi.eval(x_old)) / dt
    mid = weight * 0.5 * phi.second(0.5 * (x_old + x_new)) * d * d / dt
    lower = weight * 0.5 * phi.second_range(x_old, x_new)[0] * d * d / dt
    # rounding: a Bregman divergence is never negative
    return np.maximum(exact, 0.0), mid, lower


def conservative_remainder(mesh: Mesh, phi, cell_values, record: FaceValueRecord,
                           face_weight) -> np.ndarray:
    """sum_sigma delta_phi_sigma w_{K,sigma} / |K| with ``face_weight`` oriented
    along ``face_normal`` (``|sigma| u`` for the mass, ``F`` for the energy)."""
    x = np.asarray(cell_values)
    c0 = mesh.face_cells[:, 0]
    c1 = np.where(mesh.interior, mesh.face_cells[:, 1], c0)
    dphi = np.asarray(delta_phi(phi, x[c0], x[c1], record.x_sigma))
    w = np.where(mesh.interior, face_weight, 0.0)
    return mesh.cell_sum(dphi * w) / mesh.cell_volume


def remainder_implicit(mesh: Mesh, state_np1, info, u_np1=None, dt=None):
    """(delta_Rm, delta_Re) at level n+1, from the face values of the step."""
    u = state_np1.u_face if u_np1 is None else np.asarray(u_np1)
    d_rm = conservative_remainder(mesh, phi_rho(), state_np1.rho, info.rho_face,
                                  mesh.face_area * u)
    d_re = conservative_remainder(mesh, phi_e(state_np1.gamma), state_np1.e, info.e_face,
                                  info.mass_flux)
    return d_rm, d_re


def remainder_implicit_full(mesh: Mesh, state_n, state_np1, info, dt):
    """All implicit remainders: R1/R2 for mass and energy and delta_R."""
    fr, fe = phi_rho(), phi_e(state_n.gamma)
    r1m, r1m_mid, _ = time_remainder(fr, state_n.rho, state_np1.rho, dt)
    r1e, r1e_mid, _ = time_remainder(fe, state_n.e, state_np1.e, dt, weight=state_n.rho)
    u_k = _per_slot(mesh, mesh.face_area * info.u_face)
    f_k = _per_slot(mesh, info.mass_flux)
    rho_s = info.rho_face.x_sigma[mesh.cell_faces]
    e_s = info.e_face.x_sigma[mesh.cell_faces]
    r2m = _slot_sum(mesh, _tangent_gap(fr, state_np1.rho[:, None], rho_s) * u_k)
    r2e = _slot_sum(mesh, _tangent_gap(fe, state_np1.e[:, None], e_s) * f_k)
    d_rm, d_re = remainder_implicit(mesh, state_np1, info)
    return {"R1_m": r1m, "R1_m_mid": r1m_mid, "R2_m": r2m, "R_m": r1m + r2m,
            "R1_e": r1e, "R1_e_mid": r1e_mid, "R2_e": r2e, "R_e": r1e + r2e,
            "delta_Rm": d_rm, "delta_Re": d_re}


def remainder_explicit_mass(mesh: Mesh, state_n, state_np1, info, dt):
    """Fields R, R1, R2, R01, R02 (plus R1_mid, R1_lower and delta_R2)."""
    phi = phi_rho()
    x0, x1 = state_n.rho, state_np1.rho
    r1, r1_mid, r1_low = time_remainder(phi, x0, x1, dt)
    u_k = _per_slot(mesh, mesh.face_area * info.u_face)
    x_s = info.rho_face.x_sigma[mesh.cell_faces]
    r2 = _slot_sum(mesh, _tangent_gap(phi, x0[:, None], x_s) * u_k)
    dphi = phi.deriv(x1) - phi.deriv(x0)
    r01 = dphi * x0 * u_k.sum(axis=1) / mesh.cell_volume
    r02 = dphi * _slot_sum(mesh, (x_s - x0[:, None]) * u_k)
    d_r2 = conservative_remainder(mesh, phi, x0, info.rho_face, mesh.face_area * info.u_face)
    return {"R": r01 + r02, "R1": r1, "R1_mid": r1_mid, "R1_lower": r1_low, "R2": r2,
            "R01": r01, "R02": r02, "delta_R2": d_r2}


def remainder_explicit_energy(mesh: Mesh, state_n, state_np1, info, dt):
    """Fields R, R1, R2 (plus R1_mid, R1_lower, delta_R2 and the pressure
    coupling term R_p)."""
    phi = phi_e(state_n.gamma)
    x0, x1 = state_n.e, state_np1.e
    r1, r1_mid, r1_low = time_remainder(phi, x0, x1, dt, weight=state_np1.rho)
    f_k = _per_slot(mesh, info.mass_flux)
    x_s = info.e_face.x_sigma[mesh.cell_faces]
    r2 = _slot_sum(mesh, _tangent_gap(phi, x0[:, None], x_s) * f_k)
    dphi = phi.deriv(x1) - phi.deriv(x0)
    r = dphi * _slot_sum(mesh, (x_s - x0[:, None]) * f_k)
    div = _per_slot(mesh, mesh.face_area * info.u_face).sum(axis=1) / mesh.cell_volume
    r_p = dphi * state_n.p * div
    d_r2 = conservative_remainder(mesh, phi, x0, info.e_face, info.mass_flux)
    return {"R": r, "R1": r1, "R1_mid": r1_mid, "R1_lower": r1_low, "R2": r2,
            "R_p": r_p, "delta_R2": d_r2}


def cons_noncons_sides(mesh: Mesh, rho_n, rho_np1, z_n, z_np1, z_face, flux, dt):
    """Both sides of the conservative / non-conservative identity.

    ``lhs = (|K|/dt)(rho^{n+1} z^{n+1} - rho^n z^n) + sum F z_sigma`` and
    ``rhs = (|K|/dt) rho^{n+1}(z^{n+1} - z^n) + sum F (z_sigma - z_K)``; they
    agree whenever ``rho`` satisfies the mass balance with the fluxes ``F``.
    """
    vol = mesh.cell_volume
    f_k = _per_slot(mesh, flux)
    z_s = np.asarray(z_face)[mesh.cell_faces]
    lhs = vol / dt * (rho_np1 * z_np1 - rho_n * z_n) + (f_k * z_s).sum(axis=1)
    rhs = vol / dt * rho_np1 * (z_np1 - z_n) + (f_k * (z_s - z_n[:, None])).sum(axis=1)
    return lhs, rhs

# }}}


# {{{ norms

def _levels(series):
    return np.atleast_2d(np.asarray(series, dtype=np.float64))


def _weights(dt, n):
    return np.broadcast_to(np.asarray(dt, dtype=np.float64), (n,))


def norm_bv_space(mesh: Mesh, series, dt) -> float:
    """sum_n dt sum_{sigma=K|L} |sigma| |z_L - z_K|."""
    z = _levels(series)
    f = mesh.interior_faces
    jumps = np.abs(z[:, mesh.face_cells[f, 1]] - z[:, mesh.face_cells[f, 0]])
    return float((_weights(dt, len(z)) * (jumps * mesh.face_area[f]).sum(axis=1)).sum())


def norm_bv_time(mesh: Mesh, series, dt=None) -> float:
    """sum_n sum_K |K| |z_K^{n+1} - z_K^n|."""
    z = _levels(series)
    return float((np.abs(np.diff(z, axis=0)) * mesh.cell_volume).sum())


def norm_l1(mesh: Mesh, series, dt) -> float:
    """sum_n dt sum_K |K| |z_K^n|."""
    z = _levels(series)
    return float((_weights(dt, len(z)) * (np.abs(z) * mesh.cell_volume).sum(axis=1)).sum())


def norm_weak_m11(mesh: Mesh, series, dt, mode_count: int = 8, times=None,
                  t_final=None) -> float:
    """Lower bound of the discrete weak (-1, 1) norm.

    The supremum over test functions is restricted to
    ``psi = sin(k pi x / L_x) [sin(l pi y / L_y)] (1 - t / T)`` with
    ``k, l = 1..mode_count``, whose gradient sup is ``k pi / L_x`` in 1D and
    ``max(k pi / L_x, l pi / L_y)`` in 2D. ``times`` gives the time stamp of
    each level (default ``0, dt_0, dt_0 + dt_1, ...``) and ``t_final`` the
    horizon ``T`` (default: last stamp).
    """
    if mode_count < 1:
        raise ValueError("mode_count must be >= 1")
    z = _levels(series)
    w = _weights(dt, len(z))
    if times is None:
        times = np.concatenate([[0.0], np.cumsum(w)[:-1]])
    times = np.asarray(times, dtype=np.float64)
    t_final = float(times[-1] if t_final is None else t_final)
    if t_final <= 0:
        return 0.0
    a = ((w * (1.0 - times / t_final))[:, None] * z).sum(axis=0) * mesh.cell_volume

    k = np.arange(1, mode_count + 1)
    x = mesh.cell_center
    lx = mesh.lengths[0]
    sx = np.sin(np.pi * np.outer(x[:, 0], k) / lx)
    if mesh.dim == 1:
        vals = a @ sx
        grad = k * np.pi / lx
    else:
        ly = mesh.lengths[1]
        sy = np.sin(np.pi * np.outer(x[:, 1], k) / ly)
        vals = (sx * a[:, None]).T @ sy
        grad = np.maximum.outer(k * np.pi / lx, k * np.pi / ly)
    return float((np.abs(vals) / grad).max())

# }}}


# {{{ run history and bound checks

@dataclass
class RunHistory:
    """Everything a run produced, as needed by :func:`check_bounds`."""

    mesh: Mesh
    config: object
    scheme: str
    states: List = field(default_factory=list)
    infos: List = field(default_factory=list)
    steps: List[StepDiagnostics] = field(default_factory=list)
    dt_from_cfl: bool = False

    @property
    def dts(self) -> np.ndarray:
        return np.array([i.dt for i in self.infos])

    def level_weights(self) -> np.ndarray:
        """dt_n per state level; the last level reuses the last step size."""
        d = self.dts
        return np.append(d, d[-1]) if d.size else np.ones(len(self.states))

    def field_series(self, name) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.states])

    def remainder_series(self, name) -> np.ndarray:
        return np.array([s.remainders[name] for s in self.steps])


def step_diagnostics(mesh: Mesh, state_n, state_np1, info, scheme: str) -> StepDiagnostics:
    dt = info.dt
    if scheme == "implicit":
        res = entropy_residual_implicit(mesh, state_n, state_np1, dt, info)
        rem = remainder_implicit_full(mesh, state_n, state_np1, info, dt)
    else:
        res = entropy_residual_explicit(mesh, state_n, state_np1, dt, info)
        rem = {f"{k}_rho": v for k, v in
               remainder_explicit_mass(mesh, state_n, state_np1, info, dt).items()}
        rem.update({f"{k}_e": v for k, v in
                    remainder_explicit_energy(mesh, state_n, state_np1, info, dt).items()})
        rem["R_eta_1"] = rem["delta_R2_rho"] + rem["delta_R2_e"]
        rem["R_eta_2"] = rem["R_rho"] + rem["R_e"] + rem["R_p_e"]
        rem["R_eta_upwind"] = rem["R01_rho"] + rem["R_p_e"]
    return StepDiagnostics(step=state_np1.n, time=state_np1.t, dt=dt,
                           local_entropy_residual=res,
                           global_entropy=global_entropy(mesh, state_np1),
                           remainders=rem)


def r01_constant(mesh: Mesh) -> float:
    """Calibrated constant of the R01 estimate, ``2 * (faces per cell)^2``."""
    return 2.0 * mesh.max_faces ** 2


def norm_summary(history: RunHistory, mode_count=8, holder_q=2.0) -> Dict[str, float]:
    """BV norms of rho and e and the velocity norm of the run."""
    from .schemes import velocity_norm_w1q

    mesh = history.mesh
    w = history.level_weights()
    rho, e = history.field_series("rho"), history.field_series("e")
    u_series = [s.u_vec if s.u_vec is not None else s.u_face for s in history.states[:-1]]
    return {
        "bv_x_rho": norm_bv_space(mesh, rho, w),
        "bv_x_e": norm_bv_space(mesh, e, w),
        "bv_t_rho": norm_bv_time(mesh, rho),
        "bv_t_e": norm_bv_time(mesh, e),
        "u_w1q": velocity_norm_w1q(mesh, u_series, history.dts, holder_q) if u_series else 0.0,
    }


def check_bounds(history: RunHistory, constants: Optional[BoundConstants] = None,
                 mode_count: int = 8, holder_p: float = 2.0, holder_q: float = 2.0):
    """Evaluate every estimate that applies to the run.

    Returns a list of entries ``{name, lhs, rhs, satisfied, guaranteed, note}``.
    ``guaranteed`` marks estimates whose hypotheses hold for the run (face
    values in the admissible interval, time step from the CFL bounds).
    """
    mesh, cfg = history.mesh, history.config
    if not history.steps:
        return []
    if constants is None:
        constants = BoundConstants.from_states(history.states, cfg.gamma)
    c = constants
    M = c.M
    hm, hu = h_max(mesh), h_underline(mesh)
    dts = history.dts
    dt = float(dts.max())
    norms = norm_summary(history, mode_count, holder_q)
    stamps = np.array([s.time for s in history.steps])
    t_final = float(history.states[-1].t)
    h_rho = cfg.strategy_rho.satisfies_hypothesis
    h_e = cfg.strategy_e.satisfies_hypothesis

    def weak(z):
        return norm_weak_m11(mesh, z, dts, mode_count, times=stamps, t_final=t_final)

    def l1(z):
        return norm_l1(mesh, z, dts)

    def series(name):
        return history.remainder_series(name)

    rhs_rho = 3 * M * c.phi_rho_prime_inf * norms["bv_x_rho"] * hm
    rhs_e = 3 * M ** 2 * c.phi_e_prime_inf * norms["bv_x_e"] * hm
    report = []

    if history.scheme == "implicit":
        d_rm, d_re = series("delta_Rm"), series("delta_Re")
        report.append(bound_entry("cons_rho", weak(d_rm), rhs_rho, h_rho))
        report.append(bound_entry("cons_e", weak(d_re), rhs_e, h_e))
        report.append(bound_entry(
            "implicit_reduced_diffusion", weak(d_rm + d_re),
            3 * M * (c.phi_rho_prime_inf * norms["bv_x_rho"]
                     + M * c.phi_e_prime_inf * norms["bv_x_e"]) * hm,
            h_rho and h_e, "bound applied to delta_Rm + delta_Re"))
        ent = np.array([global_entropy(mesh, history.states[0])]
                       + [s.global_entropy for s in history.steps])
        report.append(bound_entry("global_entropy_decrease", np.diff(ent).max(),
                                  GLOBAL_ENTROPY_TOL, h_rho and h_e))
        if cfg.strategy_rho.kind == "upwind" and cfg.strategy_e.kind == "upwind":
            res = max(s.local_entropy_residual.max() for s in history.steps)
            report.append(bound_entry(
                "local_entropy_upwind", res,
                10 * cfg.linear_tol / mesh.cell_volume.min(), True,
                "tolerance 10 * linear_tol / |K| for the solver residual"))
        return report

    # explicit
    tv_rho, tv_e = norms["bv_t_rho"], norms["bv_t_e"]
    g1 = cfg.gamma - 1.0
    rem_rho = M ** 2 * c.phi_rho_second_inf * tv_rho * dt / hu
    rem_e = M ** 2 * c.phi_e_second_inf * tv_e * dt / hu
    rem_p = g1 * M ** 3 * c.phi_e_second_inf * tv_e * dt / hu

    report.append(bound_entry("delta_R2_mass", weak(series("delta_R2_rho")), rhs_rho, h_rho))
    report.append(bound_entry("delta_R2_energy", weak(series("delta_R2_e")), rhs_e, h_e,
                              "weak norm on the left side"))
    report.append(bound_entry("remainder_ex_mass", l1(series("R_rho")), rem_rho))
    report.append(bound_entry("remainder_ex_energy", l1(series("R_e")), rem_e))
    report.append(bound_entry("remainder_ex_pressure", l1(series("R_p_e")), rem_p,
                              note="pressure coupling term"))
    report.append(bound_entry(
        "case1_R_eta_1", weak(series("R_eta_1")),
        3 * M * (c.phi_rho_prime_inf * norms["bv_x_rho"]
                 + M * c.phi_e_prime_inf * norms["bv_x_e"]) * hm, h_rho and h_e))
    report.append(bound_entry(
        "case1_R_eta_2", l1(series("R_eta_2")),
        M ** 2 * (c.phi_rho_second_inf * tv_rho + c.phi_e_second_inf * tv_e) * dt / hu + rem_p,
        note="includes the pressure coupling term"))

    cst = r01_constant(mesh) * regularity_cm(mesh)
    p = holder_p
    dtp = dt ** (1.0 / p)
    r01_rhs = (cst * M ** ((2 * p - 1) / p) * c.phi_rho_second_inf * tv_rho ** (1 / p)
               * norms["u_w1q"] * dtp)
    report.append(bound_entry("R01_lemma", l1(series("R01_rho")), r01_rhs,
                              note=f"calibrated C = {r01_constant(mesh):g}"))

    upwind = cfg.strategy_rho.kind == "upwind" and cfg.strategy_e.kind == "upwind"
    if upwind:
        rp_rhs = (g1 * cst * M ** ((3 * p - 1) / p) * c.phi_e_second_inf * tv_e ** (1 / p)
                  * norms["u_w1q"] * dtp)
        report.append(bound_entry("case2_R_eta", l1(series("R_eta_upwind")), r01_rhs + rp_rhs,
                                  history.dt_from_cfl, "R01 plus pressure coupling term"))
        sm = min((s.remainders["R1_rho"] + s.remainders["R2_rho"]
                  + s.remainders["R02_rho"]).min() for s in history.steps)
        se = min((s.remainders["R1_e"] + s.remainders["R2_e"]
                  + s.remainders["R_e"]).min() for s in history.steps)
        report.append(bound_entry("upwind_sign_mass", -sm, SIGN_TOL, history.dt_from_cfl,
                                  "-(R1 + R2 + R02) <= tol"))
        report.append(bound_entry("upwind_sign_energy", -se, SIGN_TOL, history.dt_from_cfl,
                                  "-(R1 + R2 + R) <= tol"))
    return report

# }}}
