"""
Runs, refinement studies and output files
-----------------------------------------

A run is described by a flat ``key = value`` text file (``#`` starts a
comment). Unknown keys are rejected. Example::

    dim = 1
    nx = 64
    scheme = implicit
    strategy = limited
    n_steps = 100
    dt_coef = 0.5        # dt = dt_coef * h ** dt_beta
    dt_beta = 1.0

Outputs of :func:`run`, when ``out_dir`` is set:

``diagnostics.csv``
    one row per step and quantity, columns ``step, time, name, value``;
``bounds.json``
    the bound report, a list of ``{name, lhs, rhs, satisfied, guaranteed, note}``;
``summary.json``
    scalar summary of the run, including the seed.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .diagnostics import (BoundConstants, RunHistory, check_bounds, global_entropy,
                          norm_l1, norm_summary, norm_weak_m11, step_diagnostics)
from .errors import ConfigError, PositivityError
from .mesh import build, h_max, h_underline
from .schemes import (SchemeConfig, StabilizationParams, State, explicit_step,
                      implicit_step, prescribed_velocity, select_dt_explicit)

logger = logging.getLogger(__name__)

INITIAL_DATA = ("uniform", "gaussian-bump")


# {{{ configuration

@dataclass(frozen=True)
class RunConfig:
    # mesh
    dim: int = 1
    nx: int = 64
    ny: int = 64
    lx: float = 1.0
    ly: float = 1.0
    # initial data: rho0 = rho_base + rho_amp exp(-|x - c|^2 / w^2), same for e
    initial: str = "gaussian-bump"
    rho_base: float = 1.0
    rho_amp: float = 0.5
    e_base: float = 1.0
    e_amp: float = 0.3
    bump_x: float = 0.5
    bump_y: float = 0.5
    bump_width: float = 0.1
    # velocity
    velocity: str = "sine"
    velocity_amplitude: float = 0.5
    velocity_mode: str = "prescribed"
    # scheme
    scheme: str = "explicit"
    strategy_rho: str = "upwind"
    strategy_e: str = "upwind"
    gamma: float = 1.4
    source_e: float = 0.0
    # time stepping; t_end and/or n_steps stop the run
    t_end: Optional[float] = None
    n_steps: Optional[int] = None
    dt: Optional[float] = None
    dt_coef: Optional[float] = None
    dt_beta: float = 1.0
    cfl_safety: float = 0.5
    cfl_margin: float = 0.1
    # momentum stabilization
    stab_alpha: float = 1.5
    stab_q: float = 3.0
    stab_enabled: bool = True
    # solvers
    linear_tol: float = 1.0e-10
    picard_tol: float = 1.0e-9
    picard_max_iter: int = 100
    # diagnostics
    diagnostics: bool = True
    mode_count: int = 8
    holder_p: float = 2.0
    holder_q: float = 2.0
    # refinement ladder, resolutions along x (and y in 2D)
    ladder: tuple = (32, 64, 128, 256)
    seed: int = 0

    def __post_init__(self):
        if self.initial not in INITIAL_DATA:
            raise ConfigError(f"unknown initial data {self.initial!r}")
        if self.scheme not in ("explicit", "implicit"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.rho_base <= 0 or self.e_base <= 0 or self.rho_amp < 0 or self.e_amp < 0:
            raise ConfigError("initial data must be strictly positive")
        if self.t_end is None and self.n_steps is None:
            raise ConfigError("set t_end and/or n_steps")
        if self.t_end is not None and self.t_end < 0:
            raise ConfigError("t_end must be non-negative")
        if self.n_steps is not None and self.n_steps < 0:
            raise ConfigError("n_steps must be non-negative")
        if self.scheme == "implicit" and self.dt is None and self.dt_coef is None:
            raise ConfigError("the implicit scheme needs dt or dt_coef")
        if self.scheme == "implicit" and self.velocity_mode != "prescribed":
            raise ConfigError("the implicit scheme takes a prescribed velocity")
        if self.velocity_mode == "evolved_1d" and self.dim != 1:
            raise ConfigError("the evolved velocity mode is one-dimensional")
        ladder = tuple(int(n) for n in self.ladder)
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ConfigError("ladder resolutions must be strictly increasing")
        object.__setattr__(self, "ladder", ladder)

    def scheme_config(self) -> SchemeConfig:
        return SchemeConfig(
            gamma=self.gamma, dt=self.dt, cfl_safety=self.cfl_safety,
            cfl_margin=self.cfl_margin, strategy_rho=self.strategy_rho,
            strategy_e=self.strategy_e, source_e=self.source_e or None,
            velocity_mode=self.velocity_mode,
            stabilization=StabilizationParams(self.stab_alpha, self.stab_q, self.stab_enabled),
            picard_tol=self.picard_tol, picard_max_iter=self.picard_max_iter,
            linear_tol=self.linear_tol)

    def build_mesh(self):
        if self.dim == 1:
            return build(1, self.nx, (self.lx,))
        return build(2, (self.nx, self.ny), (self.lx, self.ly))


def _parse_bool(text):
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_FIELD_TYPES = {
    "dim": int, "nx": int, "ny": int, "n_steps": int, "picard_max_iter": int,
    "mode_count": int, "seed": int,
    "initial": str, "velocity": str, "velocity_mode": str, "scheme": str,
    "strategy_rho": str, "strategy_e": str,
    "stab_enabled": _parse_bool, "diagnostics": _parse_bool,
    "ladder": lambda s: tuple(int(v) for v in s.replace(",", " ").split()),
}


def parse_config_text(text: str) -> RunConfig:
    """Parse ``key = value`` lines. ``strategy`` sets both strategies and
    ``resolution`` sets ``nx`` and ``ny``."""
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        targets = {"strategy": ("strategy_rho", "strategy_e"),
                   "resolution": ("nx", "ny")}.get(key, (key,))
        for target in targets:
            if target not in known:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            conv = _FIELD_TYPES.get(target, float)
            try:
                values[target] = None if value.lower() == "none" else conv(value)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    return parse_config_text(Path(path).read_text())

# }}}


# {{{ initial data

def initial_state(mesh, cfg: RunConfig) -> State:
    x = mesh.cell_center
    if cfg.initial == "uniform":
        bump = np.zeros(mesh.n_cells)
    else:
        center = np.array([cfg.bump_x, cfg.bump_y][:mesh.dim])
        bump = np.exp(-((x - center) ** 2).sum(axis=1) / cfg.bump_width ** 2)
    rho = cfg.rho_base + cfg.rho_amp * bump
    e = cfg.e_base + cfg.e_amp * bump
    u_vec = prescribed_velocity(mesh, cfg.velocity, cfg.velocity_amplitude)
    if cfg.velocity_mode == "evolved_1d":
        u_vec = u_vec[:, :1]
    return State.from_fields(mesh, rho, e, u_vec, cfg.gamma)

# }}}


# {{{ run

def _time_step(cfg, mesh, state, scheme_cfg, remaining):
    """Returns (dt, from_cfl)."""
    if cfg.dt is not None:
        return min(cfg.dt, remaining), False
    if cfg.dt_coef is not None:
        return min(cfg.dt_coef * h_max(mesh) ** cfg.dt_beta, remaining), False
    dt = select_dt_explicit(mesh, state, scheme_cfg, remaining)
    return dt, True


def simulate(cfg: RunConfig) -> RunHistory:
    """Advance the scheme, recording states, step data and diagnostics."""
    mesh = cfg.build_mesh()
    scheme_cfg = cfg.scheme_config()
    state = initial_state(mesh, cfg)
    history = RunHistory(mesh=mesh, config=scheme_cfg, scheme=cfg.scheme,
                         states=[state], dt_from_cfl=cfg.dt is None and cfg.dt_coef is None)
    t_end = math.inf if cfg.t_end is None else cfg.t_end
    max_steps = cfg.n_steps if cfg.n_steps is not None else math.inf

    n = 0
    t_slack = 0.0 if math.isinf(t_end) else 1.0e-12 * max(t_end, 1.0)
    while n < max_steps and t_end - state.t > t_slack:
        dt, _ = _time_step(cfg, mesh, state, scheme_cfg, t_end - state.t)
        try:
            if cfg.scheme == "explicit":
                new, info = explicit_step(mesh, state, scheme_cfg, dt)
            else:
                new, info = implicit_step(mesh, state, state.u_face, scheme_cfg, dt,
                                          u_vec_np1=state.u_vec)
        except PositivityError as exc:
            raise PositivityError(f"step {n}: {exc}", cell=exc.cell, step=n) from exc
        if cfg.diagnostics:
            history.steps.append(step_diagnostics(mesh, state, new, info, cfg.scheme))
        history.infos.append(info)
        history.states.append(new)
        state = new
        n += 1
    logger.info("%d steps, t = %g", n, state.t)
    return history


def _positivity_margin(history):
    return float(min(min(s.rho.min(), s.e.min()) for s in history.states))


def summarize(history: RunHistory, cfg: RunConfig) -> dict:
    mesh = history.mesh
    first, last = history.states[0], history.states[-1]
    mass0 = float((mesh.cell_volume * first.rho).sum())
    mass1 = float((mesh.cell_volume * last.rho).sum())
    report = []
    constants = None
    if cfg.diagnostics and history.steps:
        constants = BoundConstants.from_states(history.states, cfg.gamma)
        report = check_bounds(history, constants, cfg.mode_count, cfg.holder_p, cfg.holder_q)
    return {
        "steps": len(history.infos),
        "t_final": float(last.t),
        "seed": cfg.seed,
        "initial_global_entropy": global_entropy(mesh, first),
        "final_global_entropy": global_entropy(mesh, last),
        "initial_mass": mass0,
        "final_mass": mass1,
        "mass_relative_drift": abs(mass1 - mass0) / abs(mass0),
        "positivity_margin": _positivity_margin(history),
        "h_max": h_max(mesh),
        "h_underline": h_underline(mesh),
        "constants": asdict(constants) if constants else None,
        "bound_report": report,
        "all_guaranteed_satisfied": all(b["satisfied"] for b in report if b["guaranteed"]),
    }


def write_outputs(history: RunHistory, summary: dict, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    mesh = history.mesh
    with open(out / "diagnostics.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["step", "time", "name", "value"])
        for s in history.steps:
            for name, value in s.scalars(mesh).items():
                writer.writerow([s.step, repr(s.time), name, repr(value)])
    (out / "bounds.json").write_text(json.dumps(summary["bound_report"], indent=2) + "\n")
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")


def run(cfg: RunConfig, out_dir=None):
    """Simulate, check the bounds and (optionally) write the output files.

    Returns ``(summary, history)``.
    """
    history = simulate(cfg)
    summary = summarize(history, cfg)
    if out_dir is not None:
        write_outputs(history, summary, out_dir)
    return summary, history

# }}}


# {{{ refinement study

def fitted_order(h, values):
    """Slope of log(values) against log(h); ``"exact-zero"`` if all vanish."""
    h = np.asarray(h, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if np.all(v == 0):
        return "exact-zero"
    if np.any(v <= 0):
        return float("nan")
    return float(np.polyfit(np.log(h), np.log(v), 1)[0])


def study_level(cfg: RunConfig, resolution: int) -> dict:
    level = replace(cfg, nx=resolution, ny=resolution, diagnostics=True)
    summary, history = run(level)
    mesh = history.mesh
    dts = history.dts
    stamps = np.array([s.time for s in history.steps])
    t_final = history.states[-1].t
    norms = norm_summary(history, cfg.mode_count, cfg.holder_q)
    row = {"resolution": resolution, "h": h_max(mesh), "steps": summary["steps"],
           "dt_max": float(dts.max()) if dts.size else 0.0,
           "M": summary["constants"]["M"] if summary["constants"] else 1.0}
    row.update(norms)
    if not history.steps:
        row.update(R_eta_1_weak=0.0, R_eta_2_l1=0.0)
    elif cfg.scheme == "explicit":
        row["R_eta_1_weak"] = norm_weak_m11(mesh, history.remainder_series("R_eta_1"), dts,
                                            cfg.mode_count, times=stamps, t_final=t_final)
        row["R_eta_2_l1"] = norm_l1(mesh, history.remainder_series("R_eta_2"), dts)
    else:
        d = history.remainder_series("delta_Rm") + history.remainder_series("delta_Re")
        row["R_eta_1_weak"] = norm_weak_m11(mesh, d, dts, cfg.mode_count,
                                            times=stamps, t_final=t_final)
        row["R_eta_2_l1"] = 0.0
    row["all_guaranteed_satisfied"] = summary["all_guaranteed_satisfied"]
    row["bound_report"] = summary["bound_report"]
    return row


def refinement_study(cfg: RunConfig, out_dir=None) -> dict:
    """Run every ladder level and fit observed orders in ``h``."""
    if len(cfg.ladder) < 3:
        raise ConfigError("a refinement study needs at least three ladder levels")
    rows = [study_level(cfg, n) for n in cfg.ladder]
    h = [r["h"] for r in rows]
    orders = {key: fitted_order(h, [r[key] for r in rows])
              for key in ("R_eta_1_weak", "R_eta_2_l1")}

    def spread(key):
        v = np.array([r[key] for r in rows])
        return float(v.max() / v.min()) if v.min() > 0 else (1.0 if v.max() == 0 else math.inf)

    stability = {key: spread(key) for key in ("M", "bv_x_rho", "bv_x_e", "bv_t_rho", "bv_t_e")}
    result = {"levels": [{k: v for k, v in r.items() if k != "bound_report"} for r in rows],
              "orders": orders, "stability_ratio": stability, "seed": cfg.seed,
              "all_guaranteed_satisfied": all(r["all_guaranteed_satisfied"] for r in rows)}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "study.json").write_text(json.dumps(result, indent=2) + "\n")
        with open(out / "study.csv", "w", newline="") as f:
            keys = [k for k in result["levels"][0]]
            writer = csv.DictWriter(f, fieldnames=keys)
            writer.writeheader()
            writer.writerows(result["levels"])
    return result


def format_order_table(result: dict) -> str:
    lines = [f"{'N':>6} {'h':>10} {'steps':>6} {'M':>8} {'R_eta_1 (weak)':>15} {'R_eta_2 (L1)':>13}"]
    for r in result["levels"]:
        lines.append(f"{r['resolution']:>6} {r['h']:>10.3e} {r['steps']:>6} {r['M']:>8.4f} "
                     f"{r['R_eta_1_weak']:>15.4e} {r['R_eta_2_l1']:>13.4e}")
    o = result["orders"]

    def fmt(v):
        return v if isinstance(v, str) else f"{v:.3f}"

    lines.append(f"fitted order: R_eta_1 {fmt(o['R_eta_1_weak'])}, R_eta_2 {fmt(o['R_eta_2_l1'])}")
    return "\n".join(lines)

# }}}
