"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import time

import mpmath
import numpy as np
import pytest

from eulerent.diagnostics import cons_noncons_sides
from eulerent.entropy import entropy_identity_residual, phi_e, phi_rho, phi_square, solve_xkl
from eulerent.errors import ConfigError, PositivityError
from eulerent.harness import RunConfig, refinement_study, run
from eulerent.mesh import build_1d, build_2d
from eulerent.schemes import StabilizationParams, check_stabilization, dual_measure, q_laplacian_1d

SOLVER_TOL = 1.0e-10

# the acceptance runs, computed once and audited by criteria 9 and 11
RUNS = {
    "implicit_upwind": RunConfig(nx=64, initial="gaussian-bump", velocity="sine", gamma=1.4,
                                 scheme="implicit", strategy_rho="upwind", strategy_e="upwind",
                                 n_steps=100, dt_coef=0.5, linear_tol=SOLVER_TOL),
    "implicit_limited": RunConfig(nx=64, initial="gaussian-bump", velocity="sine", gamma=1.4,
                                  scheme="implicit", strategy_rho="limited",
                                  strategy_e="limited", n_steps=100, dt_coef=0.5,
                                  linear_tol=SOLVER_TOL, mode_count=8),
    "explicit_upwind": RunConfig(nx=64, initial="gaussian-bump", velocity="sine",
                                 scheme="explicit", n_steps=200, cfl_safety=0.5,
                                 cfl_margin=0.1),
    "explicit_limited": RunConfig(nx=64, scheme="explicit", strategy_rho="limited",
                                  strategy_e="limited", n_steps=200),
    "explicit_limited_2d": RunConfig(dim=2, nx=24, ny=24, velocity="sine2d", scheme="explicit",
                                     strategy_rho="limited", strategy_e="limited",
                                     n_steps=200),
    "explicit_evolved": RunConfig(nx=64, scheme="explicit", velocity_mode="evolved_1d",
                                  velocity_amplitude=0.3, n_steps=200),
}
LADDER = RunConfig(scheme="explicit", strategy_rho="limited", strategy_e="limited",
                   initial="gaussian-bump", velocity="sine", t_end=0.2, dt_coef=0.5,
                   dt_beta=1.5, ladder=(32, 64, 128, 256), mode_count=8)

_cache = {}


def get_run(name):
    if name not in _cache:
        t0 = time.perf_counter()
        try:
            summary, history = run(RUNS[name])
        except PositivityError as exc:
            _cache[name] = (None, None, exc, time.perf_counter() - t0)
        else:
            _cache[name] = (summary, history, None, time.perf_counter() - t0)
    return _cache[name]


def get_study():
    if "ladder" not in _cache:
        t0 = time.perf_counter()
        _cache["ladder"] = (refinement_study(LADDER), time.perf_counter() - t0)
    return _cache["ladder"]


def verdict(number, ok, detail):
    print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def test_criterion_01_entropy_identity():
    rng = np.random.default_rng(1)
    n = 10_000
    rho = np.exp(rng.uniform(np.log(0.05), np.log(20.0), n))
    e = np.exp(rng.uniform(np.log(0.05), np.log(20.0), n))
    gamma = rng.uniform(1.05, 3.0, n)
    t0 = time.perf_counter()
    worst = max(abs(entropy_identity_residual(rho[i], e[i], gamma[i])) for i in range(n))
    elapsed = time.perf_counter() - t0
    verdict(1, worst <= 1e-13 and elapsed < 1.0,
            f"max |residual| {worst:.2e} <= 1e-13 over {n} samples in {elapsed:.2f} s (< 1 s)")


def _bisection_oracle(phi_ld, dphi_ld, a, b, iters=120):
    """Vectorized bisection of the tangent difference in extended precision."""
    lo = np.minimum(a, b).astype(np.longdouble)
    hi = np.maximum(a, b).astype(np.longdouble)

    def g(x):
        return (phi_ld(lo) + dphi_ld(lo) * (x - lo)) - (phi_ld(hi) + dphi_ld(hi) * (x - hi))

    left, right = lo.copy(), hi.copy()
    g_left = g(left)
    for _ in range(iters):
        mid = 0.5 * (left + right)
        g_mid = g(mid)
        move = np.sign(g_mid) == np.sign(g_left)
        left = np.where(move, mid, left)
        g_left = np.where(move, g_mid, g_left)
        right = np.where(move, right, mid)
    return np.asarray(0.5 * (left + right), dtype=np.float64)


def test_criterion_02_xkl():
    rng = np.random.default_rng(2)
    n = 10_000
    a = np.exp(rng.uniform(-3, 3, n))
    b = np.exp(rng.uniform(-3, 3, n))
    g1 = np.longdouble(0.4)
    funcs = {
        "phi_rho": (phi_rho(), lambda z: z * np.log(z), lambda z: np.log(z) + 1),
        "phi_e": (phi_e(1.4), lambda z: -np.log(z) / g1, lambda z: -1 / (g1 * z)),
        "z^2": (phi_square(), lambda z: z * z, lambda z: 2 * z),
    }
    ok, details = True, []
    for name, (phi, f_ld, df_ld) in funcs.items():
        x = solve_xkl(phi, a, b)
        inside = bool(np.all((np.minimum(a, b) <= x) & (x <= np.maximum(a, b))))
        oracle = _bisection_oracle(f_ld, df_ld, a, b)
        err = float((np.abs(x - oracle) / oracle).max())
        ok &= inside and err <= 1e-10
        details.append(f"{name}: inside={inside}, oracle rel err {err:.1e}")
    mid_err = float(np.abs(solve_xkl(phi_square(), a, b) - 0.5 * (a + b)).max())
    ok &= mid_err <= 1e-14
    # spot check the extended-precision oracle against 50-digit arithmetic
    mpmath.mp.dps = 50
    for i in range(20):
        lo, hi = sorted((mpmath.mpf(a[i]), mpmath.mpf(b[i])))
        exact = (hi - lo) / (mpmath.log(hi) - mpmath.log(lo))
        ok &= abs(solve_xkl(phi_rho(), a[i], b[i]) - float(exact)) <= 1e-10 * float(exact)
    verdict(2, ok, "; ".join(details) + f"; z^2 midpoint err {mid_err:.1e}")


def test_criterion_03_implicit_upwind_local_entropy():
    summary, history, err, elapsed = get_run("implicit_upwind")
    assert err is None, err
    bound = 10 * SOLVER_TOL / history.mesh.cell_volume
    worst = max(float((s.local_entropy_residual - bound).max()) for s in history.steps)
    top = max(float(s.local_entropy_residual.max()) for s in history.steps)
    ok = worst <= 0 and elapsed < 10 and summary["steps"] == 100
    verdict(3, ok, f"max per-cell residual {top:.3e} <= 10*tol/|K| = {bound.min():.1e}, "
                   f"{summary['steps']} steps in {elapsed:.2f} s (< 10 s)")


def test_criterion_04_implicit_limited_global_entropy():
    summary, history, err, _ = get_run("implicit_limited")
    assert err is None, err
    ent = [summary["initial_global_entropy"]] + [s.global_entropy for s in history.steps]
    increase = float(np.diff(ent).max())
    entry = {b["name"]: b for b in summary["bound_report"]}["implicit_reduced_diffusion"]
    ok = increase <= 1e-8 and entry["satisfied"]
    verdict(4, ok, f"max entropy increase per step {increase:.3e} <= 1e-8; "
                   f"weak norm of dR_m + dR_e {entry['lhs']:.3e} <= {entry['rhs']:.3e}")


def test_criterion_05_explicit_upwind_sign_structure():
    summary, history, err, _ = get_run("explicit_upwind")
    assert err is None, err
    assert history.dt_from_cfl and summary["steps"] == 200
    mass = min(float((s.remainders["R1_rho"] + s.remainders["R2_rho"]
                      + s.remainders["R02_rho"]).min()) for s in history.steps)
    energy = min(float((s.remainders["R1_e"] + s.remainders["R2_e"]
                        + s.remainders["R_e"]).min()) for s in history.steps)
    ok = mass >= -1e-12 and energy >= -1e-12
    verdict(5, ok, f"min (R1+R2+R02) = {mass:.3e}, min energy (R1+R2+R) = {energy:.3e} "
                   f"(>= -1e-12) over 200 CFL steps")


def test_criterion_06_cons_noncons_identity():
    rng = np.random.default_rng(6)
    worst = 0.0
    for i in range(100):
        mesh = build_1d(int(rng.integers(2, 40)), 1.0) if i % 2 else \
            build_2d(int(rng.integers(1, 8)), int(rng.integers(1, 8)), 1.0, 1.5)
        r0 = rng.uniform(0.5, 2.0, mesh.n_cells)
        flux = np.where(mesh.interior, rng.normal(scale=0.1, size=mesh.n_faces), 0.0)
        dt = rng.uniform(0.1, 1.0) * mesh.cell_volume.min()
        r1 = r0 - dt / mesh.cell_volume * mesh.cell_sum(flux)
        z0 = rng.normal(size=mesh.n_cells)
        z1 = rng.normal(size=mesh.n_cells)
        zf = rng.normal(size=mesh.n_faces)
        lhs, rhs = cons_noncons_sides(mesh, r0, r1, z0, z1, zf, flux, dt)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    verdict(6, worst <= 1e-12, f"max |lhs - rhs| {worst:.2e} <= 1e-12 on 100 configurations")


def test_criterion_07_mass_conservation():
    drifts = {}
    for name in RUNS:
        summary, _, err, _ = get_run(name)
        assert err is None, err
        drifts[name] = summary["mass_relative_drift"]
    explicit = max(v for k, v in drifts.items() if k.startswith("explicit"))
    implicit = max(v for k, v in drifts.items() if k.startswith("implicit"))
    ok = explicit <= 1e-12 and implicit <= 1e-8
    verdict(7, ok, f"relative mass drift: explicit {explicit:.2e} (<= 1e-12), "
                   f"implicit {implicit:.2e} (<= 1e-8)")


def test_criterion_08_remainder_decay():
    result, elapsed = get_study()
    orders = result["orders"]
    stab = result["stability_ratio"]
    stable = all(v <= 2.0 for v in stab.values())
    o2, o1 = orders["R_eta_2_l1"], orders["R_eta_1_weak"]
    ok = (stable and isinstance(o1, float) and isinstance(o2, float)
          and o2 >= 0.4 and o1 >= 0.7 and elapsed < 120)
    verdict(8, ok, f"order L1(R_eta_2) {o2:.3f} (>= 0.4), weak(R_eta_1) {o1:.3f} (>= 0.7); "
                   f"max stability ratio {max(stab.values()):.3f} (<= 2); {elapsed:.1f} s")


def test_criterion_09_lemma_bounds():
    failed = []
    count = 0
    for name in RUNS:
        summary, _, err, _ = get_run(name)
        assert err is None, err
        for b in summary["bound_report"]:
            count += 1
            if not b["satisfied"]:
                failed.append(f"{name}:{b['name']}")
    result, _ = get_study()
    for level in result["levels"]:
        count += 1
        if not level["all_guaranteed_satisfied"]:
            failed.append(f"ladder {level['resolution']}")
    verdict(9, not failed, f"{count} bound entries checked, failing: {failed or 'none'}")


@pytest.mark.parametrize("q", [2.0, 3.0, 4.0])
def test_criterion_10_stabilization(q):
    rng = np.random.default_rng(10 + int(q))
    worst = 0.0
    for _ in range(20):
        mesh = build_1d(int(rng.integers(2, 30)), float(rng.uniform(0.5, 2.0)))
        u = np.where(mesh.interior, rng.normal(size=mesh.n_faces), 0.0)
        lhs = float((dual_measure(mesh) * q_laplacian_1d(mesh, u, q) * u).sum())
        du = u[mesh.cell_faces[:, 1]] - u[mesh.cell_faces[:, 0]]
        h = mesh.cell_diameter
        rhs = float((h * np.abs(du / h) ** q).sum())
        worst = max(worst, abs(lhs - rhs) / rhs)
    check_stabilization(1.5, 3.0)
    StabilizationParams()
    with pytest.raises(ConfigError):
        check_stabilization(1.0, 2.0)
    verdict(10, worst <= 1e-12,
            f"q={q:g}: relative summation-by-parts gap {worst:.2e} <= 1e-12; "
            "defaults (q=3, alpha=1.5) accepted, (q=2, alpha=1) rejected")


def test_criterion_11_positivity():
    margins = {}
    for name in RUNS:
        summary, _, err, _ = get_run(name)
        margins[name] = None if err else summary["positivity_margin"]
    result, _ = get_study()
    ok = all(m is not None and m > 0 for m in margins.values())
    low = min(m for m in margins.values() if m is not None)
    verdict(11, ok, f"no positivity error in {len(margins)} runs and "
                    f"{len(result['levels'])} ladder levels; min(rho, e) = {low:.4f}")
