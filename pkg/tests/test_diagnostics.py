import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eulerent.diagnostics import (BoundConstants, RunHistory, check_bounds, cons_noncons_sides,
                                  entropy_residual_explicit, entropy_residual_implicit,
                                  global_entropy, norm_bv_space, norm_bv_time, norm_l1,
                                  norm_weak_m11, remainder_explicit_energy,
                                  remainder_explicit_mass, remainder_implicit,
                                  remainder_implicit_full, step_diagnostics)
from eulerent.entropy import phi_e
from eulerent.mesh import build_1d, build_2d
from eulerent.schemes import (SchemeConfig, State, explicit_step, implicit_step,
                              prescribed_velocity, select_dt_explicit)

STRATEGIES = ["upwind", "limited", "centered"]
MESHES = {"1d": lambda: build_1d(40, 1.0), "2d": lambda: build_2d(9, 7, 1.0, 0.8)}


def bump(mesh, amp=0.5):
    x = mesh.cell_center
    r2 = ((x - 0.5 * np.array(mesh.lengths)) ** 2).sum(axis=1)
    vel = "sine" if mesh.dim == 1 else "sine2d"
    return State.from_fields(mesh, 1 + 0.5 * np.exp(-r2 / 0.02), 1 + 0.3 * np.exp(-r2 / 0.05),
                             prescribed_velocity(mesh, vel, amp), 1.4)


# {{{ entropy residuals and exact identities

def test_residuals_vanish_at_rest():
    mesh = build_2d(3, 3, 1.0, 1.0)
    s = State.from_fields(mesh, np.full(9, 2.0), np.full(9, 0.5), np.zeros((24, 2)), 1.4)
    assert np.all(entropy_residual_implicit(mesh, s, s, 0.1) == 0)
    assert np.all(entropy_residual_explicit(mesh, s, s, 0.1) == 0)
    single = build_1d(1, 1.0)
    s1 = State.from_fields(single, [3.0], [0.2], np.zeros((2, 1)), 1.4)
    assert entropy_residual_implicit(single, s1, s1, 1.0)[0] == 0


@pytest.mark.parametrize("strategy", STRATEGIES)
@pytest.mark.parametrize("dim", ["1d", "2d"])
def test_explicit_entropy_identity(strategy, dim):
    mesh = MESHES[dim]()
    s = bump(mesh)
    cfg = SchemeConfig(strategy_rho=strategy, strategy_e=strategy, source_e=0.25)
    fe = phi_e(1.4)
    for _ in range(5):
        new, info = explicit_step(mesh, s, cfg, select_dt_explicit(mesh, s, cfg))
        d = step_diagnostics(mesh, s, new, info, "explicit")
        r = d.remainders
        total = sum(r[k] for k in ("R1_rho", "R2_rho", "R_rho", "R1_e", "R2_e", "R_e", "R_p_e"))
        gap = (d.local_entropy_residual + mesh.cell_volume * total
               - fe.deriv(new.e) * mesh.cell_volume * info.source)
        assert np.abs(gap).max() < 1e-12
        s = new


@pytest.mark.parametrize("strategy", STRATEGIES)
@pytest.mark.parametrize("dim", ["1d", "2d"])
def test_implicit_entropy_identity(strategy, dim):
    mesh = MESHES[dim]()
    s = bump(mesh)
    cfg = SchemeConfig(dt=0.02, strategy_rho=strategy, strategy_e=strategy)
    for _ in range(3):
        new, info = implicit_step(mesh, s, s.u_face, cfg)
        d = step_diagnostics(mesh, s, new, info, "implicit")
        r = d.remainders
        gap = d.local_entropy_residual + mesh.cell_volume * (r["R_m"] + r["R_e"])
        assert np.abs(gap).max() < 1e-12
        if strategy != "centered":
            # under the admissibility hypothesis the split leaves a sign
            assert (d.local_entropy_residual
                    + mesh.cell_volume * (r["delta_Rm"] + r["delta_Re"])).max() <= 1e-9
        s = new


def test_implicit_upwind_local_entropy():
    mesh = build_1d(32, 1.0)
    s = bump(mesh)
    cfg = SchemeConfig(dt=0.05)
    for _ in range(10):
        new, info = implicit_step(mesh, s, s.u_face, cfg)
        res = entropy_residual_implicit(mesh, s, new, 0.05, info)
        assert res.max() <= 10 * cfg.linear_tol / mesh.cell_volume.min()
        s = new


def test_residual_rebuilds_upwind_faces():
    mesh = build_1d(16, 1.0)
    s = bump(mesh)
    new, info = explicit_step(mesh, s, SchemeConfig(dt=0.01))
    assert np.array_equal(entropy_residual_explicit(mesh, s, new, 0.01),
                          entropy_residual_explicit(mesh, s, new, 0.01, info))

# }}}


# {{{ remainders

def test_r2_two_cell_hand_case():
    mesh = build_1d(2, 2.0)
    s = State.from_fields(mesh, [1.0, 2.0], [1.0, 1.0], [[0.0], [-1.0], [0.0]], 1.4)
    new, info = explicit_step(mesh, s, SchemeConfig(dt=1e-3))
    r = remainder_explicit_mass(mesh, s, new, info, 1e-3)
    assert r["R2"][0] == pytest.approx(2 * math.log(2) - 1, rel=1e-14)
    assert r["R2"][1] == 0.0


@pytest.mark.parametrize("strategy", ["upwind", "limited"])
def test_remainder_signs_and_split(strategy):
    mesh = build_2d(10, 8, 1.0, 1.0)
    s = bump(mesh)
    cfg = SchemeConfig(strategy_rho=strategy, strategy_e=strategy)
    for _ in range(5):
        dt = select_dt_explicit(mesh, s, cfg)
        new, info = explicit_step(mesh, s, cfg, dt)
        m = remainder_explicit_mass(mesh, s, new, info, dt)
        e = remainder_explicit_energy(mesh, s, new, info, dt)
        for r in (m, e):
            assert r["R1"].min() >= 0 and r["R1_lower"].min() >= 0
            assert np.all(r["R1_lower"] <= r["R1"] * (1 + 1e-12) + 1e-300)
            assert (r["R2"] - r["delta_R2"]).min() >= -1e-12
        assert np.allclose(m["R"], m["R01"] + m["R02"], rtol=0, atol=1e-13)
        if strategy == "upwind":
            assert m["R2"].min() >= 0 and e["R2"].min() >= 0
        s = new


def test_uniform_energy_has_no_r():
    mesh = build_1d(20, 1.0)
    x = mesh.cell_center[:, 0]
    s = State.from_fields(mesh, 1 + 0.5 * np.sin(np.pi * x), np.ones(20),
                          prescribed_velocity(mesh, "sine", 0.5), 1.4)
    new, info = explicit_step(mesh, s, SchemeConfig(dt=1e-3))
    assert np.all(remainder_explicit_energy(mesh, s, new, info, 1e-3)["R"] == 0)


def test_stationary_remainders_vanish():
    mesh = build_1d(6, 1.0)
    s = State.from_fields(mesh, np.linspace(1, 2, 6), np.linspace(1, 3, 6), np.zeros((7, 1)), 1.4)
    new, info = explicit_step(mesh, s, SchemeConfig(dt=0.1))
    for r in (remainder_explicit_mass(mesh, s, new, info, 0.1),
              remainder_explicit_energy(mesh, s, new, info, 0.1)):
        assert all(np.all(v == 0) for v in r.values())
    new, info = implicit_step(mesh, s, np.zeros(7), SchemeConfig(dt=0.1))
    d_rm, d_re = remainder_implicit(mesh, new, info)
    assert np.all(d_rm == 0) and np.all(d_re == 0)


@pytest.mark.parametrize("strategy", ["upwind", "limited"])
def test_conservative_remainders_sum_to_zero(strategy):
    mesh = build_2d(8, 8, 1.0, 1.0)
    s = bump(mesh)
    cfg = SchemeConfig(dt=0.02, strategy_rho=strategy, strategy_e=strategy)
    new, info = implicit_step(mesh, s, s.u_face, cfg)
    for field in remainder_implicit(mesh, new, info):
        scale = (mesh.cell_volume * np.abs(field)).sum()
        assert abs((mesh.cell_volume * field).sum()) <= 1e-12 * max(scale, 1.0)
    full = remainder_implicit_full(mesh, s, new, info, 0.02)
    assert full["R1_m"].min() >= 0 and full["R1_e"].min() >= 0


def test_upwind_delta_phi_matches_face_formula():
    # upwind faces, u >= 0 everywhere: delta_R_m is the sum of delta_phi(x_K)
    mesh = build_1d(2, 2.0)
    s = State.from_fields(mesh, [1.0, 2.0], [1.0, 1.0], [[0.0], [1.0], [0.0]], 1.4)
    new, info = implicit_step(mesh, s, s.u_face, SchemeConfig(dt=1.0))
    d_rm, _ = remainder_implicit(mesh, new, info)
    from eulerent.entropy import delta_phi, phi_rho
    face = delta_phi(phi_rho(), new.rho[0], new.rho[1], new.rho[0])
    assert d_rm[0] == pytest.approx(face, rel=1e-14)
    assert d_rm[1] == pytest.approx(-face, rel=1e-14)


@given(st.integers(0, 2 ** 32 - 1))
def test_cons_noncons_identity(seed):
    rng = np.random.default_rng(seed)
    mesh = build_2d(4, 3, 1.0, 1.0)
    r0 = rng.uniform(0.5, 2.0, mesh.n_cells)
    flux = np.where(mesh.interior, rng.normal(size=mesh.n_faces), 0.0)
    dt = 0.01
    r1 = r0 - dt / mesh.cell_volume * mesh.cell_sum(flux)
    z0, z1 = rng.normal(size=mesh.n_cells), rng.normal(size=mesh.n_cells)
    zf = rng.normal(size=mesh.n_faces)
    lhs, rhs = cons_noncons_sides(mesh, r0, r1, z0, z1, zf, flux, dt)
    assert np.abs(lhs - rhs).max() <= 1e-12 * (np.abs(lhs).max() + 1)

# }}}


# {{{ norms

def test_bv_space_hand_value():
    mesh = build_1d(3, 3.0)
    assert norm_bv_space(mesh, [np.array([1.0, 2.0, 4.0])], 1.0) == 3.0
    assert norm_bv_space(mesh, [np.full(3, 5.0)], 1.0) == 0.0


@given(st.floats(-10, 10))
def test_bv_space_homogeneous(lam):
    mesh = build_2d(3, 3, 1.0, 1.0)
    z = np.arange(9.0) ** 1.5
    assert norm_bv_space(mesh, [lam * z], 0.3) == pytest.approx(
        abs(lam) * norm_bv_space(mesh, [z], 0.3), rel=1e-12, abs=1e-300)


def test_bv_time_hand_value():
    mesh = build_1d(1, 2.0)
    assert norm_bv_time(mesh, [[1.0], [3.0], [0.0]], 1.0) == 10.0
    assert norm_bv_time(mesh, [[1.0], [1.0]], 1.0) == 0.0
    m3 = build_1d(3, 1.0)
    series = np.array([[1.0, 2.0, 3.0], [2.0, 0.0, 3.5]])
    assert norm_bv_time(m3, series) == pytest.approx(norm_bv_time(m3, series[:, ::-1]))


def test_l1_norm():
    mesh = build_1d(2, 1.0)
    assert norm_l1(mesh, [[1.0, -1.0], [2.0, 0.0]], [0.1, 0.2]) == pytest.approx(0.1 + 0.2)


def test_weak_norm_single_mode_1d():
    # z = sin(pi x) at a single level t = 0, T = 1: value sum |K| sin^2 / pi
    mesh = build_1d(50, 1.0)
    x = mesh.cell_center[:, 0]
    z = np.sin(np.pi * x)
    expected = (mesh.cell_volume * z * z).sum() / np.pi
    got = norm_weak_m11(mesh, [z], 1.0, mode_count=1, times=[0.0], t_final=1.0)
    assert got == pytest.approx(expected, rel=1e-14)
    assert norm_weak_m11(mesh, [np.zeros(50)], 1.0) == 0.0


def test_weak_norm_monotone_in_modes(rng):
    for mesh in (build_1d(30, 1.0), build_2d(6, 5, 1.0, 2.0)):
        z = rng.normal(size=(4, mesh.n_cells))
        values = [norm_weak_m11(mesh, z, 0.1, k) for k in range(1, 9)]
        assert all(b >= a for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        norm_weak_m11(mesh, z, 0.1, 0)


def test_weak_norm_below_l1_over_gradient(rng):
    # |sum dt |K| z psi| / sup|grad psi| <= L1(z) * sup|psi| / sup|grad psi|
    mesh = build_2d(6, 6, 1.0, 1.0)
    z = rng.normal(size=(3, 36))
    assert norm_weak_m11(mesh, z, 0.1, 8) <= norm_l1(mesh, z, 0.1) / math.pi

# }}}


# {{{ entropy and bounds

def test_global_entropy():
    mesh = build_1d(4, 1.0)
    s = State.from_fields(mesh, np.ones(4), np.ones(4), np.zeros((5, 1)), 1.4)
    assert global_entropy(mesh, s) == 0.0
    s2 = State.from_fields(mesh, [1.0, 2.0, 3.0, 4.0], [0.5, 1.0, 2.0, 1.0], np.zeros((5, 1)), 1.4)
    left = build_1d(2, 0.5)
    a = State.from_fields(left, [1.0, 2.0], [0.5, 1.0], np.zeros((3, 1)), 1.4)
    b = State.from_fields(left, [3.0, 4.0], [2.0, 1.0], np.zeros((3, 1)), 1.4)
    assert global_entropy(mesh, s2) == pytest.approx(
        global_entropy(left, a) + global_entropy(left, b), rel=1e-14)


def test_bound_constants():
    mesh = build_1d(3, 1.0)
    s = State.from_fields(mesh, [0.5, 1.0, 2.0], [1.0, 4.0, 1.0], [[0], [3.0], [1.0], [0]], 1.4)
    c = BoundConstants.from_states([s], 1.4)
    assert c.M == 4.0
    assert c.phi_rho_second_inf == 4.0
    rest = State.from_fields(mesh, np.ones(3), np.ones(3), np.zeros((4, 1)), 1.4)
    assert BoundConstants.from_states([rest], 1.4).M == 1.0


def _history(mesh, scheme, cfg, state, n, dt=None):
    h = RunHistory(mesh=mesh, config=cfg, scheme=scheme, states=[state],
                   dt_from_cfl=dt is None)
    for _ in range(n):
        step_dt = dt or select_dt_explicit(mesh, state, cfg)
        if scheme == "explicit":
            new, info = explicit_step(mesh, state, cfg, step_dt)
        else:
            new, info = implicit_step(mesh, state, state.u_face, cfg, step_dt)
        h.steps.append(step_diagnostics(mesh, state, new, info, scheme))
        h.infos.append(info)
        h.states.append(new)
        state = new
    return h


def test_zero_remainder_run_satisfies_all_bounds():
    mesh = build_1d(8, 1.0)
    s = State.from_fields(mesh, np.ones(8), np.ones(8), np.zeros((9, 1)), 1.4)
    for scheme in ("explicit", "implicit"):
        h = _history(mesh, scheme, SchemeConfig(), s, 3, dt=0.1)
        report = check_bounds(h)
        assert report and all(b["satisfied"] for b in report)
        assert all(b["lhs"] <= 0 for b in report)


@pytest.mark.parametrize("strategy", ["upwind", "limited"])
def test_bounds_hold_on_short_runs(strategy):
    mesh = build_2d(10, 10, 1.0, 1.0)
    cfg = SchemeConfig(strategy_rho=strategy, strategy_e=strategy)
    h = _history(mesh, "explicit", cfg, bump(mesh), 10)
    report = check_bounds(h)
    names = {b["name"] for b in report}
    assert {"delta_R2_mass", "case1_R_eta_1", "case1_R_eta_2", "R01_lemma"} <= names
    assert all(b["satisfied"] for b in report if b["guaranteed"])
    h = _history(mesh, "implicit", SchemeConfig(dt=0.02, strategy_rho=strategy,
                                                strategy_e=strategy), bump(mesh), 5, dt=0.02)
    assert all(b["satisfied"] for b in check_bounds(h) if b["guaranteed"])

# }}}
