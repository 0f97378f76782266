"""Command line entry point: ``eulerent run|study|selftest``.

Exit status is 0 only when every guaranteed bound check passes (``run``,
``study``) or every self-check passes (``selftest``).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

import numpy as np

from .errors import EulerEntError
from .harness import format_order_table, load_config, refinement_study, run


def _apply_flags(cfg, args):
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.modes is not None:
        changes["mode_count"] = args.modes
    return replace(cfg, **changes) if changes else cfg


def _print_report(report):
    for b in report:
        flag = "ok  " if b["satisfied"] else ("FAIL" if b["guaranteed"] else "miss")
        print(f"  [{flag}] {b['name']:<28} {b['lhs']:>12.4e} <= {b['rhs']:.4e}")


def cmd_run(args) -> int:
    cfg = _apply_flags(load_config(args.config), args)
    summary, _ = run(cfg, args.out)
    print(f"steps {summary['steps']}, t = {summary['t_final']:.6g}, "
          f"entropy {summary['initial_global_entropy']:.10g} -> "
          f"{summary['final_global_entropy']:.10g}, "
          f"mass drift {summary['mass_relative_drift']:.2e}")
    _print_report(summary["bound_report"])
    return 0 if summary["all_guaranteed_satisfied"] else 1


def cmd_study(args) -> int:
    cfg = _apply_flags(load_config(args.config), args)
    result = refinement_study(cfg, args.out)
    print(format_order_table(result))
    print("stability ratios (max/min over ladder): "
          + json.dumps({k: round(v, 4) for k, v in result["stability_ratio"].items()}))
    return 0 if result["all_guaranteed_satisfied"] else 1


def selftest(seed: int = 0, n: int = 2000):
    """Seeded property checks of the core kernels; returns ``[(name, ok, detail)]``."""
    from .diagnostics import cons_noncons_sides
    from .entropy import entropy_identity_residual, phi_e, phi_rho, phi_square, solve_xkl
    from .mesh import build_1d
    from .schemes import dual_measure, q_laplacian_1d

    rng = np.random.default_rng(seed)
    out = []

    rho, e = np.exp(rng.uniform(-3, 3, n)), np.exp(rng.uniform(-3, 3, n))
    gamma = rng.uniform(1.05, 3.0, n)
    worst = max(abs(entropy_identity_residual(r, x, g)) for r, x, g in
                zip(rho[:200], e[:200], gamma[:200]))
    out.append(("entropy identity", worst <= 1e-13, f"max residual {worst:.2e}"))

    a, b = np.exp(rng.uniform(-3, 3, n)), np.exp(rng.uniform(-3, 3, n))
    ok = True
    for phi in (phi_rho(), phi_e(1.4), phi_square()):
        x = solve_xkl(phi, a, b)
        ok &= bool(np.all((np.minimum(a, b) <= x) & (x <= np.maximum(a, b))))
    mid = np.abs(solve_xkl(phi_square(), a, b) - 0.5 * (a + b)) / np.maximum(a, b)
    ok &= bool(mid.max() <= 1e-14)
    out.append(("tangent intersection", ok, "membership and midpoint for z^2"))

    mesh = build_1d(16, 1.0)
    worst = 0.0
    for _ in range(20):
        r0 = rng.uniform(0.5, 2, 16)
        flux = np.where(mesh.interior, rng.normal(size=17), 0.0)
        dt = 0.01
        r1 = r0 - dt / mesh.cell_volume * mesh.cell_sum(flux)
        z0, z1, zf = rng.normal(size=16), rng.normal(size=16), rng.normal(size=17)
        lhs, rhs = cons_noncons_sides(mesh, r0, r1, z0, z1, zf, flux, dt)
        worst = max(worst, float(np.abs(lhs - rhs).max() / (np.abs(lhs).max() + 1.0)))
    out.append(("conservative form identity", worst <= 1e-12, f"max gap {worst:.2e}"))

    worst = 0.0
    for q in (2.0, 3.0, 4.0):
        u = np.where(mesh.interior, rng.normal(size=17), 0.0)
        lhs = float((dual_measure(mesh) * q_laplacian_1d(mesh, u, q) * u).sum())
        du = u[mesh.cell_faces[:, 1]] - u[mesh.cell_faces[:, 0]]
        rhs = float((mesh.cell_diameter * np.abs(du / mesh.cell_diameter) ** q).sum())
        worst = max(worst, abs(lhs - rhs) / rhs)
    out.append(("summation by parts", worst <= 1e-12, f"max relative gap {worst:.2e}"))
    return out


def cmd_selftest(args) -> int:
    seed = 0 if args.seed is None else args.seed
    results = selftest(seed)
    for name, ok, detail in results:
        print(f"  [{'ok  ' if ok else 'FAIL'}] {name}: {detail}")
    print(f"seed {seed}")
    return 0 if all(ok for _, ok, _ in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eulerent",
        description="Finite-volume entropy diagnostics for the Euler equations "
                    "in internal-energy form.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed recorded in outputs / used by selftest")
    common.add_argument("--modes", type=int, help="weak-norm surrogate modes per direction")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", parents=[common], help="run one configuration")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("study", parents=[common], help="refinement study over the ladder")
    p.add_argument("config")
    p.set_defaults(func=cmd_study)
    p = sub.add_parser("selftest", parents=[common], help="seeded property checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (EulerEntError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
