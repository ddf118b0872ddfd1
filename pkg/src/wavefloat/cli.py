"""Command-line entry point.

    wavefloat run      --config <path> [--out <dir>] [--scheme lf|mc]
    wavefloat converge --config <path> [--out <dir>] [--scheme lf|mc]
    wavefloat --seed-check

Exit codes: 0 success, 2 configuration error, 3 solver abort,
4 oracle invalid.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from .errors import WavefloatError
from .harness import convergence_study, run_scenario
from .scenarios import parse_config


def _load_spec(path: str, scheme_override: str | None):
    with open(path) as fh:
        spec = parse_config(fh.read())
    if scheme_override is not None:
        spec = dataclasses.replace(spec, scheme=scheme_override)
    return spec


def _cmd_run(args) -> int:
    spec = _load_spec(args.config, args.scheme)
    result = run_scenario(spec, out_dir=args.out)
    d, dd, qi = result.delta[-1], result.delta_dot[-1], result.qi_avg[-1]
    print(f"ran {spec.kind} ({spec.scheme}) to t={result.times[-1]:g} "
          f"in {result.runtime_s:.2f}s: delta={d:.6g} delta_dot={dd:.6g} "
          f"qi_avg={qi:.6g}")
    if args.out:
        print(f"wrote diagnostics and fields to {args.out}")
    return 0


def _cmd_converge(args) -> int:
    spec = _load_spec(args.config, args.scheme)
    report = convergence_study(spec, out_dir=args.out)
    print(report.summary())
    if args.out:
        print(f"wrote report.csv and plot_report.py to {args.out}")
    return 0


def seed_check() -> int:
    """Fast always-on property checks (no oracle data needed)."""
    from .coupling import FreeCoupling, assemble_and_invert_M, geometry_coeffs, rhs_G
    from .domain import State, build_grid, make_setup
    from .helmholtz import HelmholtzWorkspace
    from .stepper import SchemeConfig, Solver, advance

    failures = []

    def check(name, ok):
        print(f"  [{'pass' if ok else 'FAIL'}] {name}")
        if not ok:
            failures.append(name)

    rng = np.random.default_rng(7)
    ws = HelmholtzWorkspace(kappa=0.4, dx=0.05, n=64)
    f = rng.standard_normal(64)
    check("R1 round-trip <= 1e-12",
          np.max(np.abs(ws.apply(ws.solve(f)) - f)) <= 1e-12 * np.max(np.abs(f)))
    check("R1 preserves constants",
          np.max(np.abs(ws.solve(np.full(64, 2.5)) - 2.5)) <= 1e-13)

    setup = make_setup(0.3, 4.0, 0.7, mu=0.3)
    ok = True
    for _ in range(200):
        zu = rng.uniform(-0.2, 0.2, size=2)
        delta = rng.uniform(-0.2, 0.2)
        cm = assemble_and_invert_M(setup, geometry_coeffs(setup, 0.3 * delta),
                                   zu[0], zu[1])
        ok &= np.max(np.abs(cm.m @ cm.m_inv - np.eye(4))) <= 1e-12
        ok &= cm.d < 0
    check("coupling matrix explicit inverse <= 1e-12, D < 0", ok)

    g0 = rhs_G(np.zeros(7), 0.0, 0.0, 0.0, setup)
    check("rest state is an equilibrium of the coupling ODE",
          np.all(g0 == 0.0))

    # symmetric data (rest fluid, offset object) through the full 7-component path
    grid = build_grid(30.0, 4.0, 48)
    state = State(grid, sides=("right", "left"))
    theta0 = np.array([0.0, 0.0, 0.0, 0.0, 0.1, 0.0, 0.0])
    solver = Solver(setup, grid, SchemeConfig(order=2, dt_over_dx=0.7),
                    state, coupling=FreeCoupling(setup), theta=theta0)
    result = advance(solver, 2.0)
    check("symmetric run keeps |qi_avg| <= 1e-10",
          np.max(np.abs(result.qi_avg)) <= 1e-10)
    sym_gap = np.max(np.abs(solver.state.right.z - solver.state.left.z))
    check("symmetric run keeps zeta(x) = zeta(-x) to 1e-10", sym_gap <= 1e-10)

    if failures:
        print(f"{len(failures)} property check(s) failed")
        return 1
    print("all property checks passed")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wavefloat", description=__doc__)
    parser.add_argument("--seed-check", action="store_true",
                        help="run the fast property suite and exit")
    sub = parser.add_subparsers(dest="command")
    for name, fn in (("run", _cmd_run), ("converge", _cmd_converge)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--scheme", choices=("lf", "mc"), default=None)
        p.set_defaults(fn=fn)

    args = parser.parse_args(argv)
    if args.seed_check:
        return seed_check()
    if args.command is None:
        parser.print_help()
        return 2
    try:
        return args.fn(args)
    except WavefloatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if getattr(exc, "snapshot_path", None):
            print(f"state snapshot: {exc.snapshot_path}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
