"""Run scenarios, measure errors against references, fit convergence orders.

Error conventions follow the experiment design:

* oracle references (exact solitary wave, decay law, periodic family) are
  evaluated on the run's own grid / time samples, and the error is the
  max norm over the final fields or over the whole time series;
* self-convergence references (a run on a much finer mesh) are compared
  observable-by-observable at the exact final time, which every run hits
  by shortening its last step.  Spatial fields can also be compared by
  restriction when the coarse cell centers are a subset of the reference
  centers, i.e. when (n_ref + 1) is a multiple of (N + 1).

Orders are least-squares slopes of log(error) against log(dx) over all
meshes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .coupling import FreeCoupling, control_force
from .domain import State
from .errors import ConfigError, SolverAbort
from .scenarios import Assembled, ScenarioSpec, build_solver, init_from_scenario
from .stepper import RunResult, Solver, advance

RESTRICTION_COORD_TOL = 1e-12


# ---------------------------------------------------------------------------
# Single runs
# ---------------------------------------------------------------------------

def run_scenario(spec: ScenarioSpec, n: int | None = None,
                 out_dir: str | None = None) -> RunResult:
    """Run one mesh of a scenario; optionally write the diagnostics and
    final-field CSVs into out_dir.  Solver aborts are re-raised with a
    state-snapshot path when out_dir is given."""
    n = int(n if n is not None else spec.n_list[-1])
    assembled = build_solver(spec, n)
    try:
        result = advance(assembled.solver, spec.t_final)
    except SolverAbort as exc:
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)
            path = os.path.join(out_dir, f"abort_N{n}_step{exc.step}.csv")
            _write_fields_csv(path, assembled.solver.state)
            exc.snapshot_path = path
        raise
    result.extras["assembled"] = assembled
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_diagnostics_csv(os.path.join(out_dir, f"diag_N{n}.csv"), result)
        _write_fields_csv(os.path.join(out_dir, f"fields_N{n}.csv"),
                          assembled.solver.state)
    return result


def run_control_loop(spec: ScenarioSpec, n: int) -> float:
    """Closed-loop control experiment on one mesh.

    Stage A runs the forced solver along the prescribed trajectory and
    records the control force at every step; stage B feeds that force into
    the free solver from the same initial data and returns the maximum
    trajectory-tracking error max |delta - delta_forced|.
    """
    from .scenarios import control_loop_initial_fields, make_sine_forcing

    setup = spec.setup()
    amp = spec.params.get("amp", 0.05)
    forcing = make_sine_forcing(amp)

    assembled = build_solver(spec, n)
    forced = assembled.solver
    times, forces = [], []

    def record_force(solver: Solver):
        r_plus, r_minus = solver.inner_flux_traces()
        times.append(solver.t)
        forces.append(control_force(solver.theta, r_plus, r_minus,
                                    forcing(solver.t), setup))

    advance(forced, spec.t_final, on_step=record_force)
    t_arr = np.asarray(times)
    f_arr = np.asarray(forces)

    def f_ext(t):
        idx = int(np.argmin(np.abs(t_arr - t)))
        if abs(t_arr[idx] - t) > 1e-9 * max(1.0, spec.t_final):
            raise ConfigError(f"control-force series has no sample at t={t}")
        return float(f_arr[idx])

    grid = forced.grid
    zeta_in, q_in = control_loop_initial_fields(setup, amp)
    state, theta0 = init_from_scenario(setup, grid, "free", zeta_in, q_in,
                                       delta0=0.0)
    free = Solver(setup, grid, spec.scheme_config(), state,
                  coupling=FreeCoupling(setup, f_ext=f_ext), theta=theta0)
    result = advance(free, spec.t_final)
    target = amp * np.sin(result.times)
    return float(np.max(np.abs(result.delta - target)))


# ---------------------------------------------------------------------------
# Errors and convergence
# ---------------------------------------------------------------------------

def _series_of(result: RunResult, name: str) -> np.ndarray:
    try:
        return getattr(result, {"delta": "delta", "qi": "qi_avg",
                                "zu_plus": "zu_plus"}[name])
    except KeyError:
        raise ConfigError(f"unknown observable {name!r}") from None


def _oracle_errors(assembled: Assembled, result: RunResult) -> dict:
    errors = {}
    spec = assembled.spec
    if assembled.exact_fields is not None:
        x, zeta, q = result.solver.state.interior_fields()
        ze, qe = assembled.exact_fields(x, spec.t_final)
        errors["zeta"] = float(np.max(np.abs(zeta - ze)))
        errors["q"] = float(np.max(np.abs(q - qe)))
    for name, fn in assembled.exact_series.items():
        errors[name] = float(np.max(np.abs(_series_of(result, name)
                                           - fn(result.times))))
    return errors


def restrict_to_reference(coarse: Solver, ref: Solver):
    """Indices mapping coarse cell centers onto reference centers.

    Requires (n_ref + 1) divisible by (N + 1); coordinates are verified to
    coincide to 1e-12 before use.
    """
    n_c = coarse.grid.n_cells_per_side
    n_r = ref.grid.n_cells_per_side
    if (n_r + 1) % (n_c + 1) != 0:
        raise ConfigError(
            f"reference mesh N={n_r} is not a refinement of N={n_c}: "
            f"(n_ref + 1) must be divisible by (N + 1)")
    m = (n_r + 1) // (n_c + 1)
    idx = np.arange(1, n_c + 1) * m
    xc = coarse.grid.ell + np.arange(1, n_c + 1) * coarse.grid.dx
    xr = ref.grid.ell + idx * ref.grid.dx
    if np.max(np.abs(xc - xr)) > RESTRICTION_COORD_TOL:
        raise ConfigError("restriction coordinates failed to coincide")
    return idx


def field_restriction_error(coarse: Solver, ref: Solver) -> dict:
    """Max-norm field differences on coincident cell centers."""
    idx = restrict_to_reference(coarse, ref)
    out = {}
    for name in coarse.state.sides:
        zc = coarse.state.side(name).z[1:coarse.grid.n_cells_per_side + 1]
        pc = coarse.state.side(name).p[1:coarse.grid.n_cells_per_side + 1]
        zr = ref.state.side(name).z[idx]
        pr = ref.state.side(name).p[idx]
        out.setdefault("zeta", 0.0)
        out.setdefault("q", 0.0)
        out["zeta"] = max(out["zeta"], float(np.max(np.abs(zc - zr))))
        out["q"] = max(out["q"], float(np.max(np.abs(pc - pr))))
    return out


def fit_order(dx: np.ndarray, err: np.ndarray):
    """Least-squares slope of log err against log dx, with rms residual.

    Returns (nan, nan) when any error vanishes (nothing to fit, e.g. a
    zero-step run reproducing its own initial data).
    """
    dx = np.asarray(dx, dtype=float)
    err = np.asarray(err, dtype=float)
    if np.any(err <= 0.0) or len(dx) < 2:
        return float("nan"), float("nan")
    a = np.vstack([np.log(dx), np.ones_like(dx)]).T
    sol, *_ = np.linalg.lstsq(a, np.log(err), rcond=None)
    resid = np.log(err) - a @ sol
    return float(sol[0]), float(np.sqrt(np.mean(resid ** 2)))


@dataclass
class ConvergenceReport:
    """Per-mesh errors and fitted orders for one scenario/scheme pair."""

    spec: ScenarioSpec
    n_list: tuple
    dx: np.ndarray
    errors: dict            # observable -> array over n_list
    orders: dict            # observable -> fitted slope
    fit_residuals: dict     # observable -> rms log-residual
    runtimes: np.ndarray

    def summary(self) -> str:
        lines = [f"scenario={self.spec.kind} scheme={self.spec.scheme} "
                 f"T_f={self.spec.t_final}"]
        for name in self.errors:
            errs = " ".join(f"{e:.3e}" for e in self.errors[name])
            lines.append(f"  {name}: errors [{errs}]  order "
                         f"{self.orders[name]:.3f} "
                         f"(fit rms {self.fit_residuals[name]:.2f})")
        return "\n".join(lines)


def convergence_study(spec: ScenarioSpec, out_dir: str | None = None) -> ConvergenceReport:
    """Run every mesh of the scenario and fit observed orders."""
    if len(spec.n_list) < 3 and spec.t_final > 0:
        raise ConfigError("convergence studies need at least 3 mesh sizes")

    if spec.kind == "control_loop":
        errors = {"delta_tracking": []}
        runtimes = []
        for n in spec.n_list:
            import time as _time
            tic = _time.perf_counter()
            errors["delta_tracking"].append(run_control_loop(spec, n))
            runtimes.append(_time.perf_counter() - tic)
        return _finalize_report(spec, errors, runtimes, out_dir)

    ref_interp = None
    if spec.reference == "self":
        from scipy.interpolate import CubicSpline
        ref_result = run_scenario(spec, spec.n_ref)
        # dense reference: cubic interpolation error ~ dt_ref^4, far below
        # any coarse-run error, so the comparison stays reference-dominated
        ref_interp = {name: CubicSpline(ref_result.times, _series_of(ref_result, name))
                      for name in spec.observables}

    errors = {name: [] for name in spec.observables}
    runtimes = []
    for n in spec.n_list:
        result = run_scenario(spec, n)
        runtimes.append(result.runtime_s)
        assembled = result.extras["assembled"]
        if spec.reference == "oracle":
            errs = _oracle_errors(assembled, result)
            for name in spec.observables:
                errors[name].append(errs[name])
        else:
            for name in spec.observables:
                gap = _series_of(result, name) - ref_interp[name](result.times)
                errors[name].append(float(np.max(np.abs(gap))))
    return _finalize_report(spec, errors, runtimes, out_dir)


def _finalize_report(spec, errors, runtimes, out_dir):
    dx = np.array([(spec.L - spec.ell) / (n + 1) for n in spec.n_list])
    orders, resids = {}, {}
    for name, errs in errors.items():
        errors[name] = np.asarray(errs, dtype=float)
        orders[name], resids[name] = fit_order(dx, errors[name])
    report = ConvergenceReport(spec=spec, n_list=spec.n_list, dx=dx,
                               errors=errors, orders=orders,
                               fit_residuals=resids,
                               runtimes=np.asarray(runtimes))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_report_csv(os.path.join(out_dir, "report.csv"), report)
        _write_plot_script(os.path.join(out_dir, "plot_report.py"))
    return report


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def write_diagnostics_csv(path: str, result: RunResult):
    cols = np.column_stack([result.times, result.delta, result.delta_dot,
                            result.qi_avg, result.zu_plus, result.zu_minus,
                            result.volume])
    header = "t,delta,delta_dot,qi_avg,zu_plus,zu_minus,volume"
    np.savetxt(path, cols, delimiter=",", header=header, comments="",
               fmt="%.17g")


def _write_fields_csv(path: str, state: State):
    x, zeta, q = state.physical_fields()
    np.savetxt(path, np.column_stack([x, zeta, q]), delimiter=",",
               header="x,zeta,q", comments="", fmt="%.17g")


def write_report_csv(path: str, report: ConvergenceReport):
    names = list(report.errors)
    header = ["N", "dx"] + [f"err_{n}" for n in names] \
        + [f"order_{n}" for n in names] + ["runtime_s"]
    rows = []
    for i, n in enumerate(report.n_list):
        row = [n, report.dx[i]]
        row += [report.errors[name][i] for name in names]
        row += [report.orders[name] for name in names]
        row.append(report.runtimes[i])
        rows.append(row)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v)
                              for v in row) + "\n")


_PLOT_SCRIPT = '''\
"""Log-log error plot for report.csv (generated alongside the report)."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "report.csv"
with open(path) as fh:
    rows = list(csv.DictReader(fh))
dx = [float(r["dx"]) for r in rows]
names = [k[4:] for k in rows[0] if k.startswith("err_")]
for name in names:
    plt.loglog(dx, [float(r["err_" + name]) for r in rows], "o-",
               label=f"{name} (order {float(rows[0]['order_' + name]):.2f})")
plt.xlabel("dx")
plt.ylabel("max error")
plt.legend()
plt.grid(True, which="both", alpha=0.3)
plt.savefig("report.png", dpi=150, bbox_inches="tight")
print("wrote report.png")
'''


def _write_plot_script(path: str):
    with open(path, "w") as fh:
        fh.write(_PLOT_SCRIPT)
