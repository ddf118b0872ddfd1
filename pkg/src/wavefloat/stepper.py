"""Coupled time steppers for the conservation laws with nonlocal flux.

Two schemes advance the wave field U = (zeta, q) together with the
coupling vector Theta:

* order 1: Lax-Friedrichs face fluxes + explicit Euler for Theta;
* order 2: MacCormack predictor/corrector with one-sided flux differences
  (backward on the right component, forward on the left, i.e. backward in
  the mirrored kernel orientation of either side) + Heun for Theta.

Both component grids are evolved by one kernel acting on the mirrored
arrays (see domain.SideState), which makes the scheme symmetric about
x = 0 by construction.  Each side has an inner boundary at the contact
point (coupled to Theta, or forced by a prescribed discharge series in
generation mode) and an outer boundary (inert neighbor copy, or forced by
a prescribed discharge when an exact solution supplies outer data).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domain import Grid, PhysicalSetup, State
from .errors import ConfigError, PhysicalStateError, SolverAbort
from .helmholtz import HelmholtzWorkspace, trace_r1, trace_r1_far

DEFAULT_VISCOSITY_NU = 2.136


@dataclass
class SchemeConfig:
    """Discretization choices shared by all scenarios.

    order           : 1 (Lax-Friedrichs/Euler) or 2 (MacCormack/Heun)
    dt_over_dx      : Courant ratio, in (0, 1]
    viscosity_nu    : artificial-viscosity coefficient near forced boundaries
    viscosity_cells : number of cells n0 the viscosity acts on
    generation_mode : inner boundaries forced by discharge data (no ODE)
    viscosity_on    : None selects the default rule (on for the order-2
                      scheme near generation-forced boundaries only)
    """

    order: int
    dt_over_dx: float
    viscosity_nu: float = DEFAULT_VISCOSITY_NU
    viscosity_cells: int = 4
    generation_mode: bool = False
    viscosity_on: bool | None = None

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ConfigError(f"scheme order must be 1 or 2, got {self.order}")
        if not (0.0 < self.dt_over_dx <= 1.0):
            raise ConfigError(f"dt_over_dx must lie in (0, 1], got {self.dt_over_dx}")
        if self.viscosity_cells < 0:
            raise ConfigError("viscosity_cells must be non-negative")


def shallow_flux(zeta, q, epsilon):
    """Shallow-water momentum flux eps*q^2/h + (h^2 - 1)/(2 eps), written
    in the epsilon-regular form eps*q^2/h + zeta + eps*zeta^2/2."""
    zeta = np.asarray(zeta, dtype=float)
    q = np.asarray(q, dtype=float)
    h = 1.0 + epsilon * zeta
    if np.any(h <= 0.0):
        raise PhysicalStateError("vacuum state in shallow_flux (1 + eps*zeta <= 0)")
    return epsilon * q * q / h + zeta + 0.5 * epsilon * zeta * zeta


def source_shape(x_offset, kappa):
    """Momentum component of the boundary source shape, exp(-|x|/kappa)."""
    if kappa <= 0:
        raise ConfigError("kappa must be positive")
    return np.exp(-np.abs(np.asarray(x_offset, dtype=float)) / kappa)


def generation_source(g, n, dt, order, stage=""):
    """Discharge-data source coefficient replacing the ODE-derived value
    in generation mode.

    g is a callable of time or a sampled series (uniform spacing dt); n is
    the step index.  order 1 returns the forward difference; order 2 the
    centered differences for the base step ("") and the predictor stage
    ("star").
    """
    if callable(g):
        def gv(k):
            return g(k * dt)
    else:
        series = np.asarray(g, dtype=float)

        def gv(k):
            if k < 0 or k >= len(series):
                raise ConfigError(
                    f"generation series is missing sample {k} (have {len(series)})")
            return series[k]

    if order == 1:
        return (gv(n + 1) - gv(n)) / dt
    if stage == "star":
        return (gv(n + 2) - gv(n)) / (2.0 * dt)
    return (gv(n + 1) - gv(n - 1)) / (2.0 * dt)


class _Side:
    """Static per-component data in kernel orientation."""

    def __init__(self, name, grid, setup, workspace, g_inner=None, g_far=None):
        self.name = name
        self.sgn = 1.0 if name == "right" else -1.0
        self.ws = workspace
        n = grid.n_cells_per_side
        j = np.arange(1, n + 1, dtype=float)
        self.b_in = source_shape(j * grid.dx, setup.kappa)
        self.b_far = source_shape((n + 1 - j) * grid.dx, setup.kappa) \
            if g_far is not None else None
        # kernel-oriented discharge data (left side stores p = -q)
        self.g_inner = (lambda t, g=g_inner, s=self.sgn: s * g(t)) \
            if g_inner is not None else None
        self.g_far = (lambda t, g=g_far, s=self.sgn: s * g(t)) \
            if g_far is not None else None


class Solver:
    """One simulation: grid + setup + scheme + coupling/boundary data.

    Generation-forced boundaries take precedence over the coupling at the
    inner contact points when scheme.generation_mode is set; the outer
    boundaries are inert copies unless outer discharge data is supplied.
    """

    def __init__(self, setup: PhysicalSetup, grid: Grid, scheme: SchemeConfig,
                 state: State, coupling=None, theta=None,
                 inner_data: dict | None = None, outer_data: dict | None = None,
                 volume_factor: float | None = None):
        self.setup = setup
        self.grid = grid
        self.scheme = scheme
        self.state = state
        self.coupling = coupling
        self.theta = None if theta is None else np.array(theta, dtype=float)
        self.t = 0.0
        self.step_index = 0

        if scheme.generation_mode:
            missing = [s for s in state.sides if s not in (inner_data or {})]
            if missing:
                raise ConfigError(
                    f"generation_mode needs inner discharge data for {missing}")
            if coupling is not None:
                raise ConfigError("generation_mode replaces the coupling ODE")
        elif coupling is None:
            raise ConfigError("need a coupling unless generation_mode is set")
        if coupling is not None and self.theta is None:
            raise ConfigError("coupling requires an initial theta")

        n = grid.n_cells_per_side
        if scheme.viscosity_cells >= n:
            raise ConfigError(
                f"viscosity_cells={scheme.viscosity_cells} must be < N={n}")
        ws = HelmholtzWorkspace(setup.kappa, grid.dx, n)
        inner_data = inner_data or {}
        outer_data = outer_data or {}
        self._sides = [
            _Side(name, grid, setup, ws,
                  g_inner=inner_data.get(name), g_far=outer_data.get(name))
            for name in state.sides
        ]
        if volume_factor is None:
            volume_factor = 2.0 if (len(state.sides) == 1
                                    and not scheme.generation_mode) else 1.0
        self.volume_factor = float(volume_factor)
        self._sync_boundary_discharge(self.t)

    # -- boundary data ------------------------------------------------------

    def _q_contact_kernel(self, side, theta, t):
        """Outward-oriented discharge at the contact point of one side."""
        if side.g_inner is not None:
            return side.g_inner(t)
        q_p, q_m = self.coupling.q_contact(theta, t)
        return q_p if side.sgn > 0 else -q_m

    def _sync_boundary_discharge(self, t):
        """Impose the contact-point values on the boundary cells.

        The discharge always comes from the coupling (or the generation
        data); with a coupling present the boundary elevation is the
        carried trace unknown zu_pm, which closes the face flux at the
        contact point and lets its dissipation damp the parasitic
        boundary-layer oscillation of the trace ODE.  In generation mode
        the boundary elevation is evolved by the scheme instead.
        """
        for side in self._sides:
            arr = self.state.side(side.name)
            arr.p[0] = self._q_contact_kernel(side, self.theta, t)
            if self.coupling is not None:
                zp, zm = self.coupling.zu_contact(self.theta)
                arr.z[0] = zp if side.sgn > 0 else zm
            if side.g_far is not None:
                arr.p[-1] = side.g_far(t)
            else:
                arr.p[-1] = arr.p[-2]
                arr.z[-1] = arr.z[-2]

    def _source_kernel(self, side, sp, sm):
        """Kernel-oriented inner source coefficient from the pair (S+, S-)."""
        return sp if side.sgn > 0 else -sm

    # -- flux assembly ------------------------------------------------------

    def _fluxes(self, side, z, p, p0, p_far):
        """Nonlocal flux arrays (Fz, Fq) at cell points 0..N+1 and the
        inner trace of the regularized momentum flux."""
        n = self.grid.n_cells_per_side
        fsw = shallow_flux(z[1:n + 1], p[1:n + 1], self.setup.epsilon)
        v = side.ws.solve(fsw)
        r_in = trace_r1(v)
        fz = np.empty(n + 2)
        fq = np.empty(n + 2)
        fz[0] = p0
        fq[0] = r_in
        fz[1:n + 1] = p[1:n + 1]
        fq[1:n + 1] = v
        if side.g_far is not None:
            fz[n + 1] = p_far
            fq[n + 1] = trace_r1_far(v)
        else:
            fz[n + 1] = p[n]
            fq[n + 1] = v[-1]
        return fz, fq, r_in

    def _viscosity_active(self, side):
        on = self.scheme.viscosity_on
        if on is None:
            on = self.scheme.order == 2 and (side.g_inner is not None
                                             or side.g_far is not None)
        if not on or self.scheme.viscosity_cells == 0:
            return False, False
        if self.scheme.viscosity_on:
            return True, side.g_far is not None
        return side.g_inner is not None, side.g_far is not None

    def _viscosity_term(self, side, z):
        """Explicit increment nu*dx*(z_{j+1} - 2 z_j + z_{j-1}) on the n0
        cells adjacent to each forced boundary, evaluated at time n."""
        n = self.grid.n_cells_per_side
        n0 = self.scheme.viscosity_cells
        nu_dx = self.scheme.viscosity_nu * self.grid.dx
        inc = np.zeros(n)
        near_in, near_far = self._viscosity_active(side)
        if near_in:
            inc[0:n0] = nu_dx * (z[2:n0 + 2] - 2.0 * z[1:n0 + 1] + z[0:n0])
        if near_far:
            inc[n - n0:n] += nu_dx * (z[n - n0 + 2:n + 2]
                                      - 2.0 * z[n - n0 + 1:n + 1]
                                      + z[n - n0:n])
        return inc

    # -- time stepping ------------------------------------------------------

    def step(self, dt: float):
        try:
            if self.scheme.order == 1:
                self._step_lf(dt)
            else:
                self._step_mc(dt)
            self.state.check_depth(self.setup.epsilon)
            if self.theta is not None and not np.all(np.isfinite(self.theta)):
                raise PhysicalStateError("coupling vector became non-finite")
        except PhysicalStateError as exc:
            raise SolverAbort(str(exc), step=self.step_index, t=self.t) from exc
        self.step_index += 1

    def _coupling_stage(self, t, theta, r_plus, r_minus, fext_time):
        fext = self.coupling.f_ext(fext_time)
        g = self.coupling.rhs(t, theta, r_plus, r_minus, fext)
        sp, sm = self.coupling.sources(g, t)
        return g, sp, sm

    def _inner_traces(self, values):
        """(R1 fsw)_+ and (R1 fsw)_- from the per-side inner traces."""
        r = dict(values)
        r_plus = r["right"]
        r_minus = r.get("left", r_plus)
        return r_plus, r_minus

    def inner_flux_traces(self):
        """Boundary values of the regularized momentum flux at the current
        state: ((R1 fsw)_+, (R1 fsw)_-)."""
        n = self.grid.n_cells_per_side
        traces = {}
        for side in self._sides:
            arr = self.state.side(side.name)
            fsw = shallow_flux(arr.z[1:n + 1], arr.p[1:n + 1], self.setup.epsilon)
            traces[side.name] = trace_r1(side.ws.solve(fsw))
        return self._inner_traces(traces)

    def _step_lf(self, dt):
        n = self.grid.n_cells_per_side
        r = dt / self.grid.dx
        lam = self.grid.dx / (2.0 * dt)
        t = self.t

        per_side = {}
        traces = {}
        for side in self._sides:
            arr = self.state.side(side.name)
            p0 = self._q_contact_kernel(side, self.theta, t)
            p_far = side.g_far(t) if side.g_far is not None else arr.p[n]
            fz, fq, r_in = self._fluxes(side, arr.z, arr.p, p0, p_far)
            per_side[side.name] = (fz, fq, p0, p_far)
            traces[side.name] = r_in

        if self.coupling is not None:
            r_plus, r_minus = self._inner_traces(traces)
            g_n, sp, sm = self._coupling_stage(t, self.theta, r_plus, r_minus, t)

        for side in self._sides:
            arr = self.state.side(side.name)
            fz, fq, p0, p_far = per_side[side.name]
            z, p = arr.z, arr.p
            if side.g_inner is not None:
                sigma_in = generation_source(side.g_inner, self.step_index, dt, 1)
            else:
                sigma_in = self._source_kernel(side, sp, sm)
            sigma_far = generation_source(side.g_far, self.step_index, dt, 1) \
                if side.g_far is not None else 0.0

            # Lax-Friedrichs face fluxes at j+1/2 for j = 0..N
            gz = 0.5 * (fz[1:] + fz[:-1]) - lam * (z[1:] - z[:-1])
            gq = 0.5 * (fq[1:] + fq[:-1]) - lam * (p[1:] - p[:-1])

            z_new = z.copy()
            p_new = p.copy()
            z_new[1:n + 1] = z[1:n + 1] - r * (gz[1:] - gz[:-1])
            p_new[1:n + 1] = p[1:n + 1] - r * (gq[1:] - gq[:-1]) \
                + dt * sigma_in * side.b_in
            if side.b_far is not None:
                p_new[1:n + 1] += dt * sigma_far * side.b_far
            z_new[0] = z[0] - 2.0 * r * (gz[0] - fz[0])
            if side.g_far is not None:
                z_new[n + 1] = z[n + 1] - 2.0 * r * (fz[n + 1] - gz[n])
            arr.z, arr.p = z_new, p_new

        if self.coupling is not None:
            self.theta = self.theta + dt * g_n
        self.t = t + dt
        self._sync_boundary_discharge(self.t)

    def _step_mc(self, dt):
        n = self.grid.n_cells_per_side
        r = dt / self.grid.dx
        t = self.t
        t1 = t + dt

        # stage n: fluxes, coupling rhs, sources
        flux_n = {}
        traces_n = {}
        for side in self._sides:
            arr = self.state.side(side.name)
            p0 = self._q_contact_kernel(side, self.theta, t)
            p_far = side.g_far(t) if side.g_far is not None else arr.p[n]
            fz, fq, r_in = self._fluxes(side, arr.z, arr.p, p0, p_far)
            flux_n[side.name] = (fz, fq)
            traces_n[side.name] = r_in

        theta_star = None
        if self.coupling is not None:
            r_plus, r_minus = self._inner_traces(traces_n)
            g_n, sp_n, sm_n = self._coupling_stage(t, self.theta, r_plus, r_minus, t)
            theta_star = self.theta + dt * g_n

        # predictor (backward differences in kernel orientation)
        pred = {}
        for side in self._sides:
            arr = self.state.side(side.name)
            fz, fq = flux_n[side.name]
            z, p = arr.z, arr.p
            if side.g_inner is not None:
                sigma_in = generation_source(side.g_inner, self.step_index, dt, 2)
            else:
                sigma_in = self._source_kernel(side, sp_n, sm_n)
            sigma_far = generation_source(side.g_far, self.step_index, dt, 2) \
                if side.g_far is not None else 0.0

            z_s = z.copy()
            p_s = p.copy()
            z_s[1:n + 1] = z[1:n + 1] - r * (fz[1:n + 1] - fz[0:n])
            p_s[1:n + 1] = p[1:n + 1] - r * (fq[1:n + 1] - fq[0:n]) \
                + dt * sigma_in * side.b_in
            if side.b_far is not None:
                p_s[1:n + 1] += dt * sigma_far * side.b_far
            if side.g_inner is not None:
                z_s[0] = z[0] - r * (fz[1] - fz[0])
                p_s[0] = side.g_inner(t1)
            else:
                zp_s, zm_s = self.coupling.zu_contact(theta_star)
                z_s[0] = zp_s if side.sgn > 0 else zm_s
                p_s[0] = self._q_contact_kernel(side, theta_star, t1)
            if side.g_far is not None:
                z_s[n + 1] = z[n + 1] - r * (fz[n + 1] - fz[n])
                p_s[n + 1] = side.g_far(t1)
            else:
                z_s[n + 1] = z_s[n]
                p_s[n + 1] = p_s[n]
            pred[side.name] = (z_s, p_s, sigma_in, sigma_far)

        # stage *: fluxes of the predicted state
        flux_s = {}
        traces_s = {}
        for side in self._sides:
            z_s, p_s, _, _ = pred[side.name]
            fz_s, fq_s, r_in_s = self._fluxes(side, z_s, p_s, p_s[0], p_s[n + 1])
            flux_s[side.name] = (fz_s, fq_s)
            traces_s[side.name] = r_in_s

        if self.coupling is not None:
            rs_plus, rs_minus = self._inner_traces(traces_s)
            # intermediate source uses F_ext at t^n, the Heun average at t^{n+1}
            _, sp_s, sm_s = self._coupling_stage(t1, theta_star, rs_plus, rs_minus, t)
            g_star = self.coupling.rhs(t1, theta_star, rs_plus, rs_minus,
                                       self.coupling.f_ext(t1))

        # corrector
        for side in self._sides:
            arr = self.state.side(side.name)
            fz, fq = flux_n[side.name]
            fz_s, fq_s = flux_s[side.name]
            z, p = arr.z, arr.p
            z_sp, p_sp, sigma_in_n, sigma_far_n = pred[side.name]
            if side.g_inner is not None:
                sigma_in_s = generation_source(side.g_inner, self.step_index, dt, 2,
                                               stage="star")
            else:
                sigma_in_s = self._source_kernel(side, sp_s, sm_s)
            sigma_far_s = generation_source(side.g_far, self.step_index, dt, 2,
                                            stage="star") \
                if side.g_far is not None else 0.0

            z_new = z.copy()
            p_new = p.copy()
            z_new[1:n + 1] = z[1:n + 1] - 0.5 * r * (
                fz[1:n + 1] - fz[0:n] + fz_s[2:n + 2] - fz_s[1:n + 1])
            p_new[1:n + 1] = p[1:n + 1] - 0.5 * r * (
                fq[1:n + 1] - fq[0:n] + fq_s[2:n + 2] - fq_s[1:n + 1]) \
                + 0.5 * dt * (sigma_in_n + sigma_in_s) * side.b_in
            if side.b_far is not None:
                p_new[1:n + 1] += 0.5 * dt * (sigma_far_n + sigma_far_s) * side.b_far
            z_new[1:n + 1] += self._viscosity_term(side, z)
            z_new[0] = z[0] - 0.5 * r * (fz[1] - fz[0] + fz_s[1] - fz_s[0])
            if side.g_far is not None:
                z_new[n + 1] = z[n + 1] - 0.5 * r * (
                    fz[n + 1] - fz[n] + fz_s[n + 1] - fz_s[n])
            arr.z, arr.p = z_new, p_new

        if self.coupling is not None:
            self.theta = self.theta + 0.5 * dt * (g_n + g_star)
        self.t = t1
        self._sync_boundary_discharge(self.t)

    # -- diagnostics ---------------------------------------------------------

    def describe(self):
        """(delta, delta_dot, qi_avg, zu_plus, zu_minus) at the current time."""
        if self.coupling is None:
            return 0.0, 0.0, 0.0, 0.0, 0.0
        return self.coupling.describe(self.theta, self.t)

    def volume(self):
        """Discrete total volume: fluid columns plus the displaced column
        2*ell*delta under the object."""
        w = self.grid.widths_kernel
        total = 0.0
        for side in self._sides:
            arr = self.state.side(side.name)
            cells = arr.z * w
            if side.g_far is None:
                cells = cells[:-1]  # outer slot is a ghost, not a cell
            total += float(np.sum(cells))
        total *= self.volume_factor
        delta = self.describe()[0]
        return total + 2.0 * self.grid.ell * delta


@dataclass
class RunResult:
    """Time series and final state of one simulation run."""

    times: np.ndarray
    delta: np.ndarray
    delta_dot: np.ndarray
    qi_avg: np.ndarray
    zu_plus: np.ndarray
    zu_minus: np.ndarray
    volume: np.ndarray
    solver: Solver
    runtime_s: float
    extras: dict = field(default_factory=dict)

    def fields(self):
        return self.solver.state.physical_fields()


def advance(solver: Solver, t_final: float, on_step: Callable | None = None) -> RunResult:
    """March the solver to t_final (last step shortened to land exactly),
    recording the coupling diagnostics at every step."""
    if t_final < 0:
        raise ConfigError("t_final must be non-negative")
    dt_nom = solver.scheme.dt_over_dx * solver.grid.dx
    rows = []
    tic = time.perf_counter()

    def record():
        d, dd, qi, zp, zm = solver.describe()
        rows.append((solver.t, d, dd, qi, zp, zm, solver.volume()))

    record()
    if on_step is not None:
        on_step(solver)
    while solver.t < t_final - 1e-12 * max(1.0, t_final):
        dt = min(dt_nom, t_final - solver.t)
        solver.step(dt)
        record()
        if on_step is not None:
            on_step(solver)
    runtime = time.perf_counter() - tic
    data = np.asarray(rows)
    return RunResult(times=data[:, 0], delta=data[:, 1], delta_dot=data[:, 2],
                     qi_avg=data[:, 3], zu_plus=data[:, 4], zu_minus=data[:, 5],
                     volume=data[:, 6], solver=solver, runtime_s=runtime)
