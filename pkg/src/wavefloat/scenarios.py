"""Scenario catalogue, configuration parsing and solver assembly.

A scenario bundles the physical setup, the scheme parameters, the initial
data and the reference solution of one experiment family:

* wave_generation : waves driven through the boundary by discharge data
  (solitary-wave inflow), exact solitary wave as reference;
* decay_linear    : release from rest at offset delta0, epsilon = 0,
  inverse-Laplace decay law as reference;
* decay_nonlinear : same release with epsilon > 0, self-convergence;
* fixed_linear    : periodic exact family around a fixed object;
* fixed_nonlinear : solitary wave hitting a fixed object, self-convergence;
* free_floating   : solitary wave hitting a freely floating object;
* control_loop    : forced motion -> control force -> free solver replay.

Configuration files are flat key = value text; see parse_config.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .coupling import ForcedCoupling, FreeCoupling, SymmetricCoupling
from .domain import (Grid, PhysicalSetup, State, build_grid, derivative_at_contact,
                     make_setup, trace_at_contact)
from .errors import ConfigError
from .oracles import (SolitonProfile, fixed_object_exact, fixed_object_qi_exact,
                      linear_decay_exact, make_periodic_spec, soliton_profile)
from .stepper import SchemeConfig, Solver

SCENARIO_KINDS = ("wave_generation", "decay_linear", "decay_nonlinear",
                  "fixed_linear", "fixed_nonlinear", "free_floating",
                  "control_loop")

OBSERVABLES = {
    "wave_generation": ("zeta", "q"),
    "decay_linear": ("delta",),
    "decay_nonlinear": ("delta",),
    "fixed_linear": ("qi",),
    "fixed_nonlinear": ("qi",),
    "free_floating": ("delta", "qi", "zu_plus"),
    "control_loop": ("delta_tracking",),
}

THETA0_CONSISTENCY_TOL = 1e-10


@dataclass
class ScenarioSpec:
    """One experiment: physics + scheme + mesh list + scenario data."""

    kind: str
    epsilon: float
    mu: float
    ell: float
    L: float
    h_eq: float | Callable
    scheme: str
    dt_ratio: float
    t_final: float
    n_list: tuple
    n_ref: int | None = None
    params: dict = field(default_factory=dict)
    viscosity_nu: float = 2.136
    viscosity_cells: int = 4
    viscosity_on: bool | None = None

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ConfigError(f"unknown scenario {self.kind!r}")
        if self.scheme not in ("lf", "mc"):
            raise ConfigError(f"scheme must be 'lf' or 'mc', got {self.scheme!r}")
        self.n_list = tuple(int(n) for n in self.n_list)
        if not self.n_list:
            raise ConfigError("need at least one mesh size N")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ConfigError(f"N list must be strictly increasing, got {self.n_list}")
        if self.reference == "self" and self.n_ref is None:
            raise ConfigError(f"{self.kind} needs n_ref for self-convergence")
        if self.n_ref is not None and self.n_ref <= self.n_list[-1]:
            raise ConfigError("n_ref must exceed every entry of the N list")

    @property
    def order(self) -> int:
        return 1 if self.scheme == "lf" else 2

    @property
    def observables(self) -> tuple:
        return OBSERVABLES[self.kind]

    @property
    def reference(self) -> str:
        if self.kind in ("decay_nonlinear", "fixed_nonlinear", "free_floating"):
            return "self"
        if self.kind == "control_loop":
            return "tracking"
        return "oracle"

    def setup(self) -> PhysicalSetup:
        return make_setup(self.epsilon, self.ell, self.h_eq, mu=self.mu)

    def scheme_config(self, generation_mode: bool = False) -> SchemeConfig:
        return SchemeConfig(order=self.order, dt_over_dx=self.dt_ratio,
                            viscosity_nu=self.viscosity_nu,
                            viscosity_cells=self.viscosity_cells,
                            generation_mode=generation_mode,
                            viscosity_on=self.viscosity_on)


# ---------------------------------------------------------------------------
# Configuration files
# ---------------------------------------------------------------------------

_COMMON_KEYS = {"scenario", "epsilon", "mu", "ell", "L", "N", "dt_ratio",
                "scheme", "T_final", "h_eq", "n_ref", "viscosity_nu",
                "viscosity_cells", "viscosity_on"}
_SCENARIO_KEYS = {"delta0", "zeta_max", "x0", "k", "amp_zeta_plus",
                  "amp_zeta_minus", "amp_q_plus", "amp_q_minus", "amp",
                  "far_forced"}


def _parse_h_eq(text: str):
    text = text.strip()
    if not text.startswith("constant:"):
        raise ConfigError(f"h_eq must be 'constant:<value>' in v1, got {text!r}")
    value = float(text.split(":", 1)[1])
    if value <= 0:
        raise ConfigError(f"h_eq must be positive, got {value}")
    return value


def parse_config(text: str) -> ScenarioSpec:
    """Parse a flat key = value scenario file into a ScenarioSpec."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in body.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    unknown = set(raw) - _COMMON_KEYS - _SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    missing = {"scenario", "epsilon", "mu", "ell", "L", "N", "dt_ratio",
               "scheme", "T_final", "h_eq"} - set(raw)
    if missing:
        raise ConfigError(f"missing configuration keys: {sorted(missing)}")

    params = {}
    for key in _SCENARIO_KEYS & set(raw):
        if key == "far_forced":
            params[key] = raw[key].strip().lower() in ("1", "true", "yes", "on")
        else:
            params[key] = float(raw[key])
    visc_on = None
    if "viscosity_on" in raw:
        v = raw["viscosity_on"].strip().lower()
        if v not in ("auto", "on", "off", "true", "false"):
            raise ConfigError(f"viscosity_on must be auto/on/off, got {v!r}")
        visc_on = None if v == "auto" else v in ("on", "true")

    return ScenarioSpec(
        kind=raw["scenario"].strip(),
        epsilon=float(raw["epsilon"]),
        mu=float(raw["mu"]),
        ell=float(raw["ell"]),
        L=float(raw["L"]),
        h_eq=_parse_h_eq(raw["h_eq"]),
        scheme=raw["scheme"].strip().lower(),
        dt_ratio=float(raw["dt_ratio"]),
        t_final=float(raw["T_final"]),
        n_list=tuple(int(s) for s in raw["N"].replace(",", " ").split()),
        n_ref=int(raw["n_ref"]) if "n_ref" in raw else None,
        params=params,
        viscosity_nu=float(raw.get("viscosity_nu", 2.136)),
        viscosity_cells=int(float(raw.get("viscosity_cells", 4))),
        viscosity_on=visc_on,
    )


# ---------------------------------------------------------------------------
# Initial data satisfying the compatibility conditions
# ---------------------------------------------------------------------------

def _sample_fields(state: State, grid: Grid, zeta_in, q_in):
    """Fill the state with cell-center samples of the initial fields."""
    xk = grid.centers_kernel
    for name in state.sides:
        arr = state.side(name)
        sgn = 1.0 if name == "right" else -1.0
        x = sgn * xk
        arr.z[:] = np.asarray(zeta_in(x), dtype=float)
        arr.p[:] = sgn * np.asarray(q_in(x), dtype=float)


def init_from_scenario(setup: PhysicalSetup, grid: Grid, mode: str,
                       zeta_in=None, q_in=None, delta0: float = 0.0,
                       delta_dot0: float | None = None, theta0=None,
                       sides=("right", "left")) -> tuple:
    """Build (State, theta0) with theta0 satisfying the compatibility
    conditions: avg(q_in) = qi_avg, jump(q_in) = -2 ell delta_dot,
    zu_pm = zeta_in(+-ell), d/dt zu_pm = -(d/dx q_in)(+-ell), with traces
    taken by the one-sided second-order formulas.

    mode is "free", "forced", "symmetric" or "generation".  A user-supplied
    theta0 (free mode) is validated against the sampled fields to 1e-10.
    """
    zeta_in = zeta_in or (lambda x: np.zeros_like(np.asarray(x, dtype=float)))
    q_in = q_in or (lambda x: np.zeros_like(np.asarray(x, dtype=float)))
    state = State(grid, sides=sides)
    _sample_fields(state, grid, zeta_in, q_in)
    if mode == "generation":
        return state, None

    dx, ell = grid.dx, grid.ell
    r = state.right
    if state.left is not None:
        lft = state.left
        q_p, q_m = trace_at_contact(r.p), -trace_at_contact(lft.p)
        dq_p, dq_m = derivative_at_contact(r.p, dx), derivative_at_contact(lft.p, dx)
        z_p, z_m = trace_at_contact(r.z), trace_at_contact(lft.z)
    else:
        q_p = trace_at_contact(r.p)
        q_m = -q_p
        dq_p = dq_m = derivative_at_contact(r.p, dx)
        z_p = z_m = trace_at_contact(r.z)

    if mode == "free":
        computed = np.array([0.5 * (q_p + q_m), -(q_p - q_m) / (2.0 * ell),
                             -dq_p, -dq_m, delta0, z_p, z_m])
        if theta0 is not None:
            theta0 = np.asarray(theta0, dtype=float)
            gap = np.max(np.abs(np.delete(theta0 - computed, 4)))
            if gap > THETA0_CONSISTENCY_TOL:
                raise ConfigError(
                    f"supplied theta0 violates the compatibility conditions "
                    f"by {gap:.3e} > {THETA0_CONSISTENCY_TOL:.0e}")
            return state, theta0
        return state, computed
    if mode == "forced":
        return state, np.array([0.5 * (q_p + q_m), -dq_p, -dq_m, z_p, z_m])
    if mode == "symmetric":
        dd0 = delta_dot0 if delta_dot0 is not None else -(q_p - q_m) / (2.0 * ell)
        return state, np.array([dd0, -dq_p, delta0, z_p])
    raise ConfigError(f"unknown initialization mode {mode!r}")


# ---------------------------------------------------------------------------
# Solver assembly per scenario
# ---------------------------------------------------------------------------

@dataclass
class Assembled:
    """Solver plus the reference evaluators of its scenario."""

    solver: Solver
    spec: ScenarioSpec
    n: int
    exact_fields: Callable | None = None     # (x, t) -> (zeta, q)
    exact_series: dict = field(default_factory=dict)  # name -> fn(times)


def _soliton_fields(profile: SolitonProfile, x0: float):
    def zeta_in(x):
        return profile(np.asarray(x, dtype=float) - x0)

    def q_in(x):
        return profile.c * profile(np.asarray(x, dtype=float) - x0)

    return zeta_in, q_in


def build_solver(spec: ScenarioSpec, n: int) -> Assembled:
    setup = spec.setup()
    kind = spec.kind
    p = spec.params
    if kind != "wave_generation":
        grid = build_grid(spec.L, spec.ell, n)

    if kind == "wave_generation":
        # L fixes the mesh (dx = (L - ell)/(N + 1)) and the default inflow
        # offset; unless the outer boundary is forced with exact data, the
        # computational domain is extended so that no wave reaches the
        # truncation within t_final (the outer copy condition stays inert).
        zeta_max = p.get("zeta_max", 1.0)
        window = spec.L - spec.ell
        x0 = p.get("x0", spec.ell - 0.5 * window)
        profile = soliton_profile(zeta_max, setup.epsilon, setup.kappa)
        c = profile.c
        zeta_in, q_in = _soliton_fields(profile, x0)
        g_in = (lambda t: c * profile(spec.ell - x0 - c * t))
        dx = window / (n + 1)
        outer = {}
        if p.get("far_forced", False):
            n_run = n
            grid = build_grid(spec.L, spec.ell, n)
            outer["right"] = (lambda t: c * profile(spec.L - x0 - c * t))
        else:
            reach = x0 + c * spec.t_final + profile.x[-1] + 2.0 * dx
            l_comp = max(spec.L, reach)
            n_run = max(n, int(np.ceil((l_comp - spec.ell) / dx)) - 1)
            grid = build_grid(spec.ell + (n_run + 1) * dx, spec.ell, n_run)
        state, _ = init_from_scenario(setup, grid, "generation",
                                      zeta_in, q_in, sides=("right",))
        solver = Solver(setup, grid, spec.scheme_config(generation_mode=True),
                        state, inner_data={"right": g_in}, outer_data=outer,
                        volume_factor=1.0)

        def exact_fields(x, t):
            z = profile(np.asarray(x, dtype=float) - x0 - c * t)
            return z, c * z

        return Assembled(solver, spec, n, exact_fields=exact_fields)

    if kind in ("decay_linear", "decay_nonlinear"):
        delta0 = p.get("delta0", 0.1 if kind == "decay_linear" else 0.5)
        coupling = SymmetricCoupling(setup)
        state, theta0 = init_from_scenario(setup, grid, "symmetric",
                                           delta0=delta0, sides=("right",))
        solver = Solver(setup, grid, spec.scheme_config(), state,
                        coupling=coupling, theta=theta0)
        series = {}
        if kind == "decay_linear":
            series["delta"] = (lambda times: linear_decay_exact(times, delta0, setup))
        return Assembled(solver, spec, n, exact_series=series)

    if kind == "fixed_linear":
        pspec = make_periodic_spec(
            setup, k=p.get("k", 2.0),
            zeta_plus_c=p.get("amp_zeta_plus", 0.06),
            zeta_minus_c=p.get("amp_zeta_minus", 0.02),
            q_plus_s=p.get("amp_q_plus", 0.05),
            q_minus_s=p.get("amp_q_minus", 0.01))

        def zeta_in(x):
            return fixed_object_exact(pspec, setup, x, 0.0)[0]

        def q_in(x):
            return fixed_object_exact(pspec, setup, x, 0.0)[1]

        coupling = ForcedCoupling(setup)  # fixed object
        state, theta0 = init_from_scenario(setup, grid, "forced", zeta_in, q_in)
        outer = {
            "right": (lambda t: float(fixed_object_exact(pspec, setup,
                                                         np.array([spec.L]), t)[1][0])),
            "left": (lambda t: float(fixed_object_exact(pspec, setup,
                                                        np.array([-spec.L]), t)[1][0])),
        }
        solver = Solver(setup, grid, spec.scheme_config(), state,
                        coupling=coupling, theta=theta0, outer_data=outer)
        series = {"qi": (lambda times: fixed_object_qi_exact(pspec, times))}
        return Assembled(solver, spec, n, exact_series=series)

    if kind in ("fixed_nonlinear", "free_floating"):
        zeta_max = p.get("zeta_max", 0.2)
        x0 = p.get("x0", -15.0)
        profile = soliton_profile(zeta_max, setup.epsilon, setup.kappa)
        zeta_in, q_in = _soliton_fields(profile, x0)
        if kind == "fixed_nonlinear":
            coupling = ForcedCoupling(setup)
            state, theta0 = init_from_scenario(setup, grid, "forced", zeta_in, q_in)
        else:
            coupling = FreeCoupling(setup)
            state, theta0 = init_from_scenario(setup, grid, "free", zeta_in, q_in,
                                               delta0=0.0)
        solver = Solver(setup, grid, spec.scheme_config(), state,
                        coupling=coupling, theta=theta0)
        return Assembled(solver, spec, n)

    if kind == "control_loop":
        # stage A of the control experiment; see harness.run_control_loop
        amp = p.get("amp", 0.05)
        coupling = ForcedCoupling(setup, delta_forced=make_sine_forcing(amp))
        zeta_in, q_in = control_loop_initial_fields(setup, amp)
        state, theta0 = init_from_scenario(setup, grid, "forced", zeta_in, q_in)
        solver = Solver(setup, grid, spec.scheme_config(), state,
                        coupling=coupling, theta=theta0)
        return Assembled(solver, spec, n)

    raise ConfigError(f"unknown scenario {kind!r}")


def make_sine_forcing(amp: float, omega: float = 1.0):
    """Prescribed trajectory amp*sin(omega t) with two derivatives."""

    def delta_forced(t):
        return (amp * np.sin(omega * t), amp * omega * np.cos(omega * t),
                -amp * omega ** 2 * np.sin(omega * t))

    return delta_forced


def control_loop_initial_fields(setup: PhysicalSetup, amp: float):
    """Initial wave field compatible with an object already moving at
    delta_dot(0) = amp: odd discharge decaying like the boundary-layer
    shape, zero elevation."""
    ell, kap = setup.ell, setup.kappa

    def zeta_in(x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def q_in(x):
        x = np.asarray(x, dtype=float)
        return -np.sign(x) * ell * amp * np.exp(-(np.abs(x) - ell) / kap)

    return zeta_in, q_in
