import numpy as np
import pytest

from wavefloat import ConfigError, PhysicalStateError, build_grid, make_setup
from wavefloat.coupling import FreeCoupling, SymmetricCoupling
from wavefloat.domain import State
from wavefloat.errors import SolverAbort
from wavefloat.stepper import (SchemeConfig, Solver, advance, generation_source,
                               shallow_flux, source_shape)

SETUP = make_setup(0.3, 4.0, 0.7, mu=0.3)


def test_shallow_flux_values():
    assert shallow_flux(0.0, 0.0, 0.3) == 0.0
    assert shallow_flux(0.0, 0.0, 0.0) == 0.0
    # (h^2 - 1)/(2 eps) at zeta=1, eps=0.3: (1.69 - 1)/0.6
    assert shallow_flux(1.0, 0.0, 0.3) == pytest.approx(1.15, abs=1e-14)
    assert shallow_flux(0.5, 0.0, 0.0) == pytest.approx(0.5)  # linear limit
    assert shallow_flux(0.2, 0.4, 0.3) == pytest.approx(
        0.3 * 0.16 / 1.06 + 0.2 + 0.15 * 0.04, abs=1e-14)
    with pytest.raises(PhysicalStateError):
        shallow_flux(-4.0, 0.0, 0.3)


def test_source_shape():
    kap = 0.31
    assert source_shape(0.0, kap) == 1.0
    assert source_shape(kap, kap) == pytest.approx(np.exp(-1.0))
    assert source_shape(0.37, kap) == source_shape(-0.37, kap)
    with pytest.raises(ConfigError):
        source_shape(1.0, 0.0)


def test_generation_source_formulas():
    assert generation_source(lambda t: 3.0, 5, 0.01, 1) == pytest.approx(0.0)
    assert generation_source(lambda t: t, 7, 0.01, 1) == pytest.approx(1.0, abs=1e-12)
    # sin t, order 2, centered at n dt = 0.5
    s = generation_source(np.sin, 50, 0.01, 2)
    assert s == pytest.approx(np.cos(0.5), abs=1e-4)
    s_star = generation_source(np.sin, 50, 0.01, 2, stage="star")
    assert s_star == pytest.approx(np.cos(0.51), abs=1e-4)
    # sampled series runs out -> error
    series = np.sin(np.arange(10) * 0.01)
    with pytest.raises(ConfigError):
        generation_source(series, 9, 0.01, 1)


def test_scheme_config_validation():
    with pytest.raises(ConfigError):
        SchemeConfig(order=3, dt_over_dx=0.8)
    with pytest.raises(ConfigError):
        SchemeConfig(order=1, dt_over_dx=1.5)
    with pytest.raises(ConfigError):
        SchemeConfig(order=2, dt_over_dx=0.8, viscosity_cells=-1)


def _rest_solver(order, sides=("right", "left")):
    grid = build_grid(30.0, 4.0, 40)
    state = State(grid, sides=sides)
    coupling = FreeCoupling(SETUP) if len(sides) == 2 else SymmetricCoupling(SETUP)
    theta = np.zeros(coupling.n_components)
    return Solver(SETUP, grid, SchemeConfig(order=order, dt_over_dx=0.8),
                  state, coupling=coupling, theta=theta)


@pytest.mark.parametrize("order", [1, 2])
def test_rest_state_fixed_point_exact(order):
    solver = _rest_solver(order)
    for _ in range(25):
        solver.step(0.8 * solver.grid.dx)
    assert np.all(solver.state.right.z == 0.0)
    assert np.all(solver.state.right.p == 0.0)
    assert np.all(solver.state.left.z == 0.0)
    assert np.all(solver.theta == 0.0)


@pytest.mark.parametrize("order", [1, 2])
def test_symmetric_run_preserves_symmetry(order):
    # offset release through the full two-component free coupling
    grid = build_grid(30.0, 4.0, 48)
    state = State(grid)
    theta = np.array([0.0, 0.0, 0.0, 0.0, 0.1, 0.0, 0.0])
    solver = Solver(SETUP, grid, SchemeConfig(order=order, dt_over_dx=0.7),
                    state, coupling=FreeCoupling(SETUP), theta=theta)
    result = advance(solver, 3.0)
    assert np.max(np.abs(result.qi_avg)) <= 1e-10
    assert np.max(np.abs(solver.state.right.z - solver.state.left.z)) <= 1e-10
    assert np.max(np.abs(solver.state.right.p - solver.state.left.p)) <= 1e-10
    assert np.max(np.abs(result.zu_plus - result.zu_minus)) <= 1e-10


def test_boundary_discharge_follows_theta():
    solver = _rest_solver(2)
    solver.theta = np.array([0.03, 0.01, 0.0, 0.0, 0.0, 0.0, 0.0])
    solver._sync_boundary_discharge(0.0)
    ell = SETUP.ell
    assert solver.state.right.p[0] == pytest.approx(0.03 - ell * 0.01)
    assert solver.state.left.p[0] == pytest.approx(-(0.03 + ell * 0.01))


def test_volume_drift_ratios():
    # halving dt (and dx) must halve the drift for order 1 and quarter it
    # for order 2, within +-30 percent
    def drift(order, n):
        grid = build_grid(30.0, 4.0, n)
        state = State(grid, sides=("right",))
        coupling = SymmetricCoupling(SETUP)
        theta = np.array([0.0, 0.0, 0.3, 0.0])
        solver = Solver(SETUP, grid, SchemeConfig(order=order, dt_over_dx=0.7),
                        state, coupling=coupling, theta=theta)
        res = advance(solver, 3.0)
        return np.max(np.abs(res.volume - res.volume[0]))

    for order, expect in ((1, 2.0), (2, 4.0)):
        d_coarse = drift(order, 100)
        d_fine = drift(order, 201)   # dx exactly halves
        ratio = d_coarse / d_fine
        assert expect * 0.7 <= ratio <= expect * 1.3


def test_vacuum_state_aborts_with_step_info():
    grid = build_grid(30.0, 4.0, 40)
    state = State(grid)
    state.right.z[:] = -3.35  # 1 + eps*zeta barely above zero, then crashes
    theta = np.zeros(7)
    solver = Solver(SETUP, grid, SchemeConfig(order=1, dt_over_dx=0.8),
                    state, coupling=FreeCoupling(SETUP), theta=theta)
    with pytest.raises(SolverAbort) as err:
        for _ in range(50):
            solver.step(0.8 * solver.grid.dx)
    assert err.value.step is not None


def test_generation_with_zero_data_stays_zero():
    grid = build_grid(7.0, 1.0, 60)
    state = State(grid, sides=("right",))
    scheme = SchemeConfig(order=2, dt_over_dx=0.8, generation_mode=True)
    solver = Solver(SETUP, grid, scheme, state,
                    inner_data={"right": lambda t: 0.0}, volume_factor=1.0)
    result = advance(solver, 2.0)
    assert np.all(solver.state.right.z == 0.0)
    assert np.all(solver.state.right.p == 0.0)
    assert np.all(result.volume == 0.0)


def test_solver_wiring_validation():
    grid = build_grid(30.0, 4.0, 40)
    state = State(grid)
    scheme = SchemeConfig(order=1, dt_over_dx=0.8)
    with pytest.raises(ConfigError):
        Solver(SETUP, grid, scheme, state)  # no coupling, no generation
    with pytest.raises(ConfigError):
        Solver(SETUP, grid, scheme, state, coupling=FreeCoupling(SETUP))  # no theta
    with pytest.raises(ConfigError):
        Solver(SETUP, grid, SchemeConfig(order=1, dt_over_dx=0.8,
                                         viscosity_cells=45),
               state, coupling=FreeCoupling(SETUP), theta=np.zeros(7))


def test_trace_consistency_improves_with_refinement():
    # carried boundary elevation vs one-sided extrapolated trace of zeta
    from wavefloat.domain import trace_at_contact
    gaps = []
    for n in (60, 120, 240):
        grid = build_grid(30.0, 4.0, n)
        state = State(grid, sides=("right",))
        coupling = SymmetricCoupling(SETUP)
        theta = np.array([0.0, 0.0, 0.3, 0.0])
        solver = Solver(SETUP, grid, SchemeConfig(order=2, dt_over_dx=0.7),
                        state, coupling=coupling, theta=theta)
        gap = []
        advance(solver, 4.0, on_step=lambda s: gap.append(
            abs(trace_at_contact(s.state.right.z) - s.theta[3])))
        gaps.append(max(gap))
    assert gaps[0] > gaps[1] > gaps[2]
