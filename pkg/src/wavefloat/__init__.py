"""1-D solver for waves interacting with a partially immersed, vertically
moving object in the dispersive shallow-water (Boussinesq) regime.

The wave field on the two free-surface components couples to the object
through an augmented first-order ODE that carries the boundary elevations
as unknowns, so no PDE traces of time derivatives are ever needed.  Two
schemes are provided (first-order Lax-Friedrichs/Euler and second-order
MacCormack/Heun) together with exact-solution oracles and a
grid-convergence harness.
"""

from .coupling import (CouplingMatrix, ForcedCoupling, FreeCoupling,
                       GeometryCoeffs, SymmetricCoupling,
                       assemble_and_invert_M, control_force, geometry_coeffs,
                       quadratic_terms, rhs_G, rhs_G_forced, rhs_G_symmetric,
                       source_coeffs)
from .domain import (Grid, PhysicalSetup, State, build_grid,
                     compatibility_residual, make_setup)
from .errors import (ConfigError, OracleInvalidError, PhysicalStateError,
                     SolverAbort, WavefloatError)
from .harness import (ConvergenceReport, convergence_study, fit_order,
                      run_control_loop, run_scenario)
from .helmholtz import (HelmholtzWorkspace, apply_helmholtz, solve_r1,
                        trace_r1, trace_r1_far)
from .oracles import (PeriodicSolutionSpec, SolitonProfile, fixed_object_exact,
                      fixed_object_qi_exact, invert_laplace_euler,
                      invert_laplace_talbot, linear_decay_exact,
                      make_periodic_spec, soliton_profile, soliton_speed,
                      trace_ode_residual)
from .scenarios import (ScenarioSpec, build_solver, init_from_scenario,
                        parse_config)
from .stepper import (RunResult, SchemeConfig, Solver, advance,
                      generation_source, shallow_flux, source_shape)

__version__ = "0.1.0"
