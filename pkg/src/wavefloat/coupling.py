"""Object/wave coupling: geometry coefficients, the block-triangular
coupling matrix with its explicit inverse, quadratic interaction terms,
and the first-order ODE right-hand sides in all three variants (free,
forced vertical motion, symmetric), plus the control-force formula.

Notation: for a quantity w with boundary values w_+ and w_- we write
jump(w) = w_+ - w_- and avg(w) = (w_+ + w_-)/2.  The exterior depth at a
contact point is hb_pm = 1 + eps * zu_pm, where zu_pm is the carried
boundary elevation; the interior depth under the object is
h_eq(x) + eps * delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import PhysicalSetup, simpson
from .errors import PhysicalStateError

SINGULAR_D_TOL = 1e-14


@dataclass(frozen=True)
class GeometryCoeffs:
    """Depth-averaged coefficients at a given submergence eps*delta.

    alpha       : avg of 1/(h_eq + eps delta) over the wetted interval
    alpha_prime : d alpha / d(eps delta) = -avg of 1/(h_eq + eps delta)^2
    beta        : (1/2) avg of x^2/(h_eq + eps delta)^2
    tau2        : added-mass coefficient of the vertical acceleration,
                  3 kappa^2 m + avg of x^2/(h_eq + eps delta)
                  + kappa^2 / (h_eq(ell) + eps delta)
    """

    alpha: float
    alpha_prime: float
    beta: float
    tau2: float


def geometry_coeffs(setup: PhysicalSetup, eps_delta: float) -> GeometryCoeffs:
    """Evaluate the geometry coefficients at submergence eps_delta.

    Closed forms for constant equilibrium depth; composite Simpson
    otherwise.  Raises PhysicalStateError when the object grounds.
    """
    ell = setup.ell
    kap2 = setup.kappa ** 2
    if setup.h_eq_min() + eps_delta <= 0.0:
        raise PhysicalStateError(
            f"object grounded: h_eq + eps*delta reaches {setup.h_eq_min() + eps_delta:.3e}")

    if setup.h_eq_constant is not None:
        w = setup.h_eq_constant + eps_delta
        alpha = 1.0 / w
        alpha_prime = -1.0 / w ** 2
        beta = ell ** 2 / (6.0 * w ** 2)
        x2_avg = ell ** 2 / (3.0 * w)
        w_bnd = w
    else:
        def w_of(x):
            return np.asarray(setup.h_eq(x), dtype=float) + eps_delta
        alpha = simpson(lambda x: 1.0 / w_of(x), -ell, ell) / (2.0 * ell)
        alpha_prime = -simpson(lambda x: 1.0 / w_of(x) ** 2, -ell, ell) / (2.0 * ell)
        beta = 0.5 * simpson(lambda x: x ** 2 / w_of(x) ** 2, -ell, ell) / (2.0 * ell)
        x2_avg = simpson(lambda x: x ** 2 / w_of(x), -ell, ell) / (2.0 * ell)
        w_bnd = setup.h_eq_boundary + eps_delta
    tau2 = 3.0 * kap2 * setup.mass + x2_avg + kap2 / w_bnd
    return GeometryCoeffs(alpha=alpha, alpha_prime=alpha_prime, beta=beta, tau2=tau2)


@dataclass(frozen=True)
class CouplingMatrix:
    """The 4x4 block-triangular coupling matrix, its explicit inverse and
    the determinant-like scalar D (negative for physical states)."""

    m: np.ndarray
    m_inv: np.ndarray
    d: float


def assemble_and_invert_M(setup: PhysicalSetup, coeffs: GeometryCoeffs,
                          zu_plus: float, zu_minus: float) -> CouplingMatrix:
    """Coupling matrix for the 4 differentiated components and its
    explicit inverse."""
    eps, kap, ell = setup.epsilon, setup.kappa, setup.ell
    hb_p = 1.0 + eps * zu_plus
    hb_m = 1.0 + eps * zu_minus
    if hb_p <= 0.0 or hb_m <= 0.0:
        raise PhysicalStateError("exterior depth vanished at a contact point")
    ih_p, ih_m = 1.0 / hb_p, 1.0 / hb_m
    av = 0.5 * (ih_p + ih_m)
    jp = ih_p - ih_m
    kap2 = kap ** 2

    a_row = coeffs.alpha + (kap / ell) * av
    t_row = coeffs.tau2 + kap * ell * av
    d = -4.0 * a_row * t_row + kap2 * jp ** 2
    if abs(d) < SINGULAR_D_TOL:
        raise PhysicalStateError(f"coupling matrix is singular (D = {d:.3e})")

    m = np.array([
        [a_row, -0.5 * kap * jp, 0.0, 0.0],
        [-0.5 * kap * jp, t_row, 0.0, 0.0],
        [-kap, ell * kap, kap2, 0.0],
        [kap, ell * kap, 0.0, kap2],
    ])
    m_inv = np.array([
        [-4.0 * t_row / d, -2.0 * kap * jp / d, 0.0, 0.0],
        [-2.0 * kap * jp / d, -4.0 * a_row / d, 0.0, 0.0],
        [-4.0 / (kap * d) * (coeffs.tau2 + kap * ell * ih_m),
         4.0 / (kap * d) * (kap * ih_m + ell * coeffs.alpha), 1.0 / kap2, 0.0],
        [4.0 / (kap * d) * (coeffs.tau2 + kap * ell * ih_p),
         4.0 / (kap * d) * (kap * ih_p + ell * coeffs.alpha), 0.0, 1.0 / kap2],
    ])
    return CouplingMatrix(m=m, m_inv=m_inv, d=d)


def quadratic_terms(setup: PhysicalSetup, coeffs: GeometryCoeffs, qi_avg: float,
                    delta_dot: float, zu_plus: float, zu_minus: float) -> np.ndarray:
    """The four quadratic interaction forms of the triangularized system."""
    eps, ell = setup.epsilon, setup.ell
    ih_p = 1.0 / (1.0 + eps * zu_plus)
    ih_m = 1.0 / (1.0 + eps * zu_minus)
    ih2_p, ih2_m = ih_p ** 2, ih_m ** 2
    av2 = 0.5 * (ih2_p + ih2_m)
    j2 = ih2_p - ih2_m
    jz2h = zu_plus ** 2 * ih_p - zu_minus ** 2 * ih_m
    az2h = 0.5 * (zu_plus ** 2 * ih_p + zu_minus ** 2 * ih_m)

    q_i = (-jz2h / (4.0 * ell)
           + 0.25 * ell * j2 * delta_dot ** 2
           + j2 * qi_avg ** 2 / (4.0 * ell)
           - (coeffs.alpha_prime + av2) * delta_dot * qi_avg)
    q_d = (0.5 * az2h
           + (coeffs.beta - 0.5 * ell ** 2 * av2) * delta_dot ** 2
           + 0.5 * (coeffs.alpha_prime - av2) * qi_avg ** 2
           + 0.5 * ell * j2 * delta_dot * qi_avg)
    q_p = (-0.5 * zu_plus ** 2
           - ih_p * (qi_avg ** 2 + ell ** 2 * delta_dot ** 2 - 2.0 * ell * qi_avg * delta_dot))
    q_m = (-0.5 * zu_minus ** 2
           - ih_m * (qi_avg ** 2 + ell ** 2 * delta_dot ** 2 + 2.0 * ell * qi_avg * delta_dot))
    return np.array([q_i, q_d, q_p, q_m])


def rhs_G(theta: np.ndarray, r1f_plus: float, r1f_minus: float, f_ext: float,
          setup: PhysicalSetup) -> np.ndarray:
    """Right-hand side of the full 7-component coupling ODE.

    theta = (qi_avg, delta_dot, zu_plus_dot, zu_minus_dot, delta, zu_plus,
    zu_minus); forcing enters through the boundary values of the regularized
    momentum flux, r1f_pm, and the external vertical force f_ext.
    """
    eps, ell = setup.epsilon, setup.ell
    qi, ddot, delta, zu_p, zu_m = theta[0], theta[1], theta[4], theta[5], theta[6]
    coeffs = geometry_coeffs(setup, eps * delta)
    cm = assemble_and_invert_M(setup, coeffs, zu_p, zu_m)
    quad = quadratic_terms(setup, coeffs, qi, ddot, zu_p, zu_m)
    ih_p = 1.0 / (1.0 + eps * zu_p)
    ih_m = 1.0 / (1.0 + eps * zu_m)
    forcing = np.array([
        -(r1f_plus * ih_p - r1f_minus * ih_m) / (2.0 * ell),
        0.5 * (r1f_plus * ih_p + r1f_minus * ih_m) + f_ext,
        r1f_plus,
        r1f_minus,
    ])
    rhs4 = -np.array([0.0, delta, zu_p, zu_m]) + eps * quad + forcing
    gi = cm.m_inv @ rhs4
    return np.array([gi[0], gi[1], gi[2], gi[3], theta[1], theta[2], theta[3]])


def source_coeffs(theta: np.ndarray, r1f_plus: float, r1f_minus: float,
                  f_ext: float, setup: PhysicalSetup) -> tuple[float, float]:
    """PDE source coefficients S_pm = G_1 -+ ell * G_2 (the time derivative
    of the boundary discharge on each side)."""
    g = rhs_G(theta, r1f_plus, r1f_minus, f_ext, setup)
    return g[0] - setup.ell * g[1], g[0] + setup.ell * g[1]


def rhs_G_forced(t: float, theta5: np.ndarray, r1f_plus: float, r1f_minus: float,
                 delta_forced, setup: PhysicalSetup) -> np.ndarray:
    """Right-hand side of the 5-component ODE for an object in forced
    vertical motion.

    theta5 = (qi_avg, zu_plus_dot, zu_minus_dot, zu_plus, zu_minus);
    delta_forced(t) must return the triple (delta, delta_dot, delta_ddot).
    """
    eps, kap, ell = setup.epsilon, setup.kappa, setup.ell
    d, dd, ddd = delta_forced(t)
    qi, zu_p, zu_m = theta5[0], theta5[3], theta5[4]
    coeffs = geometry_coeffs(setup, eps * d)
    ih_p = 1.0 / (1.0 + eps * zu_p)
    ih_m = 1.0 / (1.0 + eps * zu_m)
    if (1.0 + eps * zu_p) <= 0 or (1.0 + eps * zu_m) <= 0:
        raise PhysicalStateError("exterior depth vanished at a contact point")
    av = 0.5 * (ih_p + ih_m)
    jp = ih_p - ih_m
    quad = quadratic_terms(setup, coeffs, qi, dd, zu_p, zu_m)

    a_row = coeffs.alpha + (kap / ell) * av
    rhs1 = (eps * quad[0]
            - (r1f_plus * ih_p - r1f_minus * ih_m) / (2.0 * ell)
            + 0.5 * kap * jp * ddd)
    rhs2 = -zu_p + eps * quad[2] + r1f_plus - ell * kap * ddd
    rhs3 = -zu_m + eps * quad[3] + r1f_minus - ell * kap * ddd
    g1 = rhs1 / a_row
    g2 = (rhs2 + kap * g1) / kap ** 2
    g3 = (rhs3 - kap * g1) / kap ** 2
    return np.array([g1, g2, g3, theta5[1], theta5[2]])


def rhs_G_symmetric(theta4: np.ndarray, r1f_plus: float, f_ext: float,
                    setup: PhysicalSetup) -> np.ndarray:
    """Right-hand side of the 4-component ODE for symmetric flows
    (even elevation, odd discharge, qi_avg = 0).

    theta4 = (delta_dot, zu_plus_dot, delta, zu_plus).
    """
    eps, kap, ell = setup.epsilon, setup.kappa, setup.ell
    ddot, delta, zu_p = theta4[0], theta4[2], theta4[3]
    coeffs = geometry_coeffs(setup, eps * delta)
    hb_p = 1.0 + eps * zu_p
    if hb_p <= 0:
        raise PhysicalStateError("exterior depth vanished at a contact point")
    ih_p = 1.0 / hb_p
    q_d_sym = (0.5 * zu_p ** 2 * ih_p
               + (coeffs.beta - 0.5 * ell ** 2 * ih_p ** 2) * ddot ** 2)
    q_p_sym = -0.5 * zu_p ** 2 - ih_p * ell ** 2 * ddot ** 2
    t11 = coeffs.tau2 + kap * ell * ih_p
    g1 = (-delta + eps * q_d_sym + r1f_plus * ih_p + f_ext) / t11
    g2 = (-zu_p + eps * q_p_sym + r1f_plus - ell * kap * g1) / kap ** 2
    return np.array([g1, g2, theta4[0], theta4[1]])


def control_force(theta5: np.ndarray, r1f_plus: float, r1f_minus: float,
                  delta_forced_values, setup: PhysicalSetup) -> float:
    """External vertical force that keeps the object on the prescribed
    trajectory, evaluated from the forced-motion state.

    delta_forced_values is the triple (delta, delta_dot, delta_ddot) at the
    current time; theta5 is the forced-motion state vector.
    """
    eps, kap, ell = setup.epsilon, setup.kappa, setup.ell
    d, dd, ddd = delta_forced_values
    qi, zu_p, zu_m = theta5[0], theta5[3], theta5[4]
    coeffs = geometry_coeffs(setup, eps * d)
    ih_p = 1.0 / (1.0 + eps * zu_p)
    ih_m = 1.0 / (1.0 + eps * zu_m)
    av = 0.5 * (ih_p + ih_m)
    jp = ih_p - ih_m
    quad = quadratic_terms(setup, coeffs, qi, dd, zu_p, zu_m)
    a_row = coeffs.alpha + (kap / ell) * av
    t_row = coeffs.tau2 + kap * ell * av
    d_forced = -4.0 * a_row * t_row + kap ** 2 * jp ** 2
    return (d
            - 0.5 * (r1f_plus * ih_p + r1f_minus * ih_m)
            - eps * quad[1]
            - 0.25 * (d_forced / a_row) * ddd
            - 0.5 * (kap / a_row) * jp
            * (eps * quad[0] - (r1f_plus * ih_p - r1f_minus * ih_m) / (2.0 * ell)))


# ---------------------------------------------------------------------------
# Coupling drivers used by the time stepper
# ---------------------------------------------------------------------------

def _zero_force(t: float) -> float:
    return 0.0


class FreeCoupling:
    """Freely floating object: the full 7-component ODE.

    theta = (qi_avg, delta_dot, zu_plus_dot, zu_minus_dot, delta, zu_plus,
    zu_minus).  f_ext is an optional callable of time (defaults to zero).
    """

    n_components = 7
    mode = "free"

    def __init__(self, setup: PhysicalSetup, f_ext=None):
        self.setup = setup
        self.f_ext = f_ext if f_ext is not None else _zero_force

    def q_contact(self, theta, t):
        ell = self.setup.ell
        return theta[0] - ell * theta[1], theta[0] + ell * theta[1]

    def zu_contact(self, theta):
        return theta[5], theta[6]

    def rhs(self, t, theta, r1p, r1m, fext):
        return rhs_G(theta, r1p, r1m, fext, self.setup)

    def sources(self, g, t):
        ell = self.setup.ell
        return g[0] - ell * g[1], g[0] + ell * g[1]

    def describe(self, theta, t):
        """(delta, delta_dot, qi_avg, zu_plus, zu_minus) for diagnostics."""
        return theta[4], theta[1], theta[0], theta[5], theta[6]


class ForcedCoupling:
    """Object fixed or in prescribed vertical motion: 5-component ODE.

    theta = (qi_avg, zu_plus_dot, zu_minus_dot, zu_plus, zu_minus);
    delta_forced(t) returns (delta, delta_dot, delta_ddot).  A fixed object
    is the special case delta_forced == (0, 0, 0).
    """

    n_components = 5
    mode = "forced"

    def __init__(self, setup: PhysicalSetup, delta_forced=None):
        self.setup = setup
        self.delta_forced = delta_forced if delta_forced is not None \
            else (lambda t: (0.0, 0.0, 0.0))

    def f_ext(self, t):
        return 0.0

    def q_contact(self, theta, t):
        ell = self.setup.ell
        dd = self.delta_forced(t)[1]
        return theta[0] - ell * dd, theta[0] + ell * dd

    def zu_contact(self, theta):
        return theta[3], theta[4]

    def rhs(self, t, theta, r1p, r1m, fext):
        return rhs_G_forced(t, theta, r1p, r1m, self.delta_forced, self.setup)

    def sources(self, g, t):
        ell = self.setup.ell
        ddd = self.delta_forced(t)[2]
        return g[0] - ell * ddd, g[0] + ell * ddd

    def describe(self, theta, t):
        d, dd, _ = self.delta_forced(t)
        return d, dd, theta[0], theta[3], theta[4]


class SymmetricCoupling:
    """Symmetric free motion (decay tests): 4-component ODE on the
    half-line, theta = (delta_dot, zu_plus_dot, delta, zu_plus)."""

    n_components = 4
    mode = "symmetric"

    def __init__(self, setup: PhysicalSetup, f_ext=None):
        self.setup = setup
        self.f_ext = f_ext if f_ext is not None else _zero_force

    def q_contact(self, theta, t):
        ell = self.setup.ell
        return -ell * theta[0], ell * theta[0]

    def zu_contact(self, theta):
        return theta[3], theta[3]

    def rhs(self, t, theta, r1p, r1m, fext):
        return rhs_G_symmetric(theta, r1p, fext, self.setup)

    def sources(self, g, t):
        ell = self.setup.ell
        return -ell * g[0], ell * g[0]

    def describe(self, theta, t):
        return theta[2], theta[0], 0.0, theta[3], theta[3]
