"""Independent exact solutions used to validate the schemes.

* solitary-wave profile of the dispersive system (crest-start integration
  of the profile ODE, with the tail slaved to the first integral so the
  decay to zero is clean down to 1e-12);
* vertical decay law of the linear problem via numerical inversion of the
  closed-form Laplace transform, cross-checked by two independent
  summation methods (Euler and fixed Talbot);
* periodic exact family for the linear fixed-object problem;
* residual checker for the second-order ODE satisfied by the boundary
  elevations.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.interpolate import CubicSpline

from .coupling import geometry_coeffs
from .domain import PhysicalSetup
from .errors import ConfigError, OracleInvalidError

SOLITON_TAIL_CUTOFF = 1e-12
LAPLACE_CROSSCHECK_TOL = 1e-4


# ---------------------------------------------------------------------------
# Solitary wave
# ---------------------------------------------------------------------------

def soliton_speed(zeta_max: float, epsilon: float) -> float:
    """Propagation speed of the solitary wave of amplitude zeta_max."""
    if zeta_max <= 0 or epsilon <= 0:
        raise ConfigError("solitary waves need zeta_max > 0 and epsilon > 0")
    c2 = (epsilon / 6.0) * (3.0 * zeta_max ** 2 + epsilon * zeta_max ** 3) \
        / (zeta_max - np.log1p(epsilon * zeta_max) / epsilon)
    return float(np.sqrt(c2))


@dataclass
class SolitonProfile:
    """Even, monotone-decaying solitary-wave profile zeta_c with speed c.

    samples holds (x, zeta) on x >= 0 with uniform spacing; values beyond
    the last sample are below 1e-12 and treated as zero.
    """

    zeta_max: float
    c: float
    epsilon: float
    kappa: float
    x: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self._spline = CubicSpline(self.x, self.values)
        self._x_end = self.x[-1]

    def __call__(self, x):
        """Profile value(s) at arbitrary x (even extension, zero tails)."""
        ax = np.abs(np.asarray(x, dtype=float))
        out = np.where(ax <= self._x_end, self._spline(np.minimum(ax, self._x_end)), 0.0)
        return np.maximum(out, 0.0) if np.ndim(x) else float(max(out, 0.0))

    def ode_residual(self) -> np.ndarray:
        """Residual of the profile ODE at the interior samples, using
        fourth-order centered differences for the curvature."""
        z = self.values
        h = self.x[1] - self.x[0]
        zpp = (-z[4:] + 16.0 * z[3:-1] - 30.0 * z[2:-2]
               + 16.0 * z[1:-3] - z[:-4]) / (12.0 * h ** 2)
        zm = z[2:-2]
        c2 = self.c ** 2
        return (c2 * self.kappa ** 2 * zpp - c2 * zm / (1.0 + self.epsilon * zm)
                + zm + 0.5 * self.epsilon * zm * zm)


def soliton_profile(zeta_max: float, epsilon: float, kappa: float,
                    x_max: float = None, dx_sample: float = 1e-3) -> SolitonProfile:
    """Integrate the solitary-wave profile outward from the crest.

    The full second-order ODE is integrated by fixed-step RK4 down to half
    the crest amplitude; from there the slope is slaved to the first
    integral W (with W(zeta_max) = 0 by the choice of c), which removes the
    unstable mode and lets the tail decay monotonically to the cutoff.
    """
    if dx_sample > 1e-3:
        raise ConfigError("profile sample step must be <= 1e-3")
    c = soliton_speed(zeta_max, epsilon)
    c2 = c * c
    kap2 = kappa ** 2

    def curvature(z):
        return (c2 * z / (1.0 + epsilon * z) - z - 0.5 * epsilon * z * z) / (c2 * kap2)

    def w_int(z):
        # (c2*kap2/2) * zeta'^2 = W(zeta), W(zeta_max) = 0
        return (c2 * (z / epsilon - np.log1p(epsilon * z) / epsilon ** 2)
                - 0.5 * z * z - epsilon * z ** 3 / 6.0)

    def slope(z):
        return -np.sqrt(max(2.0 * w_int(z) / (c2 * kap2), 0.0))

    h = dx_sample
    values = [zeta_max]
    y = np.array([zeta_max, 0.0])
    switch = 0.5 * zeta_max
    hard_cap = (x_max if x_max is not None else 0.0) + 60.0 / max(kappa, 1e-3)
    x = 0.0
    # phase 1: full ODE from the crest
    while y[0] > switch:
        def f2(s):
            return np.array([s[1], curvature(s[0])])
        k1 = f2(y); k2 = f2(y + 0.5 * h * k1)
        k3 = f2(y + 0.5 * h * k2); k4 = f2(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        x += h
        if y[0] > values[-1] + 1e-14 or x > hard_cap:
            raise OracleInvalidError("solitary-wave integration left the decaying branch")
        values.append(float(y[0]))
    # phase 2: slope slaved to the first integral
    z = float(y[0])
    while z > SOLITON_TAIL_CUTOFF:
        k1 = slope(z); k2 = slope(max(z + 0.5 * h * k1, 0.0))
        k3 = slope(max(z + 0.5 * h * k2, 0.0)); k4 = slope(max(z + h * k3, 0.0))
        z = z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        z = max(z, 0.0)
        x += h
        if x > hard_cap:
            raise OracleInvalidError("solitary-wave tail failed to reach the cutoff")
        values.append(z)
    values = np.asarray(values)
    xs = np.arange(len(values)) * h
    return SolitonProfile(zeta_max=zeta_max, c=c, epsilon=epsilon, kappa=kappa,
                          x=xs, values=values)


# ---------------------------------------------------------------------------
# Linear decay law via the Laplace transform
# ---------------------------------------------------------------------------

def _euler_nodes(m: int):
    xi = np.zeros(2 * m + 1)
    xi[0] = 0.5
    xi[1:m + 1] = 1.0
    xi[2 * m] = 2.0 ** (-m)
    for j in range(1, m):
        xi[2 * m - j] = xi[2 * m - j + 1] + 2.0 ** (-m) * comb(m, j)
    k = np.arange(2 * m + 1)
    beta = m * np.log(10.0) / 3.0 + 1j * np.pi * k
    weights = (-1.0) ** k * xi * 10.0 ** (m / 3.0)
    return beta, weights


def invert_laplace_euler(f_hat, t, m: int = 16) -> np.ndarray:
    """Euler summation inversion: weighted samples of f_hat on a vertical
    line Re s = m ln(10)/(3 t), accelerated binomially."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ConfigError("Euler inversion needs t > 0")
    beta, w = _euler_nodes(m)
    s = beta[None, :] / t[:, None]
    return (w[None, :] * np.real(f_hat(s))).sum(axis=1) / t


def invert_laplace_talbot(f_hat, t, m: int = 64) -> np.ndarray:
    """Fixed-Talbot inversion on the cotangent contour with M nodes."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ConfigError("Talbot inversion needs t > 0")
    theta = np.arange(1, m) * np.pi / m
    cot = 1.0 / np.tan(theta)
    delta = np.empty(m, dtype=complex)
    delta[0] = 2.0 * m / 5.0
    delta[1:] = (2.0 * m / 5.0) * theta * (cot + 1j)
    gamma = np.empty(m, dtype=complex)
    gamma[0] = 0.5 * np.exp(delta[0])
    gamma[1:] = (1.0 + 1j * theta * (1.0 + cot ** 2) - 1j * cot) * np.exp(delta[1:])
    s = delta[None, :] / t[:, None]
    return (2.0 / (5.0 * t)) * np.real(gamma[None, :] * f_hat(s)).sum(axis=1)


def decay_transform(setup: PhysicalSetup, delta0: float):
    """Laplace transform of the linear decay law delta(t).

    Valid for epsilon = 0; the square root uses the principal branch,
    analytic on Re s > 0.
    """
    if setup.epsilon != 0.0:
        raise ConfigError("the decay transform is a linear (epsilon = 0) oracle")
    tau2 = geometry_coeffs(setup, 0.0).tau2
    ell, kap = setup.ell, setup.kappa

    def f_hat(s):
        root = np.sqrt(1.0 + (kap * s) ** 2)
        return (tau2 * s + ell * root) / (tau2 * s ** 2 + s * ell * root + 1.0) * delta0

    return f_hat


def linear_decay_exact(t_grid, delta0: float, setup: PhysicalSetup,
                       euler_m: int = 16, talbot_m: int = 64) -> np.ndarray:
    """delta(t) samples of the linear decay law.

    Inverts the transform with both the Euler and the fixed-Talbot methods
    and requires them to agree to 1e-4 everywhere before returning the
    Euler values; t = 0 entries return delta0 exactly.
    """
    t = np.asarray(t_grid, dtype=float)
    f_hat = decay_transform(setup, delta0)
    out = np.full(t.shape, float(delta0))
    pos = t > 1e-12
    if np.any(pos):
        eu = invert_laplace_euler(f_hat, t[pos], m=euler_m)
        ta = invert_laplace_talbot(f_hat, t[pos], m=talbot_m)
        gap = float(np.max(np.abs(eu - ta)))
        if gap > LAPLACE_CROSSCHECK_TOL:
            raise OracleInvalidError(
                f"Laplace inversion methods disagree by {gap:.3e} > "
                f"{LAPLACE_CROSSCHECK_TOL:.0e}")
        out[pos] = eu
    return out


# ---------------------------------------------------------------------------
# Linear fixed-object periodic family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicSolutionSpec:
    """Amplitudes of one member of the periodic exact family for a fixed
    object in the linear regime.

    The two derived amplitudes are pinned by the coupling constraints
    q_c = -(q_plus_s - q_minus_s)/(2 ell alpha0 k) and
    zeta_s = (zeta_plus_c - zeta_minus_c)/(2 ell alpha0 k);
    omega solves the dispersion relation omega^2 = k^2/(1 + kappa^2 k^2).
    """

    k: float
    omega: float
    zeta_plus_c: float
    zeta_minus_c: float
    zeta_s: float
    q_plus_s: float
    q_minus_s: float
    q_c: float

    def check(self, setup: PhysicalSetup, tol: float = 1e-14):
        alpha0 = geometry_coeffs(setup, 0.0).alpha
        den = 2.0 * setup.ell * alpha0 * self.k
        r1 = self.q_c + (self.q_plus_s - self.q_minus_s) / den
        r2 = self.zeta_s - (self.zeta_plus_c - self.zeta_minus_c) / den
        r3 = self.omega ** 2 - self.k ** 2 / (1.0 + setup.kappa ** 2 * self.k ** 2)
        if max(abs(r1), abs(r2), abs(r3)) > tol:
            raise ConfigError(
                f"periodic solution violates its constraints: {r1:.2e} {r2:.2e} {r3:.2e}")


def make_periodic_spec(setup: PhysicalSetup, k: float, zeta_plus_c: float,
                       zeta_minus_c: float, q_plus_s: float,
                       q_minus_s: float) -> PeriodicSolutionSpec:
    """Fill in the derived amplitudes and frequency (omega > 0)."""
    if k == 0:
        raise ConfigError("wavenumber k must be nonzero")
    omega = float(np.sqrt(k ** 2 / (1.0 + setup.kappa ** 2 * k ** 2)))
    alpha0 = geometry_coeffs(setup, 0.0).alpha
    den = 2.0 * setup.ell * alpha0 * k
    spec = PeriodicSolutionSpec(
        k=float(k), omega=omega,
        zeta_plus_c=float(zeta_plus_c), zeta_minus_c=float(zeta_minus_c),
        zeta_s=float((zeta_plus_c - zeta_minus_c) / den),
        q_plus_s=float(q_plus_s), q_minus_s=float(q_minus_s),
        q_c=float(-(q_plus_s - q_minus_s) / den))
    spec.check(setup)
    return spec


def fixed_object_exact(spec: PeriodicSolutionSpec, setup: PhysicalSetup, x, t: float):
    """Exact (zeta, q) at physical coordinates x (|x| >= ell) and time t."""
    x = np.asarray(x, dtype=float)
    k, om = spec.k, spec.omega
    zeta = np.empty_like(x)
    q = np.empty_like(x)
    for sign, zc, qs in ((1.0, spec.zeta_plus_c, spec.q_plus_s),
                         (-1.0, spec.zeta_minus_c, spec.q_minus_s)):
        sel = (x * sign) >= 0.0
        xl = x[sel] - sign * setup.ell  # local coordinate on this component
        cm = np.cos(k * xl - om * t)
        cp = np.cos(k * xl + om * t)
        sm = np.sin(k * xl - om * t)
        sp = np.sin(k * xl + om * t)
        zeta[sel] = 0.5 * k * ((zc + spec.q_c) * cm + (zc - spec.q_c) * cp
                               + (spec.zeta_s + qs) * sm + (spec.zeta_s - qs) * sp)
        q[sel] = 0.5 * om * ((zc + spec.q_c) * cm - (zc - spec.q_c) * cp
                             + (spec.zeta_s + qs) * sm - (spec.zeta_s - qs) * sp)
    return zeta, q


def fixed_object_qi_exact(spec: PeriodicSolutionSpec, t):
    """Exact mean interior discharge omega*(q_c cos - zeta_s sin)(omega t)."""
    t = np.asarray(t, dtype=float)
    return spec.omega * (spec.q_c * np.cos(spec.omega * t)
                         - spec.zeta_s * np.sin(spec.omega * t))


def dump_samples_csv(path: str, columns: dict):
    """Write named sample columns (equal length) as CSV, for external
    plotting of any oracle output."""
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=float) for k in names])
    np.savetxt(path, data, delimiter=",", header=",".join(names), comments="",
               fmt="%.17g")


# ---------------------------------------------------------------------------
# Trace-ODE residual
# ---------------------------------------------------------------------------

def trace_ode_residual(zu, f, g, r1f, epsilon: float, kappa: float, dt: float,
                       side: int = +1) -> np.ndarray:
    """Residual of the boundary-elevation ODE on uniformly sampled series.

    zu   : boundary elevation samples (zeta at +ell for side=+1, -ell for -1)
    f, g : transmission data, f = avg(q), g = jump(q)/2 = -ell*delta_dot
    r1f  : samples of the regularized momentum flux trace on the same side
    Second time derivatives use centered differences, first derivatives
    centered differences, so the result has len(zu) - 2 entries.
    """
    zu = np.asarray(zu, dtype=float)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    r1f = np.asarray(r1f, dtype=float)
    if len(zu) < 3:
        raise ConfigError("need at least 3 samples for the residual")
    s = 1.0 if side >= 0 else -1.0
    zpp = (zu[2:] - 2.0 * zu[1:-1] + zu[:-2]) / dt ** 2
    fd = (f[2:] - f[:-2]) / (2.0 * dt)
    gd = (g[2:] - g[:-2]) / (2.0 * dt)
    zm = zu[1:-1]
    fg = f[1:-1] + s * g[1:-1]
    kap2 = kappa ** 2
    return (zpp + zm / kap2
            + (epsilon / kap2) * (0.5 * zm ** 2 + fg ** 2 / (1.0 + epsilon * zm))
            - r1f[1:-1] / kap2
            - s * (fd + s * gd) / kappa)
