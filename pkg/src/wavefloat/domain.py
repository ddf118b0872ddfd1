"""Physical setup, two-component grid, state storage and boundary traces.

The horizontal axis splits into the region under the object, (-ell, ell),
and two free-surface components on each side of it.  Each free-surface
component is discretized into N cells of width dx plus a half-width cell
touching the contact point at +-ell:

    left:   ... C_{-2} C_{-1} C_{0-} | object | C_{0+} C_1 C_2 ...  :right

with faces x_{i+1/2} = -ell + (i+1/2) dx for i < 0 and
x_{i-1/2} = ell + (i-1/2) dx for i > 0, so that dx = (L - ell)/(N + 1)
fits N full cells plus two half cells into (ell, L).

Internally both components are stored in mirrored "kernel" orientation:
index j = 0 is the boundary half cell, j = 1..N the cells ordered by
distance from the object, and j = N+1 a slot for the outer boundary (a
ghost copy, or a half cell when the outer boundary is forced).  On the
left component the stored discharge is p = -q so that both components
satisfy identical update formulas; symmetric data is then preserved
bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, PhysicalStateError

SIMPSON_MIN_POINTS = 201


def simpson(f: Callable, a: float, b: float, n: int = SIMPSON_MIN_POINTS) -> float:
    """Composite Simpson rule with n (odd, >= 3) sample points."""
    if n < 3 or n % 2 == 0:
        n = max(3, n + 1)
    x = np.linspace(a, b, n)
    y = np.asarray(f(x), dtype=float)
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return (b - a) / (3.0 * (n - 1)) * float(np.dot(w, y))


@dataclass(frozen=True)
class PhysicalSetup:
    """Dimensionless physical parameters of one wave/object configuration.

    epsilon : nonlinearity parameter (>= 0; 0 selects the linear equations)
    kappa   : dispersion length, kappa = sqrt(mu/3) > 0
    ell     : half-width of the object
    h_eq    : equilibrium depth under the object, callable of x on [-ell, ell]
    mass    : dimensionless mass, (1/2ell) * integral of (1 - h_eq)
    """

    epsilon: float
    kappa: float
    ell: float
    h_eq: Callable
    mass: float
    h_eq_constant: float | None = None  # set when h_eq is x-independent

    @property
    def mu(self) -> float:
        return 3.0 * self.kappa ** 2

    @property
    def h_eq_boundary(self) -> float:
        """Equilibrium depth at the contact points x = +-ell."""
        if self.h_eq_constant is not None:
            return self.h_eq_constant
        return float(self.h_eq(np.asarray([self.ell]))[0])

    def h_eq_min(self) -> float:
        if self.h_eq_constant is not None:
            return self.h_eq_constant
        x = np.linspace(-self.ell, self.ell, 4001)
        return float(np.min(self.h_eq(x)))


def make_setup(epsilon: float, ell: float, h_eq, mu: float | None = None,
               kappa: float | None = None) -> PhysicalSetup:
    """Build and validate a PhysicalSetup.

    h_eq may be a positive float (constant depth) or a callable accepting
    numpy arrays.  Exactly one of mu (= 3 kappa^2) or kappa must be given.
    """
    if (mu is None) == (kappa is None):
        raise ConfigError("specify exactly one of mu or kappa")
    if kappa is None:
        if mu <= 0:
            raise ConfigError(f"mu must be positive (dispersive regime), got {mu}")
        kappa = float(np.sqrt(mu / 3.0))
    if kappa <= 0:
        raise ConfigError(f"kappa must be positive (dispersive regime), got {kappa}")
    if epsilon < 0:
        raise ConfigError(f"epsilon must be non-negative, got {epsilon}")
    if ell <= 0:
        raise ConfigError(f"ell must be positive, got {ell}")

    h_const = None
    if np.isscalar(h_eq):
        h_const = float(h_eq)
        if h_const <= 0:
            raise ConfigError(f"h_eq must be positive, got {h_const}")
        h_fun = (lambda x, h0=h_const: np.full_like(np.asarray(x, dtype=float), h0))
        mass = 1.0 - h_const
    else:
        h_fun = h_eq
        x = np.linspace(0.0, ell, 1001)
        hx = np.asarray(h_fun(x), dtype=float)
        if np.any(hx <= 0):
            raise ConfigError("h_eq must be strictly positive on [-ell, ell]")
        if np.max(np.abs(hx - np.asarray(h_fun(-x), dtype=float))) > 1e-12:
            raise ConfigError("h_eq must be an even function of x")
        mass = simpson(lambda s: 1.0 - h_fun(s), -ell, ell, 2001) / (2.0 * ell)
    return PhysicalSetup(epsilon=float(epsilon), kappa=float(kappa), ell=float(ell),
                         h_eq=h_fun, mass=float(mass), h_eq_constant=h_const)


@dataclass(frozen=True)
class Grid:
    """Symmetric two-component grid around the object.

    dx              : cell width, (L - ell)/(N + 1)
    n_cells_per_side: N, number of full cells on each component
    ell, L          : contact point and outer truncation coordinates
    """

    dx: float
    n_cells_per_side: int
    ell: float
    L: float

    @property
    def centers_kernel(self) -> np.ndarray:
        """Cell-center distances from the contact point, j = 0..N+1.

        j = 0 is the boundary half cell (dx/4 from the contact point),
        j = N+1 the outer half cell (dx/4 inside the truncation point).
        """
        n = self.n_cells_per_side
        c = np.empty(n + 2)
        c[0] = 0.25 * self.dx
        c[1:n + 1] = np.arange(1, n + 1) * self.dx
        c[n + 1] = (n + 1) * self.dx - 0.25 * self.dx
        return self.ell + c

    @property
    def widths_kernel(self) -> np.ndarray:
        n = self.n_cells_per_side
        w = np.full(n + 2, self.dx)
        w[0] = 0.5 * self.dx
        w[n + 1] = 0.5 * self.dx
        return w

    def centers_full(self) -> np.ndarray:
        """Physical centers of all cells, left component first (ascending x)."""
        r = self.centers_kernel
        return np.concatenate([-r[::-1], r])

    def mirror_index_check(self) -> bool:
        x = self.centers_full()
        return bool(np.all(x == -x[::-1]))


def build_grid(L: float, ell: float, N: int) -> Grid:
    """Two-component grid with dx = (L - ell)/(N + 1).

    N full cells per side, a half cell against each contact point and a
    half cell against each outer boundary.
    """
    if ell <= 0:
        raise ConfigError(f"object half-width ell must be positive, got {ell}")
    if L <= ell:
        raise ConfigError(f"outer coordinate L={L} must exceed ell={ell}")
    if N < 4:
        raise ConfigError(f"need at least 4 cells per side, got {N}")
    dx = (L - ell) / (N + 1)
    return Grid(dx=dx, n_cells_per_side=int(N), ell=float(ell), L=float(L))


class SideState:
    """Wave field on one exterior component in kernel orientation.

    z[j], p[j] for j = 0..N+1; p is the outward-oriented discharge
    (p = q on the right component, p = -q on the left one).
    """

    __slots__ = ("z", "p")

    def __init__(self, n: int):
        self.z = np.zeros(n + 2)
        self.p = np.zeros(n + 2)

    def copy(self) -> "SideState":
        out = SideState(len(self.z) - 2)
        out.z[:] = self.z
        out.p[:] = self.p
        return out


class State:
    """Full wave field: one SideState per component.

    sides = ("right",) for half-line runs (symmetric or generation-only),
    ("right", "left") otherwise.
    """

    def __init__(self, grid: Grid, sides=("right", "left")):
        for s in sides:
            if s not in ("right", "left"):
                raise ConfigError(f"unknown side {s!r}")
        self.grid = grid
        self.sides = tuple(sides)
        self.right = SideState(grid.n_cells_per_side)
        self.left = SideState(grid.n_cells_per_side) if "left" in sides else None

    def side(self, name: str) -> SideState:
        s = self.right if name == "right" else self.left
        if s is None:
            raise ConfigError(f"state has no {name!r} component")
        return s

    def copy(self) -> "State":
        out = State(self.grid, self.sides)
        out.right = self.right.copy()
        if self.left is not None:
            out.left = self.left.copy()
        return out

    def check_depth(self, epsilon: float):
        """Raise if 1 + eps*zeta <= 0 anywhere (vacuum state)."""
        for name in self.sides:
            z = self.side(name).z
            if not np.all(np.isfinite(z)):
                raise PhysicalStateError(f"non-finite surface elevation on {name} side")
            if epsilon > 0 and np.min(1.0 + epsilon * z) <= 0.0:
                raise PhysicalStateError(f"water depth vanished on {name} side")

    def physical_fields(self):
        """(x, zeta, q) over all stored cells in ascending x order."""
        g = self.grid
        xr = g.centers_kernel
        if self.left is None:
            return xr.copy(), self.right.z.copy(), self.right.p.copy()
        x = np.concatenate([-xr[::-1], xr])
        zeta = np.concatenate([self.left.z[::-1], self.right.z])
        q = np.concatenate([-self.left.p[::-1], self.right.p])
        return x, zeta, q

    def interior_fields(self):
        """(x, zeta, q) over the N full cells of each component only."""
        g = self.grid
        n = g.n_cells_per_side
        xr = g.ell + np.arange(1, n + 1) * g.dx
        if self.left is None:
            return xr, self.right.z[1:n + 1].copy(), self.right.p[1:n + 1].copy()
        x = np.concatenate([-xr[::-1], xr])
        zeta = np.concatenate([self.left.z[1:n + 1][::-1], self.right.z[1:n + 1]])
        q = np.concatenate([-self.left.p[1:n + 1][::-1], self.right.p[1:n + 1]])
        return x, zeta, q


# ---------------------------------------------------------------------------
# One-sided boundary traces (second order, from the three nearest cells)
# ---------------------------------------------------------------------------

def trace_at_contact(values: np.ndarray) -> float:
    """Field value at the contact point from cells j = 1, 2, 3."""
    if len(values) < 4:
        raise ConfigError("need at least 3 interior cells for boundary traces")
    f1, f2, f3 = values[1], values[2], values[3]
    return float(3.0 * f1 - 3.0 * f2 + f3)


def derivative_at_contact(values: np.ndarray, dx: float) -> float:
    """Outward derivative d/dj at the contact point from cells j = 1, 2, 3.

    In kernel orientation this equals d q / d x at +-ell when applied to
    the p array of either component.
    """
    if len(values) < 4:
        raise ConfigError("need at least 3 interior cells for boundary traces")
    f1, f2, f3 = values[1], values[2], values[3]
    return float((-2.5 * f1 + 4.0 * f2 - 1.5 * f3) / dx)


def compatibility_residual(state: State, theta: np.ndarray, grid: Grid,
                           mode: str = "free") -> float:
    """Largest violation of the initial-data compatibility conditions.

    Re-derives the boundary traces of the stored fields with the one-sided
    formulas and compares them against the entries of theta.  mode selects
    the theta layout: "free" (7 components), "forced" (5), "symmetric" (4).
    """
    dx = grid.dx
    ell = grid.ell
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
    avg_q = 0.5 * (q_p + q_m)
    jump_q = q_p - q_m

    if mode == "free":
        res = [avg_q - theta[0], jump_q + 2.0 * ell * theta[1],
               -dq_p - theta[2], -dq_m - theta[3],
               z_p - theta[5], z_m - theta[6]]
    elif mode == "forced":
        res = [avg_q - theta[0], -dq_p - theta[1], -dq_m - theta[2],
               z_p - theta[3], z_m - theta[4]]
    elif mode == "symmetric":
        res = [jump_q + 2.0 * ell * theta[0], -dq_p - theta[1], z_p - theta[3]]
    else:
        raise ConfigError(f"unknown compatibility mode {mode!r}")
    return float(np.max(np.abs(res)))
