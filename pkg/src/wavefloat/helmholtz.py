"""Discrete Neumann inverse of (1 - kappa^2 d_xx) on one exterior component.

The operator acts on cell values v_1..v_N (the boundary half cells are not
unknowns).  Interior rows use the standard three-point Laplacian,

    v_j - kappa^2 (v_{j+1} - 2 v_j + v_{j-1}) / dx^2 = f_j ,   2 <= j <= N-1,

and the homogeneous Neumann condition at the contact point modifies the
first row to

    v_1 - kappa^2 (2/3) (v_2 - v_1) / dx^2 = f_1 .

The truncated outer boundary mirrors the same Neumann row; it is inert
for fields supported away from the truncation point.  The resulting matrix
is strictly diagonally dominant, so it is factored once (sparse LU) and
reused for every right-hand side.

Boundary values of the inverse are extracted with the Neumann-aware
second-order extrapolation (4 v_1 - v_2)/3.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csc_matrix, diags
from scipy.sparse.linalg import splu

from .errors import ConfigError


class HelmholtzWorkspace:
    """Prefactored tridiagonal solver for one (kappa, dx, N) triple."""

    def __init__(self, kappa: float, dx: float, n: int):
        if n < 2:
            raise ConfigError(f"Helmholtz workspace needs at least 2 cells, got {n}")
        if kappa <= 0 or dx <= 0:
            raise ConfigError("kappa and dx must be positive")
        self.kappa = float(kappa)
        self.dx = float(dx)
        self.n = int(n)
        c = kappa ** 2 / dx ** 2
        self.c = c

        main = np.full(n, 1.0 + 2.0 * c)
        upper = np.full(n - 1, -c)
        lower = np.full(n - 1, -c)
        main[0] = 1.0 + (2.0 / 3.0) * c
        upper[0] = -(2.0 / 3.0) * c
        main[-1] = 1.0 + (2.0 / 3.0) * c
        lower[-1] = -(2.0 / 3.0) * c
        self._matrix = csc_matrix(diags([lower, main, upper], [-1, 0, 1]))
        self._lu = splu(self._matrix)

    def solve(self, f: np.ndarray) -> np.ndarray:
        """v with (1 - kappa^2 d_xx) v = f and Neumann ends."""
        f = np.asarray(f, dtype=float)
        if f.shape != (self.n,):
            raise ConfigError(f"right-hand side has shape {f.shape}, expected ({self.n},)")
        return self._lu.solve(f)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Forward operator, the exact stencil inverted by solve()."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ConfigError(f"input has shape {v.shape}, expected ({self.n},)")
        c = self.c
        f = np.empty_like(v)
        f[1:-1] = v[1:-1] - c * (v[2:] - 2.0 * v[1:-1] + v[:-2])
        f[0] = v[0] - (2.0 / 3.0) * c * (v[1] - v[0])
        f[-1] = v[-1] - (2.0 / 3.0) * c * (v[-2] - v[-1])
        return f

    def dense_matrix(self) -> np.ndarray:
        """Dense copy of the system matrix (for small-N oracles)."""
        return self._matrix.toarray()


def solve_r1(workspace: HelmholtzWorkspace, f: np.ndarray) -> np.ndarray:
    return workspace.solve(f)


def apply_helmholtz(workspace: HelmholtzWorkspace, v: np.ndarray) -> np.ndarray:
    return workspace.apply(v)


def trace_r1(v: np.ndarray) -> float:
    """Value at the contact point: (4 v_1 - v_2)/3, second order under
    the Neumann condition."""
    if len(v) < 2:
        raise ConfigError("trace needs at least 2 cells")
    return float((4.0 * v[0] - v[1]) / 3.0)


def trace_r1_far(v: np.ndarray) -> float:
    """Mirror trace at the truncated outer boundary."""
    if len(v) < 2:
        raise ConfigError("trace needs at least 2 cells")
    return float((4.0 * v[-1] - v[-2]) / 3.0)
