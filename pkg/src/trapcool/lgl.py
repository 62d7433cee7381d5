"""Legendre-Gauss-Lobatto grids, differentiation matrices and interpolation."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import BarycentricInterpolator


def legendre_pair(N, t):
    """``(L_N(t), L_N'(t))`` by the Bonnet recurrence; ``t`` may be an array."""
    t = np.asarray(t, dtype=float)
    p_prev, p = np.ones_like(t), t.copy()
    d_prev, d = np.zeros_like(t), np.ones_like(t)
    if N == 0:
        return p_prev, d_prev
    for k in range(1, N):
        p_prev, p = p, ((2 * k + 1) * t * p - k * p_prev) / (k + 1)
        # L'_{k+1} = L'_{k-1} + (2k+1) L_k
        d_prev, d = d, d_prev + (2 * k + 1) * p_prev
    return p, d


class ConvergenceError(RuntimeError):
    pass


def lgl_nodes(N, max_iter=100):
    """Endpoints plus the roots of ``L_N'``, sorted ascending."""
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    # Chebyshev-Gauss-Lobatto starting points interlace with the LGL nodes
    x = -np.cos(np.pi * np.arange(1, N) / N)
    for _ in range(max_iter):
        L, dL = legendre_pair(N, x)
        # Legendre ODE: (1 - x^2) L'' = 2x L' - N(N+1) L
        d2L = (2 * x * dL - N * (N + 1) * L) / (1 - x * x)
        step = dL / d2L
        x = x - step
        if np.max(np.abs(step)) < 1e-16:
            break
    else:
        if np.max(np.abs(step)) > 1e-12:
            raise ConvergenceError(f"LGL nodes for N={N} did not converge")
    x = 0.5 * (x - x[::-1])
    return np.concatenate(([-1.0], x, [1.0]))


def differentiation_matrix(nodes):
    """LGL differentiation matrix mapping nodal values to nodal derivatives."""
    nodes = np.asarray(nodes, dtype=float)
    N = len(nodes) - 1
    L, _ = legendre_pair(N, nodes)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (L[:, None] / L[None, :]) / diff
    np.fill_diagonal(D, 0.0)
    D[0, 0] = -N * (N + 1) / 4
    D[N, N] = N * (N + 1) / 4
    return D


@dataclass(frozen=True, eq=False)
class LGLGrid:
    N: int
    nodes: np.ndarray
    D: np.ndarray

    def to_time(self, t_f):
        """Map nodes from ``[-1, 1]`` to physical times ``[0, t_f]``."""
        return 0.5 * t_f * (self.nodes + 1)


@lru_cache(maxsize=32)
def lgl_grid(N) -> LGLGrid:
    nodes = lgl_nodes(N)
    D = differentiation_matrix(nodes)
    nodes.flags.writeable = False
    D.flags.writeable = False
    return LGLGrid(N, nodes, D)


def interpolate(grid: LGLGrid, values, t):
    """Evaluate the Lagrange interpolant through ``(grid.nodes, values)`` at ``t``.

    Uses the LGL cardinal form ``(t**2 - 1) L_N'(t) / (N(N+1) L_N(t_k) (t - t_k))``.
    """
    values = np.asarray(values, dtype=float)
    N, nodes = grid.N, grid.nodes
    if len(values) != N + 1:
        raise ValueError(f"expected {N + 1} values, got {len(values)}")
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    LN_nodes, _ = legendre_pair(N, nodes)
    _, dL = legendre_pair(N, t)
    diff = t[:, None] - nodes[None, :]
    hit = np.abs(diff) < 1e-14
    diff[hit] = 1.0
    card = ((t * t - 1) * dL)[:, None] / (N * (N + 1) * LN_nodes[None, :] * diff)
    out = card @ values
    rows, cols = np.nonzero(hit)
    out[rows] = values[cols]
    return out[0] if scalar else out


def runge_function(x):
    return 1.0 / (16.0 * np.asarray(x) ** 2 + 1.0)


@dataclass(frozen=True)
class RungeRow:
    N: int
    error_uniform: float
    error_lgl: float

    @property
    def ratio(self):
        return self.error_uniform / self.error_lgl


def runge_demo(N, probes=2001) -> RungeRow:
    """Max interpolation error of ``1/(16x**2+1)`` on uniform and LGL grids of order ``N``."""
    if N < 4:
        raise ValueError(f"N must be >= 4, got {N}")
    x = np.linspace(-1, 1, probes)
    f = runge_function(x)
    uniform = np.linspace(-1, 1, N + 1)
    err_u = np.max(np.abs(BarycentricInterpolator(uniform, runge_function(uniform))(x) - f))
    grid = lgl_grid(N)
    err_l = np.max(np.abs(interpolate(grid, runge_function(grid.nodes), x) - f))
    return RungeRow(N, float(err_u), float(err_l))
