"""Legendre pseudospectral transcription of the minimum-time expansion problem.

Decision vector ``z = (t_f, x1_0..x1_N, x2_0..x2_N, u_0..u_N)`` on an LGL grid
over ``tau in [-1, 1]``.  Dynamics are enforced at every node through the
differentiation matrix, the boundary rows are pinned through the bounds, and
an optional rate limit ``|u_{i+1} - u_i| <= M (tau_{i+1} - tau_i)`` smooths the
control.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .auglag import minimize_auglag, projected_gradient
from .bangbang import asymptotic_min_time, best_plan
from .lgl import LGLGrid, interpolate, lgl_grid
from .model import ProblemSpec
from .simulator import _write_csv, integrate, sample_schedule

X1_FLOOR = 1e-2
TF_FLOOR = 1e-3


def _unbounded(M):
    return M is None or math.isinf(M)


@dataclass(eq=False)
class CollocationNLP:
    spec: ProblemSpec
    grid: LGLGrid
    M: float | None = None
    x1_floor: float = X1_FLOOR

    @property
    def N(self):
        return self.grid.N

    @property
    def n_vars(self):
        return 3 * (self.N + 1) + 1

    @property
    def n_eq(self):
        return 2 * (self.N + 1)

    @property
    def n_slope(self):
        """Number of two-sided slope constraints (each contributes two rows)."""
        return 0 if _unbounded(self.M) else self.N

    def split(self, z):
        n = self.N + 1
        return z[0], z[1 : n + 1], z[n + 1 : 2 * n + 1], z[2 * n + 1 :]

    def pack(self, t_f, x1, x2, u):
        return np.concatenate(([t_f], x1, x2, u))

    def bounds(self):
        n = self.N + 1
        spec = self.spec
        lb = np.concatenate(([TF_FLOOR], np.full(n, self.x1_floor), np.full(n, -np.inf), np.full(n, -spec.v1)))
        ub = np.concatenate(([np.inf], np.full(n, np.inf), np.full(n, np.inf), np.full(n, spec.v2)))
        pins = {1: 1.0, n: spec.gamma, n + 1: 0.0, 2 * n: 0.0, 2 * n + 1: spec.u_initial, 3 * n: spec.u_final}
        for i, value in pins.items():
            lb[i] = ub[i] = value
        return lb, ub

    def objective(self, z):
        return z[0]

    def objective_grad(self, z):
        g = np.zeros_like(z)
        g[0] = 1.0
        return g

    def dynamics_residual(self, z):
        tf, x1, x2, u = self.split(z)
        D = self.grid.D
        return np.concatenate((D @ x1 - 0.5 * tf * x2, D @ x2 - 0.5 * tf * (-u * x1 + x1**-3)))

    def dynamics_jacobian(self, z):
        tf, x1, x2, u = self.split(z)
        n = self.N + 1
        D = self.grid.D
        J = np.zeros((2 * n, 3 * n + 1))
        J[:n, 0] = -0.5 * x2
        J[:n, 1 : n + 1] = D
        J[:n, n + 1 : 2 * n + 1] = -0.5 * tf * np.eye(n)
        J[n:, 0] = -0.5 * (-u * x1 + x1**-3)
        J[n:, 1 : n + 1] = np.diag(-0.5 * tf * (-u - 3.0 * x1**-4))
        J[n:, n + 1 : 2 * n + 1] = D
        J[n:, 2 * n + 1 :] = np.diag(0.5 * tf * x1)
        return J

    def slope_residual(self, z):
        """Rows ``du - M dtau`` and ``-du - M dtau``; feasible when ``<= 0``."""
        if _unbounded(self.M):
            return np.zeros(0)
        du = np.diff(self.split(z)[3])
        cap = self.M * np.diff(self.grid.nodes)
        return np.concatenate((du - cap, -du - cap))

    def slope_jacobian(self, z):
        if _unbounded(self.M):
            return np.zeros((0, self.n_vars))
        n = self.N + 1
        Dd = np.zeros((n - 1, n))
        idx = np.arange(n - 1)
        Dd[idx, idx] = -1.0
        Dd[idx, idx + 1] = 1.0
        J = np.zeros((2 * (n - 1), self.n_vars))
        J[: n - 1, 2 * n + 1 :] = Dd
        J[n - 1 :, 2 * n + 1 :] = -Dd
        return J


def assemble_nlp(spec: ProblemSpec, N: int, M=None) -> CollocationNLP:
    if N < 8:
        raise ValueError(f"collocation needs N >= 8, got {N}")
    return CollocationNLP(spec, lgl_grid(N), M)


@dataclass
class Guess:
    t_f: float
    x1: np.ndarray
    x2: np.ndarray
    u: np.ndarray
    label: str = ""


def limit_slope(tau, u, M, start, end):
    """Clip ``u`` into an ``M``-rate-limited profile pinned at ``start`` and ``end``."""
    u = np.array(u, dtype=float)
    if _unbounded(M):
        u[0], u[-1] = start, end
        return u
    reach_lo = np.maximum(start - M * (tau - tau[0]), end - M * (tau[-1] - tau))
    reach_hi = np.minimum(start + M * (tau - tau[0]), end + M * (tau[-1] - tau))
    u = np.clip(u, reach_lo, reach_hi)
    u[0] = start
    for i in range(len(u) - 1):
        cap = M * (tau[i + 1] - tau[i])
        u[i + 1] = min(max(u[i + 1], u[i] - cap), u[i] + cap)
    # the cone clip already made the end reachable; only rounding is left
    u[-1] = end
    return u


def initial_guess(spec: ProblemSpec, N: int, plan=None, M=None) -> Guess:
    """Starting point from a bang-bang plan, or a straight line between the boundary values."""
    grid = lgl_grid(N)
    tau = grid.nodes
    if plan is not None:
        schedule = getattr(plan, "schedule", plan)
        t_f = schedule.total_time
        x1, x2, u = sample_schedule(schedule, grid.to_time(t_f))
        u = np.clip(u, -spec.v1, spec.v2)
        return Guess(t_f, x1, x2, limit_slope(tau, u, M, spec.u_initial, spec.u_final), "plan")
    t_f = min(asymptotic_min_time(spec.gamma, n, spec.v2) for n in range(1, 6))
    s = 0.5 * (tau + 1)
    x1 = 1 + (spec.gamma - 1) * s
    x2 = np.full(N + 1, (spec.gamma - 1) / t_f)
    x2[0] = x2[-1] = 0.0
    u = spec.u_initial + (spec.u_final - spec.u_initial) * s
    return Guess(t_f, x1, x2, limit_slope(tau, u, M, spec.u_initial, spec.u_final), "linear")


def perturbed_guess(base: Guess, spec: ProblemSpec, M, rng, scale=0.05) -> Guess:
    tau = lgl_grid(len(base.x1) - 1).nodes
    n = len(base.x1)
    x1 = np.maximum(base.x1 * (1 + scale * rng.standard_normal(n)), 2 * X1_FLOOR)
    x2 = base.x2 + scale * (spec.gamma - 1) / base.t_f * rng.standard_normal(n)
    u = np.clip(base.u + scale * (spec.v1 + spec.v2) * rng.standard_normal(n), -spec.v1, spec.v2)
    u = limit_slope(tau, u, M, spec.u_initial, spec.u_final)
    return Guess(base.t_f * (1 + scale * rng.standard_normal()), x1, x2, u, base.label + "+perturbed")


@dataclass
class CollocationSolution:
    spec: ProblemSpec
    grid: LGLGrid
    M: float | None
    t_f: float
    x1: np.ndarray
    x2: np.ndarray
    u: np.ndarray
    residual: float
    stationarity: float
    iterations: int
    converged: bool
    seed: str = ""
    history: list = field(default_factory=list)

    @property
    def objective(self):
        return self.t_f

    @property
    def times(self):
        return self.grid.to_time(self.t_f)

    def control(self, t):
        """Interpolated control at physical time ``t`` in ``[0, t_f]``."""
        tau = np.clip(2.0 * np.asarray(t, dtype=float) / self.t_f - 1.0, -1.0, 1.0)
        return interpolate(self.grid, self.u, tau)

    def sidecar(self) -> dict:
        return {
            "t_f": self.t_f,
            "N": self.grid.N,
            "M": None if _unbounded(self.M) else self.M,
            "residuals": self.residual,
            "stationarity": self.stationarity,
            "converged": self.converged,
            "iterations": self.iterations,
            "seed": self.seed,
            "spec": self.spec.to_dict(),
        }

    def to_csv(self, path_or_file):
        rows = [
            [str(i)] + [f"{v:.17g}" for v in (t, a, b, c)]
            for i, (t, a, b, c) in enumerate(zip(self.times, self.x1, self.x2, self.u))
        ]
        _write_csv(path_or_file, ["node", "t_mapped", "x1", "x2", "u"], rows)

    def to_json(self) -> str:
        return json.dumps(self.sidecar(), indent=2)


def _solve_slsqp(nlp: CollocationNLP, z0, tol):
    lb, ub = nlp.bounds()
    cons = [{"type": "eq", "fun": nlp.dynamics_residual, "jac": nlp.dynamics_jacobian}]
    if nlp.n_slope:
        cons.append({"type": "ineq", "fun": lambda z: -nlp.slope_residual(z), "jac": lambda z: -nlp.slope_jacobian(z)})
    bounds = [(lo if np.isfinite(lo) else None, hi if np.isfinite(hi) else None) for lo, hi in zip(lb, ub)]
    res = minimize(
        nlp.objective,
        z0,
        jac=nlp.objective_grad,
        method="SLSQP",
        bounds=bounds,
        constraints=cons,
        options={"maxiter": 3000, "ftol": 1e-14},
    )
    z = np.clip(res.x, lb, ub)
    residual = float(np.max(np.abs(nlp.dynamics_residual(z))))
    if nlp.n_slope:
        residual = max(residual, float(np.max(nlp.slope_residual(z), initial=0.0)))
    # least-squares multipliers for the stationarity report
    J = nlp.dynamics_jacobian(z)
    lam, *_ = np.linalg.lstsq(J.T, -nlp.objective_grad(z), rcond=None)
    stat = float(np.max(np.abs(projected_gradient(z, nlp.objective_grad(z) + J.T @ lam, lb, ub))))
    return z, residual, stat, res.nit, bool(res.success) and residual < tol


def solve(nlp: CollocationNLP, init: Guess, tol=1e-6, stationarity_tol=1e-5, engine="auglag") -> CollocationSolution:
    """Solve the collocation NLP from one starting point.

    ``engine`` selects the built-in augmented-Lagrangian solver or scipy's SLSQP.
    """
    lb, ub = nlp.bounds()
    z0 = np.clip(nlp.pack(init.t_f, init.x1, init.x2, init.u), lb, ub)
    if engine == "auglag":
        res = minimize_auglag(
            nlp.objective,
            nlp.objective_grad,
            z0,
            lb,
            ub,
            eq=nlp.dynamics_residual,
            eq_jac=nlp.dynamics_jacobian,
            ineq=nlp.slope_residual if nlp.n_slope else None,
            ineq_jac=nlp.slope_jacobian if nlp.n_slope else None,
            tol=tol,
            stationarity_tol=stationarity_tol,
        )
        z, residual, stat, its, ok = res.x, res.residual, res.stationarity, res.iterations, res.converged
    elif engine == "slsqp":
        z, residual, stat, its, ok = _solve_slsqp(nlp, z0, tol)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    tf, x1, x2, u = nlp.split(z)
    return CollocationSolution(
        nlp.spec, nlp.grid, nlp.M, float(tf), x1.copy(), x2.copy(), u.copy(),
        float(residual), float(stat), int(its), bool(ok), init.label,
    )


def collocate(spec: ProblemSpec, N=24, M=None, plan="best", seed=0, engine="auglag", n_max=3) -> CollocationSolution:
    """Multistart solve: plan-seeded, linear and perturbed-linear starts; best objective wins.

    ``plan="best"`` seeds from :func:`best_plan`; pass a schedule to use it
    instead, or ``None`` to skip the plan-seeded start.
    """
    nlp = assemble_nlp(spec, N, M)
    if isinstance(plan, str) and plan == "best":
        plan = best_plan(spec, n_max).schedule if spec.gamma > 1 else None
    guesses = []
    if plan is not None:
        guesses.append(initial_guess(spec, N, plan, M))
    linear = initial_guess(spec, N, None, M)
    guesses.append(linear)
    guesses.append(perturbed_guess(linear, spec, M, np.random.default_rng(seed)))
    solutions = [solve(nlp, g, engine=engine) for g in guesses]
    pool = [s for s in solutions if s.converged] or solutions
    best = min(pool, key=lambda s: (s.t_f if s.converged else s.residual))
    best.history = [(s.seed, s.t_f, s.residual, s.converged) for s in solutions]
    return best


def resimulate(sol: CollocationSolution, steps=4000):
    """Integrate the dynamics under the interpolated control from ``(1, 0)``."""
    # RK4 only samples the control on the half-step grid, so tabulate it once
    half = 0.5 * sol.t_f / steps
    table = sol.control(half * np.arange(2 * steps + 1))
    return integrate(sol.spec, lambda t: table[int(round(t / half))], sol.t_f, steps)
