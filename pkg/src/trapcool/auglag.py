"""Augmented-Lagrangian method for smooth NLPs with box bounds.

Solves ``min f(x)`` subject to ``h(x) = 0``, ``g(x) <= 0`` and
``lb <= x <= ub``.  Equality and inequality constraints are moved into a
Powell-Hestenes-Rockafellar penalty; the box is kept explicit and handled by
the projected quasi-Newton inner solver (L-BFGS-B).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize


@dataclass
class ALResult:
    x: np.ndarray
    fun: float
    residual: float
    stationarity: float
    iterations: int
    outer_iterations: int
    converged: bool
    eq_multipliers: np.ndarray
    ineq_multipliers: np.ndarray


def projected_gradient(x, grad, lb, ub, atol=1e-12):
    """Components of ``grad`` that can still decrease the objective inside the box."""
    pg = np.array(grad, dtype=float)
    fixed = ub - lb <= atol
    at_lo = (x - lb <= atol) & (pg > 0)
    at_hi = (ub - x <= atol) & (pg < 0)
    pg[fixed | at_lo | at_hi] = 0.0
    return pg


def kkt_stationarity(x, grad, lb, ub, eq_jac=None, ineq=None, ineq_jac=None, active_tol=1e-8):
    """Projected-gradient norm of the Lagrangian with least-squares multipliers.

    Multipliers are fitted on the variables strictly inside their bounds, using
    the equality rows and the active inequality rows; negative inequality
    multipliers are clipped to zero before the residual is measured.
    """
    g = np.asarray(grad, dtype=float)
    rows = []
    n_eq = 0
    if eq_jac is not None:
        rows.append(eq_jac)
        n_eq = eq_jac.shape[0]
    if ineq is not None and len(ineq):
        active = ineq > -active_tol
        rows.append(ineq_jac[active])
    if not rows:
        return float(np.max(np.abs(projected_gradient(x, g, lb, ub)), initial=0.0))
    J = np.vstack(rows)
    free = (x - lb > 1e-9) & (ub - x > 1e-9)
    mult, *_ = np.linalg.lstsq(J[:, free].T, -g[free], rcond=None)
    mult[n_eq:] = np.maximum(mult[n_eq:], 0.0)
    return float(np.max(np.abs(projected_gradient(x, g + J.T @ mult, lb, ub)), initial=0.0))


def minimize_auglag(
    fun,
    grad,
    x0,
    lb,
    ub,
    eq=None,
    eq_jac=None,
    ineq=None,
    ineq_jac=None,
    tol=1e-6,
    stationarity_tol=1e-5,
    rho=10.0,
    rho_max=1e3,
    max_outer=60,
    max_inner=5000,
):
    """Run the outer multiplier loop; returns an :class:`ALResult` with the best iterate."""
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    x = np.clip(np.asarray(x0, dtype=float), lb, ub)
    n_eq = len(eq(x)) if eq is not None else 0
    n_in = len(ineq(x)) if ineq is not None else 0
    lam = np.zeros(n_eq)
    mu = np.zeros(n_in)
    empty_jac = np.zeros((0, len(x)))

    def parts(x):
        h = eq(x) if n_eq else np.zeros(0)
        g = ineq(x) if n_in else np.zeros(0)
        return h, g

    def violation(h, g, mu, rho):
        v_eq = np.max(np.abs(h)) if n_eq else 0.0
        v_in = np.max(np.maximum(g, 0.0)) if n_in else 0.0
        comp = np.max(np.abs(np.minimum(-g, mu / rho))) if n_in else 0.0
        return max(v_eq, v_in), max(v_eq, v_in, comp)

    def lagrangian_grad(x, lam, mu):
        Jh = eq_jac(x) if n_eq else empty_jac
        Jg = ineq_jac(x) if n_in else empty_jac
        return grad(x) + Jh.T @ lam + Jg.T @ mu

    total_inner = 0
    best = None
    prev_viol = np.inf
    inner_gtol = 1e-4
    for outer in range(1, max_outer + 1):

        def al(x, lam=lam, mu=mu, rho=rho):
            h, g = parts(x)
            val = fun(x) + lam @ h + 0.5 * rho * (h @ h)
            gr = grad(x)
            if n_eq:
                gr = gr + eq_jac(x).T @ (lam + rho * h)
            if n_in:
                shifted = np.maximum(mu + rho * g, 0.0)
                val += (shifted @ shifted - mu @ mu) / (2 * rho)
                gr = gr + ineq_jac(x).T @ shifted
            return val, gr

        res = minimize(
            al,
            x,
            jac=True,
            method="L-BFGS-B",
            bounds=list(zip(lb, ub)),
            options={"maxiter": max_inner, "gtol": inner_gtol, "ftol": 1e-15, "maxcor": 30},
        )
        x = res.x
        total_inner += res.nit
        h, g = parts(x)
        lam = lam + rho * h
        if n_in:
            mu = np.maximum(mu + rho * g, 0.0)
        feas, viol = violation(h, g, mu, rho)
        stat = np.max(np.abs(projected_gradient(x, lagrangian_grad(x, lam, mu), lb, ub)))
        if feas < tol and stat >= stationarity_tol:
            stat = min(stat, kkt_stationarity(
                x, grad(x), lb, ub,
                eq_jac(x) if n_eq else None,
                g if n_in else None,
                ineq_jac(x) if n_in else None,
            ))
        # feasible iterates rank by objective, infeasible ones by violation
        rank = (0, fun(x)) if feas < tol else (1, feas)
        if best is None or rank < best[0]:
            best = (rank, x.copy(), feas, stat, lam.copy(), mu.copy())
        if feas < tol and stat < stationarity_tol:
            return ALResult(x, float(fun(x)), feas, stat, total_inner, outer, True, lam, mu)
        if viol > 0.25 * prev_viol:
            rho = min(rho * 10.0, rho_max)
        prev_viol = viol
        inner_gtol = max(inner_gtol * 0.1, 1e-11)

    _, x, feas, stat, lam, mu = best
    return ALResult(x, float(fun(x)), feas, stat, total_inner, max_outer, False, lam, mu)
