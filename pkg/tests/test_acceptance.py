"""Acceptance criteria, one test per criterion (criterion 6 and 7 split per case).

Each test logs a PASS/FAIL line with the measured value, reference, tolerance
and runtime; the lines are printed together at the end of the session.
"""

import math
import time

import numpy as np
import pytest

from conftest import SOLVE_SECONDS
from trapcool.bangbang import (
    asymptotic_min_time,
    best_plan,
    crossing_threshold,
    multi_switch_time,
    optimal_betas_asymptotic,
    optimal_first_duration,
)
from trapcool.collocation import resimulate
from trapcool.lgl import interpolate, lgl_grid, runge_demo
from trapcool.model import ProblemSpec, segment_invariant
from trapcool.simulator import integrate, propagate_constant, rk4


def record(log, name, passed, measured, reference, tol, seconds, limit):
    ok = passed and seconds < limit
    line = (
        f"{'PASS' if ok else 'FAIL'}  {name}: measured={measured} reference={reference} tol={tol} "
        f"runtime={seconds:.2f}s (limit {limit:g}s)"
    )
    log.append(line)
    if not ok:
        pytest.fail(line, pytrace=False)


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_criterion_1_intuitive_crossing(acceptance_log):
    with Timer() as t:
        v2 = crossing_threshold("one", "two-intuitive", 1.0, 10.0, 5.0, 10.0)
    ok = abs(v2 - 6.786) <= 0.01
    record(acceptance_log, "1 one/two-switch crossing (intuitive)", ok, f"{v2:.6f}", "6.786 [published]", "0.01", t.seconds, 1)


def test_criterion_2_optimal_crossing(acceptance_log):
    with Timer() as t:
        v2 = crossing_threshold("one", "two-optimal", 1.0, 10.0, 5.0, 10.0)
        below = [optimal_first_duration(ProblemSpec(1.0, s, 10.0))[0] for s in np.linspace(1.0, v2 - 1e-3, 25)]
    ok = abs(v2 - 6.763) <= 0.01 and max(below) <= 1e-4
    record(
        acceptance_log, "2 one/two-switch crossing (optimal), t1=0 below", ok,
        f"{v2:.6f}, max t1 below={max(below):.1e}", "6.763 [published]", "0.01; t1<=1e-4", t.seconds, 30,
    )


def test_criterion_3_four_switch_threshold(acceptance_log):
    with Timer() as t:
        v2 = crossing_threshold("multi:1", "multi:2", 1.0, 10.0, 20.0, 80.0)
    ok = abs(v2 - 43.32) <= 0.05
    record(acceptance_log, "3 two/four-switch crossing", ok, f"{v2:.5f}", "43.32 [published]", "0.05", t.seconds, 10)


def test_criterion_4_asymptotic_argmin(acceptance_log):
    with Timer() as t:
        argmin = {g: 1 + int(np.argmin([asymptotic_min_time(g, n, 1.0) for n in range(1, 11)])) for g in (10.0, 50.0)}
    ok = argmin[10.0] == 2 and argmin[50.0] > argmin[10.0]
    record(
        acceptance_log, "4 asymptotic argmin over n", ok, f"gamma=10: {argmin[10.0]}, gamma=50: {argmin[50.0]}",
        "2 and >2 [published]", "exact", t.seconds, 1,
    )


def test_criterion_5_limit_consistency(acceptance_log):
    spec = ProblemSpec(1.0, 1e6, 10.0)
    with Timer() as t:
        rel = [
            abs(multi_switch_time(spec, optimal_betas_asymptotic(10.0, n)) / asymptotic_min_time(10.0, n, 1e6) - 1)
            for n in (1, 2, 3)
        ]
    ok = max(rel) < 1e-3
    record(
        acceptance_log, "5 exact vs asymptotic time at v2=1e6", ok, f"max rel err={max(rel):.2e}", "0 [computed]",
        "1e-3", t.seconds, 1,
    )


@pytest.mark.parametrize("v2", [3.0, 8.0])
def test_criterion_6_collocation_closure(v2, solved, acceptance_log):
    spec = ProblemSpec(1.0, v2, 10.0)
    sol = solved(v2, 24, None)
    seconds = SOLVE_SECONDS[(v2, 24, None)]
    bound = best_plan(spec, 3).total_time
    end = resimulate(sol).endpoint
    gap = sol.t_f / bound - 1
    closure = max(abs(end.x1 - spec.gamma), abs(end.x2))
    ok = sol.converged and abs(gap) <= 0.02 and closure <= 1e-3
    record(
        acceptance_log, f"6 collocation closure (1,{v2:g},10), N=24, M=inf", ok,
        f"t_f={sol.t_f:.6f} gap={100 * gap:+.2f}% closure={closure:.2e}",
        f"bang-bang {bound:.6f} [computed]", "2% band; closure 1e-3", seconds, 120,
    )


@pytest.mark.parametrize("v2", [3.0, 8.0])
def test_criterion_7_slope_penalty(v2, solved, acceptance_log):
    free = solved(v2, 24, None)
    limited = solved(v2, 24, 10.0)
    seconds = SOLVE_SECONDS[(v2, 24, 10.0)]
    ok = free.converged and limited.converged and limited.t_f > free.t_f
    record(
        acceptance_log, f"7 slope restriction (1,{v2:g},10), M=10", ok,
        f"t_f(M=10)={limited.t_f:.6f} vs t_f(M=inf)={free.t_f:.6f}", "strictly larger [published]", "strict",
        seconds, 120,
    )


def test_criterion_8_runge(acceptance_log):
    with Timer() as t:
        row = runge_demo(16)
    ok = row.ratio > 10
    record(
        acceptance_log, "8 Runge ratio uniform/LGL at N=16", ok, f"{row.ratio:.2f}", "> 10 [computed]", "ratio > 10",
        t.seconds, 1,
    )


def _property_suite():
    failures = []
    rng = np.random.default_rng(2024)

    # invariant conservation under the reference integrator
    for u in (-1.0, 0.0, 3.0, 8.0):
        s0 = (rng.uniform(0.5, 3), rng.uniform(-1, 1))
        traj = integrate(ProblemSpec(1, 8, 10), lambda t: u, 2.5, steps=8000, s0=s0)
        c0 = segment_invariant(s0, u)
        drift = np.max(np.abs(segment_invariant((traj.x1, traj.x2), u) - c0)) / max(1, abs(c0))
        if drift >= 1e-9:
            failures.append(f"invariant drift {drift:.2e} at u={u}")

    # closed form vs RK4 on 1000 random segments
    n = 1000
    x1, x2 = rng.uniform(0.5, 3.0, n), rng.uniform(-2, 2, n)
    u, dt = rng.uniform(-1, 8, n), rng.uniform(1e-3, 3.0, n)
    exact = np.array([propagate_constant((a, b), c, d) for a, b, c, d in zip(x1, x2, u, dt)])

    def rhs(_, y):
        return np.array([y[1], -u * y[0] + y[0] ** -3]) * dt

    numeric = rk4(rhs, np.array([x1, x2]), 1.0, 10_000)[1][-1].T
    err = np.max(np.abs(numeric - exact) / np.maximum(1, np.abs(exact)))
    if err >= 1e-8:
        failures.append(f"closed form vs RK4 {err:.2e}")

    # RK4 order
    steps = np.array([400, 800, 1600, 3200])
    s0, c0 = (1.3, -0.4), segment_invariant((1.3, -0.4), 3.0)
    drift = []
    for k in steps:
        traj = integrate(ProblemSpec(1, 8, 10), lambda t: 3.0, 3.0, steps=int(k), s0=s0)
        drift.append(np.max(np.abs(segment_invariant((traj.x1, traj.x2), 3.0) - c0)))
    slope = np.polyfit(np.log(steps), np.log(drift), 1)[0]
    if abs(slope + 4) > 0.3:
        failures.append(f"RK4 slope {slope:.2f}")

    for N in (4, 8, 16, 24, 32):
        grid = lgl_grid(N)
        x = grid.nodes
        worst = max(np.max(np.abs(grid.D @ x**k - k * x ** (k - 1))) for k in range(1, N + 1))
        if worst >= 1e-10 * N * N:
            failures.append(f"D exactness N={N}: {worst:.1e}")
        if np.max(np.abs(x + x[::-1])) > 1e-14:
            failures.append(f"node symmetry N={N}")
        eye = np.array([interpolate(grid, row, x) for row in np.eye(N + 1)])
        if not np.array_equal(eye, np.eye(N + 1)):
            failures.append(f"cardinal property N={N}")
    return failures, slope, err


def test_criterion_9_property_suites(acceptance_log):
    with Timer() as t:
        failures, slope, err = _property_suite()
    ok = not failures
    record(
        acceptance_log, "9 property suites", ok,
        f"{'all pass' if ok else '; '.join(failures)} (RK4 slope {slope:.2f}, RK4 gap {err:.1e})",
        "all pass", "per property", t.seconds, 60,
    )
