"""Reproduction cases for the reference thresholds and curves.

Each case recomputes one quantity and compares it with its reference value
under a fixed tolerance.  The reference label says where the value comes
from: ``published`` for literature values, ``computed`` for values fixed by
an independent computation in this package's tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bangbang import asymptotic_min_time, best_plan, crossing_threshold
from .collocation import collocate, resimulate
from .lgl import runge_demo
from .model import ProblemSpec

CLOSURE_TOL = 1e-3
COLLOCATION_BAND = 0.02


@dataclass
class CaseResult:
    case: str
    measured: object
    expected: object
    provenance: str
    tolerance: str
    passed: bool
    details: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = (
            f"{status}  {self.case}: measured={_fmt(self.measured)} "
            f"expected={_fmt(self.expected)} [{self.provenance}] tol={self.tolerance}"
        )
        return text + (f"  ({self.details})" if self.details else "")


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def asymptotic_argmin(gamma, n_max=10):
    times = [asymptotic_min_time(gamma, n, 1.0) for n in range(1, n_max + 1)]
    return int(np.argmin(times)) + 1


def _crossing(case, a, b, lo, hi, expected, tol):
    v2 = crossing_threshold(a, b, 1.0, 10.0, lo, hi)
    return CaseResult(case, v2, expected, "published", f"+/-{tol}", abs(v2 - expected) <= tol)


def fig3_crossing():
    return _crossing("fig3-crossing", "one", "two-intuitive", 5.0, 10.0, 6.786, 0.01)


def opt_crossing():
    return _crossing("opt-crossing", "one", "two-optimal", 5.0, 10.0, 6.763, 0.01)


def fig7d_crossing():
    return _crossing("fig7d-crossing", "multi:1", "multi:2", 20.0, 80.0, 43.32, 0.05)


def fig7c_argmin():
    n10, n50 = asymptotic_argmin(10.0), asymptotic_argmin(50.0)
    return CaseResult(
        "fig7c-argmin", [n10, n50], [2, "> 2"], "published", "exact", n10 == 2 and n50 > n10
    )


def collocation_case(case, v2, N=24):
    spec = ProblemSpec(1.0, v2, 10.0)
    bound = best_plan(spec, 3).total_time
    free = collocate(spec, N, None)
    limited = collocate(spec, N, 10.0)
    gap = free.t_f / bound - 1
    end = resimulate(free).endpoint
    closure = max(abs(end.x1 - spec.gamma), abs(end.x2))
    ok = free.converged and limited.converged
    ok = ok and abs(gap) <= COLLOCATION_BAND and closure <= CLOSURE_TOL and limited.t_f > free.t_f
    details = (
        f"bang-bang={bound:.6g}, gap={100 * gap:+.3g}%, closure={closure:.3g}, "
        f"t_f(M=10)={limited.t_f:.6g}"
    )
    return CaseResult(
        case, free.t_f, bound, "computed", f"2% band, closure {CLOSURE_TOL:g}, M=10 slower", ok, details
    )


def fig8():
    return collocation_case("fig8", 3.0)


def fig9():
    return collocation_case("fig9", 8.0)


def runge():
    row = runge_demo(16)
    return CaseResult(
        "runge", row.ratio, "> 10", "computed", "ratio > 10", row.ratio > 10,
        f"uniform={row.error_uniform:.6g}, lgl={row.error_lgl:.6g}",
    )


CASES = {
    "fig3-crossing": fig3_crossing,
    "opt-crossing": opt_crossing,
    "fig7c-argmin": fig7c_argmin,
    "fig7d-crossing": fig7d_crossing,
    "fig8": fig8,
    "fig9": fig9,
    "runge": runge,
}


def reproduce(case_id: str) -> CaseResult:
    try:
        return CASES[case_id]()
    except KeyError:
        raise ValueError(f"unknown case {case_id!r}; choose from {', '.join(CASES)}") from None
