"""Bang-bang planners for the time-optimal expansion problem.

Every planner returns a :class:`Schedule` of interior constant segments taking
the extreme values ``-v1`` or ``v2``.  The jumps from ``u = 1`` at ``t = 0``
and to ``u = gamma**-4`` at ``t_f`` are instantaneous and not part of the
schedule.

Two families are covered: one switch (``-v1`` then ``v2``), and chains of
``n`` two-switch segments (``v2, -v1, v2``) passing through intermediate
turning points ``(beta_i, 0)``.  Each two-switch segment dips towards
``x1 = 0`` and uses the ``1/x1**3`` repulsion to pick up speed.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ._golden import golden_section
from .model import InfeasibleSpecError, ProblemSpec
from .simulator import _write_csv, propagate_constant

log = logging.getLogger(__name__)

_ROUND = 1e-12


@dataclass(frozen=True)
class Schedule:
    """Ordered ``(duration, u)`` segments between the boundary jumps."""

    segments: tuple = ()

    def __post_init__(self):
        segs = tuple((float(d), float(u)) for d, u in self.segments)
        object.__setattr__(self, "segments", segs)
        for i, (d, _) in enumerate(segs):
            if not d > 0:
                raise ValueError(f"segment {i} has non-positive duration {d}")
        for i in range(1, len(segs)):
            if segs[i][1] == segs[i - 1][1]:
                raise ValueError(f"segments {i - 1} and {i} carry the same control {segs[i][1]}")

    @property
    def total_time(self) -> float:
        return math.fsum(d for d, _ in self.segments)

    @property
    def durations(self):
        return [d for d, _ in self.segments]

    @property
    def controls(self):
        return [u for _, u in self.segments]

    @property
    def switchings(self) -> int:
        return max(len(self.segments) - 1, 0)

    def check_bounds(self, spec: ProblemSpec):
        for i, (_, u) in enumerate(self.segments):
            if u not in (-spec.v1, spec.v2):
                raise ValueError(f"segment {i} control {u} is not a bang value of {spec}")

    def to_csv(self, path_or_file):
        rows = [[str(i), f"{d:.17g}", f"{u:.17g}"] for i, (d, u) in enumerate(self.segments)]
        _write_csv(path_or_file, ["segment_index", "duration", "u"], rows)


def _merged(segments):
    out = []
    for d, u in segments:
        if d <= 0:
            continue
        if out and out[-1][1] == u:
            out[-1] = (out[-1][0] + d, u)
        else:
            out.append((d, u))
    return Schedule(tuple(out))


@dataclass
class MultiSwitchPlan:
    """A schedule together with its turning points ``1 = beta_0 < ... < beta_n = gamma``."""

    betas: tuple
    schedule: Schedule
    strategy: str = "multi"
    diagnostics: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.betas) - 1

    @property
    def total_time(self) -> float:
        return self.schedule.total_time


# closed forms ---------------------------------------------------------------


def _radicand(value, label, upper=None):
    if value < -_ROUND:
        raise InfeasibleSpecError(f"{label}: radicand {value:.6g} < 0")
    if upper is not None and value > upper + _ROUND:
        raise InfeasibleSpecError(f"{label}: arcsine argument squared {value:.12g} > 1")
    value = max(value, 0.0)
    return min(value, upper) if upper is not None else value


def meeting_point(spec: ProblemSpec) -> float:
    """``x1`` where the ``-v1`` arc from ``(1, 0)`` meets the ``v2`` arc into ``(gamma, 0)``."""
    v1, v2, g = spec.v1, spec.v2, spec.gamma
    g2 = g * g
    return math.sqrt((g2 * v1 + 1 + g2 * (g2 * v2 - 1)) / (g2 * (v1 + v2)))


def one_switch(spec: ProblemSpec) -> Schedule:
    """``-v1`` until the meeting point, then ``v2`` into the target."""
    v1, v2, g = spec.v1, spec.v2, spec.gamma
    if g == 1:
        return Schedule()
    g2 = g * g
    if g2 * v2 <= 1:
        raise InfeasibleSpecError(f"one switch needs gamma**2 * v2 > 1, got {g2 * v2:.6g}")
    r1 = _radicand(v1 * (g2 - 1) * (g2 * v2 - 1) / (g2 * (v1 + v2) * (v1 + 1)), "one-switch t1")
    r2 = _radicand(
        v2 * (g2 - 1) * (g2 * v1 + 1) / ((v1 + v2) * (g2 * g2 * v2 - 1)), "one-switch t2", upper=1.0
    )
    t1 = math.asinh(math.sqrt(r1)) / math.sqrt(v1)
    t2 = math.asin(math.sqrt(r2)) / math.sqrt(v2)
    return Schedule(((t1, -v1), (t2, v2)))


def two_switch_intuitive(spec: ProblemSpec) -> Schedule:
    """Quarter period of ``v2`` down to the apex, then ``-v1`` and ``v2`` into the target."""
    v1, v2, g = spec.v1, spec.v2, spec.gamma
    if g <= 1:
        raise InfeasibleSpecError("two-switch plan needs gamma > 1")
    g2 = g * g
    t1 = 0.5 * math.pi / math.sqrt(v2)
    r2 = _radicand(
        v1 * v2 * (g2 - 1) * (g2 * v2 - 1) / (g2 * (v1 + v2) * (v1 + v2 * v2)), "two-switch t2"
    )
    r3 = _radicand(
        (g2 * v2 - 1) * (v2 + g2 * v1) / ((v1 + v2) * (g2 * g2 * v2 - 1)), "two-switch t3", upper=1.0
    )
    t2 = math.asinh(math.sqrt(r2)) / math.sqrt(v1)
    t3 = math.asin(math.sqrt(r3)) / math.sqrt(v2)
    return Schedule(((t1, v2), (t2, -v1), (t3, v2)))


def transfer_times(alpha, beta, v1, v2):
    """Durations of the ``-v1`` then ``v2`` arcs from ``(alpha, 0)`` to ``(beta, 0)``."""
    a2, b2 = alpha * alpha, beta * beta
    if not beta > alpha > 0:
        raise InfeasibleSpecError(f"transfer needs 0 < alpha < beta, got alpha={alpha}, beta={beta}")
    if b2 * b2 * v2 <= 1:
        raise InfeasibleSpecError(f"(beta, 0) is not a v2 turning point: beta**4 * v2 = {b2 * b2 * v2:.6g} <= 1")
    r1 = _radicand(
        v1 * (b2 - a2) * (a2 * b2 * v2 - 1) / (b2 * (v1 + v2) * (a2 * a2 * v1 + 1)),
        "transfer t1 (needs alpha**2 * beta**2 * v2 >= 1)",
    )
    r2 = _radicand(
        v2 * (b2 - a2) * (a2 * b2 * v1 + 1) / (a2 * (v1 + v2) * (b2 * b2 * v2 - 1)),
        "transfer t2",
        upper=1.0,
    )
    return math.asinh(math.sqrt(r1)) / math.sqrt(v1), math.asin(math.sqrt(r2)) / math.sqrt(v2)


def segment_time(beta_prev, beta_next, spec: ProblemSpec) -> float:
    """Exact time of one two-switch segment from ``(beta_prev, 0)`` to ``(beta_next, 0)``."""
    if not 1 <= beta_prev < beta_next:
        raise InfeasibleSpecError(f"segment needs 1 <= beta_prev < beta_next, got {beta_prev}, {beta_next}")
    alpha = 1.0 / (beta_prev * math.sqrt(spec.v2))
    t1, t2 = transfer_times(alpha, beta_next, spec.v1, spec.v2)
    return t1 + t2 + 0.5 * math.pi / math.sqrt(spec.v2)


def segment_time_limit(beta_prev, beta_next, v2) -> float:
    """Leading behaviour of :func:`segment_time` as ``v2 -> inf``."""
    r = beta_next / beta_prev
    return (0.5 * math.pi + math.sqrt(r * r - 1) + math.asin(1 / r)) / math.sqrt(v2)


def _check_betas(betas, gamma):
    betas = [float(b) for b in betas]
    if len(betas) < 2:
        raise ValueError("need at least two turning points")
    if not math.isclose(betas[0], 1.0, rel_tol=1e-12) or not math.isclose(betas[-1], gamma, rel_tol=1e-12):
        raise ValueError(f"turning points must run from 1 to gamma={gamma}, got {betas[0]}..{betas[-1]}")
    if any(b <= a for a, b in zip(betas, betas[1:])):
        raise ValueError(f"turning points must be strictly increasing: {betas}")
    betas[0], betas[-1] = 1.0, float(gamma)
    return betas


def multi_switch(spec: ProblemSpec, betas) -> MultiSwitchPlan:
    """Chain of two-switch segments through ``(beta_i, 0)``; ``2n`` interior switchings."""
    betas = _check_betas(betas, spec.gamma)
    quarter = 0.5 * math.pi / math.sqrt(spec.v2)
    segs = []
    for b0, b1 in zip(betas, betas[1:]):
        t1, t2 = transfer_times(1.0 / (b0 * math.sqrt(spec.v2)), b1, spec.v1, spec.v2)
        segs += [(quarter, spec.v2), (t1, -spec.v1), (t2, spec.v2)]
    return MultiSwitchPlan(tuple(betas), _merged(segs), strategy=f"multi:{len(betas) - 1}")


def multi_switch_time(spec: ProblemSpec, betas) -> float:
    betas = _check_betas(betas, spec.gamma)
    return math.fsum(segment_time(a, b, spec) for a, b in zip(betas, betas[1:]))


def optimal_betas_asymptotic(gamma, n):
    """Geometric turning points ``gamma**(i/n)``, optimal as ``v2 -> inf``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return [1.0] + [gamma ** (i / n) for i in range(1, n)] + [float(gamma)]


def asymptotic_min_time(gamma, n, v2):
    """Large-``v2`` minimum time of the ``2n``-switch strategy."""
    r = gamma ** (1.0 / n)
    return n / math.sqrt(v2) * (0.5 * math.pi + math.sqrt(r * r - 1) + math.asin(1 / r))


def refine_betas(spec: ProblemSpec, n, tol=1e-10, max_sweeps=100):
    """Cyclic coordinate descent on ``log beta_i`` with exact segment times."""
    betas = optimal_betas_asymptotic(spec.gamma, n)
    if n == 1:
        return betas

    def local_cost(i, z):
        b = math.exp(z)
        try:
            return segment_time(betas[i - 1], b, spec) + segment_time(b, betas[i + 1], spec)
        except InfeasibleSpecError:
            return math.inf

    for _ in range(max_sweeps):
        moved = 0.0
        for i in range(1, n):
            lo, hi = math.log(betas[i - 1]), math.log(betas[i + 1])
            pad = 1e-9 * (hi - lo)
            z, _ = golden_section(lambda z: local_cost(i, z), lo + pad, hi - pad, tol=tol)
            moved = max(moved, abs(z - math.log(betas[i])))
            betas[i] = math.exp(z)
        if moved < tol:
            break
    return betas


# numerically optimized two-switch plan ---------------------------------------------


def _connect(state, beta, v1, v2):
    """Durations of ``-v1`` then ``v2`` arcs from ``state`` into ``(beta, 0)``, or None.

    On a constant-``u`` arc ``y = x1**2`` obeys ``y'' = 2c - 4uy``.  For
    ``u = -v1`` this is ``y = y_p + R cosh(2 sqrt(v1) (t - t*))`` around the
    turning time ``t*``; for ``u = v2`` it is ``y = y_p + R cos(2 sqrt(v2) tau)``
    with ``tau`` the time left before reaching ``beta``.
    """
    x1, x2 = state
    ca = x2 * x2 - v1 * x1 * x1 + 1 / (x1 * x1)
    cb = v2 * beta * beta + 1 / (beta * beta)
    yB = (cb - ca) / (v1 + v2)
    if yB <= 0 or v2 * beta**4 <= 1:
        return None
    if cb - v2 * yB - 1 / yB < -_ROUND:
        return None
    k = 2 * math.sqrt(v1)
    yp = -ca / (2 * v1)
    R = math.sqrt(ca * ca + 4 * v1) / (2 * v1)
    sP = math.acosh(max(1.0, (x1 * x1 - yp) / R))
    sB = math.acosh(max(1.0, (yB - yp) / R))
    ta = (sB + sP) / k if x2 < 0 else (sB - sP) / k
    if ta < -_ROUND:
        return None
    k2 = 2 * math.sqrt(v2)
    yp2 = cb / (2 * v2)
    R2 = (v2 * beta**4 - 1) / (2 * v2 * beta * beta)
    tb = math.acos(min(1.0, max(-1.0, (yB - yp2) / R2))) / k2
    return max(ta, 0.0), tb


def two_switch_cost(spec: ProblemSpec, t1) -> float:
    """Total time when ``v2`` is held for ``t1`` before the ``-v1``/``v2`` finish."""
    state = propagate_constant((1.0, 0.0), spec.v2, t1) if t1 > 0 else (1.0, 0.0)
    arcs = _connect(state, spec.gamma, spec.v1, spec.v2)
    return math.inf if arcs is None else t1 + arcs[0] + arcs[1]


def optimal_first_duration(spec: ProblemSpec, tol=1e-8, grid=64):
    """Best ``t1`` in ``[0, pi/(2 sqrt(v2))]`` and its total time.

    The cost has an interior maximum, so a coarse grid picks the basin before
    golden-section refinement.
    """
    quarter = 0.5 * math.pi / math.sqrt(spec.v2)
    ts = np.linspace(0.0, quarter, grid + 1)
    costs = [two_switch_cost(spec, t) for t in ts]
    i = int(np.argmin(costs))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, grid)]
    t1, cost = golden_section(lambda t: two_switch_cost(spec, t), lo, hi, tol=tol)
    if costs[i] < cost:
        t1, cost = ts[i], costs[i]
    return float(t1), float(cost)


def two_switch_optimal(spec: ProblemSpec, tol=1e-8) -> Schedule:
    """Two-switch plan with numerically optimized first duration; falls back to one switch."""
    if spec.gamma == 1:
        return Schedule()
    t1, _ = optimal_first_duration(spec, tol=tol)
    if t1 == 0:
        return one_switch(spec)
    state = propagate_constant((1.0, 0.0), spec.v2, t1)
    ta, tb = _connect(state, spec.gamma, spec.v1, spec.v2)
    return _merged([(t1, spec.v2), (ta, -spec.v1), (tb, spec.v2)])


def best_plan(spec: ProblemSpec, n_max=3) -> MultiSwitchPlan:
    """Fastest of one switch, optimized two switch and ``2n``-switch chains for ``n <= n_max``."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    diagnostics = []
    candidates = []
    ends = (1.0, spec.gamma)
    for label, planner in (("one", one_switch), ("two-optimal", two_switch_optimal)):
        try:
            candidates.append(MultiSwitchPlan(ends, planner(spec), strategy=label))
        except InfeasibleSpecError as exc:
            diagnostics.append(f"{label}: {exc}")
    for n in range(1, n_max + 1):
        try:
            plan = multi_switch(spec, refine_betas(spec, n))
        except InfeasibleSpecError as exc:
            diagnostics.append(f"multi:{n}: {exc}")
            continue
        candidates.append(plan)
    for msg in diagnostics:
        log.info("best_plan skipped %s", msg)
    if not candidates:
        raise InfeasibleSpecError(f"no feasible plan for {spec}: {diagnostics}")
    best = min(candidates, key=lambda p: p.total_time)
    best.diagnostics = diagnostics
    return best


# strategies and thresholds ------------------------------------------------------


def plan_strategy(spec: ProblemSpec, strategy: str) -> MultiSwitchPlan:
    """Run a named strategy: ``one``, ``two-intuitive``, ``two-optimal``,
    ``multi:n`` (geometric turning points), ``multi-opt:n`` or ``best:n``."""
    name, _, arg = strategy.partition(":")
    ends = (1.0, spec.gamma)
    if name == "one":
        return MultiSwitchPlan(ends, one_switch(spec), strategy=strategy)
    if name == "two-intuitive":
        return MultiSwitchPlan(ends, two_switch_intuitive(spec), strategy=strategy)
    if name == "two-optimal":
        return MultiSwitchPlan(ends, two_switch_optimal(spec), strategy=strategy)
    if name in ("multi", "multi-opt", "best"):
        try:
            n = int(arg)
        except ValueError:
            raise ValueError(f"strategy {strategy!r} needs an integer, e.g. {name}:2") from None
        if name == "best":
            return best_plan(spec, n)
        betas = optimal_betas_asymptotic(spec.gamma, n) if name == "multi" else refine_betas(spec, n)
        plan = multi_switch(spec, betas)
        plan.strategy = strategy
        return plan
    raise ValueError(f"unknown strategy {strategy!r}")


def strategy_time(strategy: str):
    """Callable ``spec -> total time`` for a named strategy."""
    name, _, arg = strategy.partition(":")
    if name == "multi":
        return lambda spec: multi_switch_time(spec, optimal_betas_asymptotic(spec.gamma, int(arg)))
    return lambda spec: plan_strategy(spec, strategy).total_time


class BracketError(ValueError):
    pass


def crossing_threshold(time_a, time_b, v1, gamma, lo, hi, xtol=1e-9):
    """Value of ``v2`` in ``[lo, hi]`` where strategy B starts to beat strategy A.

    Bisection on the sign of ``time_a - time_b``; a tie counts as A not beaten,
    so planners that contain A as a special case work too.
    """
    if isinstance(time_a, str):
        time_a = strategy_time(time_a)
    if isinstance(time_b, str):
        time_b = strategy_time(time_b)

    def b_faster(v2):
        spec = ProblemSpec(v1, v2, gamma)
        return time_a(spec) - time_b(spec) > 0

    f_lo, f_hi = b_faster(lo), b_faster(hi)
    if f_lo == f_hi:
        raise BracketError(f"no change of the faster strategy on v2 in [{lo}, {hi}]")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if b_faster(mid) == f_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# plan documents -------------------------------------------------------------


def plan_document(spec: ProblemSpec, plan) -> dict:
    schedule = plan.schedule if isinstance(plan, MultiSwitchPlan) else plan
    doc = {
        "spec": spec.to_dict(),
        "segments": [{"duration": d, "u": u} for d, u in schedule.segments],
        "total_time": schedule.total_time,
    }
    if isinstance(plan, MultiSwitchPlan):
        doc["strategy"] = plan.strategy
        doc["betas"] = list(plan.betas)
    return doc


def plan_to_json(spec: ProblemSpec, plan) -> str:
    return json.dumps(plan_document(spec, plan), indent=2)


def plan_from_json(text: str):
    """Inverse of :func:`plan_to_json`; returns ``(spec, schedule)``."""
    doc = json.loads(text)
    spec = ProblemSpec.from_dict(doc["spec"])
    return spec, Schedule(tuple((s["duration"], s["u"]) for s in doc["segments"]))
