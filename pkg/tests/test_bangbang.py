import io
import json
import math

import numpy as np
import pytest

from trapcool.bangbang import (
    BracketError,
    MultiSwitchPlan,
    Schedule,
    asymptotic_min_time,
    best_plan,
    crossing_threshold,
    meeting_point,
    multi_switch,
    multi_switch_time,
    one_switch,
    optimal_betas_asymptotic,
    optimal_first_duration,
    plan_from_json,
    plan_strategy,
    plan_to_json,
    refine_betas,
    segment_time,
    segment_time_limit,
    strategy_time,
    transfer_times,
    two_switch_cost,
    two_switch_intuitive,
    two_switch_optimal,
)
from trapcool.model import InfeasibleSpecError, ProblemSpec, segment_invariant
from trapcool.simulator import propagate_constant, simulate_schedule, verify

SPEC3 = ProblemSpec(1, 3, 10)
SPEC8 = ProblemSpec(1, 8, 10)

# Extended-precision evaluations of the closed forms (mpmath, 30 digits).
ONE_SWITCH_3 = (2.505312091214777851, 0.302288782434071972)
INTUITIVE_8 = (0.555360367269795781, 1.906066218671311105, 0.124985738635105689)
# Shooting oracle: solve_ivp at rtol 1e-12 plus fsolve on the arc durations.
OPTIMAL_8_T1 = 0.53630959
OPTIMAL_8_TOTAL = 2.585087922964677


def endpoint(spec, schedule):
    state = (1.0, 0.0)
    for d, u in schedule.segments:
        state = propagate_constant(state, u, d)
    return state


class TestMeetingPoint:
    def test_example(self):
        assert meeting_point(SPEC3) == pytest.approx(math.sqrt(30001 / 400), rel=1e-15)
        assert meeting_point(SPEC3) == pytest.approx(8.66039837420889, rel=1e-14)

    def test_is_arc_intersection(self):
        x = meeting_point(SPEC3)
        # x2**2 on the -v1 arc from (1,0) and on the v2 arc into (gamma,0)
        left = segment_invariant((1.0, 0.0), -1.0) + x * x - 1 / x**2
        right = segment_invariant((10.0, 0.0), 3.0) - 3 * x * x - 1 / x**2
        assert left == pytest.approx(right, rel=1e-13)

    def test_trivial_target(self):
        assert meeting_point(ProblemSpec(1, 3, 1)) == 1.0

    @pytest.mark.parametrize("v", [1.0, 4.0])
    def test_large_gamma_asymptote(self, v):
        spec = ProblemSpec(v, v, 1e6)
        ratio = meeting_point(spec) / (spec.gamma * math.sqrt(spec.v2 / (spec.v1 + spec.v2)))
        assert ratio == pytest.approx(1.0, abs=1e-9)


class TestOneSwitch:
    def test_example(self):
        plan = one_switch(SPEC3)
        np.testing.assert_allclose(plan.durations, ONE_SWITCH_3, rtol=1e-14)
        assert plan.controls == [-1.0, 3.0]
        assert plan.total_time == pytest.approx(2.807600873648849823, rel=1e-14)

    def test_reaches_target(self):
        np.testing.assert_allclose(endpoint(SPEC3, one_switch(SPEC3)), (10, 0), atol=1e-9)

    def test_trivial_target(self):
        assert one_switch(ProblemSpec(1, 3, 1)).segments == ()
        plan = one_switch(ProblemSpec(1, 3, 1 + 1e-9))
        assert plan.total_time < 1e-3

    def test_large_v2_limit(self):
        limit = math.asinh(math.sqrt(99 / 2))
        assert limit == pytest.approx(2.649146182805242, rel=1e-14)
        assert one_switch(ProblemSpec(1, 1e12, 10)).total_time == pytest.approx(limit, rel=1e-5)

    def test_monotone_in_v2_and_gamma(self):
        times = [one_switch(ProblemSpec(1, v2, 10)).total_time for v2 in np.linspace(1, 60, 60)]
        assert np.all(np.diff(times) < 0)
        times = [one_switch(ProblemSpec(1, 3, g)).total_time for g in np.linspace(1.1, 60, 60)]
        assert np.all(np.diff(times) > 0)


class TestTwoSwitchIntuitive:
    def test_example(self):
        plan = two_switch_intuitive(SPEC8)
        np.testing.assert_allclose(plan.durations, INTUITIVE_8, rtol=1e-14)
        assert plan.durations[0] == pytest.approx(math.pi / (2 * math.sqrt(8)), rel=1e-15)
        assert plan.total_time == pytest.approx(2.586412324576212575, rel=1e-14)
        assert plan.controls == [8.0, -1.0, 8.0]

    def test_reaches_target(self):
        np.testing.assert_allclose(endpoint(SPEC8, two_switch_intuitive(SPEC8)), (10, 0), atol=1e-9)

    def test_vanishes_for_large_v2(self):
        times = [two_switch_intuitive(ProblemSpec(1, v2, 10)).total_time for v2 in (1e4, 1e6, 1e8)]
        assert times[0] > times[1] > times[2]
        assert times[2] < 2e-3

    def test_rejects_trivial_target(self):
        with pytest.raises(InfeasibleSpecError):
            two_switch_intuitive(ProblemSpec(1, 8, 1))


class TestTwoSwitchOptimal:
    def test_beats_intuitive(self):
        plan = two_switch_optimal(SPEC8)
        assert plan.total_time == pytest.approx(OPTIMAL_8_TOTAL, abs=1e-10)
        assert plan.durations[0] == pytest.approx(OPTIMAL_8_T1, abs=1e-7)
        # the first jump comes before the apex
        assert plan.durations[0] < math.pi / (2 * math.sqrt(8))
        assert plan.total_time < two_switch_intuitive(SPEC8).total_time
        np.testing.assert_allclose(endpoint(SPEC8, plan), (10, 0), atol=1e-9)

    def test_collapses_to_one_switch(self):
        t1, cost = optimal_first_duration(SPEC3)
        assert t1 == 0.0
        assert cost == pytest.approx(one_switch(SPEC3).total_time, rel=1e-13)
        assert two_switch_optimal(SPEC3) == one_switch(SPEC3)

    def test_cost_at_zero_is_one_switch(self):
        assert two_switch_cost(SPEC8, 0.0) == pytest.approx(one_switch(SPEC8).total_time, rel=1e-13)

    def test_cost_at_apex_is_intuitive(self):
        quarter = math.pi / (2 * math.sqrt(8))
        assert two_switch_cost(SPEC8, quarter) == pytest.approx(two_switch_intuitive(SPEC8).total_time, rel=1e-9)

    @pytest.mark.parametrize("v2", [2.0, 4.0, 6.5, 6.9, 8.0, 15.0, 40.0])
    def test_never_worse(self, v2):
        spec = ProblemSpec(1, v2, 10)
        opt = two_switch_optimal(spec).total_time
        assert opt <= min(one_switch(spec).total_time, two_switch_intuitive(spec).total_time) + 1e-8


class TestSegmentTimes:
    def test_single_segment_is_intuitive_plan(self):
        assert segment_time(1, 10, SPEC8) == pytest.approx(two_switch_intuitive(SPEC8).total_time, abs=1e-10)
        plan = multi_switch(SPEC8, [1, 10])
        np.testing.assert_allclose(plan.schedule.durations, two_switch_intuitive(SPEC8).durations, rtol=1e-12)

    def test_large_v2_limit(self):
        spec = ProblemSpec(1, 1e10, 10)
        for a, b in [(1, 10), (1, math.sqrt(10)), (2, 3)]:
            assert segment_time(a, b, spec) == pytest.approx(segment_time_limit(a, b, spec.v2), rel=1e-4)

    def test_rejects_degenerate(self):
        with pytest.raises(InfeasibleSpecError):
            segment_time(2, 2, SPEC8)
        with pytest.raises(InfeasibleSpecError):
            segment_time(0.5, 2, SPEC8)

    def test_infeasible_names_inequality(self):
        with pytest.raises(InfeasibleSpecError, match=r"beta\*\*4 \* v2"):
            transfer_times(0.5, 1.0, 1.0, 1.0)
        with pytest.raises(InfeasibleSpecError, match="alpha < beta"):
            transfer_times(2.0, 1.0, 1.0, 8.0)


class TestMultiSwitch:
    def test_two_segments(self):
        v2 = 1e8
        spec = ProblemSpec(1, v2, 10)
        plan = multi_switch(spec, [1, math.sqrt(10), 10])
        assert plan.n == 2
        assert plan.schedule.switchings == 4
        expected = 2 / math.sqrt(v2) * (math.pi / 2 + 3 + math.asin(10**-0.5))
        assert plan.total_time == pytest.approx(expected, rel=1e-4)

    def test_total_matches_segment_sum(self):
        betas = optimal_betas_asymptotic(10, 3)
        plan = multi_switch(SPEC8, betas)
        assert plan.total_time == pytest.approx(multi_switch_time(SPEC8, betas), rel=1e-13)

    def test_rejects_bad_betas(self):
        with pytest.raises(ValueError):
            multi_switch(SPEC8, [1, 5, 3, 10])
        with pytest.raises(ValueError):
            multi_switch(SPEC8, [1, 5])

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_reaches_target(self, n):
        spec = ProblemSpec(1, 50, 10)
        report = verify(simulate_schedule(spec, multi_switch(spec, optimal_betas_asymptotic(10, n)).schedule), spec)
        assert report.feasible, report.violations


class TestAsymptotics:
    def test_geometric_betas(self):
        np.testing.assert_allclose(optimal_betas_asymptotic(10, 2), [1, math.sqrt(10), 10], rtol=1e-15)
        assert optimal_betas_asymptotic(7.5, 1) == [1.0, 7.5]
        np.testing.assert_allclose(optimal_betas_asymptotic(10, 4), 10 ** (np.arange(5) / 4), rtol=1e-15)

    def test_min_time_value(self):
        assert asymptotic_min_time(10, 2, 1.0) == pytest.approx(9.785093762383077625, rel=1e-15)
        limit_sum = sum(segment_time_limit(a, b, 1.0) for a, b in [(1, math.sqrt(10)), (math.sqrt(10), 10)])
        assert asymptotic_min_time(10, 2, 1.0) == pytest.approx(limit_sum, rel=1e-14)

    def test_argmin(self):
        n10 = np.argmin([asymptotic_min_time(10, n, 1) for n in range(1, 11)]) + 1
        n50 = np.argmin([asymptotic_min_time(50, n, 1) for n in range(1, 11)]) + 1
        assert n10 == 2
        assert n50 > n10

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_exact_time_approaches_limit(self, n):
        spec = ProblemSpec(1, 1e6, 10)
        exact = multi_switch_time(spec, optimal_betas_asymptotic(10, n))
        assert exact == pytest.approx(asymptotic_min_time(10, n, 1e6), rel=1e-3)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_geometric_mean_is_stationary(self, n):
        betas = optimal_betas_asymptotic(10, n)
        base = sum(segment_time_limit(a, b, 1.0) for a, b in zip(betas, betas[1:]))
        for i in range(1, n):
            for f in (0.99, 1.01):
                trial = list(betas)
                trial[i] *= f
                cost = sum(segment_time_limit(a, b, 1.0) for a, b in zip(trial, trial[1:]))
                assert cost > base

    def test_equal_segment_times(self):
        betas = optimal_betas_asymptotic(10, 4)
        times = [segment_time_limit(a, b, 1.0) for a, b in zip(betas, betas[1:])]
        np.testing.assert_allclose(times, times[0], rtol=1e-13)

    def test_refined_betas_improve(self):
        spec = ProblemSpec(1, 20, 10)
        geo = multi_switch_time(spec, optimal_betas_asymptotic(10, 3))
        refined = refine_betas(spec, 3)
        assert multi_switch_time(spec, refined) <= geo
        assert all(b > a for a, b in zip(refined, refined[1:]))


class TestBestPlan:
    def test_four_switches_win_at_large_v2(self):
        plan = best_plan(ProblemSpec(1, 50, 10), 3)
        assert plan.strategy == "multi:2"
        assert plan.schedule.switchings == 4

    def test_one_switch_wins_at_small_v2(self):
        plan = best_plan(SPEC3, 3)
        assert plan.strategy == "one"
        assert plan.schedule == one_switch(SPEC3)

    def test_monotone_in_n_max(self):
        spec = ProblemSpec(1, 20, 10)
        times = [best_plan(spec, n).total_time for n in (1, 2, 3)]
        assert times[0] >= times[1] >= times[2]

    def test_skipped_strategies_are_reported(self, monkeypatch):
        import trapcool.bangbang as bb

        def refuse(spec):
            raise InfeasibleSpecError("refused")

        monkeypatch.setattr(bb, "two_switch_optimal", refuse)
        plan = best_plan(SPEC8, 2)
        assert plan.diagnostics == ["two-optimal: refused"]
        assert plan.strategy == "multi:1"

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            best_plan(SPEC3, 0)


class TestCrossings:
    def test_intuitive(self):
        v2 = crossing_threshold("one", "two-intuitive", 1, 10, 5, 10)
        assert v2 == pytest.approx(6.786030, abs=1e-5)
        spec = ProblemSpec(1, v2, 10)
        assert abs(one_switch(spec).total_time - two_switch_intuitive(spec).total_time) < 1e-6

    def test_optimal(self):
        v2 = crossing_threshold("one", "two-optimal", 1, 10, 5, 10)
        assert v2 == pytest.approx(6.765719, abs=1e-5)
        below = optimal_first_duration(ProblemSpec(1, v2 - 0.01, 10))[0]
        above = optimal_first_duration(ProblemSpec(1, v2 + 0.01, 10))[0]
        assert below < 1e-4
        assert above > 0.1

    def test_four_switches(self):
        v2 = crossing_threshold("multi:1", "multi:2", 1, 10, 20, 80)
        assert v2 == pytest.approx(43.31808, abs=1e-4)

    def test_no_sign_change(self):
        with pytest.raises(BracketError):
            crossing_threshold("one", "two-intuitive", 1, 10, 8, 10)


class TestSchedule:
    def test_invariants(self):
        with pytest.raises(ValueError):
            Schedule(((1.0, 3.0), (0.0, -1.0)))
        with pytest.raises(ValueError):
            Schedule(((1.0, 3.0), (1.0, 3.0)))

    def test_total_time(self):
        plan = two_switch_intuitive(SPEC8)
        assert plan.total_time == pytest.approx(sum(plan.durations), abs=1e-12)

    def test_check_bounds(self):
        one_switch(SPEC3).check_bounds(SPEC3)
        with pytest.raises(ValueError):
            Schedule(((1.0, 2.0),)).check_bounds(SPEC3)

    def test_csv(self):
        buf = io.StringIO()
        one_switch(SPEC3).to_csv(buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "segment_index,duration,u"
        assert lines[1].startswith("0,2.50531209121477")
        assert float(lines[2].split(",")[1]) == one_switch(SPEC3).durations[1]

    def test_json_roundtrip(self):
        plan = plan_strategy(SPEC8, "multi:2")
        doc = json.loads(plan_to_json(SPEC8, plan))
        assert doc["spec"] == {"v1": 1.0, "v2": 8.0, "gamma": 10.0}
        assert doc["strategy"] == "multi:2"
        spec, schedule = plan_from_json(plan_to_json(SPEC8, plan))
        assert spec == SPEC8
        assert schedule == plan.schedule


class TestStrategies:
    @pytest.mark.parametrize("name", ["one", "two-intuitive", "two-optimal", "multi:2", "multi-opt:2", "best:3"])
    def test_named(self, name):
        plan = plan_strategy(SPEC8, name)
        assert isinstance(plan, MultiSwitchPlan)
        assert strategy_time(name)(SPEC8) == pytest.approx(plan.total_time, rel=1e-12)

    @pytest.mark.parametrize("name", ["three", "multi:x", "multi"])
    def test_unknown(self, name):
        with pytest.raises(ValueError):
            plan_strategy(SPEC8, name)
