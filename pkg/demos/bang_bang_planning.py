"""Plan a fast trap expansion with bang-bang controls and check it by simulation.

The trap starts at frequency omega_0 (u = 1) and must end at a frequency
gamma**2 times lower with the cloud at rest.  The control u(t) may range over
[-v1, v2]; negative values mean a briefly expulsive trap.

Run:  python demos/bang_bang_planning.py [--v1 1] [--gamma 10]
"""

import argparse
import math

from trapcool.bangbang import (
    best_plan,
    meeting_point,
    one_switch,
    two_switch_intuitive,
    two_switch_optimal,
)
from trapcool.model import ProblemSpec
from trapcool.simulator import simulate_schedule, verify


def describe(name, spec, schedule):
    report = verify(simulate_schedule(spec, schedule), spec)
    arcs = "  ".join(f"{d:.4f}@{u:+g}" for d, u in schedule.segments)
    print(f"  {name:<14} t_f={schedule.total_time:.6f}  arcs: {arcs}")
    print(f"  {'':<14} endpoint error {max(report.endpoint_error):.1e}, feasible={report.feasible}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--v1", type=float, default=1.0)
    parser.add_argument("--gamma", type=float, default=10.0)
    args = parser.parse_args()

    for v2 in (3.0, 8.0):
        spec = ProblemSpec(args.v1, v2, args.gamma)
        print(f"\nv1={spec.v1:g}, v2={v2:g}, gamma={spec.gamma:g}")

        # One switch: expel at -v1 until the v2 arc through the target is met.
        print(f"  meeting point x1_B = {meeting_point(spec):.6f}")
        describe("one switch", spec, one_switch(spec))

        # Two switches: dive towards x1 = 0 first and let 1/x1**3 fling the cloud out.
        describe("two (apex)", spec, two_switch_intuitive(spec))
        describe("two (optimal)", spec, two_switch_optimal(spec))

        best = best_plan(spec, 3)
        print(f"  best of all considered policies: {best.strategy}, t_f={best.total_time:.6f}")

    print(f"\nlarge-v2 one-switch limit: {math.asinh(math.sqrt((args.gamma**2 - 1) / 2)):.6f}")


if __name__ == "__main__":
    main()
