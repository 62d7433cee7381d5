"""Where does each switching strategy take over?

Sweeps the upper bound v2 at fixed v1 and gamma, finds the values at which a
strategy with more switchings becomes faster, and compares exact multi-switch
times with their large-v2 asymptote.
"""

import numpy as np

from trapcool.bangbang import (
    asymptotic_min_time,
    crossing_threshold,
    multi_switch_time,
    optimal_betas_asymptotic,
    strategy_time,
)
from trapcool.model import ProblemSpec

V1, GAMMA = 1.0, 10.0

print("crossings (v2 above which B beats A):")
for a, b, lo, hi in [
    ("one", "two-intuitive", 5, 10),
    ("one", "two-optimal", 5, 10),
    ("multi:1", "multi:2", 20, 80),
]:
    print(f"  {a:>8} -> {b:<14} v2* = {crossing_threshold(a, b, V1, GAMMA, lo, hi):.5f}")

print("\nminimum times against v2:")
names = ["one", "two-optimal", "multi:2", "multi:3"]
print("   v2  " + "".join(f"{n:>13}" for n in names))
for v2 in (2, 5, 7, 10, 20, 40, 50, 100):
    spec = ProblemSpec(V1, v2, GAMMA)
    print(f"  {v2:>4}" + "".join(f"{strategy_time(n)(spec):13.6f}" for n in names))

print("\nasymptotic sqrt(v2) * t_f for 2n switchings:")
for gamma in (10.0, 50.0):
    times = [asymptotic_min_time(gamma, n, 1.0) for n in range(1, 11)]
    best = 1 + int(np.argmin(times))
    row = " ".join(f"{t:.3f}" for t in times[:6])
    print(f"  gamma={gamma:>4g}: n=1..6 -> {row} ...  best n={best}")

spec = ProblemSpec(V1, 1e6, GAMMA)
print("\nexact vs asymptotic at v2=1e6:")
for n in (1, 2, 3):
    exact = multi_switch_time(spec, optimal_betas_asymptotic(GAMMA, n))
    limit = asymptotic_min_time(GAMMA, n, spec.v2)
    print(f"  n={n}: exact={exact:.8f} asymptote={limit:.8f} rel diff={exact / limit - 1:.2e}")
