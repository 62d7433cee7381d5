"""Smooth minimum-time controls from Legendre pseudospectral collocation.

Without a rate limit the collocated control reproduces the bang-bang answer up
to discretization.  With |du/dtau| <= M the control ramps between its bounds
and the transfer takes longer.  Each solve takes up to a minute at N=24.
"""

import argparse

from trapcool.bangbang import best_plan
from trapcool.collocation import collocate, resimulate
from trapcool.model import ProblemSpec


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--v2", type=float, default=3.0)
    parser.add_argument("--N", type=int, default=16)
    args = parser.parse_args()

    spec = ProblemSpec(1.0, args.v2, 10.0)
    bound = best_plan(spec, 3)
    print(f"best bang-bang plan: {bound.strategy}, t_f={bound.total_time:.6f}")

    for M in (None, 10.0):
        sol = collocate(spec, args.N, M)
        end = resimulate(sol).endpoint
        label = "unbounded" if M is None else f"{M:g}"
        print(f"\nM={label}: t_f={sol.t_f:.6f} ({100 * (sol.t_f / bound.total_time - 1):+.2f}% vs bang-bang)")
        print(f"  converged={sol.converged} residual={sol.residual:.1e} start={sol.seed}")
        print(f"  resimulated endpoint ({end.x1:.6f}, {end.x2:.2e})")
        print("   t        x1        u")
        for t, x1, u in zip(sol.times[::2], sol.x1[::2], sol.u[::2]):
            print(f"  {t:6.3f}  {x1:8.4f}  {u:+8.4f}")


if __name__ == "__main__":
    main()
