"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 infeasible spec or failed
verification, 3 collocation did not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .bangbang import plan_from_json, plan_strategy, plan_to_json, strategy_time
from .collocation import collocate
from .lgl import runge_demo
from .model import DomainError, InfeasibleSpecError, ProblemSpec
from .reproduce import CASES, reproduce
from .simulator import simulate_schedule, verify

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NONCONVERGED = 0, 1, 2, 3

COMMANDS = ("plan", "simulate", "collocate", "sweep", "runge-demo", "reproduce")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    spec: ProblemSpec | None = None
    strategy: str = "best:3"
    N: int = 24
    M: float | None = None
    steps: int = 50
    output_path: str | None = None
    format: str = "json"
    jobs: int = 1
    v2_range: str | None = None
    strategies: str = "one,two-optimal,multi:2"
    plan_path: str | None = None
    cases: tuple = ()
    v1: float | None = None
    gamma: float | None = None


def parse_range(text):
    """``start:stop:step`` grid; the last point must lie within half a step of ``stop``."""
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise UsageError(f"range must be start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError(f"empty or backwards range {text!r}")
    count = int(math.floor((stop - start) / step + 0.5))
    return [start + k * step for k in range(count + 1)]


def _parse_M(text):
    if text is None or text.lower() in ("inf", "none", "unbounded"):
        return None
    value = float(text)
    return None if math.isinf(value) else value


def build_parser():
    parser = _Parser(prog="trapcool", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("cases", nargs="*", help="case ids for reproduce (default: all)")
    parser.add_argument("--config", help="JSON file mirroring the command-line options")
    parser.add_argument("--v1", type=float)
    parser.add_argument("--v2", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--strategy")
    parser.add_argument("--strategies", help="comma-separated strategies for sweep")
    parser.add_argument("--N", type=int)
    parser.add_argument("--M", help="slope limit; 'inf' for none")
    parser.add_argument("--steps", type=int, help="samples per segment for simulate")
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--v2-range", dest="v2_range")
    parser.add_argument("--plan", dest="plan_path", help="plan JSON for simulate ('-' for stdin)")
    return parser


_CONFIG_KEYS = {"v1", "v2", "gamma", "strategy", "strategies", "N", "M", "steps", "out", "format", "jobs", "v2_range", "plan"}


def make_config(argv) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        doc.pop("command", None)
        unknown = set(doc) - _CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(doc)
    for key in ("v1", "v2", "gamma", "strategy", "strategies", "N", "M", "steps", "format", "jobs", "v2_range"):
        if getattr(args, key) is not None:
            values[key] = getattr(args, key)
    if args.out is not None:
        values["out"] = args.out
    if args.plan_path is not None:
        values["plan"] = args.plan_path

    cfg = RunConfig(args.command, cases=tuple(args.cases))
    for key in ("strategy", "strategies", "v2_range"):
        if key in values:
            setattr(cfg, key, str(values[key]))
    for key in ("N", "steps", "jobs"):
        if key in values:
            setattr(cfg, key, int(values[key]))
    cfg.M = _parse_M(None if values.get("M") is None else str(values["M"]))
    cfg.output_path = values.get("out")
    cfg.plan_path = values.get("plan")
    cfg.format = values.get("format", "csv" if cfg.command in ("simulate", "collocate", "sweep", "runge-demo") else "json")
    _validate(cfg, values)
    return cfg


def _validate(cfg, values):
    if cfg.cases and cfg.command != "reproduce":
        raise UsageError(f"unexpected positional arguments {list(cfg.cases)}")
    need = {
        "plan": ("v1", "v2", "gamma"),
        "collocate": ("v1", "v2", "gamma"),
        "sweep": ("v1", "gamma", "v2_range"),
        "simulate": () if cfg.plan_path else ("v1", "v2", "gamma"),
    }.get(cfg.command, ())
    missing = [k for k in need if k not in values]
    if missing:
        raise UsageError(f"{cfg.command} needs --{', --'.join(m.replace('_', '-') for m in missing)}")
    if cfg.command in ("plan", "collocate", "simulate") and "v1" in values:
        try:
            cfg.spec = ProblemSpec(values["v1"], values["v2"], values["gamma"])
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc)) from None
    if cfg.command == "sweep":
        cfg.v1, cfg.gamma = float(values["v1"]), float(values["gamma"])
        if cfg.jobs < 1:
            raise UsageError("--jobs must be >= 1")
    for case in cfg.cases:
        if case not in CASES and case != "all":
            raise UsageError(f"unknown case {case!r}; choose from {', '.join(CASES)}")
    if cfg.command == "runge-demo" and cfg.N < 4:
        raise UsageError("runge-demo needs --N >= 4")


def _emit(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_plan(cfg):
    plan = plan_strategy(cfg.spec, cfg.strategy)
    if cfg.format == "csv":
        buf = io.StringIO()
        plan.schedule.to_csv(buf)
        _emit(buf.getvalue(), cfg.output_path)
    else:
        _emit(plan_to_json(cfg.spec, plan) + "\n", cfg.output_path)
    print(f"total_time {plan.total_time:.6f} ({plan.strategy})", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(cfg):
    if cfg.plan_path:
        text = sys.stdin.read() if cfg.plan_path == "-" else open(cfg.plan_path).read()
        spec, schedule = plan_from_json(text)
    else:
        spec = cfg.spec
        schedule = plan_strategy(spec, cfg.strategy).schedule
    traj = simulate_schedule(spec, schedule, samples_per_segment=cfg.steps)
    buf = io.StringIO()
    traj.to_csv(buf)
    _emit(buf.getvalue(), cfg.output_path)
    report = verify(traj, spec)
    print(
        f"endpoint_error {report.endpoint_error[0]:.3g} {report.endpoint_error[1]:.3g} "
        f"invariant_drift {report.max_invariant_drift:.3g} feasible {report.feasible}",
        file=sys.stderr,
    )
    for msg in report.violations:
        print(f"violation: {msg}", file=sys.stderr)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_collocate(cfg):
    sol = collocate(cfg.spec, cfg.N, cfg.M)
    if cfg.format == "json":
        _emit(sol.to_json() + "\n", cfg.output_path)
    else:
        buf = io.StringIO()
        sol.to_csv(buf)
        _emit(buf.getvalue(), cfg.output_path)
        if cfg.output_path:
            with open(cfg.output_path + ".json", "w") as fh:
                fh.write(sol.to_json() + "\n")
    print(f"t_f {sol.t_f:.6f} residual {sol.residual:.3g} converged {sol.converged}", file=sys.stderr)
    return EXIT_OK if sol.converged else EXIT_NONCONVERGED


def _sweep_point(args):
    v1, v2, gamma, strategies = args
    spec = ProblemSpec(v1, v2, gamma)
    row = [v2]
    for name in strategies:
        try:
            row.append(strategy_time(name)(spec))
        except (InfeasibleSpecError, DomainError):
            row.append(math.nan)
    return row


def cmd_sweep(cfg):
    v1, gamma = cfg.v1, cfg.gamma
    strategies = [s for s in cfg.strategies.split(",") if s]
    for name in strategies:
        plan_strategy(ProblemSpec(1.0, 2.0, 2.0), name)  # validates the name
    tasks = [(v1, v2, gamma, strategies) for v2 in parse_range(cfg.v2_range)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks, chunksize=16))
    else:
        rows = [_sweep_point(t) for t in tasks]
    rows.sort(key=lambda r: r[0])
    text = _csv_text(["v2"] + strategies, [[f"{v:.17g}" for v in row] for row in rows])
    _emit(text, cfg.output_path)
    return EXIT_OK


def cmd_runge(cfg):
    row = runge_demo(cfg.N)
    text = _csv_text(
        ["N", "error_uniform", "error_lgl", "ratio"],
        [[str(row.N), f"{row.error_uniform:.17g}", f"{row.error_lgl:.17g}", f"{row.ratio:.17g}"]],
    )
    _emit(text, cfg.output_path)
    return EXIT_OK


def cmd_reproduce(cfg):
    ids = list(CASES) if not cfg.cases or "all" in cfg.cases else list(cfg.cases)
    results = [reproduce(case) for case in ids]
    lines = [r.line() for r in results]
    _emit("\n".join(lines) + "\n", cfg.output_path)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NONCONVERGED


def run(argv) -> int:
    try:
        cfg = make_config(argv)
        handler = {
            "plan": cmd_plan,
            "simulate": cmd_simulate,
            "collocate": cmd_collocate,
            "sweep": cmd_sweep,
            "runge-demo": cmd_runge,
            "reproduce": cmd_reproduce,
        }[cfg.command]
        return handler(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleSpecError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
