"""Command-line interface: ``fcit {plan,bench,summarize,gen}``.

Exit codes: 0 success, 2 parse error, 3 semantic error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from ..errors import ContractViolation, ProblemParseError, ProblemSemanticError
from ..planners import PLANNERS, PlannerSettings, PlanningAborted
from .problems import load_problem
from .runner import format_value, run_suite
from .suites import SUITES, generate, load_manifest, write_suite
from .summary import summarize

EXIT_OK, EXIT_PARSE, EXIT_SEMANTIC, EXIT_IO = 0, 2, 3, 4


def _positive(kind):
    def parse(text: str):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value

    return parse


def _add_settings_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--time", type=_positive(float), help="time budget per run in seconds")
    p.add_argument("--batch-size", type=_positive(int))
    p.add_argument("--max-batches", type=_positive(int), help="stop after this many batches")
    p.add_argument("--radius", type=_positive(float), help="connection radius for fcit-rdisc")
    p.add_argument("--resolution", type=_positive(float), help="motion-check resolution")
    p.add_argument("--sampler", choices=["pseudorandom", "halton"])
    p.add_argument(
        "--clock",
        choices=["wall", "work"],
        help="'work' measures time in deterministic work units so that reruns are byte-identical",
    )


def _overrides(args) -> dict:
    names = {
        "time": "time_budget",
        "batch_size": "batch_size",
        "max_batches": "max_batches",
        "radius": "radius",
        "resolution": "resolution",
        "sampler": "sampler",
        "clock": "clock",
    }
    return {field: getattr(args, flag) for flag, field in names.items() if getattr(args, flag) is not None}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fcit", description="FCIT* planning and benchmarking")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="solve one problem with one planner")
    p.add_argument("problem", type=Path)
    p.add_argument("--planner", choices=sorted(PLANNERS), default="fcit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, help="directory for trace.csv and path.csv")
    _add_settings_flags(p)

    b = sub.add_parser("bench", help="run a suite manifest")
    b.add_argument("manifest", type=Path)
    b.add_argument("--planner", action="append", choices=sorted(PLANNERS), help="repeatable; default: all planners")
    b.add_argument("--trials", type=_positive(int), help="override the manifest's trials per problem")
    b.add_argument("--seed", type=int, help="override the manifest's seed base")
    b.add_argument("--jobs", type=_positive(int), default=1, help="worker processes")
    b.add_argument("--out", type=Path, required=True)
    _add_settings_flags(b)

    s = sub.add_parser("summarize", help="summarize a records CSV")
    s.add_argument("records", type=Path)
    s.add_argument("--out", type=Path, help="summary CSV path (default: summary.csv next to the records)")

    g = sub.add_parser("gen", help="write built-in problem suites")
    g.add_argument("suites", nargs="+", choices=sorted(SUITES) + ["all"])
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--count", type=_positive(int), help="problems per suite")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--trials", type=_positive(int), default=5)
    g.add_argument("--time", type=_positive(float), default=1.0)
    return parser


def _cmd_plan(args) -> int:
    problem = load_problem(args.problem)
    settings = PlannerSettings(seed=args.seed, **_overrides(args))
    settings.check()
    try:
        result = PLANNERS[args.planner](problem, settings)
    except PlanningAborted as exc:
        result = exc.partial
        print(f"planner aborted: {exc}", file=sys.stderr)
    c = result.counters
    print(f"problem:   {problem.name}")
    print(f"planner:   {args.planner}")
    print(f"solved:    {format_value(result.solved)}")
    print(f"cost:      {format_value(result.cost)}")
    print(f"t_init_ms: {format_value(result.initial_time * 1000.0)}")
    print(f"batches:   {c.batches}  edges_validated: {c.edges_validated}  states_checked: {c.states_checked}")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        with (args.out / "trace.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t_ms", "cost"])
            w.writerows([format_value(t * 1000.0), format_value(cost)] for t, cost in result.trace)
        with (args.out / "path.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"q{i}" for i in range(problem.dim)])
            w.writerows([format_value(float(x)) for x in q] for q in result.path)
    return EXIT_OK


def _cmd_bench(args) -> int:
    manifest = load_manifest(args.manifest)
    if args.seed is not None:
        manifest.seed_base = args.seed
    overrides = _overrides(args)
    PlannerSettings(**overrides).check()
    planners = args.planner or list(PLANNERS)
    records = run_suite(manifest, planners, args.out, overrides, trials=args.trials, jobs=args.jobs)
    solved = sum(r.solved for r in records)
    print(f"{len(records)} trials, {solved} solved; wrote {args.out / 'records.csv'} and {args.out / 'trace.csv'}")
    return EXIT_OK


def _cmd_summarize(args) -> int:
    out = args.out if args.out is not None else args.records.parent / "summary.csv"
    _, table = summarize(args.records, out)
    print(table)
    return EXIT_OK


def _cmd_gen(args) -> int:
    names = list(SUITES) if "all" in args.suites else args.suites
    for name in names:
        problems = generate(name, args.count, args.seed)
        path = write_suite(name, problems, args.out / name, args.time, args.trials)
        print(f"{name}: {len(problems)} problems -> {path}")
    return EXIT_OK


COMMANDS = {"plan": _cmd_plan, "bench": _cmd_bench, "summarize": _cmd_summarize, "gen": _cmd_gen}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ProblemParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ProblemSemanticError, ContractViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
