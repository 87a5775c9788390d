"""Seeded trial execution and CSV emission.

Outputs in the run directory:

``records.csv``
    suite, problem, planner, trial, seed, solved, t_init_ms, c_init,
    t_final_ms, c_final, edges_validated, states_checked, batches
``trace.csv``
    suite, problem, planner, trial, t_ms, cost (one row per incumbent improvement)
``errors.csv``
    suite, problem, planner, trial, error (only trials that raised)
``run.json``
    run metadata, including the wall-clock start time and duration

Everything except ``run.json`` is a pure function of the manifest and the
overrides when the work clock is used.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from ..planners import PLANNERS, PlannerSettings, PlanningAborted, PlanResult
from ..stats import TrialRecord
from .problems import load_problem
from .suites import SuiteManifest

RECORD_COLUMNS = (
    "suite",
    "problem",
    "planner",
    "trial",
    "seed",
    "solved",
    "t_init_ms",
    "c_init",
    "t_final_ms",
    "c_final",
    "edges_validated",
    "states_checked",
    "batches",
)
TRACE_COLUMNS = ("suite", "problem", "planner", "trial", "t_ms", "cost")
ERROR_COLUMNS = ("suite", "problem", "planner", "trial", "error")


def trial_seed(seed_base: int, problem: str, planner: str, trial: int) -> int:
    """Stable 63-bit seed from the trial's identity."""
    key = f"{seed_base}\x1f{problem}\x1f{planner}\x1f{trial}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "little") >> 1


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


@dataclass
class TrialOutcome:
    record: TrialRecord
    trace: list[tuple[float, float]] = field(default_factory=list)
    error: str | None = None


@dataclass(frozen=True)
class TrialSpec:
    suite: str
    problem_path: str
    problem: str
    planner: str
    trial: int
    settings: PlannerSettings


def outcome_from_result(spec: TrialSpec, result: PlanResult) -> TrialOutcome:
    c = result.counters
    solved = bool(result.solved)
    record = TrialRecord(
        suite=spec.suite,
        problem=spec.problem,
        planner=spec.planner,
        trial=spec.trial,
        seed=spec.settings.seed,
        solved=solved,
        t_init_ms=result.initial_time * 1000.0 if solved else math.inf,
        c_init=result.initial_cost if solved else math.inf,
        t_final_ms=result.final_time * 1000.0 if solved else math.inf,
        c_final=result.cost if solved else math.inf,
        edges_validated=c.edges_validated,
        states_checked=c.states_checked,
        batches=c.batches,
    )
    trace = [(t * 1000.0, cost) for t, cost in result.trace] if solved else []
    return TrialOutcome(record, trace, result.error)


def run_trial(spec: TrialSpec) -> TrialOutcome:
    """Run one trial; failures become unsolved records with an error note."""
    try:
        problem = load_problem(spec.problem_path)
        result = PLANNERS[spec.planner](problem, spec.settings)
    except PlanningAborted as exc:
        result = exc.partial
        result.error = str(exc)
    except Exception as exc:  # a failing trial must not take the suite down
        result = PlanResult(spec.planner, error=f"{type(exc).__name__}: {exc}")
    return outcome_from_result(spec, result)


def plan_trials(
    manifest: SuiteManifest,
    planners: Sequence[str],
    overrides: dict | None = None,
    trials: int | None = None,
) -> list[TrialSpec]:
    base = PlannerSettings(time_budget=manifest.time_budget)
    settings = replace(base, **(overrides or {}))
    specs = []
    for path in manifest.problems:
        name = load_problem(path).name
        for planner in planners:
            if planner not in PLANNERS:
                raise KeyError(f"unknown planner {planner!r}")
            for t in range(manifest.trials if trials is None else trials):
                seed = trial_seed(manifest.seed_base, name, planner, t)
                specs.append(TrialSpec(manifest.name, str(path), name, planner, t, replace(settings, seed=seed)))
    seeds = [s.settings.seed for s in specs]
    if len(set(seeds)) != len(seeds):
        raise RuntimeError("trial seed collision; rename a problem or change the seed base")
    return specs


def run_suite(
    manifest: SuiteManifest,
    planners: Sequence[str],
    out_dir: str | Path,
    overrides: dict | None = None,
    trials: int | None = None,
    jobs: int = 1,
) -> list[TrialRecord]:
    """Run every (problem, planner, trial) combination and write the CSVs to ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    specs = plan_trials(manifest, planners, overrides, trials)
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run_trial, specs))
    else:
        outcomes = [run_trial(s) for s in specs]
    write_outputs(out, outcomes)
    meta = {
        "suite": manifest.name,
        "planners": list(planners),
        "trials": len(specs),
        "overrides": overrides or {},
        "started_utc": started.isoformat(),
        "wall_seconds": time.perf_counter() - t0,
    }
    (out / "run.json").write_text(json.dumps(meta, indent=2, default=str) + "\n")
    return [o.record for o in outcomes]


def _write_csv(path: Path, columns: Iterable[str], rows: Iterable[Sequence]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_value(v) for v in row])


def write_outputs(out: Path, outcomes: Sequence[TrialOutcome]) -> None:
    _write_csv(out / "records.csv", RECORD_COLUMNS, (astuple_record(o.record) for o in outcomes))
    trace_rows = []
    for o in outcomes:
        r = o.record
        trace_rows.extend((r.suite, r.problem, r.planner, r.trial, t, c) for t, c in o.trace)
    _write_csv(out / "trace.csv", TRACE_COLUMNS, trace_rows)
    errors = [(o.record.suite, o.record.problem, o.record.planner, o.record.trial, o.error) for o in outcomes if o.error]
    _write_csv(out / "errors.csv", ERROR_COLUMNS, errors)


def astuple_record(record: TrialRecord) -> tuple:
    d = asdict(record)
    return tuple(d[c] for c in RECORD_COLUMNS)
