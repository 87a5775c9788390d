"""Benchmark harness: problem files, built-in suites, seeded runs and summaries."""

from .problems import load_problem, problem_from_dict, problem_to_dict, write_problem
from .runner import ERROR_COLUMNS, RECORD_COLUMNS, TRACE_COLUMNS, run_suite, trial_seed
from .suites import SUITES, SuiteManifest, generate, load_manifest, write_suite
from .summary import SUMMARY_COLUMNS, read_records, summarize

__all__ = [
    "ERROR_COLUMNS",
    "RECORD_COLUMNS",
    "SUITES",
    "SUMMARY_COLUMNS",
    "SuiteManifest",
    "TRACE_COLUMNS",
    "generate",
    "load_manifest",
    "load_problem",
    "problem_from_dict",
    "problem_to_dict",
    "read_records",
    "run_suite",
    "summarize",
    "trial_seed",
    "write_problem",
    "write_suite",
]
