"""
搜尋模組 - 知識庫、SEKI 搜尋流程、基準方法、軌跡、重播與消融掃描
"""

from .baselines import run_mutation_baseline, run_random_baseline
from .config import SearchConfig
from .replay import ReplayReport, replay
from .report import build_report, write_report_csv
from .repository import InsertReceipt, KnowledgeRepository, ScoredEntry, sample_xi
from .seki import SekiSearch, run_seki
from .session import SearchSession, build_backend, build_evaluator, companion_metrics
from .sweep import SweepRow, expand_grid, run_sweep, write_sweep_csv
from .trace import (
    EventKind,
    IterationRecord,
    Method,
    SearchTrace,
    canonical_lines,
    read_trace,
    write_trace,
)


__all__ = [
    "EventKind",
    "InsertReceipt",
    "IterationRecord",
    "KnowledgeRepository",
    "Method",
    "ReplayReport",
    "ScoredEntry",
    "SearchConfig",
    "SearchSession",
    "SearchTrace",
    "SekiSearch",
    "SweepRow",
    "build_backend",
    "build_evaluator",
    "build_report",
    "canonical_lines",
    "companion_metrics",
    "expand_grid",
    "read_trace",
    "replay",
    "run_mutation_baseline",
    "run_random_baseline",
    "run_seki",
    "run_sweep",
    "sample_xi",
    "write_report_csv",
    "write_sweep_csv",
    "write_trace",
]
