"""
軌跡重播

以軌跡中的設定重新執行搜尋，逐行比對標準欄位 (排除 timing)
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from src.backends import BackendRegistry
from src.core.errors import DivergenceAt, NonReplayableTrace

from .baselines import run_mutation_baseline, run_random_baseline
from .seki import run_seki
from .session import ProgressCallback
from .trace import Method, SearchTrace, canonical, load_trace_lines, read_trace


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReplayReport:
    """
    重播結果

    Attributes:
        path: 軌跡檔
        iterations_checked: 比對過的迭代紀錄數
    """

    path: Path
    iterations_checked: int


def _quiet(current: int, total: int, record: object) -> None:
    pass


def rerun(trace: SearchTrace, progress_callback: ProgressCallback | None = None) -> SearchTrace:
    """以軌跡的設定重新執行相同方法"""
    match trace.method:
        case Method.SEKI:
            return run_seki(trace.config, progress_callback=progress_callback)
        case Method.RANDOM:
            return run_random_baseline(trace.config, progress_callback=progress_callback)
        case Method.MUTATION:
            return run_mutation_baseline(trace.config, progress_callback=progress_callback)


def _normalize(lines: list[dict[str, Any]]) -> list[dict[str, Any]]:
    # 經過 JSON 來回，與檔案內容的型別一致
    return [canonical(json.loads(json.dumps(line))) for line in lines]


def _first_difference(expected: dict[str, Any], actual: dict[str, Any]) -> str | None:
    for key in [*expected, *(k for k in actual if k not in expected)]:
        if expected.get(key) != actual.get(key):
            return key
    return None


def replay(path: Path) -> ReplayReport:
    """
    重播軌跡檔

    Args:
        path: 軌跡檔

    Returns:
        重播結果 (沒有任何分歧)

    Raises:
        TraceUnreadable: 軌跡檔無法讀取
        NonReplayableTrace: 軌跡來自不可重現的後端 (HTTP)
        DivergenceAt: 第一個不一致的迭代與欄位
    """
    trace = read_trace(path)
    if trace.method is Method.SEKI and not BackendRegistry.is_replayable(trace.config.llm):
        raise NonReplayableTrace(
            f"軌跡使用 {trace.config.llm} 產生，外部 LLM 的輸出無法重現"
        )

    recorded = [canonical(line) for line in load_trace_lines(path)]
    fresh = _normalize(rerun(trace, progress_callback=_quiet).lines())

    header_field = _first_difference(
        {"events": recorded[0].get("events")}, {"events": fresh[0].get("events")}
    )
    if header_field is not None:
        raise DivergenceAt(0, header_field)

    recorded_records, fresh_records = recorded[1:-1], fresh[1:-1]
    for expected, actual in zip(recorded_records, fresh_records, strict=False):
        differing = _first_difference(expected, actual)
        if differing is not None:
            raise DivergenceAt(int(expected.get("iteration", -1)), differing)
    if len(recorded_records) != len(fresh_records):
        raise DivergenceAt(min(len(recorded_records), len(fresh_records)), "record_count")

    differing = _first_difference(recorded[-1], fresh[-1])
    if differing is not None:
        raise DivergenceAt(trace.config.n, f"result.{differing}")

    logger.info("Replay of %s matched %d records", path, len(recorded_records))
    return ReplayReport(path, len(recorded_records))
