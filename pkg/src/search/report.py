"""
軌跡彙整報表

每個軌跡一列 (方法、種子、最佳分數、最佳迭代、評估次數)，
表格評估器的軌跡另外列出最佳架構在其他指標欄位的值，
再依方法彙整平均值與樣本標準差
"""

import csv
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.core.errors import ConfigError, SekiError
from src.core.interfaces import BaseEvaluator
from src.core.selector import Selector

from .session import build_evaluator, companion_metrics
from .trace import SearchTrace, read_trace


CSV_COLUMNS: tuple[str, ...] = (
    "row",
    "method",
    "space",
    "evaluator",
    "llm",
    "seed",
    "trace",
    "metric",
    "best_fitness",
    "other_metrics",
    "best_iteration",
    "evaluations",
    "count",
    "mean",
    "std",
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TraceSummary:
    """單一軌跡的摘要"""

    path: Path
    method: str
    space: str
    evaluator: str
    llm: str
    seed: int
    metric: str
    best_fitness: float
    best_iteration: int
    evaluations: int
    other_metrics: Mapping[str, float] = field(default_factory=dict)

    @property
    def group(self) -> tuple[str, str, str, str]:
        llm = self.llm if self.method == "seki" else ""
        return (self.method, self.space, self.evaluator, llm)


@dataclass(frozen=True)
class MethodAggregate:
    """
    方法彙整

    Attributes:
        method: 方法
        space: 搜尋空間
        evaluator: 評估器選擇器
        llm: LLM 選擇器 (僅 SEKI)
        count: 軌跡數
        mean: 最佳分數平均
        std: 最佳分數樣本標準差 (只有一筆時為 0)
    """

    method: str
    space: str
    evaluator: str
    llm: str
    count: int
    mean: float
    std: float


def format_metrics(metrics: Mapping[str, float]) -> str:
    """以 "name=value;name=value" 表示多個指標"""
    return ";".join(f"{name}={value!r}" for name, value in metrics.items())


def best_other_metrics(
    trace: SearchTrace, evaluators: dict[str, BaseEvaluator] | None = None
) -> dict[str, float]:
    """
    最佳架構在其他指標欄位的值

    只有表格評估器的軌跡有其他欄位；表格檔無法載入時記錄警告並返回空字典

    Args:
        trace: 軌跡
        evaluators: 依評估器選擇器快取已載入的評估器
    """
    best = trace.best
    selector_text = trace.config.evaluator
    if best is None or Selector.parse(selector_text).kind != "tabular":
        return {}
    cache = evaluators if evaluators is not None else {}
    evaluator = cache.get(selector_text)
    if evaluator is None:
        try:
            evaluator = build_evaluator(trace.config)
        except SekiError as exc:
            logger.warning("Cannot reload %s: %s", selector_text, exc)
            return {}
        cache[selector_text] = evaluator
    return companion_metrics(evaluator, best.arch)


def summarize(
    path: Path, evaluators: dict[str, BaseEvaluator] | None = None
) -> TraceSummary:
    """
    讀取並摘要軌跡

    Args:
        path: 軌跡檔
        evaluators: 依評估器選擇器快取已載入的評估器

    Raises:
        TraceUnreadable: 軌跡無法讀取
    """
    trace = read_trace(path)
    best = trace.best
    if best is None:
        raise ConfigError(f"軌跡沒有最終結果: {path}")
    return TraceSummary(
        path=path,
        method=trace.method.value,
        space=trace.config.space_id.value,
        evaluator=trace.config.evaluator,
        llm=trace.config.llm,
        seed=trace.config.seed,
        metric=best.fitness.metric_name,
        best_fitness=best.fitness.raw_metric,
        best_iteration=best.iteration,
        evaluations=trace.evaluations,
        other_metrics=best_other_metrics(trace, evaluators),
    )


def aggregate(summaries: Sequence[TraceSummary]) -> list[MethodAggregate]:
    """依 (方法, 空間, 評估器, LLM) 分組計算平均與樣本標準差"""
    groups: dict[tuple[str, str, str, str], list[float]] = {}
    for summary in summaries:
        groups.setdefault(summary.group, []).append(summary.best_fitness)

    result: list[MethodAggregate] = []
    for (method, space, evaluator, llm), values in groups.items():
        data = np.asarray(values, dtype=np.float64)
        std = float(data.std(ddof=1)) if data.size > 1 else 0.0
        result.append(
            MethodAggregate(method, space, evaluator, llm, int(data.size), float(data.mean()), std)
        )
    return result


def build_report(
    paths: Sequence[Path],
) -> tuple[list[TraceSummary], list[MethodAggregate]]:
    """
    彙整多個軌跡

    Raises:
        ConfigError: 沒有任何軌跡
        TraceUnreadable: 任一軌跡無法讀取
    """
    if not paths:
        raise ConfigError("至少需要一個軌跡檔")
    evaluators: dict[str, BaseEvaluator] = {}
    summaries = [summarize(path, evaluators) for path in paths]
    return summaries, aggregate(summaries)


def write_report_csv(
    summaries: Sequence[TraceSummary],
    aggregates: Sequence[MethodAggregate],
    path: Path,
) -> None:
    """寫出報表 CSV：先列出每個軌跡，再列出各方法彙整"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for s in summaries:
            writer.writerow(
                [
                    "trace",
                    s.method,
                    s.space,
                    s.evaluator,
                    s.llm,
                    s.seed,
                    str(s.path),
                    s.metric,
                    repr(s.best_fitness),
                    format_metrics(s.other_metrics),
                    s.best_iteration,
                    s.evaluations,
                    "",
                    "",
                    "",
                ]
            )
        for a in aggregates:
            writer.writerow(
                [
                    "aggregate",
                    a.method,
                    a.space,
                    a.evaluator,
                    a.llm,
                    "",
                    "",
                    "",
                    "",
                    "",
                    "",
                    "",
                    a.count,
                    repr(a.mean),
                    repr(a.std),
                ]
            )
    logger.info("Report written: %s (%d traces)", path, len(summaries))
