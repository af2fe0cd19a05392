"""
窮舉最佳解

對可窮舉空間逐一評估所有架構，求得評估器下的真實最佳解，
作為搜尋品質的基準答案
"""

import logging
from collections.abc import Iterable
from dataclasses import dataclass

from src.core.errors import NotEnumerable
from src.core.interfaces import BaseEvaluator
from src.core.models import Fitness
from src.spaces import Architecture, SpaceDescriptor, enumerate_space

from .tabular import TabularEvaluator


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    """
    窮舉結果

    Attributes:
        arch: 最佳架構
        fitness: 最佳分數
        scanned: 評估過的架構數
    """

    arch: Architecture
    fitness: Fitness
    scanned: int


def _candidates(evaluator: BaseEvaluator, space: SpaceDescriptor) -> Iterable[Architecture]:
    if not space.enumerable:
        raise NotEnumerable(space.space_id)
    if isinstance(evaluator, TabularEvaluator):
        # 部分表格只掃描表內的列
        return evaluator.benchmark.architectures()
    return enumerate_space(space)


def scan_space(evaluator: BaseEvaluator, space: SpaceDescriptor) -> OracleResult:
    """
    窮舉整個搜尋空間

    使用不計數的 score()，不消耗搜尋預算；
    候選依基因字典序走訪，只有嚴格更好才取代，
    因此同分時保留字典序最小者

    Args:
        evaluator: 評估器
        space: 可窮舉的搜尋空間

    Returns:
        最佳架構、分數與掃描數量

    Raises:
        NotEnumerable: 空間無法窮舉
        SpaceMismatch: 評估器不屬於此空間
    """
    best_arch: Architecture | None = None
    best_fitness: Fitness | None = None
    scanned = 0
    for arch in _candidates(evaluator, space):
        fitness = evaluator.score(arch)
        scanned += 1
        if best_fitness is None or fitness.oriented_value > best_fitness.oriented_value:
            best_arch, best_fitness = arch, fitness

    if best_arch is None or best_fitness is None:
        raise NotEnumerable(space.space_id)
    logger.info(
        "Oracle scan: %d candidates, best %s = %s",
        scanned,
        best_fitness.metric_name,
        best_fitness.raw_metric,
    )
    return OracleResult(best_arch, best_fitness, scanned)


def oracle_best(
    evaluator: BaseEvaluator, space: SpaceDescriptor
) -> tuple[Architecture, Fitness]:
    """窮舉最佳架構與分數 (同分時取字典序最小的基因)"""
    result = scan_space(evaluator, space)
    return result.arch, result.fitness
