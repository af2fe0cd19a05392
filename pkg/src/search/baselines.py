"""
基準搜尋方法

- 隨機搜尋：每次迭代均勻取樣一個架構
- (1+1) 突變：每次評估目前架構的一個隨機鄰居，嚴格更好才接受

兩者與 SEKI 使用相同的初始架構子串流與評估預算 (n + 1 次)
"""

from src.core.interfaces import BaseEvaluator
from src.core.models import Phase
from src.spaces import neighbors, random_architecture

from .config import SearchConfig
from .session import STREAM_BASELINE, ProgressCallback, Proposal, SearchSession, build_evaluator
from .trace import Method, SearchTrace


def run_random_baseline(
    config: SearchConfig,
    evaluator: BaseEvaluator | None = None,
    progress_callback: ProgressCallback | None = None,
) -> SearchTrace:
    """
    隨機搜尋

    第 0 次迭代為初始架構，之後 n 次隨機取樣；
    共 n + 1 筆紀錄與 n + 1 次評估，與 SEKI 相同

    Returns:
        與 SEKI 相同格式的軌跡
    """
    session = SearchSession(
        Method.RANDOM, config, evaluator or build_evaluator(config), progress_callback
    )
    rng = session.rng.substream(STREAM_BASELINE)
    session.initialize()
    for iteration in range(1, config.n + 1):
        arch = random_architecture(session.space, rng)
        session.record(iteration, Phase.RANDOM, Proposal(arch))
    return session.finish()


def run_mutation_baseline(
    config: SearchConfig,
    evaluator: BaseEvaluator | None = None,
    progress_callback: ProgressCallback | None = None,
) -> SearchTrace:
    """
    (1+1) 突變爬山

    目前架構只在鄰居嚴格更好時取代，因此目前分數單調不減。
    第 0 次迭代為初始架構，之後 n 次突變；共 n + 1 筆紀錄與 n + 1 次評估

    Returns:
        與 SEKI 相同格式的軌跡
    """
    session = SearchSession(
        Method.MUTATION, config, evaluator or build_evaluator(config), progress_callback
    )
    rng = session.rng.substream(STREAM_BASELINE)
    current = session.initialize()
    for iteration in range(1, config.n + 1):
        candidate = rng.pick(neighbors(current.arch))
        entry = session.record(
            iteration,
            Phase.MUTATION,
            Proposal(candidate, inputs=(current.arch.canonical_text,)),
        )
        if entry.fitness.oriented_value > current.fitness.oriented_value:
            current = entry
    return session.finish()
