"""
搜尋執行期模組

SearchSession 負責所有搜尋方法共用的工作：
評估 (計入預算)、寫入知識庫、產生迭代紀錄與進度回報
"""

import logging
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from src.backends import BackendContext, BackendRegistry
from src.core.interfaces import BaseEvaluator, BaseLlmBackend
from src.core.models import Phase
from src.core.rng import SeededRng
from src.evaluators import EvaluatorRegistry, TabularEvaluator
from src.spaces import Architecture, SpaceDescriptor, random_architecture
from src.spaces.descriptors import describe_space

from .config import SearchConfig
from .repository import KnowledgeRepository, ScoredEntry
from .trace import (
    EventKind,
    IterationRecord,
    Method,
    ParseOutcome,
    SearchTrace,
    TraceEvent,
)


ProgressCallback = Callable[[int, int, IterationRecord], None]

# 具名亂數子串流
STREAM_INIT: str = "init"
STREAM_XI: str = "xi"
STREAM_FALLBACK: str = "fallback"
STREAM_AGENT: str = "agent"
STREAM_BASELINE: str = "baseline"

logger = logging.getLogger(__name__)


def log_progress(current: int, total: int, record: IterationRecord) -> None:
    """預設進度顯示"""
    logger.info(
        "[%d/%d] %s %s = %.4f (best %.4f)%s",
        current,
        total,
        record.phase.value,
        record.arch,
        record.fitness.raw_metric,
        record.best_fitness.raw_metric,
        "".join(f" [{event.kind.value}]" for event in record.events),
    )


def build_evaluator(config: SearchConfig) -> BaseEvaluator:
    """依設定建立評估器"""
    return EvaluatorRegistry.create(config.evaluator, describe_space(config.space_id))


def companion_metrics(evaluator: BaseEvaluator, arch: Architecture) -> dict[str, float]:
    """
    表格評估器中搜尋指標以外的其他欄位

    非表格評估器沒有其他欄位，返回空字典
    """
    if isinstance(evaluator, TabularEvaluator):
        return evaluator.companion_metrics(arch)
    return {}


def build_backend(config: SearchConfig, evaluator: BaseEvaluator | None) -> BaseLlmBackend:
    """依設定建立 LLM 後端 (模擬代理使用 agent 子串流)"""
    context = BackendContext(
        space=describe_space(config.space_id),
        evaluator=evaluator,
        rng=SeededRng(config.seed).substream(STREAM_AGENT),
    )
    return BackendRegistry.create(config.llm, context)


@dataclass(frozen=True)
class Proposal:
    """
    一次迭代產生的候選架構

    Attributes:
        arch: 候選架構
        inputs: 輸入架構的標準字串
        prompt_digests: 提示摘要
        llm_texts: 原始回覆
        parse: 架構擷取結果
        events: 事件
    """

    arch: Architecture
    inputs: tuple[str, ...] = ()
    prompt_digests: tuple[str, ...] = ()
    llm_texts: tuple[str, ...] = ()
    parse: ParseOutcome = ParseOutcome.NONE
    events: tuple[TraceEvent, ...] = ()


class SearchSession:
    """
    單次搜尋的執行狀態

    評估器呼叫次數以建構時的計數為基準，因此可共用評估器
    """

    def __init__(
        self,
        method: Method,
        config: SearchConfig,
        evaluator: BaseEvaluator,
        progress_callback: ProgressCallback | None = None,
    ) -> None:
        self.method = method
        self.config = config
        self.space: SpaceDescriptor = describe_space(config.space_id)
        self.evaluator = evaluator
        self.repository = KnowledgeRepository()
        self.rng = SeededRng(config.seed)
        self._progress_callback = progress_callback or log_progress
        self._records: list[IterationRecord] = []
        self._start_calls = evaluator.calls
        self._started = time.perf_counter()

    @property
    def last(self) -> ScoredEntry:
        """最近一次迭代的紀錄"""
        return self.repository.records[-1]

    def record(self, iteration: int, phase: Phase, proposal: Proposal) -> ScoredEntry:
        """
        評估候選架構並寫入知識庫與軌跡

        Raises:
            ArchitectureNotInTable: 表格中沒有此架構 (中止搜尋)
        """
        started = time.perf_counter()
        fitness = self.evaluator.evaluate(proposal.arch)
        entry = ScoredEntry(proposal.arch, fitness, iteration, phase)
        receipt = self.repository.insert(entry)

        events = list(proposal.events)
        if receipt.was_duplicate:
            events.append(TraceEvent(EventKind.DUPLICATE, proposal.arch.canonical_text))
        best = self.repository.best()
        record = IterationRecord(
            iteration=iteration,
            phase=phase,
            inputs=proposal.inputs,
            prompt_digests=proposal.prompt_digests,
            llm_texts=proposal.llm_texts,
            parse=proposal.parse,
            arch=proposal.arch.canonical_text,
            fitness=fitness,
            best_arch=best.arch.canonical_text,
            best_fitness=best.fitness,
            events=tuple(events),
            seconds=time.perf_counter() - started,
        )
        self._records.append(record)
        self._progress_callback(iteration, self.config.n, record)
        return entry

    def initialize(self) -> ScoredEntry:
        """
        第 0 次迭代：隨機初始架構

        初始架構也計入評估與紀錄，
        因此預算 n 的搜尋共有 n + 1 次評估 (迭代 0..n)
        """
        arch = random_architecture(self.space, self.rng.substream(STREAM_INIT))
        return self.record(0, Phase.INIT, Proposal(arch))

    def finish(self, events: Sequence[TraceEvent] = ()) -> SearchTrace:
        """產生軌跡"""
        best = self.repository.best()
        trace = SearchTrace(
            method=self.method,
            config=self.config,
            records=list(self._records),
            best=best,
            evaluations=self.evaluator.calls - self._start_calls,
            events=tuple(events),
            seconds=time.perf_counter() - self._started,
        )
        logger.info(
            "%s finished: best %s = %s at iteration %d (%d evaluations)",
            self.method.value,
            best.fitness.metric_name,
            best.fitness.raw_metric,
            best.iteration,
            trace.evaluations,
        )
        return trace
