"""
SEKI 搜尋流程

兩階段的 LLM 架構搜尋：
1. 自我演化 (第 1..λ 次)：分析前一個架構並產生最佳化策略 (模板 C)，
   再依策略產生新架構 (模板 D)
2. 知識啟發 (第 λ+1..n 次)：從知識庫前 k 名中隨機抽取 ξ 個範例，
   歸納設計模式產生新架構 (模板 E)

第 0 次為隨機初始架構；每次迭代恰好評估一次
"""

import logging
from pathlib import Path

from src.backends import complete
from src.core.errors import EmptyStrategy, ParseError
from src.core.interfaces import BaseEvaluator, BaseLlmBackend
from src.core.models import AnchorMode, Phase
from src.prompts import OptimizationStrategy, Prompt, PromptEngine, format_reminder
from src.prompts.engine import default_engine
from src.spaces import Architecture, extract_architecture, random_architecture

from .config import SearchConfig
from .repository import ScoredEntry, sample_xi
from .session import (
    STREAM_FALLBACK,
    STREAM_XI,
    ProgressCallback,
    Proposal,
    SearchSession,
    build_backend,
    build_evaluator,
)
from .trace import EventKind, Method, ParseOutcome, SearchTrace, TraceEvent


logger = logging.getLogger(__name__)


class SekiSearch:
    """
    SEKI 搜尋器

    依賴抽象的 LLM 後端與評估器，不依賴具體實作
    """

    def __init__(
        self,
        config: SearchConfig,
        evaluator: BaseEvaluator,
        backend: BaseLlmBackend,
        engine: PromptEngine | None = None,
        progress_callback: ProgressCallback | None = None,
    ) -> None:
        """
        初始化搜尋器

        Args:
            config: 搜尋設定
            evaluator: 評估器
            backend: LLM 後端
            engine: 提示模板引擎 (None 時依設定或內建模板)
            progress_callback: 進度回調函數 (iteration, total, record)
        """
        self.config = config
        self._backend = backend
        self._engine = engine or (
            PromptEngine(Path(config.templates)) if config.templates else default_engine()
        )
        self._session = SearchSession(Method.SEKI, config, evaluator, progress_callback)
        self._xi_rng = self._session.rng.substream(STREAM_XI)
        self._fallback_rng = self._session.rng.substream(STREAM_FALLBACK)

    @property
    def session(self) -> SearchSession:
        return self._session

    def run(self) -> SearchTrace:
        """執行完整搜尋"""
        config = self.config
        events: list[TraceEvent] = []
        if config.extended_xi:
            logger.warning("xi == k (%d): running in extended mode", config.k)
            events.append(TraceEvent(EventKind.EXTENDED_XI, f"xi=k={config.k}"))

        self._session.initialize()
        for iteration in range(1, config.lambda_ + 1):
            self._session.record(iteration, Phase.SELF_EVOLUTION, self._self_evolve(iteration))
        for iteration in range(config.lambda_ + 1, config.n + 1):
            self._session.record(
                iteration, Phase.KNOWLEDGE_INSPIRATION, self._inspire(iteration)
            )
        return self._session.finish(events)

    def _anchor(self) -> ScoredEntry:
        if self.config.anchor_mode is AnchorMode.BEST:
            return self._session.repository.best()
        return self._session.last

    def _self_evolve(self, iteration: int) -> Proposal:
        """自我演化：策略 (模板 C) → 新架構 (模板 D)"""
        anchor = self._anchor()
        space = self._session.space
        prompt_c = self._engine.render_prompt_c(
            self.config.task, space, anchor.arch, anchor.fitness
        )
        strategy_text = complete(self._backend, prompt_c, self.config.llm_params)
        inputs = (anchor.arch.canonical_text,)

        try:
            strategy = OptimizationStrategy(strategy_text, source_iteration=iteration)
        except EmptyStrategy as exc:
            logger.warning("Iteration %d: empty strategy, falling back", iteration)
            return Proposal(
                arch=self._fallback_architecture(),
                inputs=inputs,
                prompt_digests=(prompt_c.content_digest,),
                llm_texts=(strategy_text,),
                parse=ParseOutcome.FALLBACK,
                events=(TraceEvent(EventKind.FALLBACK, f"{exc.code}: {exc}"),),
            )

        prompt_d = self._engine.render_prompt_d(strategy, anchor.arch)
        proposal = self._ask(iteration, prompt_d, inputs)
        return Proposal(
            arch=proposal.arch,
            inputs=inputs,
            prompt_digests=(prompt_c.content_digest, *proposal.prompt_digests),
            llm_texts=(strategy_text, *proposal.llm_texts),
            parse=proposal.parse,
            events=proposal.events,
        )

    def _inspire(self, iteration: int) -> Proposal:
        """知識啟發：前 k 名抽取 ξ 個範例 (模板 E)"""
        repository = self._session.repository
        top = repository.top_k(self.config.k)
        exemplars = sample_xi(top, self.config.xi, self._xi_rng)
        prompt_e = self._engine.render_prompt_e(exemplars, self.config.task, self._session.space)

        inputs = tuple(entry.arch.canonical_text for entry in exemplars)
        proposal = self._ask(iteration, prompt_e, inputs)
        if proposal.arch.canonical_text in inputs:
            return Proposal(
                arch=proposal.arch,
                inputs=inputs,
                prompt_digests=proposal.prompt_digests,
                llm_texts=proposal.llm_texts,
                parse=proposal.parse,
                events=(
                    *proposal.events,
                    TraceEvent(EventKind.DUPLICATE_EXEMPLAR, proposal.arch.canonical_text),
                ),
            )
        return proposal

    def _ask(self, iteration: int, prompt: Prompt, inputs: tuple[str, ...]) -> Proposal:
        """
        取得架構，失敗時附加格式提醒重問

        重問 max_parse_retries 次仍失敗時以隨機架構取代，該次迭代照常評估
        """
        space = self._session.space
        reminder = format_reminder(space)
        digests: list[str] = []
        texts: list[str] = []
        events: list[TraceEvent] = []
        current = prompt

        for attempt in range(self.config.max_parse_retries + 1):
            text = complete(self._backend, current, self.config.llm_params)
            digests.append(current.content_digest)
            texts.append(text)
            try:
                arch = extract_architecture(space, text)
            except ParseError as exc:
                logger.warning(
                    "Iteration %d: attempt %d has no valid architecture (%s)",
                    iteration,
                    attempt + 1,
                    exc.code,
                )
                events.append(TraceEvent(EventKind.PARSE_RETRY, f"{exc.code}: {exc}"))
                current = prompt.with_reminder(reminder)
                continue
            return Proposal(
                arch=arch,
                inputs=inputs,
                prompt_digests=tuple(digests),
                llm_texts=tuple(texts),
                parse=ParseOutcome.RETRIED if attempt else ParseOutcome.OK,
                events=tuple(events),
            )

        logger.warning("Iteration %d: retries exhausted, using a random architecture", iteration)
        events.append(TraceEvent(EventKind.FALLBACK, f"{len(texts)} attempts"))
        return Proposal(
            arch=self._fallback_architecture(),
            inputs=inputs,
            prompt_digests=tuple(digests),
            llm_texts=tuple(texts),
            parse=ParseOutcome.FALLBACK,
            events=tuple(events),
        )

    def _fallback_architecture(self) -> Architecture:
        return random_architecture(self._session.space, self._fallback_rng)


def run_seki(
    config: SearchConfig,
    evaluator: BaseEvaluator | None = None,
    backend: BaseLlmBackend | None = None,
    progress_callback: ProgressCallback | None = None,
) -> SearchTrace:
    """
    執行 SEKI 搜尋

    Args:
        config: 搜尋設定
        evaluator: 評估器 (None 時依設定建立)
        backend: LLM 後端 (None 時依設定建立)
        progress_callback: 進度回調函數

    Returns:
        搜尋軌跡

    Raises:
        ConfigError: 設定不合法
        ArchitectureNotInTable: 表格評估器缺少候選架構
        LlmError: LLM 呼叫失敗
    """
    evaluator = evaluator or build_evaluator(config)
    owned = backend is None
    backend = backend or build_backend(config, evaluator)
    try:
        return SekiSearch(config, evaluator, backend, progress_callback=progress_callback).run()
    finally:
        if owned:
            backend.close()
