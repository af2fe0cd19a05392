"""
搜尋軌跡模組

軌跡檔為 JSON Lines：
    第 1 行 {"kind": "config", ...}      設定快照
    每次迭代 {"kind": "iteration", ...}  迭代紀錄 (初始架構為第 0 次)
    最後一行 {"kind": "result", ...}     最終最佳解

所有時間資訊只放在 "timing" 鍵，比對標準內容時排除
"""

import json
import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any

from src.core.errors import EmptyRepository, SekiError, TraceUnreadable
from src.core.models import Fitness, Phase
from src.spaces import SpaceId, parse_architecture
from src.spaces.descriptors import describe_space

from .config import SearchConfig
from .repository import KnowledgeRepository, ScoredEntry


TRACE_FORMAT: str = "seki-trace/1"
TIMING_KEY: str = "timing"

logger = logging.getLogger(__name__)


class Method(StrEnum):
    """搜尋方法"""

    SEKI = "seki"
    RANDOM = "random"
    MUTATION = "mutation"


class ParseOutcome(StrEnum):
    """架構擷取結果"""

    OK = "ok"
    RETRIED = "retried"
    FALLBACK = "fallback"
    NONE = "none"


class EventKind(StrEnum):
    """迭代事件"""

    PARSE_RETRY = "parse_retry"
    FALLBACK = "fallback"
    DUPLICATE = "duplicate"
    DUPLICATE_EXEMPLAR = "duplicate_exemplar"
    EXTENDED_XI = "xi_equals_k"


@dataclass(frozen=True)
class TraceEvent:
    kind: EventKind
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"type": self.kind.value, "detail": self.detail}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TraceEvent":
        return cls(EventKind(data["type"]), str(data.get("detail", "")))


@dataclass(frozen=True)
class IterationRecord:
    """
    單次迭代紀錄

    Attributes:
        iteration: 迭代編號
        phase: 所屬階段
        inputs: 輸入架構的標準字串 (自我演化為前一個架構，知識啟發為範例)
        prompt_digests: 依序送出的提示摘要
        llm_texts: 依序收到的原始回覆
        parse: 架構擷取結果
        arch: 評估的架構
        fitness: 評估分數
        best_arch: 目前最佳架構
        best_fitness: 目前最佳分數
        events: 重試、退回等事件
        seconds: 耗時 (不列入標準比對)
    """

    iteration: int
    phase: Phase
    inputs: tuple[str, ...]
    prompt_digests: tuple[str, ...]
    llm_texts: tuple[str, ...]
    parse: ParseOutcome
    arch: str
    fitness: Fitness
    best_arch: str
    best_fitness: Fitness
    events: tuple[TraceEvent, ...] = ()
    seconds: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "iteration",
            "iteration": self.iteration,
            "phase": self.phase.value,
            "inputs": list(self.inputs),
            "prompt_digests": list(self.prompt_digests),
            "llm_texts": list(self.llm_texts),
            "parse": self.parse.value,
            "arch": self.arch,
            "fitness": self.fitness.to_dict(),
            "best_so_far": {"arch": self.best_arch, "fitness": self.best_fitness.to_dict()},
            "events": [event.to_dict() for event in self.events],
            TIMING_KEY: {"seconds": self.seconds},
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "IterationRecord":
        best = data["best_so_far"]
        return cls(
            iteration=int(data["iteration"]),
            phase=Phase(data["phase"]),
            inputs=tuple(data["inputs"]),
            prompt_digests=tuple(data["prompt_digests"]),
            llm_texts=tuple(data["llm_texts"]),
            parse=ParseOutcome(data["parse"]),
            arch=str(data["arch"]),
            fitness=Fitness.from_dict(data["fitness"]),
            best_arch=str(best["arch"]),
            best_fitness=Fitness.from_dict(best["fitness"]),
            events=tuple(TraceEvent.from_dict(e) for e in data.get("events", [])),
            seconds=float(data.get(TIMING_KEY, {}).get("seconds", 0.0)),
        )

    def to_entry(self, space_id: SpaceId) -> ScoredEntry:
        """轉換為知識庫紀錄"""
        arch = parse_architecture(describe_space(space_id), self.arch)
        return ScoredEntry(arch, self.fitness, self.iteration, self.phase)


@dataclass
class SearchTrace:
    """
    搜尋軌跡

    Attributes:
        method: 搜尋方法
        config: 設定快照
        records: 迭代紀錄 (含第 0 次初始架構)
        best: 最終最佳解
        evaluations: 評估器計數
        events: 設定層級的事件
        command: 產生軌跡的命令列
        seconds: 總耗時 (不列入標準比對)
    """

    method: Method
    config: SearchConfig
    records: list[IterationRecord] = field(default_factory=list)
    best: ScoredEntry | None = None
    evaluations: int = 0
    events: tuple[TraceEvent, ...] = ()
    command: str = ""
    seconds: float = 0.0

    @property
    def iteration_count(self) -> int:
        """不含初始架構的迭代數"""
        return sum(1 for r in self.records if r.phase is not Phase.INIT)

    def entries(self) -> list[ScoredEntry]:
        return [record.to_entry(self.config.space_id) for record in self.records]

    def rebuild_repository(self) -> KnowledgeRepository:
        """由軌跡重建知識庫"""
        return KnowledgeRepository.from_entries(self.entries())

    def best_iteration(self) -> int:
        """最終最佳解首次出現的迭代"""
        if self.best is None:
            raise EmptyRepository("軌跡沒有結果")
        return self.best.iteration

    def header_dict(self) -> dict[str, Any]:
        return {
            "kind": "config",
            "format": TRACE_FORMAT,
            "method": self.method.value,
            "config": self.config.to_dict(),
            "events": [event.to_dict() for event in self.events],
            "command": self.command,
        }

    def result_dict(self) -> dict[str, Any]:
        return {
            "kind": "result",
            "best": self.best.to_dict() if self.best else None,
            "evaluations": self.evaluations,
            "iterations": self.iteration_count,
            TIMING_KEY: {"seconds": self.seconds},
        }

    def lines(self) -> list[dict[str, Any]]:
        return [
            self.header_dict(),
            *(record.to_dict() for record in self.records),
            self.result_dict(),
        ]


def canonical(line: dict[str, Any]) -> dict[str, Any]:
    """去除時間資訊後的標準內容"""
    return {key: value for key, value in line.items() if key != TIMING_KEY}


def canonical_lines(trace: SearchTrace) -> list[str]:
    """標準內容的 JSON 字串 (可直接逐位元比對)"""
    return [json.dumps(canonical(line), ensure_ascii=False) for line in trace.lines()]


def _dump(lines: Iterable[dict[str, Any]]) -> str:
    return "".join(json.dumps(line, ensure_ascii=False) + "\n" for line in lines)


def write_trace(trace: SearchTrace, path: Path) -> None:
    """寫出軌跡檔"""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_dump(trace.lines()), encoding="utf-8")
    logger.info("Trace written: %s (%d records)", path, len(trace.records))


def load_trace_lines(path: Path) -> list[dict[str, Any]]:
    """
    讀取軌跡檔的原始 JSON 行

    Raises:
        TraceUnreadable: 檔案不存在、JSON 錯誤或缺少設定行/結果行
    """
    try:
        raw = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise TraceUnreadable(str(path), str(exc)) from exc

    try:
        lines = [json.loads(line) for line in raw if line.strip()]
    except json.JSONDecodeError as exc:
        raise TraceUnreadable(str(path), f"JSON 格式錯誤: {exc}") from exc
    if not all(isinstance(line, dict) for line in lines):
        raise TraceUnreadable(str(path), "每一行都必須是 JSON 物件")
    if len(lines) < 2 or lines[0].get("kind") != "config" or lines[-1].get("kind") != "result":
        raise TraceUnreadable(str(path), "缺少設定行或結果行")
    if lines[0].get("format") != TRACE_FORMAT:
        raise TraceUnreadable(str(path), f"不支援的格式: {lines[0].get('format')}")
    return lines


def read_trace(path: Path) -> SearchTrace:
    """
    讀取軌跡檔

    Raises:
        TraceUnreadable: 檔案不存在、JSON 錯誤或結構不符
    """
    lines = load_trace_lines(path)
    header, result = lines[0], lines[-1]

    try:
        config = SearchConfig.from_dict(header["config"])
        records = [IterationRecord.from_dict(line) for line in lines[1:-1]]
        best = result.get("best")
        return SearchTrace(
            method=Method(header["method"]),
            config=config,
            records=records,
            best=ScoredEntry.from_dict(best, config.space_id) if best else None,
            evaluations=int(result["evaluations"]),
            events=tuple(TraceEvent.from_dict(e) for e in header.get("events", [])),
            command=str(header.get("command", "")),
            seconds=float(result.get(TIMING_KEY, {}).get("seconds", 0.0)),
        )
    except (KeyError, TypeError, ValueError, SekiError) as exc:
        raise TraceUnreadable(str(path), f"{type(exc).__name__}: {exc}") from exc
