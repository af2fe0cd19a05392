"""
模擬代理後端

以確定性的腳本代理取代 LLM，供測試與桌面規模實驗使用：
- random_valid：輸出均勻隨機的合法架構
- greedy_mutation：輸出評估器下最好的單步鄰居 (沒有更好的鄰居時輸出原架構)
- majority_recombination：對範例逐槽位取多數運算子
- phased：模板 C/D 使用 greedy_mutation，模板 E 使用 majority_recombination

代理從提示文字中讀取架構，不依賴任何搜尋流程的內部狀態；
給定亂數狀態時輸出固定，重播軌跡即可重現
"""

import logging
import math
from collections import Counter
from collections.abc import Sequence
from enum import StrEnum
from typing import ClassVar

from src.core.errors import (
    ArchitectureNotInTable,
    ConfigError,
    MissingEvaluator,
    ParseError,
)
from src.core.interfaces import BaseEvaluator, BaseLlmBackend
from src.core.models import LlmParams
from src.core.rng import SeededRng
from src.core.selector import Selector
from src.prompts import Prompt, TemplateId
from src.spaces import (
    Architecture,
    SpaceDescriptor,
    find_architectures,
    neighbors,
    parse_architecture,
    random_architecture,
)
from src.spaces.descriptors import DARTS_INPUTS_PER_NODE

from .registry import BackendContext, BackendRegistry


logger = logging.getLogger(__name__)


class AgentKind(StrEnum):
    """腳本代理種類"""

    RANDOM_VALID = "random_valid"
    GREEDY_MUTATION = "greedy_mutation"
    MAJORITY_RECOMBINATION = "majority_recombination"
    PHASED = "phased"


# 命令列使用的簡稱
AGENT_ALIASES: dict[str, AgentKind] = {
    "random": AgentKind.RANDOM_VALID,
    "greedy": AgentKind.GREEDY_MUTATION,
    "majority": AgentKind.MAJORITY_RECOMBINATION,
}

_NEEDS_EVALUATOR = frozenset({AgentKind.GREEDY_MUTATION, AgentKind.PHASED})

GENERIC_STRATEGY: str = (
    "Replace weak parameter-free operators on the deepest edges with "
    "convolutions, keep at least one skip connection from the cell input, "
    "and avoid edges that carry no information."
)
NO_ARCHITECTURE_REPLY: str = "I could not find an architecture to work on."


def resolve_agent_kind(name: str) -> AgentKind:
    """
    解析代理名稱 (接受簡稱)

    Raises:
        ConfigError: 名稱不存在
    """
    if name in AGENT_ALIASES:
        return AGENT_ALIASES[name]
    try:
        return AgentKind(name)
    except ValueError as exc:
        names = sorted([*AGENT_ALIASES, *AgentKind])
        raise ConfigError(f"未知的模擬代理: '{name}'，可用代理: {names}") from exc


def describe_slot(space: SpaceDescriptor, slot: int) -> str:
    """槽位的文字描述"""
    topology = space.topology[slot]
    if not space.has_inputs:
        return f"slot {slot} (edge {topology.predecessors[0]}->{topology.node})"
    side = "first" if slot % DARTS_INPUTS_PER_NODE == 0 else "second"
    return f"slot {slot} ({topology.cell} cell, node {topology.node}, {side} input)"


def read_architectures(space: SpaceDescriptor, text: str) -> list[Architecture]:
    """讀取文字中所有合法架構 (依出現順序，略過不合法的區塊)"""
    archs: list[Architecture] = []
    for block in find_architectures(space, text):
        try:
            archs.append(parse_architecture(space, block))
        except ParseError:
            logger.debug("Scripted agent skipped invalid block: %s", block)
    return archs


def known_value(arch: Architecture, evaluator: BaseEvaluator) -> float:
    """不計數的定向分數；部分表格缺少的架構視為 -inf"""
    try:
        return evaluator.score(arch).oriented_value
    except ArchitectureNotInTable:
        return -math.inf


def greedy_step(arch: Architecture, evaluator: BaseEvaluator) -> Architecture:
    """
    最佳改進的單步鄰居

    依鄰居順序 (槽位遞增、運算子遞增) 走訪，只有嚴格更好才取代，
    因此同分時取最小槽位與最小運算子；沒有更好的鄰居時返回 arch 本身。
    表格中沒有的鄰居一律略過
    """
    best = arch
    best_value = known_value(arch, evaluator)
    for candidate in neighbors(arch):
        value = known_value(candidate, evaluator)
        if value > best_value:
            best, best_value = candidate, value
    return best


def _modal[T: (int, tuple[int, ...])](values: Sequence[T], rng: SeededRng) -> T:
    counts = Counter(values)
    top = max(counts.values())
    modal = sorted(v for v, c in counts.items() if c == top)
    if len(modal) == 1:
        return modal[0]
    return rng.pick(modal)


def majority_vote(
    exemplars: Sequence[Architecture], space: SpaceDescriptor, rng: SeededRng
) -> Architecture:
    """
    逐槽位多數決

    同票時以 rng 從排序後的眾數中挑選；DARTS 的輸入以每個節點的輸入對整體投票，
    結果因此必定合法
    """
    genes = tuple(
        _modal([arch.genes[slot] for arch in exemplars], rng)
        for slot in range(space.slot_count)
    )
    if not space.has_inputs:
        return Architecture(space.space_id, genes)

    inputs: list[int] = []
    for start in range(0, space.slot_count, DARTS_INPUTS_PER_NODE):
        pairs = [arch.inputs[start : start + DARTS_INPUTS_PER_NODE] for arch in exemplars]
        inputs.extend(_modal(pairs, rng))
    return Architecture(space.space_id, genes, tuple(inputs))


def _describe_change(before: Architecture, after: Architecture) -> str:
    space = before.space
    names = space.operator_names
    for slot in range(space.slot_count):
        if before.genes[slot] != after.genes[slot]:
            return (
                f"Change {describe_slot(space, slot)}: replace "
                f"{names[before.genes[slot]]} with {names[after.genes[slot]]}, "
                "which should raise the measured score."
            )
        if before.inputs and before.inputs[slot] != after.inputs[slot]:
            return (
                f"Change {describe_slot(space, slot)}: reconnect it from input "
                f"{before.inputs[slot]} to input {after.inputs[slot]}, "
                "which should raise the measured score."
            )
    return (
        f"No single change improves this architecture; keep {describe_slot(space, 0)} "
        "and every other slot unchanged."
    )


def _answer(arch: Architecture, note: str) -> str:
    return f"{note}\n{arch.canonical_text}"


@BackendRegistry.register("mock", "確定性模擬代理 (random / greedy / majority / phased)")
class ScriptedBackend(BaseLlmBackend):
    """
    模擬代理後端

    Attributes:
        kind: 代理種類
        space: 搜尋空間
        evaluator: 評估器 (greedy 與 phased 需要)
        rng: 代理專用亂數子串流
    """

    name: ClassVar[str] = "mock"
    replayable: ClassVar[bool] = True

    def __init__(
        self,
        kind: AgentKind,
        space: SpaceDescriptor,
        evaluator: BaseEvaluator | None,
        rng: SeededRng,
    ) -> None:
        if kind in _NEEDS_EVALUATOR and evaluator is None:
            raise MissingEvaluator(f"{kind} 代理需要評估器")
        self.kind = kind
        self.space = space
        self.evaluator = evaluator
        self.rng = rng

    @classmethod
    def from_selector(cls, selector: Selector, context: BackendContext) -> "ScriptedBackend":
        """由 "mock:greedy" 建立；省略代理種類時為 random_valid"""
        selector.check_keys(set(), variants=[*AGENT_ALIASES, *AgentKind])
        kind = resolve_agent_kind(selector.variant or AgentKind.RANDOM_VALID)
        return cls(kind, context.space, context.evaluator, context.rng)

    def complete(self, prompt: Prompt, params: LlmParams) -> str:
        """依模板代號產生回覆 (忽略取樣參數)"""
        match prompt.template_id:
            case TemplateId.C:
                return self._strategy(prompt)
            case TemplateId.D:
                return self._modify(prompt)
            case TemplateId.E:
                return self._inspire(prompt)

    def _greedy(self, arch: Architecture) -> Architecture:
        if self.evaluator is None:
            raise MissingEvaluator(f"{self.kind} 代理需要評估器")
        return greedy_step(arch, self.evaluator)

    def _strategy(self, prompt: Prompt) -> str:
        if self.kind not in _NEEDS_EVALUATOR:
            return GENERIC_STRATEGY
        archs = read_architectures(self.space, prompt.user_text)
        if not archs:
            return GENERIC_STRATEGY
        current = archs[-1]
        return _describe_change(current, self._greedy(current))

    def _modify(self, prompt: Prompt) -> str:
        if self.kind is AgentKind.RANDOM_VALID:
            return _answer(random_architecture(self.space, self.rng), "Proposed architecture:")
        archs = read_architectures(self.space, prompt.user_text)
        if not archs:
            return NO_ARCHITECTURE_REPLY
        current = archs[-1]
        if self.kind is AgentKind.MAJORITY_RECOMBINATION:
            return _answer(current, "The architecture already follows the strategy:")
        return _answer(self._greedy(current), "Architecture after applying the strategy:")

    def _inspire(self, prompt: Prompt) -> str:
        if self.kind is AgentKind.RANDOM_VALID:
            return _answer(random_architecture(self.space, self.rng), "Proposed architecture:")
        exemplars = read_architectures(self.space, prompt.user_text)
        if not exemplars:
            return NO_ARCHITECTURE_REPLY
        if self.kind is AgentKind.GREEDY_MUTATION:
            evaluator = self.evaluator
            assert evaluator is not None
            anchor = max(exemplars, key=lambda a: known_value(a, evaluator))
            return _answer(self._greedy(anchor), "Improved version of the best exemplar:")
        merged = majority_vote(exemplars, self.space, self.rng)
        return _answer(merged, f"Per-slot majority of {len(exemplars)} exemplars:")


def make_scripted_agent(
    kind: AgentKind | str,
    space: SpaceDescriptor,
    evaluator: BaseEvaluator | None,
    rng: SeededRng,
) -> ScriptedBackend:
    """
    建立模擬代理

    Args:
        kind: 代理種類 (接受簡稱)
        space: 搜尋空間
        evaluator: 評估器 (greedy_mutation 與 phased 需要)
        rng: 代理專用亂數子串流

    Raises:
        MissingEvaluator: greedy_mutation 缺少評估器
        ConfigError: 未知的代理種類
    """
    return ScriptedBackend(resolve_agent_kind(str(kind)), space, evaluator, rng)
