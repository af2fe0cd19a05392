"""
提示模板引擎

渲染三種提示模板：
- C：自我演化第一步，分析架構弱點並產生最佳化策略
- D：自我演化第二步，依策略產生新架構
- E：知識啟發，從 ξ 個範例歸納設計模式並產生新架構

模板為外部純文字檔，使用 {NAME} 佔位符，
以 "[system]" / "[user]" 行切分訊息
"""

import hashlib
import logging
import re
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cache
from pathlib import Path
from typing import TYPE_CHECKING

from src.core.errors import (
    EmptyExemplarList,
    EmptyStrategy,
    SpaceMismatch,
    TemplateError,
)
from src.core.models import Fitness
from src.spaces import Architecture, SpaceDescriptor


if TYPE_CHECKING:
    from src.search.repository import ScoredEntry


logger = logging.getLogger(__name__)

# 預設模板目錄
TEMPLATES_DIR: Path = Path(__file__).parent / "templates"

PLACEHOLDER = re.compile(r"\{([A-Z_]+)\}")
_SECTION = re.compile(r"^\[(system|user)\]\s*$", re.MULTILINE)


class TemplateId(StrEnum):
    """模板代號"""

    C = "C"
    D = "D"
    E = "E"


class Role(StrEnum):
    SYSTEM = "system"
    USER = "user"


# 各模板可用與必要的佔位符
_ALLOWED: dict[TemplateId, frozenset[str]] = {
    TemplateId.C: frozenset({"TASK", "SPACE_DESC", "ARCH", "SCORE"}),
    TemplateId.D: frozenset({"STRATEGY", "ARCH", "SPACE_DESC"}),
    TemplateId.E: frozenset({"EXEMPLARS", "TASK", "SPACE_DESC"}),
}
_REQUIRED: dict[TemplateId, frozenset[str]] = {
    TemplateId.C: frozenset({"ARCH", "SCORE"}),
    TemplateId.D: frozenset({"STRATEGY", "ARCH"}),
    TemplateId.E: frozenset({"EXEMPLARS"}),
}


@dataclass(frozen=True)
class Message:
    role: Role
    text: str


@dataclass(frozen=True)
class Prompt:
    """
    已渲染的提示

    Attributes:
        template_id: 模板代號
        messages: 依序的角色訊息
        content_digest: 所有文字的 SHA-256 摘要 (自動計算)
    """

    template_id: TemplateId
    messages: tuple[Message, ...]
    content_digest: str = field(default="", init=False)

    def __post_init__(self) -> None:
        if not self.messages:
            raise TemplateError("提示不可為空")
        digest = hashlib.sha256()
        for message in self.messages:
            digest.update(f"{message.role}\n{message.text}\0".encode())
        object.__setattr__(self, "content_digest", digest.hexdigest())

    @property
    def text(self) -> str:
        """所有訊息文字串接"""
        return "\n\n".join(message.text for message in self.messages)

    @property
    def user_text(self) -> str:
        return "\n\n".join(m.text for m in self.messages if m.role is Role.USER)

    def with_reminder(self, reminder: str) -> "Prompt":
        """附加一則使用者提醒訊息 (格式重試用)"""
        return Prompt(self.template_id, (*self.messages, Message(Role.USER, reminder)))


@dataclass(frozen=True)
class OptimizationStrategy:
    """
    最佳化策略 OSᵢ

    Attributes:
        text: 策略內容
        source_iteration: 產生策略的迭代編號
    """

    text: str
    source_iteration: int = 0

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise EmptyStrategy("最佳化策略不可為空")


@dataclass(frozen=True)
class PromptTemplate:
    """已載入並驗證的模板"""

    template_id: TemplateId
    sections: tuple[tuple[Role, str], ...]

    @classmethod
    def parse(cls, template_id: TemplateId, source: str) -> "PromptTemplate":
        """
        解析模板文字

        Raises:
            TemplateError: 缺少段落、未知或缺少必要佔位符
        """
        markers = list(_SECTION.finditer(source))
        if not markers:
            raise TemplateError(f"模板 {template_id} 缺少 [system]/[user] 段落")

        sections: list[tuple[Role, str]] = []
        for i, marker in enumerate(markers):
            end = markers[i + 1].start() if i + 1 < len(markers) else len(source)
            sections.append((Role(marker.group(1)), source[marker.end() : end].strip()))

        used = {name for _, text in sections for name in PLACEHOLDER.findall(text)}
        unknown = used - _ALLOWED[template_id]
        if unknown:
            raise TemplateError(f"模板 {template_id} 含未知佔位符: {sorted(unknown)}")
        missing = _REQUIRED[template_id] - used
        if missing:
            raise TemplateError(f"模板 {template_id} 缺少必要佔位符: {sorted(missing)}")
        return cls(template_id, tuple(sections))

    def render(self, values: Mapping[str, str]) -> Prompt:
        """單次替換所有佔位符 (替換後的內容不再掃描)"""
        messages = tuple(
            Message(role, PLACEHOLDER.sub(lambda m: values[m.group(1)], text))
            for role, text in self.sections
        )
        return Prompt(self.template_id, messages)


def load_template(path: Path, template_id: TemplateId) -> PromptTemplate:
    """
    從檔案載入模板

    Raises:
        TemplateError: 檔案不存在或格式錯誤
    """
    try:
        source = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TemplateError(f"無法讀取模板 {path}: {exc}") from exc
    return PromptTemplate.parse(template_id, source)


def grammar_hint(space: SpaceDescriptor) -> str:
    """編碼文法說明 (以 <op> 等記號表示，本身不構成合法架構字串)"""
    if space.has_inputs:
        node = "(<op>@<input>, <op>@<input>)"
        cell = "(" + ", ".join([node] * 4) + ")"
        return f"normal={cell} reduce={cell}"
    return "|<op>~0|+|<op>~0|<op>~1|+|<op>~0|<op>~1|<op>~2|"


def describe_space_for_prompt(space: SpaceDescriptor) -> str:
    """提示中使用的搜尋空間說明：運算子、拓撲與編碼文法"""
    operators = ", ".join(space.operator_names)
    if space.has_inputs:
        topology = (
            "The network stacks a normal cell and a reduction cell. Each cell has "
            "two input layers (indices 0 and 1) and four sequential nodes "
            "(indices 2 to 5). Node k (k = 0..3) takes exactly two distinct inputs, "
            "each chosen from indices 0..k+1, and applies one operator to each input."
        )
        encoding = (
            "Each node is written as (<op>@<input>, <op>@<input>); each cell lists "
            "its four nodes in order."
        )
    else:
        topology = (
            "The cell is a directed acyclic graph with 4 nodes (0 to 3); node 0 is "
            "the cell input and every pair of nodes j < i is connected by one edge "
            "carrying exactly one operator, giving 6 edges."
        )
        encoding = (
            'Each edge is written as <op>~<source node>; the edges entering each '
            'target node are grouped between "|" and the groups are joined by "+".'
        )
    return "\n".join(
        (
            f"Name: {space.space_id.value} ({space.size} possible architectures)",
            f"Operators ({space.operator_count}): {operators}",
            f"Topology: {topology}",
            f"Encoding: {encoding}",
            f"Template: {grammar_hint(space)}",
        )
    )


def format_reminder(space: SpaceDescriptor) -> str:
    """格式重試時附加的提醒"""
    return (
        "Your previous reply did not contain a valid architecture. Reply with "
        "exactly one architecture on the last line, using only these operators: "
        f"{', '.join(space.operator_names)}, and exactly this encoding: "
        f"{grammar_hint(space)}"
    )


def _check_space(space: SpaceDescriptor, arch: Architecture) -> None:
    if arch.space_id != space.space_id:
        raise SpaceMismatch(space.space_id, arch.space_id)


class PromptEngine:
    """
    提示模板引擎

    模板於建構時載入並驗證，之後渲染為純函數
    """

    def __init__(self, template_dir: Path | None = None) -> None:
        """
        初始化引擎

        Args:
            template_dir: 模板目錄，需包含 prompt_c.txt、prompt_d.txt、prompt_e.txt
        """
        self.template_dir = template_dir or TEMPLATES_DIR
        self._templates = {
            tid: load_template(self.template_dir / f"prompt_{tid.lower()}.txt", tid)
            for tid in TemplateId
        }
        logger.debug("Prompt templates loaded from %s", self.template_dir)

    def render_prompt_c(
        self,
        task: str,
        space: SpaceDescriptor,
        arch: Architecture,
        score: Fitness,
    ) -> Prompt:
        """
        渲染模板 C：分析架構並提出最佳化策略

        Raises:
            SpaceMismatch: 架構不屬於 space
        """
        _check_space(space, arch)
        return self._templates[TemplateId.C].render(
            {
                "TASK": task,
                "SPACE_DESC": describe_space_for_prompt(space),
                "ARCH": arch.canonical_text,
                "SCORE": score.describe(),
            }
        )

    def render_prompt_d(
        self, strategy: OptimizationStrategy, arch: Architecture
    ) -> Prompt:
        """渲染模板 D：依策略修改架構"""
        if not strategy.text.strip():
            raise EmptyStrategy("最佳化策略不可為空")
        return self._templates[TemplateId.D].render(
            {
                "STRATEGY": strategy.text.strip(),
                "ARCH": arch.canonical_text,
                "SPACE_DESC": describe_space_for_prompt(arch.space),
            }
        )

    def render_prompt_e(
        self,
        exemplars: Sequence["ScoredEntry"],
        task: str,
        space: SpaceDescriptor,
    ) -> Prompt:
        """
        渲染模板 E：從範例歸納設計模式

        Raises:
            EmptyExemplarList: 範例為空
            SpaceMismatch: 範例不屬於 space
        """
        if not exemplars:
            raise EmptyExemplarList("知識啟發至少需要一個範例")
        for entry in exemplars:
            _check_space(space, entry.arch)
        lines = [
            f"{i}. {entry.arch.canonical_text}  score: {entry.fitness.describe()}"
            for i, entry in enumerate(exemplars, 1)
        ]
        return self._templates[TemplateId.E].render(
            {
                "EXEMPLARS": "\n".join(lines),
                "TASK": task,
                "SPACE_DESC": describe_space_for_prompt(space),
            }
        )


@cache
def default_engine() -> PromptEngine:
    """使用內建模板的共用引擎"""
    return PromptEngine()


def render_prompt_c(
    task: str, space: SpaceDescriptor, arch: Architecture, score: Fitness
) -> Prompt:
    return default_engine().render_prompt_c(task, space, arch, score)


def render_prompt_d(strategy: OptimizationStrategy, arch: Architecture) -> Prompt:
    return default_engine().render_prompt_d(strategy, arch)


def render_prompt_e(
    exemplars: Sequence["ScoredEntry"], task: str, space: SpaceDescriptor
) -> Prompt:
    return default_engine().render_prompt_e(exemplars, task, space)
