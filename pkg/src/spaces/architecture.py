"""
架構編碼模組

負責架構的驗證、標準字串編碼 (render) 與解析 (parse)，
以及從 LLM 輸出中擷取架構 (extract)

NAS201/Trans101 採用 NAS-Bench-201 的 arch-string 慣例：
    |op~0|+|op~0|op~1|+|op~0|op~1|op~2|
DARTS 每個 cell 為四個節點，每個節點兩組 (運算子@輸入)：
    normal=((op@i, op@j), ...) reduce=((op@i, op@j), ...)
完整文法見 docs/formats.md
"""

import re
from dataclasses import dataclass, replace
from functools import cached_property

from src.core.errors import (
    ArityMismatch,
    InvalidInputIndex,
    MalformedEncoding,
    NoArchitectureFound,
    UnknownOperator,
)

from .descriptors import (
    DARTS_INPUTS_PER_NODE,
    DARTS_NODES,
    SpaceDescriptor,
    SpaceId,
    describe_space,
)


_LABEL = r"[A-Za-z0-9_]+"

# 形狀層級的比對：只要結構完整即視為候選區塊，內容交給 parse 驗證
_CELL_BLOCK = re.compile(rf"\|(?:{_LABEL}~\d+\|)+(?:\+\|(?:{_LABEL}~\d+\|)+)*")
_CELL_EDGE = re.compile(rf"({_LABEL})~(\d+)")

_PAIR = rf"\(\s*{_LABEL}\s*@\s*\d+\s*,\s*{_LABEL}\s*@\s*\d+\s*\)"
_CELL_BODY = rf"\(\s*(?:{_PAIR}(?:\s*,\s*{_PAIR})*)?\s*\)"
_DARTS_BLOCK = re.compile(
    rf"normal\s*=\s*(?P<normal>{_CELL_BODY})\s*reduce\s*=\s*(?P<reduce>{_CELL_BODY})"
)
_DARTS_PAIR = re.compile(
    rf"\(\s*({_LABEL})\s*@\s*(\d+)\s*,\s*({_LABEL})\s*@\s*(\d+)\s*\)"
)


@dataclass(frozen=True)
class Architecture:
    """
    架構

    Attributes:
        space_id: 所屬搜尋空間
        genes: 各槽位的運算子索引
        inputs: 各槽位的輸入節點索引 (僅 DARTS，其他空間為空)
    """

    space_id: SpaceId
    genes: tuple[int, ...]
    inputs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        # 正規化為內建 int，避免 numpy 整數影響雜湊與序列化
        object.__setattr__(self, "space_id", SpaceId(self.space_id))
        object.__setattr__(self, "genes", tuple(int(g) for g in self.genes))
        object.__setattr__(self, "inputs", tuple(int(i) for i in self.inputs))
        _validate(describe_space(self.space_id), self.genes, self.inputs)

    @property
    def space(self) -> SpaceDescriptor:
        return describe_space(self.space_id)

    @cached_property
    def canonical_text(self) -> str:
        """標準字串編碼"""
        return render_architecture(self)

    def with_operator(self, slot: int, op: int) -> "Architecture":
        """替換單一槽位的運算子"""
        genes = list(self.genes)
        genes[slot] = op
        return replace(self, genes=tuple(genes))

    def with_input(self, slot: int, index: int) -> "Architecture":
        """替換單一槽位的輸入節點 (僅 DARTS)"""
        inputs = list(self.inputs)
        inputs[slot] = index
        return replace(self, inputs=tuple(inputs))

    def __str__(self) -> str:
        return self.canonical_text


def _validate(
    space: SpaceDescriptor, genes: tuple[int, ...], inputs: tuple[int, ...]
) -> None:
    if len(genes) != space.slot_count:
        raise ArityMismatch(space.slot_count, len(genes))
    for op in genes:
        if not 0 <= op < space.operator_count:
            raise UnknownOperator(str(op))

    if not space.has_inputs:
        if inputs:
            raise MalformedEncoding(f"{space.space_id} 不接受輸入索引")
        return

    if len(inputs) != space.slot_count:
        raise ArityMismatch(space.slot_count, len(inputs))
    for start in range(0, space.slot_count, DARTS_INPUTS_PER_NODE):
        node = space.topology[start].node
        first, second = inputs[start], inputs[start + 1]
        for index in (first, second):
            if index not in space.topology[start].predecessors:
                raise InvalidInputIndex(node, index)
        if first == second:
            raise InvalidInputIndex(node, second)


def render_architecture(arch: Architecture) -> str:
    """
    產生標準字串編碼

    Args:
        arch: 已驗證的架構

    Returns:
        標準字串；同一空間內不同架構必定對應不同字串
    """
    space = arch.space
    names = space.operator_names

    if not space.has_inputs:
        groups: dict[int, list[str]] = {}
        for slot, op in zip(space.topology, arch.genes, strict=True):
            groups.setdefault(slot.node, []).append(
                f"{names[op]}~{slot.predecessors[0]}"
            )
        return "+".join("|" + "|".join(edges) + "|" for edges in groups.values())

    cells: list[str] = []
    per_cell = DARTS_NODES * DARTS_INPUTS_PER_NODE
    for c, cell in enumerate(space.cells):
        pairs: list[str] = []
        for start in range(c * per_cell, (c + 1) * per_cell, DARTS_INPUTS_PER_NODE):
            a, b = start, start + 1
            pairs.append(
                f"({names[arch.genes[a]]}@{arch.inputs[a]}, "
                f"{names[arch.genes[b]]}@{arch.inputs[b]})"
            )
        cells.append(f"{cell}=(" + ", ".join(pairs) + ")")
    return " ".join(cells)


def _lookup(space: SpaceDescriptor, label: str) -> int:
    op = space.operator_index(label)
    if op is None:
        raise UnknownOperator(label)
    return op


def _parse_cell_string(space: SpaceDescriptor, text: str) -> Architecture:
    if not _CELL_BLOCK.fullmatch(text):
        raise MalformedEncoding(f"無法辨識的架構字串: {text[:80]}")

    groups = [group.strip("|").split("|") for group in text.split("+")]
    edge_count = sum(len(group) for group in groups)
    if edge_count != space.slot_count:
        raise ArityMismatch(space.slot_count, edge_count)
    if [len(group) for group in groups] != [1, 2, 3]:
        raise MalformedEncoding(f"節點分組錯誤: {text}")

    genes: list[int] = []
    for slot, edge in zip(space.topology, (e for g in groups for e in g), strict=True):
        match = _CELL_EDGE.fullmatch(edge)
        if match is None:
            raise MalformedEncoding(f"無法辨識的邊: {edge}")
        label, pred = match.group(1), int(match.group(2))
        genes.append(_lookup(space, label))
        if pred != slot.predecessors[0]:
            raise InvalidInputIndex(slot.node, pred)
    return Architecture(space.space_id, tuple(genes))


def _parse_darts_string(space: SpaceDescriptor, text: str) -> Architecture:
    match = _DARTS_BLOCK.fullmatch(text)
    if match is None:
        raise MalformedEncoding(f"無法辨識的 DARTS 架構字串: {text[:80]}")

    cell_pairs = [_DARTS_PAIR.findall(match.group(cell)) for cell in space.cells]
    slot_total = sum(len(pairs) for pairs in cell_pairs) * DARTS_INPUTS_PER_NODE
    if slot_total != space.slot_count:
        raise ArityMismatch(space.slot_count, slot_total)
    if any(len(pairs) != DARTS_NODES for pairs in cell_pairs):
        raise MalformedEncoding("每個 cell 必須恰好有 4 個節點")

    genes: list[int] = []
    inputs: list[int] = []
    for pairs in cell_pairs:
        for op_a, in_a, op_b, in_b in pairs:
            genes.extend((_lookup(space, op_a), _lookup(space, op_b)))
            inputs.extend((int(in_a), int(in_b)))
    return Architecture(space.space_id, tuple(genes), tuple(inputs))


def parse_architecture(space: SpaceDescriptor, text: str) -> Architecture:
    """
    解析標準字串編碼

    Args:
        space: 搜尋空間描述
        text: 架構字串 (允許前後空白)

    Returns:
        已驗證的架構

    Raises:
        UnknownOperator: 運算子不在空間內
        ArityMismatch: 槽位數量不符
        InvalidInputIndex: 輸入索引無效
        MalformedEncoding: 字串結構錯誤
    """
    text = text.strip()
    if space.has_inputs:
        return _parse_darts_string(space, text)
    return _parse_cell_string(space, text)


def find_architectures(space: SpaceDescriptor, text: str) -> list[str]:
    """
    找出文字中所有結構完整的架構區塊 (依出現順序)

    Args:
        space: 搜尋空間描述
        text: 任意文字

    Returns:
        候選區塊字串列表，尚未驗證內容
    """
    pattern = _DARTS_BLOCK if space.has_inputs else _CELL_BLOCK
    return [m.group(0) for m in pattern.finditer(text)]


def extract_architecture(space: SpaceDescriptor, llm_text: str) -> Architecture:
    """
    從 LLM 輸出擷取架構

    取最後一個結構完整的區塊 (思考過程通常以最終答案結尾)

    Args:
        space: 搜尋空間描述
        llm_text: LLM 原始輸出

    Returns:
        已驗證的架構

    Raises:
        NoArchitectureFound: 文字中沒有任何架構區塊
    """
    blocks = find_architectures(space, llm_text)
    if not blocks:
        raise NoArchitectureFound("LLM 輸出中找不到架構字串")
    return parse_architecture(space, blocks[-1])
