"""
搜尋空間描述模組

定義三種 cell-based 搜尋空間 (NAS201、Trans101、DARTS) 的固定描述，
運算子順序屬於公開契約，不可變更
"""

import math
from dataclasses import dataclass
from enum import StrEnum


class SpaceId(StrEnum):
    """搜尋空間代號"""

    NAS201 = "nas201"
    TRANS101 = "trans101"
    DARTS = "darts"


@dataclass(frozen=True)
class SlotTopology:
    """
    單一決策槽位的拓撲

    Attributes:
        cell: 所屬 cell 名稱 (NAS201/Trans101 為 "cell")
        node: 目標節點編號
        predecessors: 可選的前驅節點；NAS201/Trans101 只有一個固定前驅
    """

    cell: str
    node: int
    predecessors: tuple[int, ...]


@dataclass(frozen=True)
class SpaceDescriptor:
    """
    搜尋空間描述

    Attributes:
        space_id: 搜尋空間代號
        operator_names: 運算子標籤 (順序即基因編碼)
        slot_count: 決策槽位數
        topology: 各槽位的前驅描述
        enumerable: 是否可窮舉
        task_description: 預設目標任務說明
        cells: cell 名稱 (DARTS 為 normal、reduce)
    """

    space_id: SpaceId
    operator_names: tuple[str, ...]
    slot_count: int
    topology: tuple[SlotTopology, ...]
    enumerable: bool
    task_description: str
    cells: tuple[str, ...] = ("cell",)

    @property
    def operator_count(self) -> int:
        return len(self.operator_names)

    @property
    def has_inputs(self) -> bool:
        """是否帶有輸入索引基因 (僅 DARTS)"""
        return self.space_id is SpaceId.DARTS

    @property
    def size(self) -> int:
        """搜尋空間的精確大小"""
        if not self.has_inputs:
            return self.operator_count**self.slot_count
        # DARTS：每個節點的兩個輸入為有序且互異
        per_cell = 1
        for node in range(DARTS_NODES):
            choices = node + 2
            per_cell *= self.operator_count**2 * math.perm(choices, 2)
        return per_cell ** len(self.cells)

    def operator_index(self, label: str) -> int | None:
        """查詢運算子索引，不存在時返回 None"""
        try:
            return self.operator_names.index(label)
        except ValueError:
            return None


# NAS-Bench-201 的邊順序：(1←0), (2←0), (2←1), (3←0), (3←1), (3←2)
_CELL_EDGES: tuple[SlotTopology, ...] = tuple(
    SlotTopology(cell="cell", node=node, predecessors=(pred,))
    for node in range(1, 4)
    for pred in range(node)
)

DARTS_NODES: int = 4
DARTS_INPUTS_PER_NODE: int = 2

_DARTS_SLOTS: tuple[SlotTopology, ...] = tuple(
    SlotTopology(cell=cell, node=node, predecessors=tuple(range(node + 2)))
    for cell in ("normal", "reduce")
    for node in range(DARTS_NODES)
    for _ in range(DARTS_INPUTS_PER_NODE)
)

NAS201_OPERATORS: tuple[str, ...] = (
    "none",
    "skip_connect",
    "nor_conv_1x1",
    "nor_conv_3x3",
    "avg_pool_3x3",
)

TRANS101_OPERATORS: tuple[str, ...] = (
    "zero",
    "skip_connect",
    "conv_1x1",
    "conv_3x3",
)

DARTS_OPERATORS: tuple[str, ...] = (
    "none",
    "max_pool_3x3",
    "avg_pool_3x3",
    "skip_connect",
    "sep_conv_3x3",
    "sep_conv_5x5",
    "dil_conv_3x3",
    "dil_conv_5x5",
)

_DESCRIPTORS: dict[SpaceId, SpaceDescriptor] = {
    SpaceId.NAS201: SpaceDescriptor(
        space_id=SpaceId.NAS201,
        operator_names=NAS201_OPERATORS,
        slot_count=len(_CELL_EDGES),
        topology=_CELL_EDGES,
        enumerable=True,
        task_description=(
            "Image classification on CIFAR-10 with a cell-based network; "
            "find the cell that maximizes test accuracy."
        ),
    ),
    SpaceId.TRANS101: SpaceDescriptor(
        space_id=SpaceId.TRANS101,
        operator_names=TRANS101_OPERATORS,
        slot_count=len(_CELL_EDGES),
        topology=_CELL_EDGES,
        enumerable=True,
        task_description=(
            "Dense and global vision tasks (classification, segmentation, "
            "autoencoding, room layout) sharing one searched cell."
        ),
    ),
    SpaceId.DARTS: SpaceDescriptor(
        space_id=SpaceId.DARTS,
        operator_names=DARTS_OPERATORS,
        slot_count=len(_DARTS_SLOTS),
        topology=_DARTS_SLOTS,
        enumerable=False,
        task_description=(
            "Image classification on CIFAR-10 with stacked normal and "
            "reduction cells; find the cell pair with the best accuracy."
        ),
        cells=("normal", "reduce"),
    ),
}


def describe_space(space_id: SpaceId | str) -> SpaceDescriptor:
    """
    取得搜尋空間描述

    Args:
        space_id: 搜尋空間代號 (可為字串)

    Returns:
        固定的搜尋空間描述

    Raises:
        ValueError: 當代號不存在時
    """
    return _DESCRIPTORS[SpaceId(space_id)]
