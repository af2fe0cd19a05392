"""
搜尋空間取樣模組

隨機取樣、窮舉與單步鄰域
"""

import itertools
from collections.abc import Iterator

from src.core.errors import NotEnumerable
from src.core.rng import SeededRng

from .architecture import Architecture
from .descriptors import DARTS_INPUTS_PER_NODE, SpaceDescriptor


def random_architecture(space: SpaceDescriptor, rng: SeededRng) -> Architecture:
    """
    均勻隨機取樣一個合法架構

    Args:
        space: 搜尋空間描述
        rng: 亂數來源 (會前進其狀態)

    Returns:
        合法架構；給定 rng 狀態時結果固定
    """
    genes = tuple(rng.below(space.operator_count) for _ in range(space.slot_count))
    if not space.has_inputs:
        return Architecture(space.space_id, genes)

    inputs: list[int] = []
    for start in range(0, space.slot_count, DARTS_INPUTS_PER_NODE):
        choices = len(space.topology[start].predecessors)
        # 有序且互異的輸入對
        inputs.extend(rng.sample_indices(choices, DARTS_INPUTS_PER_NODE))
    return Architecture(space.space_id, genes, tuple(inputs))


def enumerate_space(space: SpaceDescriptor) -> Iterator[Architecture]:
    """
    依基因字典序窮舉整個搜尋空間

    Args:
        space: 搜尋空間描述

    Yields:
        每個合法架構恰好一次

    Raises:
        NotEnumerable: 空間不可窮舉 (DARTS)
    """
    if not space.enumerable:
        raise NotEnumerable(space.space_id)
    return _enumerate(space)


def _enumerate(space: SpaceDescriptor) -> Iterator[Architecture]:
    for genes in itertools.product(range(space.operator_count), repeat=space.slot_count):
        yield Architecture(space.space_id, genes)


def neighbors(arch: Architecture) -> list[Architecture]:
    """
    單步鄰域

    與 arch 恰好一個槽位不同的所有架構；順序為槽位遞增，
    同槽位內先運算子 (索引遞增) 後輸入節點 (僅 DARTS)

    Args:
        arch: 合法架構

    Returns:
        不含 arch 本身且無重複的鄰居列表
    """
    space = arch.space
    result: list[Architecture] = []
    for slot in range(space.slot_count):
        current = arch.genes[slot]
        result.extend(
            arch.with_operator(slot, op)
            for op in range(space.operator_count)
            if op != current
        )
        if not space.has_inputs:
            continue

        sibling = slot + 1 if slot % DARTS_INPUTS_PER_NODE == 0 else slot - 1
        taken = {arch.inputs[slot], arch.inputs[sibling]}
        result.extend(
            arch.with_input(slot, index)
            for index in space.topology[slot].predecessors
            if index not in taken
        )
    return result
