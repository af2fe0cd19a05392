"""
搜尋空間模組 - 三種 cell-based 搜尋空間的描述、編碼與取樣
"""

from .architecture import (
    Architecture,
    extract_architecture,
    find_architectures,
    parse_architecture,
    render_architecture,
)
from .descriptors import SlotTopology, SpaceDescriptor, SpaceId, describe_space
from .sampling import enumerate_space, neighbors, random_architecture


__all__ = [
    "Architecture",
    "SlotTopology",
    "SpaceDescriptor",
    "SpaceId",
    "describe_space",
    "enumerate_space",
    "extract_architecture",
    "find_architectures",
    "neighbors",
    "parse_architecture",
    "random_architecture",
    "render_architecture",
]
