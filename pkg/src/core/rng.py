"""
亂數模組

提供兩種確定性亂數來源：
1. SeededRng：以主種子派生具名子串流的執行期亂數 (numpy PCG64)
2. counter_uniform：以鍵值計算的計數器式亂數，與呼叫順序和平台無關

計數器式產生器 "seki-cb64/1" 的定義：
    u64 = blake2b(key, digest_size=8) 以 little-endian 解讀
    u   = (u64 >> 11) * 2^-53        ∈ [0, 1)
其中 key 為各部分以 "|" 連接的 UTF-8 字串
"""

import hashlib
from collections.abc import Sequence

import numpy as np


COUNTER_STREAM_VERSION: str = "seki-cb64/1"

_MASK32 = 0xFFFFFFFF
_DOUBLE_SCALE = 2.0**-53


def _u64(key: str) -> int:
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little", signed=False)


def counter_uniform(*parts: object) -> float:
    """
    計數器式均勻亂數

    Args:
        *parts: 組成鍵值的各部分 (例如 space_id, seed, slot, op)

    Returns:
        [0, 1) 之間的浮點數，只由鍵值決定
    """
    key = "|".join((COUNTER_STREAM_VERSION, *(str(p) for p in parts)))
    return (_u64(key) >> 11) * _DOUBLE_SCALE


def stable_name_key(name: str) -> int:
    """將串流名稱轉換為穩定的 32 位元整數 (不受 PYTHONHASHSEED 影響)"""
    return _u64(name) & _MASK32


class SeededRng:
    """
    具名子串流亂數產生器

    一個主種子派生出多個互不干擾的子串流，
    改變某個消費者的抽樣次數不會影響其他子串流

    Attributes:
        seed: 主種子
        stream: 串流路徑名稱，例如 "root/init"
    """

    def __init__(self, seed: int, stream: str = "root") -> None:
        if seed < 0:
            raise ValueError(f"種子必須為非負整數: {seed}")
        self.seed = seed
        self.stream = stream
        spawn_key = tuple(stable_name_key(part) for part in stream.split("/"))
        sequence = np.random.SeedSequence(entropy=seed, spawn_key=spawn_key)
        self._gen = np.random.Generator(np.random.PCG64(sequence))

    def substream(self, name: str) -> "SeededRng":
        """建立具名子串流"""
        return SeededRng(self.seed, f"{self.stream}/{name}")

    def below(self, high: int) -> int:
        """[0, high) 之間的均勻整數"""
        return int(self._gen.integers(high))

    def random(self) -> float:
        """[0, 1) 之間的均勻浮點數"""
        return float(self._gen.random())

    def sample_indices(self, population: int, count: int) -> list[int]:
        """
        不重複抽樣

        Args:
            population: 母體大小
            count: 抽樣數量 (不可超過母體大小)

        Returns:
            依抽出順序排列的索引
        """
        drawn = self._gen.choice(population, size=count, replace=False)
        return [int(i) for i in drawn]

    def pick[T](self, items: Sequence[T]) -> T:
        """從序列中均勻挑選一個元素"""
        return items[self.below(len(items))]

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed}, stream={self.stream!r})"
