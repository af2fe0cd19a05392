"""
知識庫模組

保存每次迭代評估過的架構與分數：
- records：完整歷史 (只追加，保留重複)
- index：每個架構的最佳紀錄 (排序與抽樣只使用 index)
"""

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from typing import Any

from src.core.errors import EmptyPool, EmptyRepository
from src.core.models import Fitness, Phase
from src.core.rng import SeededRng
from src.spaces import Architecture, SpaceId, parse_architecture
from src.spaces.descriptors import describe_space


@dataclass(frozen=True)
class ScoredEntry:
    """
    已評估的架構

    Attributes:
        arch: 架構
        fitness: 評估分數
        iteration: 迭代編號 (初始架構為 0)
        phase: 所屬階段
    """

    arch: Architecture
    fitness: Fitness
    iteration: int
    phase: Phase

    def __post_init__(self) -> None:
        if self.iteration < 0:
            raise ValueError(f"迭代編號不可為負: {self.iteration}")

    @property
    def rank_key(self) -> tuple[float, int, str]:
        """排序鍵：分數遞減、迭代遞增、標準字串字典序"""
        return (-self.fitness.oriented_value, self.iteration, self.arch.canonical_text)

    def to_dict(self) -> dict[str, Any]:
        return {
            "arch": self.arch.canonical_text,
            "fitness": self.fitness.to_dict(),
            "iteration": self.iteration,
            "phase": self.phase.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], space_id: SpaceId) -> "ScoredEntry":
        return cls(
            arch=parse_architecture(describe_space(space_id), str(data["arch"])),
            fitness=Fitness.from_dict(data["fitness"]),
            iteration=int(data["iteration"]),
            phase=Phase(data["phase"]),
        )


@dataclass(frozen=True)
class InsertReceipt:
    """插入結果"""

    was_duplicate: bool


class KnowledgeRepository:
    """
    知識庫 S

    單一寫入者 (搜尋迴圈)；寫入之間可有多個讀取者
    """

    def __init__(self) -> None:
        self._records: list[ScoredEntry] = []
        self._index: dict[str, ScoredEntry] = {}

    @property
    def records(self) -> tuple[ScoredEntry, ...]:
        return tuple(self._records)

    @property
    def index(self) -> dict[str, ScoredEntry]:
        return dict(self._index)

    def __len__(self) -> int:
        return len(self._index)

    def __iter__(self) -> Iterator[ScoredEntry]:
        return iter(self._records)

    def __contains__(self, arch: Architecture) -> bool:
        return arch.canonical_text in self._index

    def insert(self, entry: ScoredEntry) -> InsertReceipt:
        """
        插入紀錄

        紀錄一律追加；index 保留分數最高的紀錄，同分時保留最早的迭代
        """
        key = entry.arch.canonical_text
        current = self._index.get(key)
        self._records.append(entry)
        if current is None or entry.rank_key < current.rank_key:
            self._index[key] = entry
        return InsertReceipt(was_duplicate=current is not None)

    def top_k(self, k: int) -> list[ScoredEntry]:
        """
        前 k 名 (不重複架構)

        Args:
            k: 數量 (正整數)；index 不足 k 筆時全部返回
        """
        if k <= 0:
            raise ValueError(f"k 必須為正整數: {k}")
        return sorted(self._index.values(), key=lambda e: e.rank_key)[:k]

    def best(self) -> ScoredEntry:
        """
        目前最佳紀錄

        Raises:
            EmptyRepository: 知識庫為空
        """
        if not self._index:
            raise EmptyRepository("知識庫為空")
        return min(self._index.values(), key=lambda e: e.rank_key)

    @classmethod
    def from_entries(cls, entries: Sequence[ScoredEntry]) -> "KnowledgeRepository":
        """依序插入重建知識庫"""
        repo = cls()
        for entry in entries:
            repo.insert(entry)
        return repo


def sample_xi(top: Sequence[ScoredEntry], xi: int, rng: SeededRng) -> list[ScoredEntry]:
    """
    從前 k 名中不重複均勻抽取 ξ 個範例

    Args:
        top: 前 k 名
        xi: 抽樣數量 (≥ 1)；超過 |top| 時返回全部 (依抽出順序)
        rng: 抽樣子串流

    Returns:
        依抽出順序排列的範例

    Raises:
        EmptyPool: top 為空
    """
    if xi < 1:
        raise ValueError(f"xi 必須為正整數: {xi}")
    if not top:
        raise EmptyPool("沒有可抽樣的範例")
    count = min(xi, len(top))
    return [top[i] for i in rng.sample_indices(len(top), count)]
