import sys
from collections import Counter
from pathlib import Path

import numpy as np
import pytest


ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.append(str(ROOT))

from src.core.errors import EmptyPool, EmptyRepository
from src.core.models import Direction, Fitness, Phase
from src.core.rng import SeededRng
from src.search import KnowledgeRepository, ScoredEntry, sample_xi
from src.spaces import Architecture, SpaceDescriptor, SpaceId, random_architecture


# 自由度 11、顯著水準 0.001 的卡方臨界值
CHI_SQUARE_CRITICAL_DF11 = 31.264


def _entry(arch: Architecture, value: float, iteration: int) -> ScoredEntry:
    fitness = Fitness.from_raw(value, "acc", Direction.MAXIMIZE)
    return ScoredEntry(arch, fitness, iteration, Phase.SELF_EVOLUTION)


def _archs(space: SpaceDescriptor, count: int, seed: int = 0) -> list[Architecture]:
    rng = SeededRng(seed)
    result: list[Architecture] = []
    while len(result) < count:
        arch = random_architecture(space, rng)
        if arch not in result:
            result.append(arch)
    return result


def test_insert_keeps_history_and_best(nas201: SpaceDescriptor) -> None:
    repo = KnowledgeRepository()
    arch = _archs(nas201, 1)[0]

    first = repo.insert(_entry(arch, 90.0, 0))
    second = repo.insert(_entry(arch, 90.0, 1))

    assert not first.was_duplicate
    assert second.was_duplicate
    assert len(repo.records) == 2
    assert len(repo) == 1
    assert arch in repo
    # 同分時保留最早的迭代
    assert repo.index[arch.canonical_text].iteration == 0


def test_index_keeps_higher_score(nas201: SpaceDescriptor) -> None:
    repo = KnowledgeRepository()
    arch = _archs(nas201, 1)[0]

    repo.insert(_entry(arch, 80.0, 0))
    repo.insert(_entry(arch, 85.0, 3))
    repo.insert(_entry(arch, 70.0, 4))

    assert repo.best().fitness.raw_metric == 85.0
    assert repo.best().iteration == 3
    assert [e.iteration for e in repo] == [0, 3, 4]


def test_fifty_distinct_architectures(nas201: SpaceDescriptor) -> None:
    repo = KnowledgeRepository()

    for i, arch in enumerate(_archs(nas201, 50)):
        receipt = repo.insert(_entry(arch, float(i), i))
        assert not receipt.was_duplicate
        assert len(repo.records) == i + 1

    assert len(repo) == 50


def test_top_k_ordering(nas201: SpaceDescriptor) -> None:
    a, b, c, d = _archs(nas201, 4)
    repo = KnowledgeRepository.from_entries(
        [_entry(a, 90.0, 0), _entry(b, 95.0, 1), _entry(c, 90.0, 2), _entry(d, 80.0, 3)]
    )

    top = repo.top_k(3)

    assert [e.arch for e in top] == [b, a, c]
    assert len(repo.top_k(10)) == 4
    with pytest.raises(ValueError):
        repo.top_k(0)


def test_best_on_empty_repository() -> None:
    with pytest.raises(EmptyRepository):
        KnowledgeRepository().best()


def _brute_force(entries: list[ScoredEntry]) -> list[ScoredEntry]:
    best: dict[str, ScoredEntry] = {}
    for entry in entries:
        key = entry.arch.canonical_text
        current = best.get(key)
        if current is None:
            best[key] = entry
            continue
        better = entry.fitness.oriented_value > current.fitness.oriented_value
        tie_earlier = (
            entry.fitness.oriented_value == current.fitness.oriented_value
            and entry.iteration < current.iteration
        )
        if better or tie_earlier:
            best[key] = entry
    return sorted(
        best.values(),
        key=lambda e: (-e.fitness.oriented_value, e.iteration, e.arch.canonical_text),
    )


def test_randomized_repositories_match_full_sort(nas201: SpaceDescriptor) -> None:
    pool = _archs(nas201, 40, seed=1)
    gen = np.random.default_rng(2024)

    for _ in range(1000):
        size = int(gen.integers(1, 201))
        picks = gen.integers(0, len(pool), size=size)
        # 分數只取少數幾個值，製造同分
        values = gen.integers(0, 6, size=size)
        entries = [
            _entry(pool[int(p)], float(v), i) for i, (p, v) in enumerate(zip(picks, values, strict=True))
        ]
        repo = KnowledgeRepository.from_entries(entries)
        expected = _brute_force(entries)
        k = int(gen.integers(1, 20))

        assert repo.top_k(k) == expected[:k]
        assert repo.best() == expected[0]
        assert repo.best().fitness.oriented_value == max(e.fitness.oriented_value for e in entries)
        assert len(repo.records) == size


def test_sample_xi_without_repetition(nas201: SpaceDescriptor) -> None:
    top = [_entry(a, float(i), i) for i, a in enumerate(_archs(nas201, 8))]
    rng = SeededRng(1).substream("xi")

    for _ in range(200):
        drawn = sample_xi(top, 5, rng)
        assert len(drawn) == 5
        assert len({e.arch for e in drawn}) == 5
        assert all(e in top for e in drawn)

    assert len(sample_xi(top[:3], 5, rng)) == 3


def test_sample_xi_errors(nas201: SpaceDescriptor) -> None:
    top = [_entry(a, 1.0, i) for i, a in enumerate(_archs(nas201, 2))]

    with pytest.raises(EmptyPool):
        sample_xi([], 2, SeededRng(1))
    with pytest.raises(ValueError):
        sample_xi(top, 0, SeededRng(1))


def test_sample_xi_is_permutation_uniform(nas201: SpaceDescriptor) -> None:
    top = [_entry(a, float(i), i) for i, a in enumerate(_archs(nas201, 4))]
    rng = SeededRng(7).substream("xi")
    draws = 40000

    counts = Counter(
        tuple(e.iteration for e in sample_xi(top, 2, rng)) for _ in range(draws)
    )

    # 4 取 2 的有序排列共 12 種
    assert len(counts) == 12
    expected = draws / 12
    chi_square = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi_square < CHI_SQUARE_CRITICAL_DF11


def test_entry_dict_round_trip(nas201: SpaceDescriptor) -> None:
    entry = _entry(_archs(nas201, 1)[0], 91.5, 7)

    assert ScoredEntry.from_dict(entry.to_dict(), SpaceId.NAS201) == entry
    with pytest.raises(ValueError):
        _entry(entry.arch, 1.0, -1)
