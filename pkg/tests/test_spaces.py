import sys
from pathlib import Path

import pytest


ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.append(str(ROOT))

from src.core.errors import (
    ArityMismatch,
    InvalidInputIndex,
    MalformedEncoding,
    NoArchitectureFound,
    NotEnumerable,
    UnknownOperator,
)
from src.core.rng import SeededRng
from src.spaces import (
    Architecture,
    SpaceDescriptor,
    SpaceId,
    describe_space,
    enumerate_space,
    extract_architecture,
    find_architectures,
    neighbors,
    parse_architecture,
    random_architecture,
)


NAS201_BEST = (
    "|nor_conv_3x3~0|+|nor_conv_3x3~0|nor_conv_3x3~1|"
    "+|skip_connect~0|nor_conv_3x3~1|nor_conv_3x3~2|"
)


def test_descriptor_shapes() -> None:
    nas201 = describe_space("nas201")
    trans101 = describe_space(SpaceId.TRANS101)
    darts = describe_space(SpaceId.DARTS)

    assert (nas201.operator_count, nas201.slot_count, nas201.size) == (5, 6, 15625)
    assert (trans101.operator_count, trans101.slot_count, trans101.size) == (4, 6, 4096)
    assert (darts.operator_count, darts.slot_count) == (8, 16)
    assert darts.cells == ("normal", "reduce")
    assert not darts.enumerable
    with pytest.raises(ValueError):
        describe_space("nas301")


def test_render_follows_edge_order(nas201: SpaceDescriptor) -> None:
    arch = Architecture(SpaceId.NAS201, (3, 3, 3, 1, 3, 3))

    assert arch.canonical_text == NAS201_BEST
    assert parse_architecture(nas201, f"  {NAS201_BEST}\n") == arch


@pytest.mark.parametrize("space_id", list(SpaceId))
def test_parse_render_round_trip(space_id: SpaceId) -> None:
    space = describe_space(space_id)
    rng = SeededRng(11).substream(space_id.value)

    for _ in range(1000):
        arch = random_architecture(space, rng)
        assert parse_architecture(space, arch.canonical_text) == arch


def test_darts_encoding(darts: SpaceDescriptor) -> None:
    arch = random_architecture(darts, SeededRng(5))
    text = arch.canonical_text

    assert text.startswith("normal=((")
    assert " reduce=((" in text
    assert text.count("@") == 16
    # 允許額外空白
    assert parse_architecture(darts, text.replace(", ", " ,  ")) == arch


@pytest.mark.parametrize(
    ("text", "error"),
    [
        ("|conv_9x9~0|+|none~0|none~1|+|none~0|none~1|none~2|", UnknownOperator),
        ("|none~0|+|none~0|none~1|", ArityMismatch),
        ("|none~1|+|none~0|none~1|+|none~0|none~1|none~2|", InvalidInputIndex),
        ("|none~0|none~0|+|none~1|+|none~0|none~1|none~2|", MalformedEncoding),
        ("not an architecture", MalformedEncoding),
    ],
)
def test_parse_errors(nas201: SpaceDescriptor, text: str, error: type[Exception]) -> None:
    with pytest.raises(error):
        parse_architecture(nas201, text)


def test_trans101_rejects_nas201_operators(trans101: SpaceDescriptor) -> None:
    with pytest.raises(UnknownOperator):
        parse_architecture(trans101, NAS201_BEST)


def test_darts_input_validation() -> None:
    genes = (4,) * 16
    valid_inputs = (0, 1, 0, 2, 1, 3, 2, 4) * 2

    Architecture(SpaceId.DARTS, genes, valid_inputs)
    with pytest.raises(InvalidInputIndex):
        # 同一節點的兩個輸入相同
        Architecture(SpaceId.DARTS, genes, (0, 0, *valid_inputs[2:]))
    with pytest.raises(InvalidInputIndex):
        # 節點 0 只能連到 0 或 1
        Architecture(SpaceId.DARTS, genes, (0, 2, *valid_inputs[2:]))
    with pytest.raises(ArityMismatch):
        Architecture(SpaceId.DARTS, genes, valid_inputs[:-1])
    with pytest.raises(MalformedEncoding):
        Architecture(SpaceId.NAS201, (0,) * 6, (0,) * 6)


def test_extract_takes_last_block(nas201: SpaceDescriptor) -> None:
    first = Architecture(SpaceId.NAS201, (0,) * 6).canonical_text
    reply = f"The old cell was {first}.\nAfter the change:\n{NAS201_BEST}\n"

    assert find_architectures(nas201, reply) == [first, NAS201_BEST]
    assert extract_architecture(nas201, reply).canonical_text == NAS201_BEST


def test_extract_errors(nas201: SpaceDescriptor) -> None:
    with pytest.raises(NoArchitectureFound):
        extract_architecture(nas201, "I would use more convolutions.")
    with pytest.raises(UnknownOperator):
        extract_architecture(
            nas201, f"{NAS201_BEST}\n|sep_conv~0|+|none~0|none~1|+|none~0|none~1|none~2|"
        )


def test_extract_darts_from_prose(darts: SpaceDescriptor) -> None:
    arch = random_architecture(darts, SeededRng(9))

    assert extract_architecture(darts, f"Final answer:\n{arch.canonical_text}") == arch


@pytest.mark.parametrize(("space_id", "count"), [(SpaceId.NAS201, 15625), (SpaceId.TRANS101, 4096)])
def test_enumeration_counts(space_id: SpaceId, count: int) -> None:
    archs = list(enumerate_space(describe_space(space_id)))

    assert len(archs) == count
    assert len({a.canonical_text for a in archs}) == count
    assert [a.genes for a in archs] == sorted(a.genes for a in archs)


def test_darts_is_not_enumerable(darts: SpaceDescriptor) -> None:
    with pytest.raises(NotEnumerable):
        enumerate_space(darts)


@pytest.mark.parametrize(
    ("space_id", "count"),
    [(SpaceId.NAS201, 24), (SpaceId.TRANS101, 18), (SpaceId.DARTS, 136)],
)
def test_neighbor_counts(space_id: SpaceId, count: int) -> None:
    space = describe_space(space_id)
    rng = SeededRng(2)

    for _ in range(20):
        arch = random_architecture(space, rng)
        result = neighbors(arch)
        assert len(result) == count
        assert arch not in result
        assert len(set(result)) == count
        for other in result:
            differing = sum(a != b for a, b in zip(arch.genes, other.genes, strict=True))
            differing += sum(a != b for a, b in zip(arch.inputs, other.inputs, strict=True))
            assert differing == 1


def test_random_architecture_is_deterministic(nas201: SpaceDescriptor) -> None:
    first = [random_architecture(nas201, SeededRng(4)) for _ in range(3)]

    assert first[0] == first[1] == first[2]


@pytest.mark.parametrize(
    ("space_id", "genes"),
    [
        (SpaceId.NAS201, (4, 3, 4, 1, 4, 2)),
        (SpaceId.TRANS101, (3, 2, 3, 1, 3, 1)),
        (SpaceId.DARTS, (6, 5, 6, 2, 7, 3, 5, 7, 7, 2, 3, 2, 6, 5, 1, 1)),
    ],
)
def test_random_architecture_golden_values(space_id: SpaceId, genes: tuple[int, ...]) -> None:
    space = describe_space(space_id)

    arch = random_architecture(space, SeededRng(0))

    assert arch.genes == genes
    assert random_architecture(space, SeededRng(0)) == arch
    assert parse_architecture(space, arch.canonical_text) == arch


def test_random_architecture_collision_rate(nas201: SpaceDescriptor) -> None:
    rng = SeededRng(0)
    pairs = [(random_architecture(nas201, rng), random_architecture(nas201, rng)) for _ in range(10_000)]

    # 10000 對的期望碰撞數為 10000 / 15625 = 0.64
    collisions = sum(a == b for a, b in pairs)
    assert collisions <= 5
    # 20000 次抽樣的期望相異數為 15625 * (1 - e^-1.28) ≈ 11283
    distinct = len({arch for pair in pairs for arch in pair})
    assert 11_000 <= distinct <= 11_500


@pytest.mark.parametrize("space_id", list(SpaceId))
def test_neighbors_are_symmetric(space_id: SpaceId) -> None:
    space = describe_space(space_id)
    rng = SeededRng(6)

    for _ in range(10):
        arch = random_architecture(space, rng)
        for other in neighbors(arch):
            assert arch in neighbors(other)
