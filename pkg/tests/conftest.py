import sys
from collections.abc import Callable
from pathlib import Path

import pytest


ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.append(str(ROOT))

from src.core.models import Direction
from src.evaluators import MetricColumn, SurrogateEvaluator, build_surrogate, write_tabular
from src.search import SearchConfig
from src.spaces import Architecture, SpaceDescriptor, SpaceId, describe_space, enumerate_space


@pytest.fixture
def nas201() -> SpaceDescriptor:
    return describe_space(SpaceId.NAS201)


@pytest.fixture
def trans101() -> SpaceDescriptor:
    return describe_space(SpaceId.TRANS101)


@pytest.fixture
def darts() -> SpaceDescriptor:
    return describe_space(SpaceId.DARTS)


@pytest.fixture
def surrogate(nas201: SpaceDescriptor) -> SurrogateEvaluator:
    return SurrogateEvaluator(build_surrogate(nas201, seed=42, beta=0.0))


@pytest.fixture
def partial_trans101(tmp_path: Path, trans101: SpaceDescriptor) -> Path:
    # l2loss = 1 + 0.01 * Σgenes (越小越好)，刻意缺少全零 cell
    zero = Architecture(SpaceId.TRANS101, (0,) * trans101.slot_count)
    rows = (
        (arch.canonical_text, [1.0 + 0.01 * sum(arch.genes)])
        for arch in enumerate_space(trans101)
        if arch != zero
    )
    path = tmp_path / "trans101-partial.tsv"
    write_tabular(path, SpaceId.TRANS101, [MetricColumn("l2loss", Direction.MINIMIZE)], rows)
    return path


@pytest.fixture
def trans101_table(tmp_path: Path, trans101: SpaceDescriptor) -> Path:
    # ssim = Σgenes (越大越好)，params_m = 0.5 * Σgenes
    columns = [MetricColumn("ssim", Direction.MAXIMIZE), MetricColumn("params_m", Direction.MINIMIZE)]
    rows = (
        (arch.canonical_text, [float(sum(arch.genes)), 0.5 * sum(arch.genes)])
        for arch in enumerate_space(trans101)
    )
    path = tmp_path / "trans101.tsv"
    write_tabular(path, SpaceId.TRANS101, columns, rows)
    return path


@pytest.fixture
def small_config() -> Callable[..., SearchConfig]:
    def make(**overrides: object) -> SearchConfig:
        values: dict[str, object] = {
            "space_id": SpaceId.NAS201,
            "evaluator": "surrogate:seed=42,beta=0",
            "llm": "mock:random",
            "n": 10,
            "lambda_": 6,
            "gamma": 4,
            "k": 4,
            "xi": 2,
            "seed": 3,
        }
        values.update(overrides)
        return SearchConfig(**values)  # type: ignore[arg-type]

    return make
