import os
import sys
from pathlib import Path
from typing import Any

import numpy as np
import pytest


ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.append(str(ROOT))

from src.core.errors import (
    ArchitectureNotInTable,
    ConfigError,
    FileError,
    InvalidArchKey,
    NotEnumerable,
    SchemaError,
    SpaceMismatch,
)
from src.core.models import Direction
from src.core.rng import SeededRng
from src.evaluators import (
    EvaluatorRegistry,
    ExportMetric,
    MetricColumn,
    SurrogateEvaluator,
    TabularEvaluator,
    build_surrogate,
    export_rows,
    load_tabular,
    oracle_best,
    scan_space,
    write_tabular,
)
from src.search import SearchConfig, run_seki
from src.spaces import (
    Architecture,
    SpaceDescriptor,
    SpaceId,
    describe_space,
    enumerate_space,
    random_architecture,
)


NAS201_BEST = (
    "|nor_conv_3x3~0|+|nor_conv_3x3~0|nor_conv_3x3~1|"
    "+|skip_connect~0|nor_conv_3x3~1|nor_conv_3x3~2|"
)


def _table(path: Path, body: str) -> Path:
    path.write_text(body, encoding="utf-8")
    return path


def _small_table(path: Path) -> Path:
    zero = Architecture(SpaceId.NAS201, (0,) * 6).canonical_text
    convs = Architecture(SpaceId.NAS201, (3,) * 6).canonical_text
    return _table(
        path,
        "seki-tabular/1 space=nas201\n"
        "arch\tcifar10_test:maximize\ttest_error:minimize\n"
        "# comment lines and blank lines are skipped\n"
        "\n"
        f"{zero}\t10.0\t90.0\n"
        f"{convs}\t93.5\t6.5\n"
        f"{NAS201_BEST}\t94.37\t5.63\n",
    )


def test_surrogate_is_deterministic(nas201: SpaceDescriptor) -> None:
    arch = random_architecture(nas201, SeededRng(1))
    first = SurrogateEvaluator(build_surrogate(nas201, 42, 0.5))
    second = SurrogateEvaluator(build_surrogate(nas201, 42, 0.5))
    other = SurrogateEvaluator(build_surrogate(nas201, 43, 0.5))

    assert first.evaluate(arch) == second.evaluate(arch)
    assert first.evaluate(arch) != other.evaluate(arch)


def test_surrogate_formula(nas201: SpaceDescriptor) -> None:
    model = build_surrogate(nas201, 7, 0.5)
    genes = (1, 4, 0, 2, 3, 3)

    expected = sum(model.unary_weights[s, op] for s, op in enumerate(genes))
    interaction = sum(
        model.pair_weights[s, genes[s], t, genes[t]]
        for s in range(6)
        for t in range(s + 1, 6)
    )

    assert model.score(genes) == pytest.approx(expected + 0.5 * interaction, rel=1e-12)
    assert build_surrogate(nas201, 7, 0.0).score(genes) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ConfigError):
        build_surrogate(nas201, 7, -0.1)


def test_evaluate_counts_and_score_does_not(surrogate: SurrogateEvaluator) -> None:
    arch = random_architecture(describe_space("nas201"), SeededRng(1))

    surrogate.score(arch)
    surrogate.evaluate(arch)
    surrogate.evaluate(arch)

    assert surrogate.calls == 2


def test_space_mismatch(surrogate: SurrogateEvaluator, trans101: SpaceDescriptor) -> None:
    with pytest.raises(SpaceMismatch):
        surrogate.evaluate(random_architecture(trans101, SeededRng(1)))


def test_registry_creates_evaluators(nas201: SpaceDescriptor, tmp_path: Path) -> None:
    surrogate = EvaluatorRegistry.create("surrogate:seed=42,beta=0", nas201)
    tabular = EvaluatorRegistry.create(
        f"tabular:path={_small_table(tmp_path / 't.tsv')},metric=cifar10_test", nas201
    )

    assert isinstance(surrogate, SurrogateEvaluator)
    assert isinstance(tabular, TabularEvaluator)
    assert set(EvaluatorRegistry.get_evaluator_names()) >= {"surrogate", "tabular"}
    with pytest.raises(ConfigError):
        EvaluatorRegistry.create("nasbench:seed=1", nas201)
    with pytest.raises(ConfigError):
        EvaluatorRegistry.create("surrogate:sigma=1", nas201)


def test_tabular_lookup(tmp_path: Path, nas201: SpaceDescriptor) -> None:
    benchmark = load_tabular(_small_table(tmp_path / "t.tsv"))
    accuracy = TabularEvaluator(benchmark, "cifar10_test")
    error = TabularEvaluator(benchmark, "test_error")
    best = Architecture(SpaceId.NAS201, (3, 3, 3, 1, 3, 3))

    assert len(benchmark) == 3
    assert accuracy.evaluate(best).raw_metric == 94.37
    assert error.evaluate(best).oriented_value == -5.63
    assert error.direction is Direction.MINIMIZE
    with pytest.raises(ArchitectureNotInTable):
        accuracy.evaluate(random_architecture(nas201, SeededRng(99)).with_operator(0, 4))


def test_tabular_selector_rules(tmp_path: Path, nas201: SpaceDescriptor, trans101: SpaceDescriptor) -> None:
    path = _small_table(tmp_path / "t.tsv")

    with pytest.raises(ConfigError, match="metric"):
        EvaluatorRegistry.create(f"tabular:path={path}", nas201)
    with pytest.raises(ConfigError):
        EvaluatorRegistry.create(f"tabular:path={path},metric=cifar100_test", nas201)
    with pytest.raises(ConfigError):
        EvaluatorRegistry.create(f"tabular:path={path},metric=cifar10_test", trans101)
    with pytest.raises(ConfigError):
        EvaluatorRegistry.create("tabular:metric=cifar10_test", nas201)

    single = _table(
        tmp_path / "single.tsv",
        f"seki-tabular/1 space=nas201\narch\tacc:maximize\n{NAS201_BEST}\t1.5\n",
    )
    evaluator = EvaluatorRegistry.create(f"tabular:path={single}", nas201)
    assert evaluator.metric_name == "acc"


@pytest.mark.parametrize(
    ("body", "line"),
    [
        ("", 1),
        ("nas-table space=nas201\narch\tacc:maximize\n", 1),
        ("seki-tabular/1 space=nas999\narch\tacc:maximize\n", 1),
        ("seki-tabular/1 space=nas201\nkey\tacc:maximize\n", 2),
        ("seki-tabular/1 space=nas201\narch\tacc:upward\n", 2),
        (f"seki-tabular/1 space=nas201\narch\tacc:maximize\n{NAS201_BEST}\t1.0\t2.0\n", 3),
        (f"seki-tabular/1 space=nas201\narch\tacc:maximize\n{NAS201_BEST}\thigh\n", 3),
        (f"seki-tabular/1 space=nas201\narch\tacc:maximize\n{NAS201_BEST}\tnan\n", 3),
        (
            f"seki-tabular/1 space=nas201\narch\tacc:maximize\n{NAS201_BEST}\t1\n{NAS201_BEST}\t2\n",
            4,
        ),
    ],
)
def test_tabular_schema_errors(tmp_path: Path, body: str, line: int) -> None:
    with pytest.raises(SchemaError) as info:
        load_tabular(_table(tmp_path / "bad.tsv", body))

    assert info.value.line == line


def test_tabular_invalid_key(tmp_path: Path) -> None:
    body = (
        "seki-tabular/1 space=nas201\narch\tacc:maximize\n"
        f"{NAS201_BEST}\t1.0\n"
        "|conv_9x9~0|+|none~0|none~1|+|none~0|none~1|none~2|\t2.0\n"
    )

    with pytest.raises(InvalidArchKey) as info:
        load_tabular(_table(tmp_path / "bad.tsv", body))

    assert info.value.line == 4


def test_tabular_missing_file(tmp_path: Path) -> None:
    with pytest.raises(FileError):
        load_tabular(tmp_path / "missing.tsv")


def test_write_then_load_tabular(tmp_path: Path) -> None:
    path = tmp_path / "w.tsv"
    rows = [(NAS201_BEST, [94.37, 5.63])]
    columns = [MetricColumn("acc", Direction.MAXIMIZE), MetricColumn("err", Direction.MINIMIZE)]

    assert write_tabular(path, SpaceId.NAS201, columns, rows) == 1
    benchmark = load_tabular(path)
    assert benchmark.columns == tuple(columns)
    assert benchmark.rows[NAS201_BEST] == (94.37, 5.63)


def test_oracle_matches_slotwise_argmax(nas201: SpaceDescriptor, surrogate: SurrogateEvaluator) -> None:
    weights = surrogate.model.unary_weights
    expected = Architecture(SpaceId.NAS201, tuple(int(i) for i in np.argmax(weights, axis=1)))

    result = scan_space(surrogate, nas201)

    assert result.arch == expected
    assert result.scanned == 15625
    assert result.fitness == surrogate.score(expected)
    assert surrogate.calls == 0


def test_oracle_dominates_every_architecture(trans101: SpaceDescriptor) -> None:
    evaluator = SurrogateEvaluator(build_surrogate(trans101, 5, 0.5))

    arch, fitness = oracle_best(evaluator, trans101)

    values = [evaluator.score(a).oriented_value for a in enumerate_space(trans101)]
    assert fitness.oriented_value == max(values)
    assert evaluator.score(arch) == fitness


def test_oracle_scans_table_rows_only(tmp_path: Path, nas201: SpaceDescriptor) -> None:
    benchmark = load_tabular(_small_table(tmp_path / "t.tsv"))

    accuracy = scan_space(TabularEvaluator(benchmark, "cifar10_test"), nas201)
    error = scan_space(TabularEvaluator(benchmark, "test_error"), nas201)

    assert accuracy.scanned == 3
    assert accuracy.arch.canonical_text == NAS201_BEST
    assert accuracy.fitness.raw_metric == 94.37
    # minimize 指標同樣選出表現最好的架構
    assert error.arch.canonical_text == NAS201_BEST


def test_oracle_rejects_darts(darts: SpaceDescriptor) -> None:
    evaluator = SurrogateEvaluator(build_surrogate(darts, 1, 0.0))

    with pytest.raises(NotEnumerable):
        oracle_best(evaluator, darts)


class FakeBenchmarkApi:
    def __init__(self, archs: list[str], scores: list[float]) -> None:
        self._archs = archs
        self._scores = scores

    def __len__(self) -> int:
        return len(self._archs)

    def arch(self, index: int) -> str:
        return self._archs[index]

    def get_more_info(
        self, index: int, dataset: str, hp: str = "12", is_random: bool = True
    ) -> dict[str, Any]:
        assert hp == "200"
        assert is_random is False
        offset = 0.0 if dataset == "cifar10" else 1.0
        return {"test-accuracy": self._scores[index] - offset}


def test_export_rows(tmp_path: Path) -> None:
    zero = Architecture(SpaceId.NAS201, (0,) * 6).canonical_text
    api = FakeBenchmarkApi([zero, NAS201_BEST], [10.0, 94.37])
    metrics = (
        ExportMetric("cifar10_test", "cifar10", "test-accuracy"),
        ExportMetric("cifar100_test", "cifar100", "test-accuracy"),
    )

    count = export_rows(api, tmp_path / "export.tsv", SpaceId.NAS201, metrics)

    benchmark = load_tabular(tmp_path / "export.tsv")
    assert count == 2
    assert benchmark.rows[NAS201_BEST] == pytest.approx((94.37, 93.37))
    assert [c.name for c in benchmark.columns] == ["cifar10_test", "cifar100_test"]


@pytest.mark.integration
@pytest.mark.skipif(
    not os.environ.get("SEKI_NAS201_TABLE"), reason="SEKI_NAS201_TABLE is not set"
)
def test_published_nas201_table() -> None:
    path = Path(os.environ["SEKI_NAS201_TABLE"])
    space = describe_space(SpaceId.NAS201)
    evaluator = EvaluatorRegistry.create(f"tabular:path={path},metric=cifar10_test", space)

    arch, fitness = oracle_best(evaluator, space)
    assert arch.canonical_text == NAS201_BEST
    assert round(fitness.raw_metric, 2) == 94.37

    config = SearchConfig(
        space_id=SpaceId.NAS201,
        evaluator=f"tabular:path={path},metric=cifar10_test",
        llm="mock:phased",
        n=20,
        lambda_=12,
        gamma=8,
    )
    trace = run_seki(config, progress_callback=lambda *_: None)
    assert trace.best is not None
    assert trace.best.fitness.raw_metric <= fitness.raw_metric
