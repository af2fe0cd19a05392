import json
import sys
from collections.abc import Callable
from dataclasses import replace
from pathlib import Path
from typing import Any

import pytest


ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.append(str(ROOT))

from src.core.errors import DivergenceAt, NonReplayableTrace, TraceUnreadable
from src.core.models import Fitness, Phase
from src.evaluators import SurrogateEvaluator, build_surrogate, oracle_best
from src.search import (
    IterationRecord,
    Method,
    ScoredEntry,
    SearchConfig,
    SearchTrace,
    SekiSearch,
    build_backend,
    build_evaluator,
    canonical_lines,
    read_trace,
    replay,
    run_mutation_baseline,
    run_random_baseline,
    run_seki,
    write_trace,
)
from src.search.trace import TRACE_FORMAT
from src.spaces import SpaceDescriptor, neighbors, parse_architecture


ConfigFactory = Callable[..., SearchConfig]


def _quiet(current: int, total: int, record: IterationRecord) -> None:
    pass


def _lines(path: Path) -> list[dict[str, Any]]:
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def _rewrite(path: Path, lines: list[dict[str, Any]]) -> None:
    path.write_text("".join(json.dumps(line) + "\n" for line in lines), encoding="utf-8")


def _written(trace: SearchTrace, path: Path) -> Path:
    write_trace(trace, path)
    return path


def test_random_baseline_budget_and_start(small_config: ConfigFactory) -> None:
    config = small_config()

    random = run_random_baseline(config, progress_callback=_quiet)
    seki = run_seki(config, progress_callback=_quiet)

    assert random.method is Method.RANDOM
    assert [r.phase for r in random.records] == [Phase.INIT] + [Phase.RANDOM] * 10
    assert random.evaluations == seki.evaluations == 11
    # 相同種子共用相同的初始架構
    assert random.records[0].arch == seki.records[0].arch
    assert canonical_lines(random) == canonical_lines(
        run_random_baseline(config, progress_callback=_quiet)
    )


def test_mutation_baseline_is_monotone(small_config: ConfigFactory, nas201: SpaceDescriptor) -> None:
    trace = run_mutation_baseline(small_config(n=40, lambda_=20, gamma=20), progress_callback=_quiet)

    scores = {r.arch: r.fitness.oriented_value for r in trace.records}
    current = [scores[r.inputs[0]] for r in trace.records[1:]]
    assert current == sorted(current)
    assert trace.evaluations == 41
    for record in trace.records[1:]:
        parent = parse_architecture(nas201, record.inputs[0])
        assert parse_architecture(nas201, record.arch) in neighbors(parent)


def test_mutation_baseline_converges_on_separable_surrogate(
    small_config: ConfigFactory, nas201: SpaceDescriptor
) -> None:
    evaluator = SurrogateEvaluator(build_surrogate(nas201, 42, 0.0))
    _, optimum = oracle_best(evaluator, nas201)

    reached = 0
    for seed in range(20):
        config = small_config(n=200, lambda_=100, gamma=100, seed=seed)
        trace = run_mutation_baseline(config, evaluator=evaluator, progress_callback=_quiet)
        assert trace.best is not None
        reached += trace.best.fitness == optimum

    assert reached >= 19


def test_trace_round_trip(small_config: ConfigFactory, tmp_path: Path) -> None:
    trace = run_seki(small_config(llm="mock:phased"), progress_callback=_quiet)
    trace.command = "seki run --space nas201"

    loaded = read_trace(_written(trace, tmp_path / "t.jsonl"))

    assert canonical_lines(loaded) == canonical_lines(trace)
    assert loaded.command == "seki run --space nas201"
    assert loaded.best == trace.best
    assert loaded.best_iteration() == trace.best_iteration()
    assert loaded.rebuild_repository().best() == trace.best


def _entry_rows(entries: list[ScoredEntry]) -> list[tuple[str, Fitness, int, Phase]]:
    return [(e.arch.canonical_text, e.fitness, e.iteration, e.phase) for e in entries]


@pytest.mark.parametrize("llm", ["mock:phased", "mock:random"])
def test_rebuilt_repository_matches_live_repository(
    small_config: ConfigFactory, tmp_path: Path, llm: str
) -> None:
    config = small_config(llm=llm, n=30, lambda_=12, gamma=18)
    evaluator = build_evaluator(config)
    backend = build_backend(config, evaluator)
    search = SekiSearch(config, evaluator, backend, progress_callback=_quiet)
    trace = search.run()
    live = search.session.repository

    rebuilt = read_trace(_written(trace, tmp_path / "t.jsonl")).rebuild_repository()

    assert len(rebuilt) == len(live)
    assert _entry_rows(list(rebuilt.records)) == _entry_rows(list(live.records))
    # 排名順序與 index 逐筆一致
    assert _entry_rows(rebuilt.top_k(len(live))) == _entry_rows(live.top_k(len(live)))
    assert rebuilt.index.keys() == live.index.keys()
    assert rebuilt.best() == live.best()


@pytest.mark.parametrize("method", [Method.SEKI, Method.RANDOM, Method.MUTATION])
def test_best_so_far_never_decreases(small_config: ConfigFactory, method: Method) -> None:
    runner = {
        Method.SEKI: run_seki,
        Method.RANDOM: run_random_baseline,
        Method.MUTATION: run_mutation_baseline,
    }[method]
    config = small_config(llm="mock:phased", n=40, lambda_=16, gamma=24)
    trace = runner(config, progress_callback=_quiet)

    best = [record.best_fitness.oriented_value for record in trace.records]
    scores = [record.fitness.oriented_value for record in trace.records]
    running = [max(scores[: i + 1]) for i in range(len(scores))]
    assert best == sorted(best)
    assert best == running
    assert trace.best is not None
    assert best[-1] == trace.best.fitness.oriented_value
    # 初始架構為第 0 次迭代，預算 40 共 41 次評估
    assert [record.iteration for record in trace.records] == list(range(41))
    assert trace.evaluations == 41


def test_trace_layout(small_config: ConfigFactory, tmp_path: Path) -> None:
    trace = run_seki(small_config(), progress_callback=_quiet)

    lines = _lines(_written(trace, tmp_path / "t.jsonl"))

    assert lines[0]["kind"] == "config"
    assert lines[0]["format"] == TRACE_FORMAT
    assert lines[0]["config"]["lambda"] == 6
    assert [line["kind"] for line in lines[1:-1]] == ["iteration"] * 11
    assert lines[-1]["kind"] == "result"
    assert lines[-1]["evaluations"] == 11
    assert "timing" in lines[1]
    assert lines[1]["best_so_far"]["arch"] == lines[1]["arch"]


def test_canonical_lines_ignore_timing(small_config: ConfigFactory) -> None:
    trace = run_seki(small_config(), progress_callback=_quiet)
    slower = replace(trace, seconds=trace.seconds + 100.0)

    assert canonical_lines(slower) == canonical_lines(trace)
    assert all("timing" not in line for line in canonical_lines(trace))


@pytest.mark.parametrize(
    "content",
    [
        "not json\n",
        '["a list"]\n{"kind": "result"}\n',
        '{"kind": "config", "format": "seki-trace/1"}\n',
        '{"kind": "config", "format": "other/9"}\n{"kind": "result"}\n',
        '{"kind": "config", "format": "seki-trace/1", "method": "seki"}\n{"kind": "result"}\n',
    ],
)
def test_unreadable_traces(tmp_path: Path, content: str) -> None:
    path = tmp_path / "bad.jsonl"
    path.write_text(content, encoding="utf-8")

    with pytest.raises(TraceUnreadable):
        read_trace(path)


def test_missing_trace_file(tmp_path: Path) -> None:
    with pytest.raises(TraceUnreadable):
        read_trace(tmp_path / "missing.jsonl")


@pytest.mark.parametrize("llm", ["mock:greedy", "mock:phased", "mock:random"])
def test_replay_matches(small_config: ConfigFactory, tmp_path: Path, llm: str) -> None:
    trace = run_seki(small_config(llm=llm), progress_callback=_quiet)

    report = replay(_written(trace, tmp_path / "t.jsonl"))

    assert report.iterations_checked == 11


def test_replay_baselines(small_config: ConfigFactory, tmp_path: Path) -> None:
    config = small_config()

    for name, trace in (
        ("random", run_random_baseline(config, progress_callback=_quiet)),
        ("mutation", run_mutation_baseline(config, progress_callback=_quiet)),
    ):
        assert replay(_written(trace, tmp_path / f"{name}.jsonl")).iterations_checked == 11


def test_replay_detects_tampered_fitness(small_config: ConfigFactory, tmp_path: Path) -> None:
    path = _written(run_seki(small_config(), progress_callback=_quiet), tmp_path / "t.jsonl")
    lines = _lines(path)
    fitness = lines[4]["fitness"]
    fitness["raw"] += 1.0
    fitness["oriented"] += 1.0
    _rewrite(path, lines)

    with pytest.raises(DivergenceAt) as info:
        replay(path)

    assert info.value.iteration == 3
    assert info.value.field == "fitness"


def test_replay_detects_tampered_result(small_config: ConfigFactory, tmp_path: Path) -> None:
    path = _written(run_seki(small_config(), progress_callback=_quiet), tmp_path / "t.jsonl")
    lines = _lines(path)
    lines[-1]["evaluations"] = 99
    _rewrite(path, lines)

    with pytest.raises(DivergenceAt) as info:
        replay(path)

    assert info.value.field == "result.evaluations"


def test_replay_detects_missing_record(small_config: ConfigFactory, tmp_path: Path) -> None:
    path = _written(run_seki(small_config(), progress_callback=_quiet), tmp_path / "t.jsonl")
    lines = _lines(path)
    del lines[-2]
    _rewrite(path, lines)

    with pytest.raises(DivergenceAt) as info:
        replay(path)

    assert info.value.field == "record_count"
    assert info.value.iteration == 10


def test_replay_detects_header_events(small_config: ConfigFactory, tmp_path: Path) -> None:
    path = _written(run_seki(small_config(), progress_callback=_quiet), tmp_path / "t.jsonl")
    lines = _lines(path)
    lines[0]["events"] = [{"type": "xi_equals_k", "detail": "xi=k=4"}]
    _rewrite(path, lines)

    with pytest.raises(DivergenceAt) as info:
        replay(path)

    assert (info.value.iteration, info.value.field) == (0, "events")


def test_http_traces_are_not_replayable(small_config: ConfigFactory, tmp_path: Path) -> None:
    trace = run_seki(small_config(), progress_callback=_quiet)
    trace.config = replace(trace.config, llm="http:url=http://llm.test/v1/chat/completions")

    with pytest.raises(NonReplayableTrace):
        replay(_written(trace, tmp_path / "http.jsonl"))
