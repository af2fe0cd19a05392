"""
消融實驗掃描

對 lambda、k、xi、xi_ratio、seed 的交叉乘積逐格執行搜尋，
每格一列結果；不合法的格子 (例如 xi > k) 標記為 skipped 而不中止
"""

import csv
import itertools
import logging
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from src.core.errors import ConfigError, SekiError

from .baselines import run_mutation_baseline, run_random_baseline
from .config import SearchConfig
from .seki import run_seki
from .trace import Method, SearchTrace


GRID_NAMES: tuple[str, ...] = ("lambda", "k", "xi", "xi_ratio", "seed")

CSV_COLUMNS: tuple[str, ...] = (
    "cell",
    "n",
    "lambda",
    "gamma",
    "k",
    "xi",
    "seed",
    "status",
    "best_fitness",
    "best_arch",
    "best_iteration",
    "evaluations",
    "note",
)

GridValue = int | float

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepCell:
    """
    一個格子的設定

    Attributes:
        params: 格子參數 (依網格順序)
        config: 合法時的搜尋設定
        error: 不合法時的原因
    """

    params: tuple[tuple[str, GridValue], ...]
    config: SearchConfig | None
    error: str = ""

    @property
    def label(self) -> str:
        return " ".join(f"{name}={value}" for name, value in self.params)


@dataclass(frozen=True)
class SweepRow:
    """
    一列掃描結果

    Attributes:
        cell: 格子
        status: ok、skipped 或 failed
        trace: 成功時的軌跡
        note: 略過或失敗的原因
    """

    cell: SweepCell
    status: str
    trace: SearchTrace | None = None
    note: str = ""


def parse_grid_value(name: str, text: str) -> GridValue:
    """xi_ratio 接受小數或分數 (例如 3/4)，其他參數為整數"""
    try:
        if name != "xi_ratio":
            return int(text)
        numerator, sep, denominator = text.partition("/")
        return float(numerator) / float(denominator) if sep else float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"網格參數 {name} 的值不合法: '{text}'") from exc


def _apply(base: SearchConfig, params: Sequence[tuple[str, GridValue]]) -> SearchConfig:
    values = dict(params)
    lambda_ = int(values.get("lambda", base.lambda_))
    k = int(values.get("k", base.k))
    if "xi_ratio" in values:
        xi = max(1, round(k * float(values["xi_ratio"])))
    else:
        xi = int(values.get("xi", base.xi))
    return replace(
        base,
        lambda_=lambda_,
        gamma=base.n - lambda_,
        k=k,
        xi=xi,
        seed=int(values.get("seed", base.seed)),
    )


def expand_grid(base: SearchConfig, grid: Mapping[str, Sequence[GridValue]]) -> list[SweepCell]:
    """
    展開交叉乘積

    Args:
        base: 基礎設定
        grid: 參數名稱 → 值列表；lambda 變動時 gamma = n - lambda

    Returns:
        格子列表，數量為各列表長度的乘積

    Raises:
        ConfigError: 未知的參數名稱或同時指定 xi 與 xi_ratio
    """
    unknown = set(grid) - set(GRID_NAMES)
    if unknown:
        raise ConfigError(f"不支援的網格參數: {sorted(unknown)}，可用參數: {list(GRID_NAMES)}")
    if "xi" in grid and "xi_ratio" in grid:
        raise ConfigError("xi 與 xi_ratio 不可同時指定")
    if any(not values for values in grid.values()):
        raise ConfigError("網格參數的值列表不可為空")

    names = list(grid)
    cells: list[SweepCell] = []
    for combo in itertools.product(*(grid[name] for name in names)):
        params = tuple(zip(names, combo, strict=True))
        try:
            cells.append(SweepCell(params, _apply(base, params)))
        except ConfigError as exc:
            cells.append(SweepCell(params, None, str(exc)))
    return cells


def _run_cell(method: Method, cell: SweepCell) -> SweepRow:
    if cell.config is None:
        logger.info("Sweep cell skipped: %s (%s)", cell.label, cell.error)
        return SweepRow(cell, "skipped", note=cell.error)

    def quiet(current: int, total: int, record: object) -> None:
        pass

    try:
        match method:
            case Method.SEKI:
                trace = run_seki(cell.config, progress_callback=quiet)
            case Method.RANDOM:
                trace = run_random_baseline(cell.config, progress_callback=quiet)
            case Method.MUTATION:
                trace = run_mutation_baseline(cell.config, progress_callback=quiet)
    except SekiError as exc:
        logger.warning("Sweep cell failed: %s (%s)", cell.label, exc)
        return SweepRow(cell, "failed", note=f"{exc.code}: {exc}")
    logger.info("Sweep cell done: %s", cell.label)
    return SweepRow(cell, "ok", trace=trace)


def run_sweep(
    base: SearchConfig,
    grid: Mapping[str, Sequence[GridValue]],
    method: Method = Method.SEKI,
    workers: int = 1,
) -> list[SweepRow]:
    """
    執行消融掃描

    每個格子擁有獨立的評估器、後端與亂數子串流，可平行執行

    Args:
        base: 基礎設定
        grid: 參數網格
        method: 搜尋方法
        workers: 平行執行緒數

    Returns:
        依格子順序的結果
    """
    if workers < 1:
        raise ConfigError(f"workers 必須為正整數: {workers}")
    cells = expand_grid(base, grid)
    logger.info("Sweep: %d cells, %d workers", len(cells), workers)
    if workers == 1:
        return [_run_cell(method, cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda cell: _run_cell(method, cell), cells))


def _row_values(row: SweepRow, base: SearchConfig) -> list[object]:
    config = row.cell.config
    values: list[object] = [row.cell.label]
    if config is None:
        params = dict(row.cell.params)
        values.extend(
            [
                base.n,
                params.get("lambda", base.lambda_),
                base.n - int(params.get("lambda", base.lambda_)),
                params.get("k", base.k),
                params.get("xi", ""),
                params.get("seed", base.seed),
            ]
        )
    else:
        values.extend([config.n, config.lambda_, config.gamma, config.k, config.xi, config.seed])

    trace = row.trace
    if trace is None or trace.best is None:
        values.extend([row.status, "", "", "", "", row.note])
    else:
        best = trace.best
        values.extend(
            [
                row.status,
                repr(best.fitness.raw_metric),
                best.arch.canonical_text,
                best.iteration,
                trace.evaluations,
                row.note,
            ]
        )
    return values


def write_sweep_csv(rows: Sequence[SweepRow], base: SearchConfig, path: Path) -> None:
    """寫出掃描結果 CSV"""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(_row_values(row, base))
    logger.info("Sweep table written: %s (%d rows)", path, len(rows))
