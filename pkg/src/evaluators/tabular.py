"""
表格基準評估器

讀取逐行記錄的表格檔 (每行一個架構與多個指標欄位)，
評估時以標準字串精確查表；缺少的架構一律視為錯誤

檔案格式 (tab 分隔)：
    seki-tabular/1 space=nas201
    arch    cifar10_valid:maximize    cifar10_test:maximize
    |nor_conv_3x3~0|+|...|    91.61    94.37
空白行與 "#" 開頭的行會被忽略
"""

import logging
import math
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import ClassVar

from src.core.errors import (
    ArchitectureNotInTable,
    ConfigError,
    FileError,
    InvalidArchKey,
    ParseError,
    SchemaError,
)
from src.core.interfaces import BaseEvaluator
from src.core.models import Direction
from src.core.selector import Selector
from src.spaces import Architecture, SpaceDescriptor, SpaceId, parse_architecture
from src.spaces.descriptors import describe_space

from .registry import EvaluatorRegistry


TABULAR_FORMAT: str = "seki-tabular/1"

_HEADER = re.compile(rf"^{re.escape(TABULAR_FORMAT)}\s+space=(\w+)\s*$")

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MetricColumn:
    """
    指標欄位

    Attributes:
        name: 指標名稱，例如 cifar10_test
        direction: 指標方向
    """

    name: str
    direction: Direction

    def __str__(self) -> str:
        return f"{self.name}:{self.direction.value}"


@dataclass(frozen=True, eq=False)
class TabularBenchmark:
    """
    表格基準

    Attributes:
        space_id: 搜尋空間
        columns: 指標欄位
        rows: 標準字串 → 各欄位指標值
        source: 來源檔案
    """

    space_id: SpaceId
    columns: tuple[MetricColumn, ...]
    rows: Mapping[str, tuple[float, ...]]
    source: Path | None = None

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> tuple[int, MetricColumn]:
        """
        查詢指標欄位

        Raises:
            ConfigError: 欄位不存在
        """
        for index, column in enumerate(self.columns):
            if column.name == name:
                return index, column
        available = ", ".join(c.name for c in self.columns)
        raise ConfigError(f"指標 '{name}' 不存在，可用指標: {available}")

    def metrics_for(self, arch: Architecture) -> dict[str, float]:
        """
        架構在每個指標欄位的值 (依欄位順序)

        Raises:
            ArchitectureNotInTable: 表格中沒有此架構
        """
        row = self.rows.get(arch.canonical_text)
        if row is None:
            raise ArchitectureNotInTable(arch.canonical_text)
        return {
            column.name: value for column, value in zip(self.columns, row, strict=True)
        }

    def architectures(self) -> list[Architecture]:
        """表格內所有架構，依基因字典序排列"""
        space = describe_space(self.space_id)
        archs = [parse_architecture(space, key) for key in self.rows]
        return sorted(archs, key=lambda a: (a.genes, a.inputs))


def _parse_columns(line: str) -> tuple[MetricColumn, ...]:
    fields = line.split("\t")
    if fields[0] != "arch" or len(fields) < 2:
        raise SchemaError(2, "欄位標頭必須為 'arch' 後接至少一個指標欄位")
    columns: list[MetricColumn] = []
    for field_text in fields[1:]:
        name, sep, direction = field_text.partition(":")
        if not sep or not name:
            raise SchemaError(2, f"指標欄位必須為 name:direction: '{field_text}'")
        try:
            columns.append(MetricColumn(name, Direction(direction)))
        except ValueError as exc:
            raise SchemaError(2, f"未知的指標方向: '{direction}'") from exc
    if len({c.name for c in columns}) != len(columns):
        raise SchemaError(2, "指標名稱重複")
    return tuple(columns)


def _parse_metrics(line_no: int, fields: Sequence[str]) -> tuple[float, ...]:
    values: list[float] = []
    for text in fields:
        try:
            value = float(text)
        except ValueError as exc:
            raise SchemaError(line_no, f"指標不是數值: '{text}'") from exc
        if not math.isfinite(value):
            raise SchemaError(line_no, f"指標必須為有限值: '{text}'")
        values.append(value)
    return tuple(values)


def load_tabular(path: Path) -> TabularBenchmark:
    """
    載入表格基準檔

    Args:
        path: 表格檔路徑

    Returns:
        所有列皆已驗證的表格基準

    Raises:
        FileError: 檔案無法讀取
        SchemaError: 標頭或指標格式錯誤 (含行號)
        InvalidArchKey: 架構鍵無法解析 (含行號)
    """
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FileError(f"無法讀取表格檔 {path}: {exc}") from exc

    if not lines or not lines[0].strip():
        raise SchemaError(1, "檔案為空或缺少格式標頭")
    header = _HEADER.match(lines[0].strip())
    if header is None:
        raise SchemaError(1, f"格式標頭必須為 '{TABULAR_FORMAT} space=<id>'")
    try:
        space = describe_space(header.group(1))
    except ValueError as exc:
        raise SchemaError(1, f"未知的搜尋空間: '{header.group(1)}'") from exc
    if len(lines) < 2:
        raise SchemaError(2, "缺少欄位標頭")
    columns = _parse_columns(lines[1].rstrip("\n"))

    rows: dict[str, tuple[float, ...]] = {}
    for line_no, line in enumerate(lines[2:], start=3):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != len(columns) + 1:
            raise SchemaError(
                line_no, f"欄位數量不符: 預期 {len(columns) + 1}，實際 {len(fields)}"
            )
        try:
            key = parse_architecture(space, fields[0]).canonical_text
        except ParseError as exc:
            raise InvalidArchKey(line_no, str(exc)) from exc
        if key in rows:
            raise SchemaError(line_no, f"架構重複: {key}")
        rows[key] = _parse_metrics(line_no, fields[1:])

    if not rows:
        raise SchemaError(len(lines) + 1, "表格沒有任何資料列")

    logger.info("Loaded %d rows from %s (space=%s)", len(rows), path, space.space_id)
    return TabularBenchmark(space.space_id, columns, rows, source=path)


def write_tabular(
    path: Path,
    space_id: SpaceId,
    columns: Sequence[MetricColumn],
    rows: Iterable[tuple[str, Sequence[float]]],
) -> int:
    """
    寫出表格基準檔

    Returns:
        寫出的資料列數
    """
    count = 0
    with path.open("w", encoding="utf-8") as f:
        f.write(f"{TABULAR_FORMAT} space={space_id.value}\n")
        f.write("\t".join(["arch", *(str(c) for c in columns)]) + "\n")
        for key, values in rows:
            f.write("\t".join([key, *(repr(float(v)) for v in values)]) + "\n")
            count += 1
    return count


@EvaluatorRegistry.register("tabular", "表格基準查表 (例如 NAS-Bench-201 匯出檔)")
class TabularEvaluator(BaseEvaluator):
    """表格查表評估器"""

    name: ClassVar[str] = "tabular"

    def __init__(self, benchmark: TabularBenchmark, metric: str) -> None:
        index, column = benchmark.column(metric)
        super().__init__(benchmark.space_id, column.name, column.direction)
        self.benchmark = benchmark
        self._column_index = index

    @classmethod
    def from_selector(cls, space: SpaceDescriptor, selector: Selector) -> "TabularEvaluator":
        """由 "tabular:path=nas201.tsv,metric=cifar10_test" 建立"""
        selector.check_keys({"path", "metric"})
        path = selector.get_str("path")
        if not path:
            raise ConfigError("tabular 評估器需要 path 參數")
        benchmark = load_tabular(Path(path))
        if benchmark.space_id != space.space_id:
            raise ConfigError(
                f"表格檔屬於 {benchmark.space_id}，但搜尋空間為 {space.space_id}"
            )
        metric = selector.get_str("metric")
        if metric is None:
            if len(benchmark.columns) != 1:
                names = ", ".join(c.name for c in benchmark.columns)
                raise ConfigError(f"表格含多個指標，請以 metric= 指定: {names}")
            metric = benchmark.columns[0].name
        return cls(benchmark, metric)

    def companion_metrics(self, arch: Architecture) -> dict[str, float]:
        """搜尋指標以外的其他欄位 (不計入評估次數)"""
        metrics = self.benchmark.metrics_for(arch)
        del metrics[self.metric_name]
        return metrics

    def raw_metric(self, arch: Architecture) -> float:
        row = self.benchmark.rows.get(arch.canonical_text)
        if row is None:
            raise ArchitectureNotInTable(arch.canonical_text)
        return row[self._column_index]
