"""
公開基準轉換工具

將 NATS-Bench / NAS-Bench-201 風格的 API 物件匯出成表格基準檔

API 物件只需提供：
    len(api)                                      架構數量
    api.arch(i)                                   第 i 個架構字串
    api.get_more_info(i, dataset, hp=..., is_random=False)  指標字典

Example:
    from nats_bench import create
    api = create(path, "tss", fast_mode=True)
    export_rows(api, Path("nas201.tsv"), SpaceId.NAS201, NAS201_METRICS)
"""

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Protocol

from src.core.models import Direction
from src.spaces import SpaceId, parse_architecture
from src.spaces.descriptors import describe_space

from .tabular import MetricColumn, write_tabular


logger = logging.getLogger(__name__)


class BenchmarkApi(Protocol):
    """公開基準 API 的最小介面"""

    def __len__(self) -> int: ...

    def arch(self, index: int) -> str: ...

    def get_more_info(
        self, index: int, dataset: str, hp: str = ..., is_random: bool = ...
    ) -> dict[str, Any]: ...


@dataclass(frozen=True)
class ExportMetric:
    """
    匯出欄位設定

    Attributes:
        column: 表格中的欄位名稱
        dataset: API 的資料集名稱 (例如 "cifar10", "cifar10-valid")
        key: get_more_info 結果中的鍵 (例如 "test-accuracy")
        direction: 指標方向
    """

    column: str
    dataset: str
    key: str
    direction: Direction = Direction.MAXIMIZE


NAS201_METRICS: tuple[ExportMetric, ...] = (
    ExportMetric("cifar10_valid", "cifar10-valid", "valid-accuracy"),
    ExportMetric("cifar10_test", "cifar10", "test-accuracy"),
    ExportMetric("cifar100_test", "cifar100", "test-accuracy"),
    ExportMetric("imagenet16_test", "ImageNet16-120", "test-accuracy"),
)

DEFAULT_HP: str = "200"


def _rows(
    api: BenchmarkApi, space_id: SpaceId, metrics: Sequence[ExportMetric], hp: str
) -> Iterator[tuple[str, list[float]]]:
    space = describe_space(space_id)
    for index in range(len(api)):
        key = parse_architecture(space, api.arch(index)).canonical_text
        values = [
            float(api.get_more_info(index, m.dataset, hp=hp, is_random=False)[m.key])
            for m in metrics
        ]
        if (index + 1) % 1000 == 0:
            logger.info("Exported %d / %d rows", index + 1, len(api))
        yield key, values


def export_rows(
    api: BenchmarkApi,
    path: Path,
    space_id: SpaceId = SpaceId.NAS201,
    metrics: Sequence[ExportMetric] = NAS201_METRICS,
    hp: str = DEFAULT_HP,
) -> int:
    """
    匯出表格基準檔

    Args:
        api: 公開基準 API 物件
        path: 輸出路徑
        space_id: 搜尋空間
        metrics: 匯出欄位
        hp: 訓練週期設定

    Returns:
        寫出的資料列數

    Raises:
        ParseError: API 回傳的架構字串不屬於 space_id
    """
    columns = [MetricColumn(m.column, m.direction) for m in metrics]
    count = write_tabular(path, space_id, columns, _rows(api, space_id, metrics, hp))
    logger.info("Wrote %d rows to %s", count, path)
    return count
