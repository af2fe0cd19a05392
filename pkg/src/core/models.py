"""
資料模型模組

定義各層共用的資料結構，遵循單一職責原則 (SRP)
使用 dataclass 確保資料的不可變性和清晰性
"""

import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

from .errors import ConfigError


class Direction(StrEnum):
    """指標方向"""

    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"

    @property
    def hint(self) -> str:
        """提示文字中使用的方向說明"""
        return "higher is better" if self is Direction.MAXIMIZE else "lower is better"


@dataclass(frozen=True)
class Fitness:
    """
    評估分數

    oriented_value 永遠是越大越好；minimize 指標以負值表示

    Attributes:
        oriented_value: 定向後的分數
        raw_metric: 原始指標值
        metric_name: 指標名稱
        direction: 指標方向
    """

    oriented_value: float
    raw_metric: float
    metric_name: str
    direction: Direction

    def __post_init__(self) -> None:
        expected = self.orient(self.raw_metric, self.direction)
        if self.oriented_value != expected:
            raise ValueError(
                f"定向分數不一致: {self.oriented_value} != {expected}"
            )

    @staticmethod
    def orient(raw_metric: float, direction: Direction) -> float:
        return raw_metric if direction is Direction.MAXIMIZE else -raw_metric

    @classmethod
    def from_raw(
        cls, raw_metric: float, metric_name: str, direction: Direction
    ) -> "Fitness":
        """由原始指標建立分數"""
        if not math.isfinite(raw_metric):
            raise ValueError(f"指標必須為有限值: {raw_metric}")
        return cls(
            oriented_value=cls.orient(raw_metric, direction),
            raw_metric=raw_metric,
            metric_name=metric_name,
            direction=direction,
        )

    def describe(self) -> str:
        """提示與報表使用的文字，固定兩位小數"""
        return f"{self.raw_metric:.2f} ({self.metric_name}, {self.direction.hint})"

    def to_dict(self) -> dict[str, Any]:
        return {
            "oriented": self.oriented_value,
            "raw": self.raw_metric,
            "metric": self.metric_name,
            "direction": self.direction.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Fitness":
        return cls.from_raw(
            float(data["raw"]), str(data["metric"]), Direction(data["direction"])
        )


class Phase(StrEnum):
    """迭代所屬階段"""

    INIT = "init"
    SELF_EVOLUTION = "self_evolution"
    KNOWLEDGE_INSPIRATION = "knowledge_inspiration"
    RANDOM = "random"
    MUTATION = "mutation"


class AnchorMode(StrEnum):
    """
    自我演化的輸入架構選擇

    chain: 永遠使用上一次迭代的架構
    best: 使用知識庫目前的最佳架構 (實驗用)
    """

    CHAIN = "chain"
    BEST = "best"


# LLM 預設參數
DEFAULT_MODEL_NAME: str = "qwen2.5-32b-instruct"
DEFAULT_TEMPERATURE: float = 0.7
DEFAULT_MAX_TOKENS: int = 2048
DEFAULT_TIMEOUT: float = 120.0
DEFAULT_MAX_RETRIES: int = 3


@dataclass(frozen=True)
class LlmParams:
    """
    LLM 呼叫參數

    Attributes:
        model_name: 模型名稱
        temperature: 取樣溫度 (非負)
        max_tokens: 最大輸出 token 數
        timeout: 單次請求逾時秒數
        max_retries: 暫時性失敗的最大重試次數
    """

    model_name: str = DEFAULT_MODEL_NAME
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    timeout: float = DEFAULT_TIMEOUT
    max_retries: int = DEFAULT_MAX_RETRIES

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ConfigError(f"temperature 不可為負: {self.temperature}")
        if self.max_tokens <= 0:
            raise ConfigError(f"max_tokens 必須為正整數: {self.max_tokens}")
        if self.timeout <= 0:
            raise ConfigError(f"timeout 必須大於 0: {self.timeout}")
        if self.max_retries < 0:
            raise ConfigError(f"max_retries 不可為負: {self.max_retries}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "model_name": self.model_name,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "timeout": self.timeout,
            "max_retries": self.max_retries,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "LlmParams":
        return cls(
            model_name=str(data["model_name"]),
            temperature=float(data["temperature"]),
            max_tokens=int(data["max_tokens"]),
            timeout=float(data["timeout"]),
            max_retries=int(data["max_retries"]),
        )
