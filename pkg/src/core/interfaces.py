"""
介面定義模組

定義系統中的抽象介面，遵循介面隔離原則 (ISP) 和依賴反轉原則 (DIP)
搜尋流程只依賴這裡的協議，不依賴具體的 LLM 或評估器實作
"""

import threading
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, ClassVar, Protocol, runtime_checkable

from .errors import SpaceMismatch
from .models import Direction, Fitness, LlmParams


if TYPE_CHECKING:
    from src.prompts.engine import Prompt
    from src.spaces import Architecture, SpaceId


@runtime_checkable
class LlmBackendProtocol(Protocol):
    """
    LLM 後端協議 - 定義所有 LLM 後端必須實作的介面

    Attributes:
        name: 後端名稱 (選擇器中的 kind)
        replayable: 輸出是否可由軌跡重現
    """

    name: ClassVar[str]
    replayable: ClassVar[bool]

    def complete(self, prompt: "Prompt", params: LlmParams) -> str:
        """
        取得模型回覆

        Args:
            prompt: 已渲染的提示
            params: 呼叫參數

        Returns:
            模型原始輸出文字
        """
        ...


class BaseLlmBackend(ABC):
    """LLM 後端抽象基類"""

    name: ClassVar[str] = ""
    replayable: ClassVar[bool] = False

    @abstractmethod
    def complete(self, prompt: "Prompt", params: LlmParams) -> str:
        """取得模型回覆 - 子類別必須實作"""
        raise NotImplementedError

    def close(self) -> None:
        """釋放資源 (預設無動作)"""


@runtime_checkable
class EvaluatorProtocol(Protocol):
    """
    評估器協議 - 產生架構的評估分數 f(α)

    Attributes:
        name: 評估器名稱
        space_id: 所屬搜尋空間
        metric_name: 指標名稱
        direction: 指標方向
        calls: 已計入預算的評估次數
    """

    name: ClassVar[str]
    space_id: "SpaceId"
    metric_name: str
    direction: Direction

    @property
    def calls(self) -> int: ...

    def evaluate(self, arch: "Architecture") -> Fitness:
        """評估架構並計入預算"""
        ...

    def score(self, arch: "Architecture") -> Fitness:
        """評估架構但不計入預算 (供模擬代理排序鄰居)"""
        ...


class BaseEvaluator(ABC):
    """
    評估器抽象基類

    提供空間檢查與呼叫計數，子類別只需計算原始指標
    """

    name: ClassVar[str] = ""

    def __init__(
        self, space_id: "SpaceId", metric_name: str, direction: Direction
    ) -> None:
        self.space_id = space_id
        self.metric_name = metric_name
        self.direction = direction
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def calls(self) -> int:
        return self._calls

    @abstractmethod
    def raw_metric(self, arch: "Architecture") -> float:
        """計算原始指標 - 子類別必須實作"""
        raise NotImplementedError

    def score(self, arch: "Architecture") -> Fitness:
        """
        評估架構 (不計數)

        Raises:
            SpaceMismatch: 架構不屬於此評估器的搜尋空間
        """
        if arch.space_id != self.space_id:
            raise SpaceMismatch(self.space_id, arch.space_id)
        return Fitness.from_raw(self.raw_metric(arch), self.metric_name, self.direction)

    def evaluate(self, arch: "Architecture") -> Fitness:
        """評估架構並計入預算"""
        fitness = self.score(arch)
        with self._lock:
            self._calls += 1
        return fitness
