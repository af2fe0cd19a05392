"""
後端註冊表模組

實現工廠模式和策略模式，遵循開放封閉原則 (OCP)
新增後端只需使用 @register 裝飾器，無需修改此模組
"""

from collections.abc import Callable
from dataclasses import dataclass

from src.core.errors import ConfigError
from src.core.interfaces import BaseEvaluator, BaseLlmBackend
from src.core.rng import SeededRng
from src.core.selector import Selector
from src.spaces import SpaceDescriptor


@dataclass(frozen=True)
class BackendContext:
    """
    建立後端時可用的執行期資源

    Attributes:
        space: 搜尋空間
        evaluator: 評估器 (模擬代理排序鄰居用)
        rng: 後端專用的亂數子串流
    """

    space: SpaceDescriptor
    evaluator: BaseEvaluator | None
    rng: SeededRng


class BackendRegistry:
    """
    LLM 後端註冊表

    使用裝飾器模式註冊後端，每個後端類別提供
    from_selector(selector, context) 工廠方法
    """

    _backends: dict[str, type[BaseLlmBackend]] = {}
    _descriptions: dict[str, str] = {}

    @classmethod
    def register(
        cls, name: str, description: str = ""
    ) -> Callable[[type[BaseLlmBackend]], type[BaseLlmBackend]]:
        """
        註冊後端的裝飾器

        Args:
            name: 後端名稱 (選擇器中的 kind)
            description: 後端說明

        Example:
            @BackendRegistry.register("http")
            class HttpChatBackend(BaseLlmBackend):
                ...
        """

        def decorator(backend_class: type[BaseLlmBackend]) -> type[BaseLlmBackend]:
            if not hasattr(backend_class, "from_selector"):
                raise TypeError(f"{backend_class.__name__} 缺少 from_selector")
            cls._backends[name] = backend_class
            cls._descriptions[name] = description
            return backend_class

        return decorator

    @classmethod
    def get(cls, name: str) -> type[BaseLlmBackend]:
        """
        取得後端類別

        Raises:
            ConfigError: 當後端不存在時
        """
        if name not in cls._backends:
            available = ", ".join(cls._backends)
            raise ConfigError(f"LLM 後端 '{name}' 不存在，可用後端: {available}")
        return cls._backends[name]

    @classmethod
    def create(cls, selector: str | Selector, context: BackendContext) -> BaseLlmBackend:
        """
        依選擇器建立後端實例

        Args:
            selector: 選擇器，例如 "mock:greedy" 或 "http:url=http://localhost:8000/v1/chat/completions"
            context: 執行期資源

        Returns:
            後端實例
        """
        parsed = selector if isinstance(selector, Selector) else Selector.parse(selector)
        factory: Callable[[Selector, BackendContext], BaseLlmBackend] = getattr(
            cls.get(parsed.kind), "from_selector"
        )
        return factory(parsed, context)

    @classmethod
    def is_replayable(cls, selector: str | Selector) -> bool:
        """後端輸出是否可由軌跡重現"""
        parsed = selector if isinstance(selector, Selector) else Selector.parse(selector)
        return cls.get(parsed.kind).replayable

    @classmethod
    def get_backend_names(cls) -> list[str]:
        """取得所有後端名稱"""
        return list(cls._backends)

    @classmethod
    def describe(cls, name: str) -> str:
        return cls._descriptions.get(name, "")
