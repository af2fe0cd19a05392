"""
評估器註冊表模組

實現工廠模式和策略模式，遵循開放封閉原則 (OCP)
新增評估器只需使用 @register 裝飾器，無需修改此模組
"""

from collections.abc import Callable

from src.core.errors import ConfigError
from src.core.interfaces import BaseEvaluator
from src.core.selector import Selector
from src.spaces import SpaceDescriptor


EvaluatorFactory = Callable[[SpaceDescriptor, Selector], BaseEvaluator]


class EvaluatorRegistry:
    """
    評估器註冊表

    每個評估器類別提供 from_selector(space, selector) 工廠方法
    """

    _factories: dict[str, EvaluatorFactory] = {}
    _descriptions: dict[str, str] = {}

    @classmethod
    def register(
        cls, name: str, description: str = ""
    ) -> Callable[[type[BaseEvaluator]], type[BaseEvaluator]]:
        """
        註冊評估器的裝飾器

        Args:
            name: 評估器名稱 (選擇器中的 kind)
            description: 評估器說明

        Example:
            @EvaluatorRegistry.register("surrogate")
            class SurrogateEvaluator(BaseEvaluator):
                @classmethod
                def from_selector(cls, space, selector): ...
        """

        def decorator(evaluator_class: type[BaseEvaluator]) -> type[BaseEvaluator]:
            factory = getattr(evaluator_class, "from_selector", None)
            if factory is None:
                raise TypeError(f"{evaluator_class.__name__} 缺少 from_selector")
            cls._factories[name] = factory
            cls._descriptions[name] = description
            return evaluator_class

        return decorator

    @classmethod
    def create(cls, selector: str | Selector, space: SpaceDescriptor) -> BaseEvaluator:
        """
        依選擇器建立評估器

        Args:
            selector: 選擇器，例如 "surrogate:seed=42,beta=0"
            space: 搜尋空間

        Raises:
            ConfigError: 評估器不存在或參數錯誤
        """
        parsed = selector if isinstance(selector, Selector) else Selector.parse(selector)
        if parsed.kind not in cls._factories:
            available = ", ".join(cls._factories)
            raise ConfigError(f"評估器 '{parsed.kind}' 不存在，可用評估器: {available}")
        return cls._factories[parsed.kind](space, parsed)

    @classmethod
    def get_evaluator_names(cls) -> list[str]:
        """取得所有評估器名稱"""
        return list(cls._factories)

    @classmethod
    def describe(cls, name: str) -> str:
        return cls._descriptions.get(name, "")
