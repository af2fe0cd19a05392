"""
核心模組 - 定義介面、資料模型、錯誤與亂數
"""

from .errors import SekiError
from .interfaces import (
    BaseEvaluator,
    BaseLlmBackend,
    EvaluatorProtocol,
    LlmBackendProtocol,
)
from .models import AnchorMode, Direction, Fitness, LlmParams, Phase
from .rng import SeededRng, counter_uniform


__all__ = [
    "AnchorMode",
    "BaseEvaluator",
    "BaseLlmBackend",
    "Direction",
    "EvaluatorProtocol",
    "Fitness",
    "LlmBackendProtocol",
    "LlmParams",
    "Phase",
    "SekiError",
    "SeededRng",
    "counter_uniform",
]
