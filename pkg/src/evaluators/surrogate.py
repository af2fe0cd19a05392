"""
合成代理評估器

以種子決定的加法 + 成對交互分數取代 supernet 評估：
    score(α) = Σ_s w[s][op(s)] + β · Σ_{s<s'} v[s, op(s), s', op(s')]
權重由計數器式亂數 (src.core.rng.counter_uniform) 依
(space_id, seed, slot, op[, slot', op']) 計算，與產生順序和平台無關
"""

import logging
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from numpy.typing import NDArray

from src.core.errors import ConfigError
from src.core.interfaces import BaseEvaluator
from src.core.models import Direction
from src.core.rng import counter_uniform
from src.core.selector import Selector
from src.spaces import Architecture, SpaceDescriptor, SpaceId

from .registry import EvaluatorRegistry


SURROGATE_METRIC: str = "surrogate_score"
DEFAULT_SURROGATE_SEED: int = 0
DEFAULT_BETA: float = 0.0

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SurrogateModel:
    """
    代理模型

    Attributes:
        space_id: 搜尋空間
        seed: 權重種子
        beta: 交互強度 (≥ 0)
        unary_weights: w[slot][op]，形狀 (S, O)
        pair_weights: v[slot, op, slot', op']，形狀 (S, O, S, O)，僅 slot < slot' 非零
    """

    space_id: SpaceId
    seed: int
    beta: float
    unary_weights: NDArray[np.float64]
    pair_weights: NDArray[np.float64]

    def score(self, genes: tuple[int, ...]) -> float:
        """計算代理分數 (純函數)"""
        ops = np.asarray(genes, dtype=np.intp)
        slots = np.arange(ops.size)
        total = float(self.unary_weights[slots, ops].sum())
        if self.beta == 0:
            return total
        pairs = self.pair_weights[slots[:, None], ops[:, None], slots[None, :], ops[None, :]]
        return total + self.beta * float(pairs.sum())


def build_surrogate(space: SpaceDescriptor, seed: int, beta: float) -> SurrogateModel:
    """
    建立代理模型

    Args:
        space: 搜尋空間
        seed: 權重種子
        beta: 交互強度

    Returns:
        權重完全由 (space_id, seed) 決定的代理模型

    Raises:
        ConfigError: beta 為負
    """
    if beta < 0:
        raise ConfigError(f"beta 不可為負: {beta}")

    sid = space.space_id.value
    n_slots, n_ops = space.slot_count, space.operator_count
    unary = np.empty((n_slots, n_ops), dtype=np.float64)
    for s in range(n_slots):
        for o in range(n_ops):
            unary[s, o] = counter_uniform("unary", sid, seed, s, o)

    pair = np.zeros((n_slots, n_ops, n_slots, n_ops), dtype=np.float64)
    for s in range(n_slots):
        for s2 in range(s + 1, n_slots):
            for o in range(n_ops):
                for o2 in range(n_ops):
                    pair[s, o, s2, o2] = counter_uniform("pair", sid, seed, s, o, s2, o2)

    unary.setflags(write=False)
    pair.setflags(write=False)
    logger.debug("Surrogate built: space=%s seed=%s beta=%s", sid, seed, beta)
    return SurrogateModel(
        space_id=space.space_id,
        seed=seed,
        beta=beta,
        unary_weights=unary,
        pair_weights=pair,
    )


@EvaluatorRegistry.register("surrogate", "合成代理分數 (可窮舉求得真實最佳)")
class SurrogateEvaluator(BaseEvaluator):
    """代理模型評估器"""

    name: ClassVar[str] = "surrogate"

    def __init__(self, model: SurrogateModel) -> None:
        super().__init__(model.space_id, SURROGATE_METRIC, Direction.MAXIMIZE)
        self.model = model

    @classmethod
    def from_selector(cls, space: SpaceDescriptor, selector: Selector) -> "SurrogateEvaluator":
        """由 "surrogate:seed=42,beta=0" 建立"""
        selector.check_keys({"seed", "beta"})
        seed = selector.get_int("seed", DEFAULT_SURROGATE_SEED)
        beta = selector.get_float("beta", DEFAULT_BETA)
        return cls(build_surrogate(space, seed, beta))

    def raw_metric(self, arch: Architecture) -> float:
        return self.model.score(arch.genes)
