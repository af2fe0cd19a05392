"""
搜尋設定模組

SearchConfig 是一次搜尋的完整設定，寫入軌跡檔的第一行，
由軌跡檔即可重建相同的設定並重播
"""

from dataclasses import dataclass, field, replace
from typing import Any

from src.core.errors import ConfigError
from src.core.models import AnchorMode, LlmParams
from src.core.selector import Selector
from src.spaces import SpaceId
from src.spaces.descriptors import describe_space


# 預設超參數
DEFAULT_N: int = 50
DEFAULT_LAMBDA: int = 35
DEFAULT_GAMMA: int = 15
DEFAULT_K: int = 16
DEFAULT_XI: int = 8
DEFAULT_SEED: int = 1
DEFAULT_MAX_PARSE_RETRIES: int = 2
DEFAULT_LLM: str = "mock:random"


@dataclass(frozen=True)
class SearchConfig:
    """
    搜尋設定

    Attributes:
        space_id: 搜尋空間
        evaluator: 評估器選擇器，例如 "surrogate:seed=42,beta=0"
        llm: LLM 後端選擇器，例如 "mock:greedy"
        n: 總迭代數 (不含初始架構)
        lambda_: 自我演化迭代數
        gamma: 知識啟發迭代數
        k: 前 k 名
        xi: 每次知識啟發的範例數
        seed: 主種子
        llm_params: LLM 呼叫參數
        task_description: 目標任務說明 (空字串時使用空間預設)
        max_parse_retries: 架構解析失敗時的重問次數
        anchor_mode: 自我演化的輸入架構選擇
        templates: 自訂模板目錄 (None 使用內建模板)
    """

    space_id: SpaceId
    evaluator: str
    llm: str = DEFAULT_LLM
    n: int = DEFAULT_N
    lambda_: int = DEFAULT_LAMBDA
    gamma: int = DEFAULT_GAMMA
    k: int = DEFAULT_K
    xi: int = DEFAULT_XI
    seed: int = DEFAULT_SEED
    llm_params: LlmParams = field(default_factory=LlmParams)
    task_description: str = ""
    max_parse_retries: int = DEFAULT_MAX_PARSE_RETRIES
    anchor_mode: AnchorMode = AnchorMode.CHAIN
    templates: str | None = None

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "space_id", SpaceId(self.space_id))
            object.__setattr__(self, "anchor_mode", AnchorMode(self.anchor_mode))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

        if self.n < 1:
            raise ConfigError(f"n 必須為正整數: {self.n}")
        if self.lambda_ < 0 or self.gamma < 0:
            raise ConfigError(f"lambda 與 gamma 不可為負: {self.lambda_}, {self.gamma}")
        if self.lambda_ + self.gamma != self.n:
            raise ConfigError(
                f"lambda + gamma 必須等於 n: {self.lambda_} + {self.gamma} != {self.n}"
            )
        if self.k < 1:
            raise ConfigError(f"k 必須為正整數: {self.k}")
        if not 1 <= self.xi <= self.k:
            raise ConfigError(f"xi 必須介於 1 與 k 之間: xi={self.xi}, k={self.k}")
        if self.seed < 0:
            raise ConfigError(f"seed 必須為非負整數: {self.seed}")
        if self.max_parse_retries < 0:
            raise ConfigError(f"max_parse_retries 不可為負: {self.max_parse_retries}")
        Selector.parse(self.evaluator)
        Selector.parse(self.llm)

    @property
    def task(self) -> str:
        """目標任務說明"""
        return self.task_description or describe_space(self.space_id).task_description

    @property
    def extended_xi(self) -> bool:
        """ξ = k 的擴充設定 (原始方法要求 ξ < k)"""
        return self.xi == self.k

    def with_budget(self, n: int, lambda_: int | None = None) -> "SearchConfig":
        """以新的總迭代數建立設定；gamma 自動補足"""
        lam = min(self.lambda_, n) if lambda_ is None else lambda_
        return replace(self, n=n, lambda_=lam, gamma=n - lam)

    def to_dict(self) -> dict[str, Any]:
        return {
            "space_id": self.space_id.value,
            "evaluator": self.evaluator,
            "llm": self.llm,
            "n": self.n,
            "lambda": self.lambda_,
            "gamma": self.gamma,
            "k": self.k,
            "xi": self.xi,
            "seed": self.seed,
            "llm_params": self.llm_params.to_dict(),
            "task_description": self.task_description,
            "max_parse_retries": self.max_parse_retries,
            "anchor_mode": self.anchor_mode.value,
            "templates": self.templates,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SearchConfig":
        """
        由快照重建設定

        Raises:
            ConfigError: 欄位缺少或不合法
        """
        try:
            return cls(
                space_id=SpaceId(data["space_id"]),
                evaluator=str(data["evaluator"]),
                llm=str(data["llm"]),
                n=int(data["n"]),
                lambda_=int(data["lambda"]),
                gamma=int(data["gamma"]),
                k=int(data["k"]),
                xi=int(data["xi"]),
                seed=int(data["seed"]),
                llm_params=LlmParams.from_dict(data["llm_params"]),
                task_description=str(data.get("task_description", "")),
                max_parse_retries=int(data["max_parse_retries"]),
                anchor_mode=AnchorMode(data["anchor_mode"]),
                templates=data.get("templates"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"設定快照不完整或不合法: {exc}") from exc
