"""
選擇器字串模組

評估器與 LLM 後端以精簡的 "kind:key=value,..." 字串指定，
完整的命令列因此可以重現一次搜尋

第一個參數可以省略 "key="，作為變體名稱，例如 "mock:greedy,seed=3"
含逗號的值以單引號或雙引號包住，例如 'tabular:path="runs/a,b.tsv"'；
反斜線不是跳脫字元 (Windows 路徑可直接使用)
"""

import shlex
from collections.abc import Collection, Iterator
from dataclasses import dataclass, field

from .errors import ConfigError


def _split_items(text: str, rest: str) -> Iterator[str]:
    lexer = shlex.shlex(rest, posix=True)
    lexer.whitespace = ","
    lexer.whitespace_split = True
    lexer.commenters = ""
    lexer.escape = ""
    try:
        items = list(lexer)
    except ValueError as exc:
        raise ConfigError(f"選擇器引號未成對: '{text}'") from exc
    return (item.strip() for item in items if item.strip())


def _quote(value: str) -> str:
    if not any(ch in value for ch in ",\"'"):
        return value
    quote = "'" if '"' in value else '"'
    return f"{quote}{value}{quote}"


@dataclass(frozen=True)
class Selector:
    """
    已解析的選擇器

    Attributes:
        kind: 註冊表中的名稱
        variant: 變體名稱 (可省略)
        options: 鍵值參數 (保留原始順序)
    """

    kind: str
    variant: str | None = None
    options: dict[str, str] = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str) -> "Selector":
        """
        解析選擇器字串

        Example:
            Selector.parse("surrogate:seed=42,beta=0")
            Selector.parse("mock:greedy")
            Selector.parse('tabular:path="runs/a,b.tsv",metric=test')

        Raises:
            ConfigError: 格式錯誤、鍵重複或引號未成對
        """
        kind, _, rest = text.strip().partition(":")
        if not kind:
            raise ConfigError(f"選擇器缺少種類: '{text}'")

        variant: str | None = None
        options: dict[str, str] = {}
        for position, item in enumerate(_split_items(text, rest)):
            key, sep, value = item.partition("=")
            if not sep and position == 0:
                variant = item
                continue
            if not sep or not key:
                raise ConfigError(f"選擇器參數必須為 key=value: '{item}'")
            if key in options:
                raise ConfigError(f"選擇器參數重複: '{key}'")
            options[key] = value
        return cls(kind=kind, variant=variant, options=options)

    def get_int(self, key: str, default: int) -> int:
        value = self.options.get(key)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"選擇器參數 '{key}' 必須為整數: '{value}'") from exc

    def get_float(self, key: str, default: float) -> float:
        value = self.options.get(key)
        if value is None:
            return default
        try:
            return float(value)
        except ValueError as exc:
            raise ConfigError(f"選擇器參數 '{key}' 必須為數值: '{value}'") from exc

    def get_str(self, key: str, default: str | None = None) -> str | None:
        return self.options.get(key, default)

    def check_keys(self, allowed: set[str], variants: Collection[str] = ()) -> None:
        """拒絕未知的參數與變體"""
        if self.variant is not None and self.variant not in variants:
            raise ConfigError(
                f"{self.kind} 不支援的變體: '{self.variant}'，可用變體: {sorted(variants)}"
            )
        unknown = set(self.options) - allowed
        if unknown:
            raise ConfigError(
                f"{self.kind} 不支援的參數: {sorted(unknown)}，可用參數: {sorted(allowed)}"
            )

    def __str__(self) -> str:
        items = [self.variant] if self.variant else []
        items.extend(f"{k}={_quote(v)}" for k, v in self.options.items())
        if not items:
            return self.kind
        return self.kind + ":" + ",".join(items)
