"""
錯誤定義模組

所有領域錯誤都繼承自 SekiError，並帶有穩定的 code 字串，
CLI 會將其輸出為單行、可由機器解析的錯誤訊息
"""

from typing import ClassVar


class SekiError(Exception):
    """
    所有領域錯誤的基底類別

    Attributes:
        code: 穩定的錯誤代碼，用於 CLI 輸出
        exit_status: CLI 對應的退出碼
    """

    code: ClassVar[str] = "SekiError"
    exit_status: ClassVar[int] = 1


# ---------------- 搜尋空間 ----------------


class ParseError(SekiError):
    """架構字串解析錯誤的共同基底"""

    code: ClassVar[str] = "ParseError"


class UnknownOperator(ParseError):
    code: ClassVar[str] = "UnknownOperator"

    def __init__(self, label: str) -> None:
        super().__init__(f"未知的運算子: '{label}'")
        self.label = label


class ArityMismatch(ParseError):
    code: ClassVar[str] = "ArityMismatch"

    def __init__(self, expected: int, got: int) -> None:
        super().__init__(f"槽位數量不符: 預期 {expected}，實際 {got}")
        self.expected = expected
        self.got = got


class InvalidInputIndex(ParseError):
    code: ClassVar[str] = "InvalidInputIndex"

    def __init__(self, node: int, index: int) -> None:
        super().__init__(f"節點 {node} 的輸入索引無效: {index}")
        self.node = node
        self.index = index


class MalformedEncoding(ParseError):
    code: ClassVar[str] = "MalformedEncoding"


class NoArchitectureFound(ParseError):
    code: ClassVar[str] = "NoArchitectureFound"


class NotEnumerable(SekiError):
    code: ClassVar[str] = "NotEnumerable"

    def __init__(self, space_id: str) -> None:
        super().__init__(f"搜尋空間 {space_id} 無法窮舉")
        self.space_id = space_id


class SpaceMismatch(SekiError):
    code: ClassVar[str] = "SpaceMismatch"

    def __init__(self, expected: str, got: str) -> None:
        super().__init__(f"搜尋空間不符: 預期 {expected}，實際 {got}")
        self.expected = expected
        self.got = got


# ---------------- 提示模板 ----------------


class EmptyStrategy(SekiError):
    code: ClassVar[str] = "EmptyStrategy"


class EmptyExemplarList(SekiError):
    code: ClassVar[str] = "EmptyExemplarList"


class TemplateError(SekiError):
    code: ClassVar[str] = "TemplateError"
    exit_status: ClassVar[int] = 2


# ---------------- LLM ----------------


class MissingEvaluator(SekiError):
    code: ClassVar[str] = "MissingEvaluator"
    exit_status: ClassVar[int] = 2


class LlmError(SekiError):
    """LLM 呼叫失敗的共同基底"""

    code: ClassVar[str] = "LlmError"


class LlmTimeout(LlmError):
    code: ClassVar[str] = "Timeout"


class EndpointError(LlmError):
    code: ClassVar[str] = "EndpointError"

    def __init__(self, status: int, body_excerpt: str) -> None:
        super().__init__(f"端點回應錯誤 HTTP {status}: {body_excerpt}")
        self.status = status
        self.body_excerpt = body_excerpt


class RetriesExhausted(LlmError):
    code: ClassVar[str] = "RetriesExhausted"

    def __init__(self, attempts: int, last_error: str) -> None:
        super().__init__(f"重試 {attempts} 次後仍失敗: {last_error}")
        self.attempts = attempts
        self.last_error = last_error


# ---------------- 評估器 ----------------


class ArchitectureNotInTable(SekiError):
    code: ClassVar[str] = "ArchitectureNotInTable"

    def __init__(self, canonical_text: str) -> None:
        super().__init__(f"表格中找不到架構: {canonical_text}")
        self.canonical_text = canonical_text


class FileError(SekiError):
    code: ClassVar[str] = "FileError"


class SchemaError(SekiError):
    code: ClassVar[str] = "SchemaError"

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"第 {line} 行格式錯誤: {reason}")
        self.line = line
        self.reason = reason


class InvalidArchKey(SekiError):
    code: ClassVar[str] = "InvalidArchKey"

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"第 {line} 行的架構鍵無效: {reason}")
        self.line = line
        self.reason = reason


# ---------------- 知識庫 ----------------


class EmptyPool(SekiError):
    code: ClassVar[str] = "EmptyPool"


class EmptyRepository(SekiError):
    code: ClassVar[str] = "EmptyRepository"


# ---------------- 搜尋流程 ----------------


class ConfigError(SekiError, ValueError):
    code: ClassVar[str] = "ConfigError"
    exit_status: ClassVar[int] = 2


class TraceUnreadable(SekiError):
    code: ClassVar[str] = "TraceUnreadable"

    def __init__(self, path: str, reason: str) -> None:
        super().__init__(f"無法讀取軌跡檔 {path}: {reason}")
        self.path = path
        self.reason = reason


class NonReplayableTrace(SekiError):
    code: ClassVar[str] = "NonReplayableTrace"


class DivergenceAt(SekiError):
    code: ClassVar[str] = "DivergenceAt"

    def __init__(self, iteration: int, field: str) -> None:
        super().__init__(f"重播於第 {iteration} 次迭代的欄位 '{field}' 出現分歧")
        self.iteration = iteration
        self.field = field


class CliUsageError(SekiError):
    code: ClassVar[str] = "UsageError"
    exit_status: ClassVar[int] = 2
