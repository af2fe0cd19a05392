"""
HTTP 聊天端點後端

使用 chat-completions 形式的請求：
    {"model": ..., "messages": [{"role": ..., "content": ...}],
     "temperature": ..., "max_tokens": ...}
回覆取自 choices[0].message.content

憑證只從環境變數 SEKI_LLM_API_KEY 讀取，以 Bearer 標頭送出

httpx 的 timeout 只限制單一讀寫操作，因此另外以單調時鐘追蹤整次呼叫
(含所有重試與退避等待) 的總時限；回覆以串流讀取，逐塊檢查時限
"""

import json
import logging
import os
import time
from collections.abc import Callable
from typing import Any, ClassVar

import httpx

from src.core.errors import ConfigError, EndpointError, LlmError, LlmTimeout, RetriesExhausted
from src.core.interfaces import BaseLlmBackend
from src.core.models import LlmParams
from src.core.selector import Selector
from src.prompts import Prompt

from .registry import BackendContext, BackendRegistry


API_KEY_ENV: str = "SEKI_LLM_API_KEY"
DEFAULT_BACKOFF: float = 1.0
MAX_BACKOFF: float = 30.0
BODY_EXCERPT_CHARS: int = 200

# 可重試的 HTTP 狀態碼
RETRYABLE_STATUS: frozenset[int] = frozenset({408, 409, 429, 500, 502, 503, 504})

logger = logging.getLogger(__name__)


def build_payload(prompt: Prompt, params: LlmParams) -> dict[str, Any]:
    """組成請求內容"""
    return {
        "model": params.model_name,
        "messages": [
            {"role": message.role.value, "content": message.text}
            for message in prompt.messages
        ],
        "temperature": params.temperature,
        "max_tokens": params.max_tokens,
    }


def parse_reply(status: int, body: str) -> str:
    """
    取出第一個選項的訊息內容

    Raises:
        EndpointError: 回覆格式不符
    """
    try:
        content = json.loads(body)["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise EndpointError(status, body[:BODY_EXCERPT_CHARS]) from exc
    if not isinstance(content, str):
        raise EndpointError(status, body[:BODY_EXCERPT_CHARS])
    return content


def retry_delays(backoff: float, max_retries: int) -> list[float]:
    """每次重試前的等待秒數 (指數退避，上限 MAX_BACKOFF)"""
    return [min(backoff * 2**retry, MAX_BACKOFF) for retry in range(max_retries)]


def _deadline_exceeded(budget: float, attempts: int, last_error: LlmError | None) -> LlmTimeout:
    return LlmTimeout(f"總時限 {budget:.1f} 秒已用盡 (已嘗試 {attempts} 次): {last_error}")


@BackendRegistry.register("http", "chat-completions 形式的 HTTP 端點")
class HttpChatBackend(BaseLlmBackend):
    """
    HTTP 聊天端點後端

    暫時性失敗 (逾時、連線錯誤、429、5xx) 以指數退避重試最多 max_retries 次；
    其他 4xx 立即失敗。整次呼叫受總時限限制，用盡時拋出 LlmTimeout
    """

    name: ClassVar[str] = "http"
    replayable: ClassVar[bool] = False

    def __init__(
        self,
        url: str,
        api_key: str | None = None,
        backoff: float = DEFAULT_BACKOFF,
        deadline: float | None = None,
        client: httpx.Client | None = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        """
        初始化後端

        Args:
            url: 端點網址
            api_key: 憑證 (None 時不送出 Authorization 標頭)
            backoff: 第一次重試前的等待秒數，之後每次加倍
            deadline: 整次呼叫的總秒數 (None 時為所有嘗試的 timeout 加上所有退避等待)
            client: 自訂的 httpx.Client (測試時注入 MockTransport)
            sleep: 等待函數 (測試時替換)
            clock: 單調時鐘 (測試時替換)
        """
        if not url:
            raise ConfigError("http 後端需要 url 參數")
        if backoff < 0:
            raise ConfigError(f"backoff 不可為負: {backoff}")
        if deadline is not None and deadline <= 0:
            raise ConfigError(f"deadline 必須大於 0: {deadline}")
        self.url = url
        self.backoff = backoff
        self.deadline = deadline
        self._sleep = sleep
        self._clock = clock
        self._client = client or httpx.Client()
        self._headers = {"Content-Type": "application/json"}
        if api_key:
            self._headers["Authorization"] = f"Bearer {api_key}"
        else:
            logger.warning("%s is not set; sending requests without credentials", API_KEY_ENV)

    @classmethod
    def from_selector(cls, selector: Selector, context: BackendContext) -> "HttpChatBackend":
        """由 "http:url=http://localhost:8000/v1/chat/completions,backoff=1,deadline=300" 建立"""
        selector.check_keys({"url", "backoff", "deadline"})
        deadline = selector.get_float("deadline", 0.0) if "deadline" in selector.options else None
        return cls(
            url=selector.get_str("url") or "",
            api_key=os.environ.get(API_KEY_ENV),
            backoff=selector.get_float("backoff", DEFAULT_BACKOFF),
            deadline=deadline,
        )

    def total_budget(self, params: LlmParams) -> float:
        """整次呼叫的總秒數"""
        if self.deadline is not None:
            return self.deadline
        attempts = params.max_retries + 1
        return params.timeout * attempts + sum(retry_delays(self.backoff, params.max_retries))

    def _post(self, prompt: Prompt, params: LlmParams, deadline: float) -> str:
        remaining = deadline - self._clock()
        timeout = min(params.timeout, remaining)
        try:
            with self._client.stream(
                "POST",
                self.url,
                json=build_payload(prompt, params),
                headers=self._headers,
                timeout=timeout,
            ) as response:
                chunks: list[bytes] = []
                for chunk in response.iter_bytes():
                    chunks.append(chunk)
                    self._check_deadline(deadline)
                self._check_deadline(deadline)
                status = response.status_code
                body = b"".join(chunks).decode(response.encoding or "utf-8", errors="replace")
        except httpx.TimeoutException as exc:
            raise LlmTimeout(f"請求逾時 ({timeout:.1f} 秒)") from exc
        except httpx.TransportError as exc:
            raise LlmError(f"連線失敗: {exc}") from exc

        if status != httpx.codes.OK:
            raise EndpointError(status, body[:BODY_EXCERPT_CHARS])
        return parse_reply(status, body)

    def _check_deadline(self, deadline: float) -> None:
        if self._clock() > deadline:
            raise LlmTimeout("回覆讀取超過總時限")

    def complete(self, prompt: Prompt, params: LlmParams) -> str:
        """
        送出請求並取得回覆

        Raises:
            EndpointError: 不可重試的 HTTP 錯誤或回覆格式不符
            RetriesExhausted: 重試用盡
            LlmTimeout: 總時限用盡
        """
        attempts = params.max_retries + 1
        delays = retry_delays(self.backoff, params.max_retries)
        budget = self.total_budget(params)
        deadline = self._clock() + budget
        last_error: LlmError | None = None
        for attempt in range(attempts):
            if attempt:
                delay = delays[attempt - 1]
                if self._clock() + delay >= deadline:
                    raise _deadline_exceeded(budget, attempt, last_error) from last_error
                logger.warning(
                    "LLM request failed (%s), retry %d/%d in %.1fs",
                    last_error,
                    attempt,
                    params.max_retries,
                    delay,
                )
                self._sleep(delay)
            if self._clock() >= deadline:
                raise _deadline_exceeded(budget, attempt, last_error) from last_error
            try:
                return self._post(prompt, params, deadline)
            except EndpointError as exc:
                if exc.status not in RETRYABLE_STATUS:
                    raise
                last_error = exc
            except LlmError as exc:
                last_error = exc

        assert last_error is not None
        raise RetriesExhausted(attempts, f"{last_error.code}: {last_error}") from last_error

    def close(self) -> None:
        self._client.close()
