"""
LLM 後端模組

提供 HTTP 聊天端點與確定性模擬代理兩種後端
"""

from src.core.interfaces import BaseLlmBackend
from src.core.models import LlmParams
from src.prompts import Prompt

from .http import API_KEY_ENV, HttpChatBackend
from .registry import BackendContext, BackendRegistry
from .scripted import (
    AgentKind,
    ScriptedBackend,
    greedy_step,
    majority_vote,
    make_scripted_agent,
    read_architectures,
)


def complete(backend: BaseLlmBackend, prompt: Prompt, params: LlmParams) -> str:
    """取得模型原始輸出文字"""
    return backend.complete(prompt, params)


__all__ = [
    "API_KEY_ENV",
    "AgentKind",
    "BackendContext",
    "BackendRegistry",
    "HttpChatBackend",
    "ScriptedBackend",
    "complete",
    "greedy_step",
    "majority_vote",
    "make_scripted_agent",
    "read_architectures",
]
