"""
提示模組 - 模板 C、D、E 的載入與渲染
"""

from .engine import (
    Message,
    OptimizationStrategy,
    Prompt,
    PromptEngine,
    Role,
    TemplateId,
    describe_space_for_prompt,
    format_reminder,
    render_prompt_c,
    render_prompt_d,
    render_prompt_e,
)


__all__ = [
    "Message",
    "OptimizationStrategy",
    "Prompt",
    "PromptEngine",
    "Role",
    "TemplateId",
    "describe_space_for_prompt",
    "format_reminder",
    "render_prompt_c",
    "render_prompt_d",
    "render_prompt_e",
]
