"""
控制台工具模組

提供控制台輸出的基礎工具函數，遵循單一職責原則
結果寫到 stdout，錯誤寫到 stderr (日誌由 logging 寫到 stderr)
"""

import sys
from collections.abc import Iterable
from typing import TextIO

from src.core.errors import SekiError


class Console:
    """
    控制台工具類別

    封裝所有控制台相關的操作
    """

    @staticmethod
    def _write(
        message: str,
        *,
        end: str = "\n",
        file: TextIO | None = None,
        flush: bool = False,
    ) -> None:
        target = file or sys.stdout
        target.write(f"{message}{end}")
        if flush:
            target.flush()

    @staticmethod
    def write_line(message: str) -> None:
        """輸出單行文字"""
        Console._write(message)

    @staticmethod
    def write_error(message: str) -> None:
        """輸出錯誤文字到 stderr"""
        Console._write(message, file=sys.stderr, flush=True)

    @staticmethod
    def report_error(error: SekiError) -> None:
        """輸出單行、可由機器解析的錯誤：error: <code>: <message>"""
        message = " ".join(str(error).split())
        Console.write_error(f"error: {error.code}: {message}")

    @staticmethod
    def print_fields(fields: Iterable[tuple[str, object]]) -> None:
        """逐行輸出 "key: value" (方便其他程式擷取)"""
        for key, value in fields:
            Console._write(f"{key}: {value}")
