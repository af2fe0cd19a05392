"""
使用者介面模組
"""

from .cli import build_parser, main
from .console import Console


__all__ = ["Console", "build_parser", "main"]
