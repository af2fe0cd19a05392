#!/usr/bin/env python3
"""
SEKI 神經架構搜尋

主程式進入點，參數解析與錯誤輸出交給 src.ui.cli

使用方法:
    uv run main.py run --space nas201 --evaluator surrogate:seed=42,beta=0 \
        --llm mock:greedy --out trace.jsonl
"""

import sys

from src.ui.cli import main


if __name__ == "__main__":
    sys.exit(main())
