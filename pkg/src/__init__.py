"""
SEKI 神經架構搜尋引擎

以 LLM 進行兩階段架構搜尋：自我演化與知識啟發
"""

__version__ = "0.1.0"
