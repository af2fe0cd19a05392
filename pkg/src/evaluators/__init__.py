"""
評估器模組

提供架構評估分數 f(α)：表格基準查表與合成代理模型
"""

from .convert import NAS201_METRICS, ExportMetric, export_rows
from .oracle import OracleResult, oracle_best, scan_space
from .registry import EvaluatorRegistry
from .surrogate import SurrogateEvaluator, SurrogateModel, build_surrogate
from .tabular import (
    MetricColumn,
    TabularBenchmark,
    TabularEvaluator,
    load_tabular,
    write_tabular,
)


__all__ = [
    "NAS201_METRICS",
    "EvaluatorRegistry",
    "ExportMetric",
    "MetricColumn",
    "OracleResult",
    "SurrogateEvaluator",
    "SurrogateModel",
    "TabularBenchmark",
    "TabularEvaluator",
    "build_surrogate",
    "export_rows",
    "load_tabular",
    "oracle_best",
    "scan_space",
    "write_tabular",
]
