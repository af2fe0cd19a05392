"""
命令列介面模組

子命令：
    run       執行 SEKI 搜尋並寫出軌跡
    baseline  執行隨機或突變基準並寫出軌跡
    oracle    窮舉求得真實最佳解
    sweep     消融實驗掃描 (CSV)
    replay    重播軌跡並驗證一致
    report    彙整多個軌跡 (CSV)

負責參數解析與輸出，不處理搜尋邏輯
"""

import argparse
import logging
import shlex
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import NoReturn

from src import __version__
from src.core.errors import CliUsageError, ConfigError, SekiError
from src.core.interfaces import BaseEvaluator
from src.core.models import (
    DEFAULT_MAX_RETRIES,
    DEFAULT_MAX_TOKENS,
    DEFAULT_MODEL_NAME,
    DEFAULT_TEMPERATURE,
    DEFAULT_TIMEOUT,
    AnchorMode,
    LlmParams,
)
from src.backends import BackendRegistry
from src.evaluators import EvaluatorRegistry, scan_space
from src.search import (
    Method,
    SearchConfig,
    SearchTrace,
    build_evaluator,
    build_report,
    companion_metrics,
    replay,
    run_mutation_baseline,
    run_random_baseline,
    run_seki,
    run_sweep,
    write_report_csv,
    write_sweep_csv,
    write_trace,
)
from src.search.config import (
    DEFAULT_K,
    DEFAULT_LAMBDA,
    DEFAULT_LLM,
    DEFAULT_MAX_PARSE_RETRIES,
    DEFAULT_N,
    DEFAULT_SEED,
    DEFAULT_XI,
)
from src.search.sweep import GridValue, parse_grid_value
from src.spaces import SpaceId
from src.spaces.descriptors import describe_space

from .console import Console


logger = logging.getLogger(__name__)


class CliParser(argparse.ArgumentParser):
    """參數錯誤改為拋出 CliUsageError，由 main() 統一輸出"""

    def error(self, message: str) -> NoReturn:
        raise CliUsageError(message)


def _add_space_and_evaluator(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--space", required=True, choices=[s.value for s in SpaceId], help="搜尋空間"
    )
    parser.add_argument(
        "--evaluator",
        required=True,
        help="評估器選擇器，例如 surrogate:seed=42,beta=0 或 tabular:path=nas201.tsv,metric=cifar10_test",
    )


def _add_search_flags(parser: argparse.ArgumentParser, llm_required: bool) -> None:
    _add_space_and_evaluator(parser)
    parser.add_argument(
        "--llm",
        required=llm_required,
        default=None,
        help="LLM 後端選擇器，例如 mock:greedy 或 http:url=http://localhost:8000/v1/chat/completions",
    )
    parser.add_argument("--n", type=int, default=DEFAULT_N, help="總迭代數")
    parser.add_argument(
        "--lambda", dest="lambda_", type=int, default=DEFAULT_LAMBDA, help="自我演化迭代數"
    )
    parser.add_argument(
        "--gamma", type=int, default=None, help="知識啟發迭代數 (預設 n - lambda)"
    )
    parser.add_argument("--k", type=int, default=DEFAULT_K, help="前 k 名")
    parser.add_argument("--xi", type=int, default=DEFAULT_XI, help="每次知識啟發的範例數")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="主種子")
    parser.add_argument("--model", default=DEFAULT_MODEL_NAME, help="模型名稱")
    parser.add_argument("--temperature", type=float, default=DEFAULT_TEMPERATURE)
    parser.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
    parser.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT, help="單次請求逾時秒數")
    parser.add_argument("--max-retries", type=int, default=DEFAULT_MAX_RETRIES)
    parser.add_argument("--max-parse-retries", type=int, default=DEFAULT_MAX_PARSE_RETRIES)
    parser.add_argument("--task", default="", help="目標任務說明 (預設使用空間內建說明)")
    parser.add_argument(
        "--anchor", choices=[m.value for m in AnchorMode], default=AnchorMode.CHAIN.value
    )
    parser.add_argument("--templates", default=None, help="自訂模板目錄")


def _registry_epilog() -> str:
    lines = ["evaluators:"]
    lines += [
        f"  {name:<10} {EvaluatorRegistry.describe(name)}"
        for name in EvaluatorRegistry.get_evaluator_names()
    ]
    lines.append("llm backends:")
    lines += [
        f"  {name:<10} {BackendRegistry.describe(name)}"
        for name in BackendRegistry.get_backend_names()
    ]
    return "\n".join(lines)


def build_parser() -> CliParser:
    """建立參數解析器"""
    parser = CliParser(
        prog="seki",
        description="LLM 驅動的神經架構搜尋 (SEKI)",
        epilog=_registry_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="顯示除錯日誌")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="只顯示警告與錯誤")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    run = commands.add_parser("run", help="執行 SEKI 搜尋")
    _add_search_flags(run, llm_required=True)
    run.add_argument("--out", required=True, type=Path, help="軌跡檔 (JSONL)")

    baseline = commands.add_parser("baseline", help="執行基準搜尋")
    baseline.add_argument(
        "--method", required=True, choices=[Method.RANDOM.value, Method.MUTATION.value]
    )
    _add_search_flags(baseline, llm_required=False)
    baseline.add_argument("--out", required=True, type=Path, help="軌跡檔 (JSONL)")

    oracle = commands.add_parser("oracle", help="窮舉求得真實最佳解")
    _add_space_and_evaluator(oracle)

    sweep = commands.add_parser("sweep", help="消融實驗掃描")
    sweep.add_argument(
        "--method", choices=[m.value for m in Method], default=Method.SEKI.value
    )
    _add_search_flags(sweep, llm_required=False)
    for name in ("lambda", "k", "xi", "xi-ratio", "seed"):
        sweep.add_argument(
            f"--grid-{name}",
            default=None,
            metavar="V1,V2,...",
            help=f"{name} 的值列表 (逗號分隔)",
        )
    sweep.add_argument("--workers", type=int, default=1, help="平行執行緒數")
    sweep.add_argument("--out", required=True, type=Path, help="結果 CSV")

    replay_cmd = commands.add_parser("replay", help="重播軌跡並驗證一致")
    replay_cmd.add_argument("trace", type=Path, help="軌跡檔")

    report = commands.add_parser("report", help="彙整多個軌跡")
    report.add_argument("traces", nargs="*", type=Path, help="軌跡檔")
    report.add_argument("--out", required=True, type=Path, help="報表 CSV")
    return parser


def config_from_args(args: argparse.Namespace) -> SearchConfig:
    """
    由命令列參數建立搜尋設定

    Raises:
        ConfigError: 設定不合法
    """
    gamma = args.n - args.lambda_ if args.gamma is None else args.gamma
    params = LlmParams(
        model_name=args.model,
        temperature=args.temperature,
        max_tokens=args.max_tokens,
        timeout=args.timeout,
        max_retries=args.max_retries,
    )
    return SearchConfig(
        space_id=SpaceId(args.space),
        evaluator=args.evaluator,
        llm=args.llm or DEFAULT_LLM,
        n=args.n,
        lambda_=args.lambda_,
        gamma=gamma,
        k=args.k,
        xi=args.xi,
        seed=args.seed,
        llm_params=params,
        task_description=args.task,
        max_parse_retries=args.max_parse_retries,
        anchor_mode=AnchorMode(args.anchor),
        templates=args.templates,
    )


def _print_trace_result(trace: SearchTrace, out: Path, evaluator: BaseEvaluator) -> None:
    best = trace.best
    if best is None:
        return
    others = companion_metrics(evaluator, best.arch)
    Console.print_fields(
        [
            ("best", best.arch.canonical_text),
            ("fitness", best.fitness.describe()),
            ("raw", repr(best.fitness.raw_metric)),
            ("iteration", best.iteration),
            ("evaluations", trace.evaluations),
            *((f"metric.{name}", repr(value)) for name, value in others.items()),
            ("trace", out),
        ]
    )


def cmd_run(args: argparse.Namespace, argv: Sequence[str]) -> int:
    """執行 SEKI 搜尋並寫出軌跡"""
    config = config_from_args(args)
    evaluator = build_evaluator(config)
    trace = run_seki(config, evaluator=evaluator)
    trace.command = shlex.join(["seki", *argv])
    write_trace(trace, args.out)
    _print_trace_result(trace, args.out, evaluator)
    return 0


def cmd_baseline(args: argparse.Namespace, argv: Sequence[str]) -> int:
    """執行基準搜尋並寫出軌跡"""
    config = config_from_args(args)
    evaluator = build_evaluator(config)
    if args.method == Method.RANDOM.value:
        trace = run_random_baseline(config, evaluator=evaluator)
    else:
        trace = run_mutation_baseline(config, evaluator=evaluator)
    trace.command = shlex.join(["seki", *argv])
    write_trace(trace, args.out)
    _print_trace_result(trace, args.out, evaluator)
    return 0


def cmd_oracle(args: argparse.Namespace) -> int:
    """窮舉並輸出真實最佳解"""
    space = describe_space(args.space)
    evaluator = EvaluatorRegistry.create(args.evaluator, space)
    result = scan_space(evaluator, space)
    Console.print_fields(
        [
            ("best", result.arch.canonical_text),
            ("fitness", result.fitness.describe()),
            ("raw", repr(result.fitness.raw_metric)),
            ("scanned", result.scanned),
        ]
    )
    return 0


def parse_grid(args: argparse.Namespace) -> dict[str, list[GridValue]]:
    """收集 --grid-* 參數 (依 lambda、k、xi、xi_ratio、seed 順序)"""
    grid: dict[str, list[GridValue]] = {}
    for name in ("lambda", "k", "xi", "xi_ratio", "seed"):
        text = getattr(args, f"grid_{name}")
        if text is None:
            continue
        values = [part.strip() for part in text.split(",") if part.strip()]
        if not values:
            raise ConfigError(f"--grid-{name.replace('_', '-')} 不可為空")
        grid[name] = [parse_grid_value(name, value) for value in values]
    if not grid:
        raise ConfigError("至少需要一個 --grid-* 參數")
    return grid


def cmd_sweep(args: argparse.Namespace) -> int:
    """執行消融掃描並寫出 CSV"""
    grid = parse_grid(args)
    base = config_from_args(args)
    rows = run_sweep(base, grid, method=Method(args.method), workers=args.workers)
    write_sweep_csv(rows, base, args.out)
    done = sum(1 for row in rows if row.status == "ok")
    Console.print_fields([("cells", len(rows)), ("completed", done), ("table", args.out)])
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    """重播軌跡"""
    result = replay(args.trace)
    Console.print_fields(
        [("trace", result.path), ("records", result.iterations_checked), ("divergences", 0)]
    )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    """彙整軌跡並寫出 CSV"""
    summaries, aggregates = build_report(args.traces)
    write_report_csv(summaries, aggregates, args.out)
    for aggregate in aggregates:
        Console.write_line(
            f"{aggregate.method} [{aggregate.space}, {aggregate.evaluator}] "
            f"n={aggregate.count} mean={aggregate.mean:.4f} std={aggregate.std:.4f}"
        )
    Console.print_fields([("report", args.out)])
    return 0


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(message)s", stream=sys.stderr)


def dispatch(args: argparse.Namespace, argv: Sequence[str]) -> int:
    """執行子命令"""
    match args.command:
        case "run":
            return cmd_run(args, argv)
        case "baseline":
            return cmd_baseline(args, argv)
        case "oracle":
            return cmd_oracle(args)
        case "sweep":
            return cmd_sweep(args)
        case "replay":
            return cmd_replay(args)
        case "report":
            return cmd_report(args)
    raise CliUsageError(f"未知的命令: {args.command}")


def main(argv: Sequence[str] | None = None) -> int:
    """
    命令列進入點

    Returns:
        退出碼 (0: 成功, 1: 執行失敗或取消, 2: 設定或參數錯誤)
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args)
        return dispatch(args, argv)

    except KeyboardInterrupt:
        Console.write_error("error: Interrupted: 已取消")
        return 1

    except SekiError as exc:
        Console.report_error(exc)
        return exc.exit_status

    except Exception as exc:
        logger.debug("Unexpected failure", exc_info=True)
        Console.write_error(f"error: InternalError: {type(exc).__name__}: {exc}")
        return 1
