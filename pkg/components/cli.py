"""
命令行入口
solve / table / two-mesh / growth / verify
"""
import argparse
import sys
from dataclasses import dataclass, field
from itertools import groupby
from pathlib import Path
from typing import List, Optional, Sequence

from config import (DEFAULT_N_LIST, EXIT_CODES, HARNESS_CONFIG, STANDARD_ALPHAS,
                    SUPPORTED_FORMATS)
from components.errors import (AccuracyLossError, ConfigError, DomainError,
                               FractionalSolverError, IncompatibleGridError,
                               MissingExactSolutionError, NumericalFailure)
from components.harness import (METRIC_EXACT, METRIC_TWO_MESH, CellSpec, build_problem,
                                convergence_report, growth_report, max_nodal_error,
                                resolve_grading, solve_cell)
from components.mesh import SchemeKind
from components.problem_config import load_problem
from components.report import (grid_frame, render, render_convergence, render_growth,
                               write_text)
from components.verification import run_verification
from utils.helpers import (get_logger, parse_float_list, parse_int_list, setup_logging)

logger = get_logger("cli")

COMMANDS = ("solve", "table", "two-mesh", "growth", "verify")


@dataclass
class RunConfig:
    """一次命令行运行的全部参数"""
    command: str
    alphas: List[float] = field(default_factory=lambda: list(STANDARD_ALPHAS))
    schemes: List[SchemeKind] = field(default_factory=lambda: [SchemeKind.FITTED])
    r_spec: str = "optimal"
    n_list: List[int] = field(default_factory=lambda: list(DEFAULT_N_LIST))
    m_list: Optional[List[int]] = None
    times: List[float] = field(default_factory=lambda: [1.0])
    example: Optional[str] = None
    problem_path: Optional[str] = None
    out: Optional[Path] = None
    fmt: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"未知命令: {self.command}")
        for alpha in self.alphas:
            if not 0.0 < alpha < 1.0:
                raise ConfigError(f"α 必须在 (0, 1) 内: {alpha}")
        if self.fmt not in SUPPORTED_FORMATS:
            raise ConfigError(f"不支持的输出格式: {self.fmt}")
        if self.example is not None and self.problem_path is not None:
            raise ConfigError("--example 与 --problem 只能指定一个")
        if self.command != "verify" and self.example is None and self.problem_path is None:
            raise ConfigError("必须指定 --example 或 --problem")
        if self.m_list is not None and len(self.m_list) not in (1, len(self.n_list)):
            raise ConfigError(f"--m 的长度应为 1 或与 --n 相同: {self.m_list}")
        if self.workers < 1:
            raise ConfigError(f"--workers 至少为 1: {self.workers}")
        if self.command == "growth" and len(self.times) != 2:
            raise ConfigError(f"growth 需要恰好两个终止时间: {self.times}")

    @property
    def resolved_m(self) -> List[int]:
        """M 列表：默认 M = N，单个值对所有 N 共用"""
        if self.m_list is None:
            return list(self.n_list)
        if len(self.m_list) == 1:
            return self.m_list * len(self.n_list)
        return list(self.m_list)

    @property
    def source_label(self) -> str:
        if self.problem_path:
            return Path(self.problem_path).stem
        return f"example{self.example}" if str(self.example).isdigit() else str(self.example)


def build_parser() -> argparse.ArgumentParser:
    """构造参数解析器"""
    parser = argparse.ArgumentParser(
        prog="fracsolver",
        description="时间分数阶反应扩散方程：拟合格式与 L1 格式的数值实验",
    )
    parser.add_argument("command", choices=COMMANDS, help="要执行的命令")
    parser.add_argument("--alpha", default=",".join(str(a) for a in STANDARD_ALPHAS),
                        help="分数阶 α 列表，逗号分隔")
    parser.add_argument("--scheme", default="fitted", choices=["fitted", "l1", "both"],
                        help="离散格式")
    parser.add_argument("--r", default="optimal",
                        help="分级指数：数字 / optimal / uniform")
    parser.add_argument("--n", default=",".join(str(n) for n in DEFAULT_N_LIST),
                        help="时间区间数 N，如 64,128 或 64..1024")
    m_group = parser.add_mutually_exclusive_group()
    m_group.add_argument("--m", default=None, help="空间区间数 M 列表")
    m_group.add_argument("--m-eq-n", action="store_true", help="取 M = N（默认）")
    parser.add_argument("--T", dest="times", default=None,
                        help="终止时间列表（growth 默认 1,10，其余默认 1）")
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--example", default=None, help="算例: 1 / 2 / 3 / exact")
    source.add_argument("--problem", default=None, help="问题配置文件路径")
    parser.add_argument("--out", default=None, help="输出目录（默认打印到标准输出）")
    parser.add_argument("--format", dest="fmt", default="csv", choices=SUPPORTED_FORMATS,
                        help="输出格式")
    parser.add_argument("--workers", type=int, default=1, help="并行进程数")
    parser.add_argument("--verbose", "-v", action="store_true", help="输出调试日志")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """命令行参数 → RunConfig"""
    try:
        alphas = parse_float_list(args.alpha)
        n_list = parse_int_list(args.n)
        m_list = parse_int_list(args.m) if args.m is not None else None
        if args.times is not None:
            times = parse_float_list(args.times)
        elif args.command == "growth":
            times = list(HARNESS_CONFIG["growth_times"])
        elif args.problem is not None:
            times = None
        else:
            times = [1.0]
    except ValueError as e:
        raise ConfigError(f"参数格式错误: {e}") from e
    if times is None:
        # 未给 --T 时沿用配置文件 [domain] 中的 T
        times = [load_problem(args.problem).T]

    schemes = ([SchemeKind.FITTED, SchemeKind.L1] if args.scheme == "both"
               else [SchemeKind.parse(args.scheme)])
    return RunConfig(
        command=args.command,
        alphas=alphas,
        schemes=schemes,
        r_spec=args.r,
        n_list=n_list,
        m_list=m_list,
        times=times,
        example=args.example,
        problem_path=args.problem,
        out=Path(args.out) if args.out else None,
        fmt=args.fmt,
        workers=args.workers,
    )


def _emit(text: str, config: RunConfig, name: str) -> None:
    if config.out is None:
        sys.stdout.write(text)
    else:
        write_text(text, config.out / f"{name}.{config.fmt}")


def _table_name(config: RunConfig, alpha: float, kind: SchemeKind, T: float) -> str:
    return f"{config.command}_{config.source_label}_a{alpha:g}_{kind.value}_T{T:g}"


def run_solve(config: RunConfig) -> int:
    """单次求解：打印误差（若有精确解），--out 时写出节点值"""
    alpha, kind, T = config.alphas[0], config.schemes[0], config.times[0]
    N, M = config.n_list[0], config.resolved_m[0]
    r = resolve_grading(config.r_spec, alpha, kind)
    cell = CellSpec(example=config.example, alpha=alpha, scheme=kind.value, r=r, T=T,
                    N=N, M=M, problem_path=config.problem_path)
    problem = build_problem(config.example, alpha, T, config.problem_path)
    grid = solve_cell(problem, cell)

    if problem.has_exact:
        error = max_nodal_error(grid, problem.exact)
        print(f"✅ {problem.name}: α={alpha:g} {kind.value} r={r:.4g} T={T:g} "
              f"N={N} M={M} 最大节点误差 {error:.3E}")
    else:
        print(f"✅ {problem.name}: α={alpha:g} {kind.value} r={r:.4g} T={T:g} "
              f"N={N} M={M} 求解完成（无精确解）")

    if config.out is not None:
        frame = grid_frame(grid.values, grid.spatial.x, grid.temporal.t)
        name = f"solve_{config.source_label}_a{alpha:g}_{kind.value}_T{T:g}_N{N}_M{M}"
        write_text(render(frame, config.fmt), config.out / f"{name}.{config.fmt}")
    return EXIT_CODES["success"]


def run_tables(config: RunConfig) -> int:
    """table / two-mesh：每个 (α, 格式, T) 一行误差与收敛率"""
    metric = METRIC_TWO_MESH if config.command == "two-mesh" else METRIC_EXACT
    m_list = config.resolved_m
    reports = []
    for kind in config.schemes:
        for T in config.times:
            for alpha in config.alphas:
                report = convergence_report(config.example, alpha, kind, config.r_spec,
                                            config.n_list, m_list, T, metric=metric,
                                            workers=config.workers,
                                            problem_path=config.problem_path)
                reports.append(report)
                if config.out is not None:
                    _emit(render_convergence([report], config.fmt), config,
                          _table_name(config, alpha, kind, T))

    if config.out is None:
        if config.fmt == "csv":
            _emit(render_convergence(reports, "csv"), config, config.command)
        else:
            for (kind, T), group in groupby(reports, key=lambda rep: (rep.kind, rep.T)):
                group = list(group)
                print(f"\n📊 {config.source_label} {kind.value} r={config.r_spec} T={T:g} "
                      f"{group[0].problem_label}\n")
                _emit(render_convergence(group, "md"), config, config.command)
    return EXIT_CODES["success"]


def run_growth(config: RunConfig) -> int:
    """T=1 与 T=10 的误差增长率"""
    reports = []
    for kind in config.schemes:
        for alpha in config.alphas:
            report = growth_report(config.example, alpha, kind, config.r_spec,
                                   config.n_list, config.resolved_m,
                                   times=tuple(config.times), workers=config.workers,
                                   problem_path=config.problem_path)
            reports.append(report)
            if config.out is not None:
                name = f"growth_{config.source_label}_a{alpha:g}_{kind.value}"
                _emit(render_growth([report], config.fmt), config, name)

    if config.out is None:
        _emit(render_growth(reports, config.fmt), config, "growth")
    return EXIT_CODES["success"]


def run_verify(config: RunConfig) -> int:
    """运行自检并输出通过 / 失败汇总"""
    frame = run_verification(config.alphas, config.schemes)
    _emit(render(frame, config.fmt), config, "verify")
    failed = int((~frame['passed']).sum())
    if failed:
        print(f"❌ {failed}/{len(frame)} 项自检未通过", file=sys.stderr)
        return EXIT_CODES["verification_failure"]
    print(f"✅ {len(frame)} 项自检全部通过", file=sys.stderr)
    return EXIT_CODES["success"]


def run(config: RunConfig) -> int:
    """执行命令，返回退出码"""
    handlers = {
        "solve": run_solve,
        "table": run_tables,
        "two-mesh": run_tables,
        "growth": run_growth,
        "verify": run_verify,
    }
    return handlers[config.command](config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """命令行入口，异常映射为退出码"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    try:
        config = config_from_args(args)
        return run(config)
    except (ConfigError, DomainError, MissingExactSolutionError, IncompatibleGridError) as e:
        print(f"❌ 参数错误: {e}", file=sys.stderr)
        return EXIT_CODES["config_error"]
    except (NumericalFailure, AccuracyLossError) as e:
        print(f"❌ 数值计算失败: {e}", file=sys.stderr)
        return EXIT_CODES["numerical_failure"]
    except FractionalSolverError as e:
        print(f"❌ 运行失败: {e}", file=sys.stderr)
        return EXIT_CODES["numerical_failure"]
