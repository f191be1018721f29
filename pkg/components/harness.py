"""
误差统计与收敛率
最大节点误差、双网格差、收敛率、关于 T 的增长率，以及表格数据的组装
"""
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config import CSV_COLUMNS, GROWTH_COLUMNS, HARNESS_CONFIG
from components.errors import (ConfigError, DomainError, IncompatibleGridError,
                               MissingExactSolutionError)
from components.mesh import SchemeKind, graded_mesh, optimal_grading, uniform_grid
from components.problem_config import load_problem
from components.problems import get_problem
from components.solver import ProblemSpec, SolutionGrid, solve
from utils.helpers import format_rate, format_sci, get_logger, is_doubling

logger = get_logger("harness")

METRIC_EXACT = "exact"
METRIC_TWO_MESH = "two_mesh"


# ---------------------------------------------------------------------------
# 误差与收敛率
# ---------------------------------------------------------------------------

def max_nodal_error(grid: SolutionGrid, exact) -> float:
    """E^{M,N}：所有节点（含 t=0 与边界）上的最大误差"""
    if exact is None:
        raise MissingExactSolutionError(f"问题 {grid.problem} 没有精确解，请使用双网格方法")
    x = grid.spatial.x
    worst = 0.0
    for n, t in enumerate(grid.temporal.t):
        reference = np.broadcast_to(np.asarray(exact(x, t), dtype=float), x.shape)
        worst = max(worst, float(np.max(np.abs(reference - grid.values[:, n]))))
    return worst


def two_mesh_difference(coarse: SolutionGrid, fine: SolutionGrid) -> float:
    """D^{M,N} = max |u^n_m - z^{2n}_{2m}|"""
    if fine.spatial.M != 2 * coarse.spatial.M or fine.spatial.l != coarse.spatial.l:
        raise IncompatibleGridError(
            f"空间网格不嵌套: M={coarse.spatial.M}, 2M={fine.spatial.M}")
    if not coarse.temporal.nests_in(fine.temporal):
        raise IncompatibleGridError(
            f"时间网格不嵌套: N={coarse.temporal.N}, 2N={fine.temporal.N}")
    if coarse.alpha != fine.alpha or coarse.kind is not fine.kind:
        raise IncompatibleGridError("两个网格的 α 或离散格式不同")
    return float(np.max(np.abs(coarse.values - fine.values[::2, ::2])))


def observed_rates(errors: Sequence[float], sizes: Optional[Sequence[int]] = None,
                   floor: float = HARNESS_CONFIG["rate_floor"]) -> List[Optional[float]]:
    """
    log₂(E_i / E_{i+1})

    两个误差都低于 floor 时该位置返回 None（精确）
    """
    errors = [float(e) for e in errors]
    if len(errors) < 2:
        raise ConfigError(f"计算收敛率至少需要 2 个误差，实际为 {len(errors)}")
    if sizes is not None and (len(sizes) != len(errors) or not is_doubling(list(sizes))):
        raise ConfigError(f"网格序列必须逐次加倍: {list(sizes)}")

    rates: List[Optional[float]] = []
    for coarse, fine in zip(errors, errors[1:]):
        if coarse < floor and fine < floor:
            rates.append(None)
            continue
        rates.append(math.log2(max(coarse, floor) / max(fine, floor)))
    return rates


def growth_rate(error_T10: float, error_T1: float) -> float:
    """log₁₀(E_{T=10} / E_{T=1})"""
    if not (error_T10 > 0.0 and error_T1 > 0.0):
        raise DomainError(f"增长率要求两个误差都为正: {error_T10}, {error_T1}")
    return math.log10(error_T10 / error_T1)


def theoretical_order(alpha: float, r: float, kind, smooth: bool = False) -> float:
    """
    理论收敛阶：拟合格式 min{2-α, 2rα}，L1 格式 min{2-α, rα}

    解在闭区域上光滑时两种格式均为 2-α
    """
    if not 0.0 < alpha < 1.0 or r < 1.0:
        raise DomainError(f"参数超出范围: α={alpha}, r={r}")
    if smooth:
        return 2.0 - alpha
    if SchemeKind.parse(kind) is SchemeKind.FITTED:
        return min(2.0 - alpha, 2.0 * r * alpha)
    return min(2.0 - alpha, r * alpha)


def theoretical_growth(alpha: float, r: float, kind) -> Optional[float]:
    """
    误差界关于 T 的增长指数（仅拟合格式）

    α < 2/3 且 r 取到最优分级时为 2-α，其余情形为 2α
    """
    if not 0.0 < alpha < 1.0 or r < 1.0:
        raise DomainError(f"参数超出范围: α={alpha}, r={r}")
    if SchemeKind.parse(kind) is not SchemeKind.FITTED:
        return None
    if alpha < 2.0 / 3.0 and r >= (2.0 - alpha) / (2.0 * alpha):
        return 2.0 - alpha
    return 2.0 * alpha


def resolve_grading(spec, alpha: float, kind) -> float:
    """把 "optimal" / "uniform" / 数字 转换为分级指数 r"""
    text = str(spec).strip().lower()
    if text == "optimal":
        return optimal_grading(alpha, kind)
    if text == "uniform":
        return 1.0
    try:
        r = float(text)
    except ValueError as e:
        raise ConfigError(f"无法识别的分级参数: '{spec}'") from e
    if r < 1.0:
        raise ConfigError(f"分级指数 r 必须 ≥ 1: {r}")
    return r


# ---------------------------------------------------------------------------
# 单元格计算
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellSpec:
    """表格中一个 (α, 格式, r, T, N, M) 单元格，可直接传给子进程"""
    example: Optional[str]
    alpha: float
    scheme: str
    r: float
    T: float
    N: int
    M: int
    metric: str = METRIC_EXACT
    problem_path: Optional[str] = None


@dataclass(frozen=True)
class CellResult:
    cell: CellSpec
    error: float
    seconds: float


def build_problem(example: Optional[str], alpha: float, T: float,
                  problem_path: Optional[str] = None) -> ProblemSpec:
    """按算例名或配置文件路径构造问题"""
    if problem_path:
        return replace(load_problem(problem_path), T=float(T), alpha=alpha)
    if example is None:
        raise ConfigError("必须指定 --example 或 --problem")
    return get_problem(example, alpha, T)


def solve_cell(problem: ProblemSpec, cell: CellSpec, refine: int = 1) -> SolutionGrid:
    temporal = graded_mesh(cell.T, refine * cell.N, cell.r)
    spatial = uniform_grid(problem.l, refine * cell.M)
    return solve(problem, spatial, temporal, cell.alpha, cell.scheme)


def evaluate_cell(cell: CellSpec) -> CellResult:
    """求解一个单元格并返回误差（或双网格差）"""
    start = time.perf_counter()
    problem = build_problem(cell.example, cell.alpha, cell.T, cell.problem_path)

    if cell.metric == METRIC_EXACT:
        grid = solve_cell(problem, cell)
        error = max_nodal_error(grid, problem.exact)
    elif cell.metric == METRIC_TWO_MESH:
        coarse = solve_cell(problem, cell)
        fine = solve_cell(problem, cell, refine=2)
        error = two_mesh_difference(coarse, fine)
    else:
        raise ConfigError(f"未知的误差类型: {cell.metric}")

    seconds = time.perf_counter() - start
    logger.info("📊 %s α=%.2f %s r=%.3g T=%g N=%d M=%d → %s (%.2fs)",
                problem.name, cell.alpha, cell.scheme, cell.r, cell.T,
                cell.N, cell.M, format_sci(error), seconds)
    return CellResult(cell=cell, error=error, seconds=seconds)


def run_cells(cells: Sequence[CellSpec], workers: int = 1) -> List[CellResult]:
    """计算一组单元格，结果按输入顺序返回"""
    cells = list(cells)
    if workers <= 1 or len(cells) <= 1:
        return [evaluate_cell(cell) for cell in cells]

    with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as executor:
        return list(executor.map(evaluate_cell, cells))


# ---------------------------------------------------------------------------
# 报告
# ---------------------------------------------------------------------------

@dataclass
class ConvergenceReport:
    """一组逐次加倍网格上的误差与收敛率"""
    kind: SchemeKind
    alpha: float
    r: float
    T: float
    metric: str
    toc: float
    sizes: List[Tuple[int, int]] = field(default_factory=list)
    errors: List[float] = field(default_factory=list)
    rates: List[Optional[float]] = field(default_factory=list)

    @property
    def problem_label(self) -> str:
        return "D^{M,N}" if self.metric == METRIC_TWO_MESH else "E^{M,N}"

    def rate_cells(self) -> List[str]:
        """与 sizes 对齐的收敛率字符串，最后一格为空"""
        cells = []
        for i in range(len(self.sizes)):
            if i >= len(self.rates):
                cells.append("")
            else:
                cells.append(format_rate(self.rates[i], flagged=self.rates[i] is None))
        return cells

    def to_frame(self) -> pd.DataFrame:
        rates = self.rate_cells()
        rows = []
        for (N, M), error, rate in zip(self.sizes, self.errors, rates):
            rows.append({
                'alpha': f"{self.alpha:g}",
                'scheme': self.kind.value,
                'r': f"{self.r:.4g}",
                'T': f"{self.T:g}",
                'N': N,
                'M': M,
                'error': format_sci(error),
                'rate': rate,
                'toc': f"{self.toc:.3g}",
            })
        return pd.DataFrame(rows, columns=CSV_COLUMNS)


@dataclass
class GrowthReport:
    """T=1 与 T=10 的误差比较"""
    kind: SchemeKind
    alpha: float
    r: float
    expected: Optional[float]
    sizes: List[Tuple[int, int]] = field(default_factory=list)
    errors_T1: List[float] = field(default_factory=list)
    errors_T10: List[float] = field(default_factory=list)
    growth: List[float] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for (N, M), e1, e10, g in zip(self.sizes, self.errors_T1, self.errors_T10, self.growth):
            rows.append({
                'alpha': f"{self.alpha:g}",
                'scheme': self.kind.value,
                'r': f"{self.r:.4g}",
                'N': N,
                'M': M,
                'error_T1': format_sci(e1),
                'error_T10': format_sci(e10),
                'growth': f"{g:.3f}",
                'expected': "" if self.expected is None else f"{self.expected:.3g}",
            })
        return pd.DataFrame(rows, columns=GROWTH_COLUMNS)


def _check_sizes(n_list: Sequence[int], m_list: Sequence[int]) -> None:
    if len(n_list) != len(m_list):
        raise ConfigError(f"N 与 M 列表长度不一致: {list(n_list)} / {list(m_list)}")
    if len(n_list) > 1 and not (is_doubling(list(n_list)) and is_doubling(list(m_list))):
        raise ConfigError(f"计算收敛率要求 N、M 逐次加倍: N={list(n_list)}, M={list(m_list)}")


def convergence_report(example: Optional[str], alpha: float, kind, r_spec,
                       n_list: Sequence[int], m_list: Sequence[int], T: float,
                       metric: str = METRIC_EXACT, workers: int = 1,
                       problem_path: Optional[str] = None) -> ConvergenceReport:
    """对一个 (α, 格式, T) 组合计算整行误差与收敛率"""
    kind = SchemeKind.parse(kind)
    _check_sizes(n_list, m_list)
    r = resolve_grading(r_spec, alpha, kind)
    smooth = build_problem(example, alpha, float(T), problem_path).smooth

    cells = [CellSpec(example=example, alpha=alpha, scheme=kind.value, r=r, T=float(T),
                      N=N, M=M, metric=metric, problem_path=problem_path)
             for N, M in zip(n_list, m_list)]
    results = run_cells(cells, workers)
    errors = [res.error for res in results]

    report = ConvergenceReport(kind=kind, alpha=alpha, r=r, T=float(T), metric=metric,
                               toc=theoretical_order(alpha, r, kind, smooth),
                               sizes=list(zip(n_list, m_list)), errors=errors)
    if len(errors) > 1:
        report.rates = observed_rates(errors, list(n_list))
    return report


def growth_report(example: Optional[str], alpha: float, kind, r_spec,
                  n_list: Sequence[int], m_list: Sequence[int],
                  times: Tuple[float, float] = HARNESS_CONFIG["growth_times"],
                  workers: int = 1, problem_path: Optional[str] = None) -> GrowthReport:
    """同一组 (N, M, r, α) 在两个终止时间上的误差增长率"""
    kind = SchemeKind.parse(kind)
    if len(n_list) != len(m_list):
        raise ConfigError(f"N 与 M 列表长度不一致: {list(n_list)} / {list(m_list)}")
    if len(times) != 2:
        raise ConfigError(f"增长率需要恰好两个终止时间: {list(times)}")
    r = resolve_grading(r_spec, alpha, kind)
    T1, T10 = float(times[0]), float(times[1])
    if not 0.0 < T1 < T10:
        raise ConfigError(f"增长率要求 0 < T1 < T2: {T1}, {T10}")

    cells = [CellSpec(example=example, alpha=alpha, scheme=kind.value, r=r, T=T,
                      N=N, M=M, problem_path=problem_path)
             for T in (T1, T10) for N, M in zip(n_list, m_list)]
    results = run_cells(cells, workers)
    half = len(n_list)
    errors_T1 = [res.error for res in results[:half]]
    errors_T10 = [res.error for res in results[half:]]

    # 按 log10(T10/T1) 归一化；T 取 (1, 10) 时除数为 1
    scale = math.log10(T10 / T1)
    growth = [growth_rate(e10, e1) / scale for e1, e10 in zip(errors_T1, errors_T10)]

    return GrowthReport(kind=kind, alpha=alpha, r=r,
                        expected=theoretical_growth(alpha, r, kind),
                        sizes=list(zip(n_list, m_list)), errors_T1=errors_T1,
                        errors_T10=errors_T10, growth=growth)
