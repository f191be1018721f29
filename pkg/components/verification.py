"""
小规模自检
M 矩阵、精确性、权重和、最大值原理、下界、网格嵌套
"""
import math
from typing import Dict, List, Sequence

import numpy as np
import pandas as pd

from config import HARNESS_CONFIG, VERIFY_COLUMNS
from components.caputo import barrier_check, build_weights
from components.harness import max_nodal_error
from components.mesh import SchemeKind, graded_mesh, optimal_grading, uniform_grid
from components.problems import example2, fitted_exactness_problem
from components.solver import solve, verify_m_matrix
from components.specfun import log_gamma
from utils.helpers import get_logger

logger = get_logger("verification")

WEIGHT_SUM_TOL = 1e-10
MAX_PRINCIPLE_TOL = 1e-12


def _row(check: str, alpha: float, kind: SchemeKind, N: int, passed: bool, detail: str) -> Dict:
    return {'check': check, 'alpha': f"{alpha:g}", 'scheme': kind.value, 'N': N,
            'passed': bool(passed), 'detail': detail}


def check_m_matrix(alpha: float, kind: SchemeKind) -> List[Dict]:
    rows = []
    for N, r in ((16, 1.0), (64, optimal_grading(alpha, kind))):
        temporal = graded_mesh(1.0, N, r)
        report = verify_m_matrix(uniform_grid(1.0, 16), temporal, alpha, kind,
                                 c=lambda x: np.zeros_like(x))
        rows.append(_row("m_matrix", alpha, kind, N, report.passed, report.message))
    return rows


def check_weight_sums(alpha: float, kind: SchemeKind, N: int = 32) -> Dict:
    """拟合格式对 t^α 精确，L1 格式对 t 精确"""
    mesh = graded_mesh(1.0, N, optimal_grading(alpha, kind))
    table = build_weights(mesh, alpha, kind)
    worst = 0.0
    for n in range(1, N + 1):
        row = table.row(n)
        if kind is SchemeKind.FITTED:
            total = float(np.dot(row, np.diff(mesh.t[:n + 1] ** alpha)))
            target = math.exp(log_gamma(1.0 + alpha))
        else:
            total = float(np.dot(row, mesh.tau[:n]))
            target = mesh.t[n] ** (1.0 - alpha) * math.exp(-log_gamma(2.0 - alpha))
        worst = max(worst, abs(total - target) / abs(target))
    return _row("weight_sum", alpha, kind, N, worst <= WEIGHT_SUM_TOL, f"最大相对偏差 {worst:.2e}")


def check_exactness(alpha: float, N: int = 8, M: int = 4) -> Dict:
    kind = SchemeKind.FITTED
    problem = fitted_exactness_problem(alpha)
    temporal = graded_mesh(problem.T, N, optimal_grading(alpha, kind))
    grid = solve(problem, uniform_grid(problem.l, M), temporal, alpha, kind)
    error = max_nodal_error(grid, problem.exact)
    tol = HARNESS_CONFIG["exactness_tol"]
    return _row("exactness", alpha, kind, N, error <= tol, f"最大误差 {error:.2e}")


def check_max_principle(alpha: float, kind: SchemeKind, N: int = 16, M: int = 16) -> Dict:
    """f ≥ 0、φ ≥ 0 时数值解非负"""
    problem = example2()
    temporal = graded_mesh(problem.T, N, optimal_grading(alpha, kind))
    grid = solve(problem, uniform_grid(problem.l, M), temporal, alpha, kind)
    low = float(grid.values.min())
    bound = -MAX_PRINCIPLE_TOL * float(np.abs(grid.values).max())
    return _row("max_principle", alpha, kind, N, low >= bound, f"最小值 {low:.3e}")


def check_barrier(alpha: float, N: int = 32) -> Dict:
    kind = SchemeKind.FITTED
    mesh = graded_mesh(1.0, N, optimal_grading(alpha, kind))
    table = build_weights(mesh, alpha, kind)
    t = mesh.t
    functions = (t, t ** alpha, t * t, -np.expm1(-t / t[1]))
    reports = [barrier_check(table, values) for values in functions]
    worst = min(report.worst_margin for report in reports)
    return _row("barrier", alpha, kind, N, all(r.passed for r in reports), f"最小余量 {worst:.3e}")


def check_nesting(alpha: float, kind: SchemeKind, N: int = 64) -> Dict:
    mesh = graded_mesh(1.0, N, optimal_grading(alpha, kind))
    passed = mesh.nests_in(mesh.refine())
    return _row("mesh_nesting", alpha, kind, N, passed, f"r={mesh.r:.4g}")


def run_verification(alphas: Sequence[float], kinds: Sequence[SchemeKind]) -> pd.DataFrame:
    """运行全部自检，返回结果表"""
    rows: List[Dict] = []
    for alpha in alphas:
        for kind in kinds:
            rows.extend(check_m_matrix(alpha, kind))
            rows.append(check_weight_sums(alpha, kind))
            rows.append(check_max_principle(alpha, kind))
            rows.append(check_nesting(alpha, kind))
        if SchemeKind.FITTED in kinds:
            rows.append(check_exactness(alpha))
            rows.append(check_barrier(alpha))

    frame = pd.DataFrame(rows, columns=VERIFY_COLUMNS)
    failed = int((~frame['passed']).sum())
    if failed:
        logger.warning("❌ %d 项自检未通过", failed)
    else:
        logger.info("✅ 全部 %d 项自检通过", len(frame))
    return frame
