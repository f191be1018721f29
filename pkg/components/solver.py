"""
时间推进求解器
每个时间层组装并求解三对角方程组：D^α_N - p δ²_x + c(x)
"""
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from config import SOLVER_CONFIG
from components.caputo import CaputoWeightTable, build_weights, nodal_weights
from components.errors import DomainError, IncompatibleGridError, NumericalFailure
from components.mesh import GradedTemporalMesh, SchemeKind, UniformSpatialGrid
from utils.helpers import get_logger

logger = get_logger("solver")

SpaceFunction = Callable[[np.ndarray], np.ndarray]
SpaceTimeFunction = Callable[[np.ndarray, float], np.ndarray]


def _as_array(values, x: np.ndarray) -> np.ndarray:
    """把标量或数组结果广播成与 x 同形的浮点数组"""
    return np.broadcast_to(np.asarray(values, dtype=float), x.shape).astype(float)


@dataclass(frozen=True)
class ProblemSpec:
    """
    问题定义：D_t^α u - p u_xx + c(x) u = f(x, t)，u(0,t) = g(0,t)，u(l,t) = g(l,t)，
    u(x,0) = φ(x)

    c、φ 接受 numpy 数组 x，f、exact、boundary 接受 (x 数组, t 标量)；
    boundary 缺省时为齐次边界。smooth 标记解在闭区域上光滑（影响理论收敛阶）
    """
    name: str
    p: float
    c: SpaceFunction
    f: SpaceTimeFunction
    phi: SpaceFunction
    l: float
    T: float = 1.0
    exact: Optional[SpaceTimeFunction] = None
    alpha: Optional[float] = None
    boundary: Optional[SpaceTimeFunction] = None
    smooth: bool = False

    def __post_init__(self):
        if not self.p > 0.0:
            raise DomainError(f"扩散系数 p 必须为正: {self.p}")
        if not self.l > 0.0:
            raise DomainError(f"区间长度 l 必须为正: {self.l}")

        tol = SOLVER_CONFIG["spatial_length_tol"]
        ends = _as_array(self.phi(np.array([0.0, self.l])), np.zeros(2))
        expected = self.boundary_values(0.0)
        if np.any(np.abs(ends - expected) > tol * np.maximum(1.0, np.abs(expected))):
            raise DomainError(f"初值与边界值在 t = 0 处不相容: φ = {ends.tolist()}, "
                              f"g = {expected.tolist()}")

        sample = np.linspace(0.0, self.l, 257)
        if np.any(_as_array(self.c(sample), sample) < 0.0):
            raise DomainError("反应系数 c(x) 在 [0, l] 上必须非负")

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def c_values(self, x: np.ndarray) -> np.ndarray:
        return _as_array(self.c(x), x)

    def f_values(self, x: np.ndarray, t: float) -> np.ndarray:
        return _as_array(self.f(x, t), x)

    def phi_values(self, x: np.ndarray) -> np.ndarray:
        return _as_array(self.phi(x), x)

    def exact_values(self, x: np.ndarray, t: float) -> np.ndarray:
        return _as_array(self.exact(x, t), x)

    def boundary_values(self, t: float) -> np.ndarray:
        """(g(0,t), g(l,t))"""
        ends = np.array([0.0, self.l])
        if self.boundary is None:
            return np.zeros(2)
        return _as_array(self.boundary(ends, t), ends)


@dataclass(frozen=True, eq=False)
class SolutionGrid:
    """数值解 values[m, n] = u^n_m"""
    values: np.ndarray = field(repr=False)
    spatial: UniformSpatialGrid
    temporal: GradedTemporalMesh
    alpha: float
    kind: SchemeKind
    problem: str
    history_flops: int = 0

    def at_time(self, n: int) -> np.ndarray:
        """第 n 个时间层的节点值"""
        if not 0 <= n <= self.temporal.N:
            raise DomainError(f"时间层 n 必须在 [0, {self.temporal.N}] 内: {n}")
        return self.values[:, n]


@dataclass(frozen=True)
class MatrixCheckReport:
    """M 矩阵检查结果"""
    passed: bool
    levels_checked: int
    first_violation: Optional[Tuple[int, int]] = None
    message: str = ""


def discrete_laplacian(row, h: float, p: float) -> np.ndarray:
    """-p δ²_x u，返回 M-1 个内部点"""
    row = np.asarray(row, dtype=float)
    if row.size < 3:
        raise DomainError(f"至少需要 3 个节点（M ≥ 2），实际为 {row.size}")
    return -p * (row[2:] - 2.0 * row[1:-1] + row[:-2]) / (h * h)


def thomas_solve(sub, diag, sup, rhs) -> np.ndarray:
    """
    追赶法求解三对角方程组

    sub[i] 为第 i+1 行的下对角元，sup[i] 为第 i 行的上对角元；不选主元，
    主元非正时抛出 NumericalFailure
    """
    diag = np.asarray(diag, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = diag.size
    if rhs.size != n or len(sub) != n - 1 or len(sup) != n - 1:
        raise IncompatibleGridError("三对角方程组各对角线长度不一致")

    pivot = np.empty(n)
    y = np.empty(n)

    pivot[0] = diag[0]
    if not pivot[0] > 0.0:
        raise NumericalFailure(f"追赶法第 0 行主元非正: {pivot[0]}")
    y[0] = rhs[0]
    for i in range(1, n):
        factor = sub[i - 1] / pivot[i - 1]
        pivot[i] = diag[i] - factor * sup[i - 1]
        if not pivot[i] > 0.0:
            raise NumericalFailure(f"追赶法第 {i} 行主元非正: {pivot[i]}")
        y[i] = rhs[i] - factor * y[i - 1]

    x = np.empty(n)
    x[n - 1] = y[n - 1] / pivot[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (y[i] - sup[i] * x[i + 1]) / pivot[i]
    return x


def _history_sum(theta: np.ndarray, U: np.ndarray, n: int) -> np.ndarray:
    """Σ_{k<n} Θ_nk u^k，按 k 升序累加"""
    hist = np.zeros(U.shape[1] - 2)
    for k in range(n):
        hist += theta[k] * U[k, 1:-1]
    return hist


def solve(problem: ProblemSpec, spatial: UniformSpatialGrid, temporal: GradedTemporalMesh,
          alpha: float, kind, table: Optional[CaputoWeightTable] = None) -> SolutionGrid:
    """逐层求解离散问题，返回完整的 (M+1)×(N+1) 网格"""
    kind = SchemeKind.parse(kind)
    if abs(spatial.l - problem.l) > SOLVER_CONFIG["spatial_length_tol"] * max(1.0, problem.l):
        raise IncompatibleGridError(f"空间网格长度 {spatial.l} 与问题区间 {problem.l} 不一致")
    if table is None:
        table = build_weights(temporal, alpha, kind)
    elif table.mesh is not temporal or table.kind is not kind:
        raise IncompatibleGridError("权重表与时间网格或格式不匹配")

    start = time.perf_counter()
    M, N = spatial.M, temporal.N
    x = spatial.x
    interior = x[1:-1]
    coef = problem.p / (spatial.h * spatial.h)
    c_vals = problem.c_values(interior)
    off = np.full(M - 2, -coef)

    # 按时间层存储，最后转置为 values[m, n]
    U = np.zeros((N + 1, M + 1))
    U[0] = problem.phi_values(x)
    flops = 0

    for n in range(1, N + 1):
        theta = nodal_weights(table, n)
        hist = _history_sum(theta, U, n)
        flops += n * (M - 1)
        left, right = problem.boundary_values(temporal.t[n])
        U[n, 0], U[n, M] = left, right
        rhs = problem.f_values(interior, temporal.t[n]) - hist
        # 边界值移到右端
        rhs[0] += coef * left
        rhs[-1] += coef * right
        diag = theta[n] + 2.0 * coef + c_vals
        U[n, 1:-1] = thomas_solve(off, diag, off, rhs)

    values = np.ascontiguousarray(U.T)
    values.setflags(write=False)
    logger.debug("%s: %s 格式 α=%.3f N=%d M=%d 求解完成，用时 %.3fs",
                 problem.name, kind.value, alpha, N, M, time.perf_counter() - start)
    return SolutionGrid(values=values, spatial=spatial, temporal=temporal, alpha=float(alpha),
                        kind=kind, problem=problem.name, history_flops=flops)


def scheme_residuals(problem: ProblemSpec, grid: SolutionGrid,
                     table: CaputoWeightTable) -> np.ndarray:
    """
    重新计算每个时间层方程组的相对残差

    返回长度 N 的数组，第 n-1 个元素为该层 max_m |残差| / 行尺度
    """
    U = grid.values.T
    interior = grid.spatial.x[1:-1]
    coef = problem.p / (grid.spatial.h * grid.spatial.h)
    c_vals = problem.c_values(interior)
    result = np.empty(grid.temporal.N)

    for n in range(1, grid.temporal.N + 1):
        theta = nodal_weights(table, n)
        u = U[n]
        f = problem.f_values(interior, grid.temporal.t[n])
        hist = _history_sum(theta, U, n)
        abs_hist = np.abs(theta[:n]) @ np.abs(U[:n, 1:-1])
        lhs = (theta[n] + 2.0 * coef + c_vals) * u[1:-1] - coef * (u[2:] + u[:-2])
        residual = lhs - (f - hist)
        scale = (np.abs(theta[n] + 2.0 * coef + c_vals) * np.abs(u[1:-1])
                 + coef * (np.abs(u[2:]) + np.abs(u[:-2])) + np.abs(f) + abs_hist)
        scale = np.where(scale > 0.0, scale, 1.0)
        result[n - 1] = float(np.max(np.abs(residual) / scale))
    return result


def verify_m_matrix(spatial: UniformSpatialGrid, temporal: GradedTemporalMesh, alpha: float,
                    kind, c: SpaceFunction, table: Optional[CaputoWeightTable] = None,
                    p: float = 1.0) -> MatrixCheckReport:
    """检查每一层 Θ_nn > 0、Θ_nk < 0 以及三对角矩阵的对角占优"""
    kind = SchemeKind.parse(kind)
    if table is None:
        table = build_weights(temporal, alpha, kind)

    interior = spatial.x[1:-1]
    coef = p / (spatial.h * spatial.h)
    c_vals = _as_array(c(interior), interior)

    for n in range(1, temporal.N + 1):
        theta = nodal_weights(table, n)
        if not theta[n] > 0.0:
            return MatrixCheckReport(False, n, (n, n), f"Θ[{n},{n}] = {theta[n]:.3e} 非正")
        bad = np.flatnonzero(~(theta[:n] < 0.0))
        if bad.size:
            k = int(bad[0])
            return MatrixCheckReport(False, n, (n, k), f"Θ[{n},{k}] = {theta[k]:.3e} 非负")
        # 内部行：|diag| > |sub| + |sup|
        margin = theta[n] + 2.0 * coef + c_vals - 2.0 * coef
        weak = np.flatnonzero(~(margin > 0.0))
        if weak.size:
            m = int(weak[0]) + 1
            return MatrixCheckReport(False, n, (n, -m), f"第 {n} 层第 {m} 行不满足对角占优")

    return MatrixCheckReport(True, temporal.N, None, "✅ 所有时间层均为 M 矩阵")
