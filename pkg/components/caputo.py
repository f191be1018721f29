"""
Caputo 分数阶导数的离散权重
拟合格式（不完全 Beta 表示）与经典 L1 格式
"""
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from scipy import integrate, special

from components.errors import DomainError, IncompatibleGridError
from components.mesh import GradedTemporalMesh, SchemeKind
from components.specfun import SpecFunConfig, complete_beta, inc_beta_array, reciprocal_gamma
from utils.helpers import get_logger

logger = get_logger("caputo")

__all__ = [
    "SchemeKind",
    "CaputoWeightTable",
    "BarrierReport",
    "fitted_weights",
    "l1_weights",
    "build_weights",
    "apply",
    "nodal_weights",
    "caputo_derivative_quadrature",
    "barrier_check",
]


@dataclass(frozen=True, eq=False)
class CaputoWeightTable:
    """
    权重表 d[n][k]

    D^α_N u^n = Σ_{k=0}^{n-1} d[n][k] (u^{k+1} - u^k)，d[0] 为空
    """
    alpha: float
    mesh: GradedTemporalMesh
    kind: SchemeKind
    d: List[np.ndarray] = field(repr=False)
    beta_evaluations: int = 0

    @property
    def N(self) -> int:
        return self.mesh.N

    def row(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.mesh.N:
            raise DomainError(f"时间层 n 必须在 [1, {self.mesh.N}] 内: {n}")
        return self.d[n]

    def theta(self, n: int) -> np.ndarray:
        return nodal_weights(self, n)


@dataclass(frozen=True)
class BarrierReport:
    """下界检查结果"""
    passed: bool
    worst_level: int
    worst_margin: float


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"分数阶 α 必须在 (0, 1) 内: {alpha}")
    return alpha


def _fitted_denominators(mesh: GradedTemporalMesh, alpha: float) -> np.ndarray:
    """t_{k+1}^α - t_k^α，k = 0..N-1"""
    N = mesh.N
    denom = np.empty(N)
    denom[0] = mesh.t[1] ** alpha
    if N > 1:
        k = np.arange(1, N, dtype=float)
        # t_k / t_{k+1} = (k/(k+1))^r
        log_ratio = alpha * mesh.r * (np.log(k) - np.log(k + 1.0))
        denom[1:] = mesh.t[2:] ** alpha * -np.expm1(log_ratio)
    return denom


def fitted_weights(mesh: GradedTemporalMesh, alpha: float,
                   config: Optional[SpecFunConfig] = None) -> CaputoWeightTable:
    """拟合格式权重：不完全 Beta 差分除以 t_{k+1}^α - t_k^α"""
    alpha = _check_alpha(alpha)
    start = time.perf_counter()

    N = mesh.N
    a, b = alpha, 1.0 - alpha
    full = complete_beta(a, b)
    switch = (a + 1.0) / 3.0
    scale = alpha * reciprocal_gamma(1.0 - alpha)
    denom = _fitted_denominators(mesh, alpha)

    # 所有行的内部端点 (n, k)，1 ≤ k ≤ n-1，按行连续存放
    rows, cols = np.tril_indices(N + 1, -1)
    interior = cols >= 1
    n_idx = rows[interior].astype(float)
    k_idx = cols[interior].astype(float)

    # t_k / t_n = (k/n)^r
    log_ratio = mesh.r * (np.log(k_idx) - np.log(n_idx))
    z = np.exp(log_ratio)
    w = -np.expm1(log_ratio)

    is_lower = z < switch
    lower_vals = np.full(z.shape, np.nan)
    upper_vals = np.full(z.shape, np.nan)
    if is_lower.any():
        lower_vals[is_lower] = inc_beta_array(z[is_lower], a, b, config)
    if (~is_lower).any():
        upper_vals[~is_lower] = inc_beta_array(w[~is_lower], b, a, config)
    evaluations = int(z.size)

    d: List[np.ndarray] = [np.empty(0)]
    offset = 0
    for n in range(1, N + 1):
        count = n - 1
        # 端点 0..n：下半部分存 B(z)，上半部分存 B - B(z)
        lo = np.empty(n + 1)
        up = np.empty(n + 1)
        lo[0], up[0] = 0.0, np.nan
        lo[n], up[n] = np.nan, 0.0
        lo[1:n] = lower_vals[offset:offset + count]
        up[1:n] = upper_vals[offset:offset + count]
        mask = np.empty(n + 1, dtype=bool)
        mask[0], mask[n] = True, False
        mask[1:n] = is_lower[offset:offset + count]
        offset += count

        left_lower = mask[:-1]
        right_lower = mask[1:]
        diff = np.where(
            left_lower & right_lower,
            lo[1:] - lo[:-1],
            np.where(~left_lower & ~right_lower,
                     up[:-1] - up[1:],
                     (full - up[1:]) - lo[:-1]),
        )
        row = scale * diff / denom[:n]
        row.setflags(write=False)
        d.append(row)

    logger.debug("拟合权重 N=%d α=%.3f 完成：%d 次不完全 Beta 计算，用时 %.3fs",
                 N, alpha, evaluations, time.perf_counter() - start)
    return CaputoWeightTable(alpha=alpha, mesh=mesh, kind=SchemeKind.FITTED,
                             d=d, beta_evaluations=evaluations)


def l1_weights(mesh: GradedTemporalMesh, alpha: float) -> CaputoWeightTable:
    """L1 格式权重（逐段线性插值的精确积分）"""
    alpha = _check_alpha(alpha)
    beta = 1.0 - alpha
    rg = reciprocal_gamma(2.0 - alpha)
    t, tau = mesh.t, mesh.tau

    d: List[np.ndarray] = [np.empty(0)]
    for n in range(1, mesh.N + 1):
        row = np.empty(n)
        if n > 1:
            gap = t[n] - t[:n - 1]
            step = tau[:n - 1]
            # a^β - (a-τ)^β = a^β (1 - (1-τ/a)^β)
            row[:n - 1] = gap ** beta * -np.expm1(beta * np.log1p(-step / gap)) / step * rg
        row[n - 1] = tau[n - 1] ** (-alpha) * rg
        row.setflags(write=False)
        d.append(row)

    return CaputoWeightTable(alpha=alpha, mesh=mesh, kind=SchemeKind.L1, d=d)


def build_weights(mesh: GradedTemporalMesh, alpha: float, kind,
                  config: Optional[SpecFunConfig] = None) -> CaputoWeightTable:
    """按格式生成权重表"""
    kind = SchemeKind.parse(kind)
    if kind is SchemeKind.FITTED:
        return fitted_weights(mesh, alpha, config)
    return l1_weights(mesh, alpha)


def apply(table: CaputoWeightTable, history, n: int) -> float:
    """对某空间点的时间序列 u^0..u^n 作用离散算子"""
    history = np.asarray(history, dtype=float)
    if history.shape != (n + 1,):
        raise IncompatibleGridError(f"时间序列长度应为 {n + 1}，实际为 {history.shape}")
    return float(np.dot(table.row(n), np.diff(history)))


def nodal_weights(table: CaputoWeightTable, n: int) -> np.ndarray:
    """节点形式 D^α_N u^n = Σ_k Θ[k] u^k"""
    row = table.row(n)
    theta = np.empty(n + 1)
    theta[n] = row[n - 1]
    theta[1:n] = row[:n - 1] - row[1:n]
    theta[0] = -row[0]
    return theta


def caputo_derivative_quadrature(derivative: Callable[[float], float],
                                 t: float, alpha: float) -> float:
    """
    Caputo 导数的参考值 (1/Γ(1-α)) ∫_0^t u'(s) (t-s)^{-α} ds

    [0, t/2] 上用 s = (t/2) w^{1/α} 消去 u' 在 0 处 s^{α-1} 型奇性，
    [t/2, t] 上用 quad 的代数权 (t-s)^{-α}
    """
    alpha = _check_alpha(alpha)
    if t <= 0.0:
        raise DomainError(f"t 必须为正: {t}")
    half = 0.5 * t

    def near_origin(w):
        if w == 0.0:
            return 0.0
        s = half * w ** (1.0 / alpha)
        jacobian = half / alpha * w ** (1.0 / alpha - 1.0)
        return derivative(s) * (t - s) ** (-alpha) * jacobian

    head, _ = integrate.quad(near_origin, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    tail, _ = integrate.quad(derivative, half, t, weight="alg", wvar=(0.0, -alpha),
                             epsabs=1e-14, epsrel=1e-13, limit=200)
    return (head + tail) / special.gamma(1.0 - alpha)


def barrier_check(table: CaputoWeightTable, values, tol: float = 1e-10) -> BarrierReport:
    """
    检查 D^α_N b^n ≥ b^n / (Γ(1-α) t_n^α)

    b 为 b^0 = 0 的非减网格函数
    """
    values = np.asarray(values, dtype=float)
    N = table.mesh.N
    if values.shape != (N + 1,):
        raise IncompatibleGridError(f"网格函数长度应为 {N + 1}，实际为 {values.shape}")
    if values[0] != 0.0 or np.any(np.diff(values) < 0.0):
        raise DomainError("网格函数必须满足 b^0 = 0 且单调不减")

    rg = reciprocal_gamma(1.0 - table.alpha)
    worst_level, worst_margin = 0, math.inf
    for n in range(1, N + 1):
        lhs = apply(table, values[:n + 1], n)
        bound = values[n] * rg / table.mesh.t[n] ** table.alpha
        margin = lhs - bound
        if margin < worst_margin:
            worst_level, worst_margin = n, margin

    return BarrierReport(passed=worst_margin >= -tol, worst_level=worst_level,
                         worst_margin=worst_margin)
