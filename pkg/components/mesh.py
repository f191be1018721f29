"""
网格模块
时间方向的分级网格 t_n = T(n/N)^r 与空间方向的均匀网格
"""
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from config import SOLVER_CONFIG
from components.errors import DomainError


class SchemeKind(Enum):
    """Caputo 导数离散格式"""
    FITTED = "fitted"
    L1 = "l1"

    @classmethod
    def parse(cls, text) -> "SchemeKind":
        """从命令行字符串解析格式"""
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        for kind in cls:
            if kind.value == key:
                return kind
        raise DomainError(f"未知的离散格式: '{text}'（可选 fitted / l1）")


@dataclass(frozen=True, eq=False)
class GradedTemporalMesh:
    """分级时间网格"""
    T: float
    N: int
    r: float
    t: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)

    def refine(self) -> "GradedTemporalMesh":
        """返回 2N 的加密网格（同一 T 与 r）"""
        return graded_mesh(self.T, 2 * self.N, self.r)

    def nests_in(self, fine: "GradedTemporalMesh") -> bool:
        """检查本网格的所有节点是否逐位出现在 fine 的偶数下标处"""
        if fine.N != 2 * self.N or fine.T != self.T or fine.r != self.r:
            return False
        return bool(np.array_equal(fine.t[::2], self.t))


@dataclass(frozen=True, eq=False)
class UniformSpatialGrid:
    """均匀空间网格"""
    l: float
    M: int
    h: float
    x: np.ndarray = field(repr=False)

    def refine(self) -> "UniformSpatialGrid":
        return uniform_grid(self.l, 2 * self.M)


def graded_mesh(T: float, N: int, r: float) -> GradedTemporalMesh:
    """构造分级网格 t_n = T(n/N)^r"""
    T = float(T)
    r = float(r)
    if not (T > 0.0 and math.isfinite(T)):
        raise DomainError(f"终止时间 T 必须为正: {T}")
    if int(N) != N or N < SOLVER_CONFIG["min_time_intervals"]:
        raise DomainError(f"时间区间数 N 必须为正整数: {N}")
    if not (r >= 1.0 and math.isfinite(r)):
        raise DomainError(f"分级指数 r 必须 ≥ 1: {r}")
    N = int(N)

    # 先算 n/N，再取幂，最后乘 T；逐点用 math.pow 保证加密网格逐位嵌套
    nodes = [T * math.pow(n / N, r) for n in range(N)]
    nodes.append(T)
    t = np.array(nodes, dtype=float)
    tau = np.diff(t)

    if np.any(tau <= 0.0):
        raise DomainError(f"网格步长出现非正值 (T={T}, N={N}, r={r})")

    t.setflags(write=False)
    tau.setflags(write=False)
    return GradedTemporalMesh(T=T, N=N, r=r, t=t, tau=tau)


def uniform_grid(l: float, M: int) -> UniformSpatialGrid:
    """构造均匀空间网格 x_m = m h"""
    l = float(l)
    if not (l > 0.0 and math.isfinite(l)):
        raise DomainError(f"区间长度 l 必须为正: {l}")
    if int(M) != M or M < SOLVER_CONFIG["min_space_intervals"]:
        raise DomainError(f"空间区间数 M 至少为 {SOLVER_CONFIG['min_space_intervals']}: {M}")
    M = int(M)

    h = l / M
    x = np.arange(M + 1, dtype=float) * h
    x[-1] = l
    x.setflags(write=False)
    return UniformSpatialGrid(l=l, M=M, h=h, x=x)


def optimal_grading(alpha: float, scheme) -> float:
    """
    误差界意义下的最优分级指数

    fitted: max{1, (2-α)/(2α)}
    L1:     max{1, (2-α)/α}
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"分数阶 α 必须在 (0, 1) 内: {alpha}")
    kind = SchemeKind.parse(scheme)
    if kind is SchemeKind.FITTED:
        return max(1.0, (2.0 - alpha) / (2.0 * alpha))
    return max(1.0, (2.0 - alpha) / alpha)
