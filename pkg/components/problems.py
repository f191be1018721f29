"""
数值算例
三个标准算例与用于验证拟合格式精确性的构造解
"""
import math
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np

from config import EXAMPLE_ALIASES
from components.errors import AccuracyLossError, ConfigError, DomainError
from components.solver import ProblemSpec
from components.specfun import log_gamma, mittag_leffler

SERIES_MAX_TERMS = 200
SERIES_REL_TOL = 1e-14


class ExampleId(Enum):
    EXAMPLE1 = "example1"
    EXAMPLE2 = "example2"
    EXAMPLE3 = "example3"
    FITTED_EXACTNESS = "fitted_exactness"

    @classmethod
    def parse(cls, text) -> "ExampleId":
        """接受 "1" / "example1" / "exact" 等写法"""
        if isinstance(text, cls):
            return text
        key = EXAMPLE_ALIASES.get(str(text).strip().lower())
        if key is None:
            raise ConfigError(f"未知的算例: '{text}'")
        return cls(key)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"分数阶 α 必须在 (0, 1) 内: {alpha}")
    return alpha


def example1_source_term(alpha: float, t: float) -> float:
    """
    C_α(t) = D_t^α cos(πt/3) = Σ_{k≥1} (-1)^k (π/3)^{2k} t^{2k-α} / Γ(2k+1-α)
    """
    alpha = _check_alpha(alpha)
    t = float(t)
    if t < 0.0:
        raise DomainError(f"t 必须非负: {t}")
    if t == 0.0:
        return 0.0

    log_w = math.log(math.pi / 3.0)
    log_t = math.log(t)
    terms = []
    for k in range(1, SERIES_MAX_TERMS + 1):
        log_mag = 2 * k * log_w + (2 * k - alpha) * log_t - log_gamma(2 * k + 1 - alpha)
        mag = math.exp(log_mag)
        terms.append(-mag if k % 2 else mag)
        # 越过峰值后才允许截断
        if 2 * k > t * math.pi / 3.0 and mag < SERIES_REL_TOL * abs(math.fsum(terms)):
            return math.fsum(terms)

    raise AccuracyLossError(f"C_α 级数在 {SERIES_MAX_TERMS} 项内未收敛 (α={alpha}, t={t})")


@lru_cache(maxsize=65536)
def _example1_time_factor(alpha: float, t: float) -> float:
    """0.5 [E_{α,1}(-t^α) + cos(πt/3)]"""
    return 0.5 * (mittag_leffler(alpha, 1.0, -(t ** alpha)) + math.cos(math.pi * t / 3.0))


def example1(alpha: float, T: float = 1.0) -> ProblemSpec:
    """算例 1：解在 t = 0 处具有典型的弱奇性"""
    alpha = _check_alpha(alpha)

    def source(x, t):
        return 0.5 * (example1_source_term(alpha, t) + math.cos(math.pi * t / 3.0)) * np.sin(x)

    def exact(x, t):
        return _example1_time_factor(alpha, float(t)) * np.sin(x)

    return ProblemSpec(
        name="example1",
        p=1.0,
        c=lambda x: np.zeros_like(x, dtype=float),
        f=source,
        phi=np.sin,
        l=math.pi,
        T=float(T),
        exact=exact,
        alpha=alpha,
    )


def example2(T: float = 1.0) -> ProblemSpec:
    """算例 2：变系数反应项，无精确解"""
    def source(x, t):
        return x * (math.pi - x) * (1.0 + t ** 4) + t ** 2

    return ProblemSpec(
        name="example2",
        p=1.0,
        c=lambda x: 1.0 + x,
        f=source,
        phi=np.sin,
        l=math.pi,
        T=float(T),
        exact=None,
    )


def example3(alpha: float, T: float = 1.0) -> ProblemSpec:
    """算例 3：u = (1+t³)(4x(1-x))² + 5t^{3+α}，c(x) = x²，非齐次边界，解光滑"""
    alpha = _check_alpha(alpha)
    g_cubic = 6.0 * math.exp(-log_gamma(4.0 - alpha))      # D^α t³ = 6 t^{3-α} / Γ(4-α)
    g_shift = math.exp(log_gamma(4.0 + alpha)) / 6.0       # D^α t^{3+α} = Γ(4+α)/6 · t³

    def exact(x, t):
        return (1.0 + t ** 3) * (4.0 * x * (1.0 - x)) ** 2 + 5.0 * t ** (3.0 + alpha)

    def source(x, t):
        bump = (4.0 * x * (1.0 - x)) ** 2
        caputo = g_cubic * t ** (3.0 - alpha) * bump + 5.0 * g_shift * t ** 3
        diffusion = -(1.0 + t ** 3) * 16.0 * (2.0 - 12.0 * x + 12.0 * x * x)
        return caputo + diffusion + x * x * exact(x, t)

    return ProblemSpec(
        name="example3",
        p=1.0,
        c=lambda x: x * x,
        f=source,
        phi=lambda x: (4.0 * x * (1.0 - x)) ** 2,
        l=1.0,
        T=float(T),
        exact=exact,
        alpha=alpha,
        # u(0,t) = u(1,t) = 5t^{3+α}
        boundary=exact,
        smooth=True,
    )


def fitted_exactness_problem(alpha: float, l: float = 1.0, T: float = 1.0) -> ProblemSpec:
    """u = x(l-x)(1+t^α)：拟合格式在时间上、中心差分在空间上都精确"""
    alpha = _check_alpha(alpha)
    gamma_1a = math.exp(log_gamma(1.0 + alpha))

    return ProblemSpec(
        name="fitted_exactness",
        p=1.0,
        c=lambda x: np.zeros_like(x, dtype=float),
        f=lambda x, t: gamma_1a * x * (l - x) + 2.0 * (1.0 + t ** alpha),
        phi=lambda x: x * (l - x),
        l=float(l),
        T=float(T),
        exact=lambda x, t: x * (l - x) * (1.0 + t ** alpha),
        alpha=alpha,
    )


def get_problem(example, alpha: float, T: Optional[float] = None) -> ProblemSpec:
    """按算例名称构造问题"""
    example_id = ExampleId.parse(example)
    T = 1.0 if T is None else float(T)

    if example_id is ExampleId.EXAMPLE1:
        return example1(alpha, T)
    if example_id is ExampleId.EXAMPLE2:
        return example2(T)
    if example_id is ExampleId.EXAMPLE3:
        return example3(alpha, T)
    return fitted_exactness_problem(alpha, T=T)
