"""
特殊函数模块
对数 Gamma、不完全 Beta 函数、负实轴上的广义 Mittag-Leffler 函数
"""
import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

from config import SPECFUN_CONFIG
from components.errors import AccuracyLossError, DomainError

_EPS = float(np.finfo(float).eps)
_FPMIN = 1e-300
_LOG_PI = math.log(math.pi)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Lanczos 近似 (g = 7, 9 项)
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


@dataclass(frozen=True)
class SpecFunConfig:
    """特殊函数迭代参数"""
    rel_tol: float = SPECFUN_CONFIG["rel_tol"]
    max_terms: int = SPECFUN_CONFIG["max_terms"]
    ml_crossover: float = SPECFUN_CONFIG["ml_crossover"]
    ml_rel_tol: float = SPECFUN_CONFIG["ml_rel_tol"]

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1e-6:
            raise DomainError(f"rel_tol 必须在 (0, 1e-6) 内: {self.rel_tol}")
        if self.max_terms < 50:
            raise DomainError(f"max_terms 至少为 50: {self.max_terms}")
        if not self.ml_crossover > 0.0:
            raise DomainError(f"ml_crossover 必须为正: {self.ml_crossover}")
        if not 0.0 < self.ml_rel_tol < 1e-6:
            raise DomainError(f"ml_rel_tol 必须在 (0, 1e-6) 内: {self.ml_rel_tol}")


DEFAULT_CONFIG = SpecFunConfig()


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

def log_gamma(x: float) -> float:
    """ln Γ(x)，x > 0"""
    x = float(x)
    if not (x > 0.0 and math.isfinite(x)):
        raise DomainError(f"log_gamma 要求 x > 0，收到 {x}")

    if x < 0.5:
        # 反射公式 Γ(x)Γ(1-x) = π / sin(πx)
        return _LOG_PI - math.log(math.sin(math.pi * x)) - log_gamma(1.0 - x)

    y = x - 1.0
    series = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        series += _LANCZOS_COEF[i] / (y + i)
    t = y + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (y + 0.5) * math.log(t) - t + math.log(series)


def _sinpi(y: float) -> float:
    """sin(πy)，整数点返回精确的 0"""
    r = math.fmod(y, 2.0)
    if r == math.floor(r):
        return 0.0
    return math.sin(math.pi * r)


def _log_abs_rgamma(y: float) -> Tuple[float, float]:
    """返回 (ln|1/Γ(y)|, 符号)；极点处符号为 0"""
    if y > 0.0:
        return -log_gamma(y), 1.0
    s = _sinpi(y)
    if s == 0.0:
        return -math.inf, 0.0
    # 1/Γ(y) = sin(πy) Γ(1-y) / π
    return log_gamma(1.0 - y) + math.log(abs(s)) - _LOG_PI, math.copysign(1.0, s)


def reciprocal_gamma(x: float) -> float:
    """1/Γ(x)，对任意实数 x 有定义（非正整数处为 0）"""
    log_r, sign = _log_abs_rgamma(float(x))
    if sign == 0.0:
        return 0.0
    return sign * math.exp(log_r)


def complete_beta(gamma_: float, delta: float) -> float:
    """完全 Beta 函数 B(γ, δ)"""
    if gamma_ <= 0.0 or delta <= 0.0:
        raise DomainError(f"Beta 参数必须为正: γ={gamma_}, δ={delta}")
    return math.exp(log_gamma(gamma_) + log_gamma(delta) - log_gamma(gamma_ + delta))


# ---------------------------------------------------------------------------
# 不完全 Beta
# ---------------------------------------------------------------------------

def _beta_cf(a: float, b: float, x: np.ndarray, config: SpecFunConfig) -> np.ndarray:
    """修正 Lentz 迭代计算不完全 Beta 的连分式（向量化）"""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0

    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)

    for m in range(1, config.max_terms + 1):
        m2 = 2 * m

        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        h = np.where(active, h * d * c, h)

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)

        active &= np.abs(delta - 1.0) >= config.rel_tol
        if not active.any():
            return h

    raise AccuracyLossError(
        f"不完全 Beta 连分式在 {config.max_terms} 次迭代内未收敛 (a={a}, b={b})"
    )


def inc_beta_array(z, gamma_: float, delta: float,
                   config: Optional[SpecFunConfig] = None) -> np.ndarray:
    """非正则化不完全 Beta 函数 B(z; γ, δ)，z 为数组"""
    config = config or DEFAULT_CONFIG
    if gamma_ <= 0.0 or delta <= 0.0:
        raise DomainError(f"Beta 参数必须为正: γ={gamma_}, δ={delta}")

    z = np.asarray(z, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(z < 0.0) or np.any(z > 1.0):
        raise DomainError("不完全 Beta 的自变量必须在 [0, 1] 内")

    full = complete_beta(gamma_, delta)
    out = np.zeros_like(z)
    out[z == 1.0] = full

    switch = (gamma_ + 1.0) / (gamma_ + delta + 2.0)
    lower = (z > 0.0) & (z < switch)
    upper = (z >= switch) & (z < 1.0)

    if lower.any():
        x = z[lower]
        front = np.exp(gamma_ * np.log(x) + delta * np.log1p(-x))
        out[lower] = front * _beta_cf(gamma_, delta, x, config) / gamma_

    if upper.any():
        x = z[upper]
        w = 1.0 - x
        front = np.exp(delta * np.log(w) + gamma_ * np.log(x))
        out[upper] = full - front * _beta_cf(delta, gamma_, w, config) / delta

    return out


def inc_beta(z: float, gamma_: float, delta: float,
             config: Optional[SpecFunConfig] = None) -> float:
    """非正则化不完全 Beta 函数 B(z; γ, δ) = ∫_0^z s^(γ-1) (1-s)^(δ-1) ds"""
    z = float(z)
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"不完全 Beta 的自变量必须在 [0, 1] 内: {z}")
    if z == 0.0:
        if gamma_ <= 0.0 or delta <= 0.0:
            raise DomainError(f"Beta 参数必须为正: γ={gamma_}, δ={delta}")
        return 0.0
    if z == 1.0:
        return complete_beta(gamma_, delta)
    return float(inc_beta_array(np.array([z]), gamma_, delta, config)[0])


# ---------------------------------------------------------------------------
# Mittag-Leffler
# ---------------------------------------------------------------------------

def _ml_series(gamma_: float, delta: float, x: float,
               config: SpecFunConfig) -> Optional[Tuple[float, float]]:
    """Taylor 级数 Σ (-x)^k / Γ(γk+δ)，返回 (值, 误差估计)"""
    scale = x ** (1.0 / gamma_)
    if scale > 700.0 or scale / gamma_ > config.max_terms:
        return None

    log_x = math.log(x)
    peak = scale / gamma_ + 2.0
    terms = []
    error = 0.0

    for k in range(config.max_terms):
        log_r, sign = _log_abs_rgamma(gamma_ * k + delta)
        if sign == 0.0:
            terms.append(0.0)
            continue

        log_mag = k * log_x + log_r
        if log_mag > 700.0:
            return None
        mag = math.exp(log_mag)
        terms.append(sign * mag if k % 2 == 0 else -sign * mag)
        # 每一项的舍入误差随指数参数放大
        error += mag * _EPS * (2.0 + abs(k * log_x) + abs(log_r))

        if k > peak and mag <= 0.1 * _EPS * abs(math.fsum(terms)):
            value = math.fsum(terms)
            return value, error
        if k > peak and mag < 1e-300:
            return math.fsum(terms), error

    return None


def _ml_asymptotic(gamma_: float, delta: float, x: float,
                   config: SpecFunConfig) -> Optional[Tuple[float, float]]:
    """大 |z| 渐近展开 -Σ z^(-k) / Γ(δ-γk)，按最小项截断"""
    log_x = math.log(x)
    terms = []
    abs_sum = 0.0
    previous_envelope = math.inf
    tail = None

    for k in range(1, config.max_terms + 1):
        y = delta - gamma_ * k
        envelope = -k * log_x + (-log_gamma(y) if y > 0.0 else log_gamma(1.0 - y) - _LOG_PI)

        log_r, sign = _log_abs_rgamma(y)
        term = 0.0
        if sign != 0.0:
            mag = math.exp(-k * log_x + log_r)
            # -z^(-k) = -(-1)^k x^(-k)
            term = -sign * mag if k % 2 == 0 else sign * mag

        if envelope > previous_envelope and k > 1:
            # 下一项 y 值对应的真实项，零项（极点）不计入截断误差
            log_r_next, sign_next = _log_abs_rgamma(delta - gamma_ * (k + 1))
            next_mag = 0.0 if sign_next == 0.0 else math.exp(-(k + 1) * log_x + log_r_next)
            tail = max(abs(term), next_mag)
            break

        terms.append(term)
        abs_sum += abs(term)
        previous_envelope = envelope

        # 包络仍在下降但已可忽略
        if k > 1 and envelope < math.log(0.1 * _EPS) + math.log(abs(sum(terms)) + _FPMIN):
            tail = math.exp(envelope)
            break

    if tail is None:
        return None

    value = math.fsum(terms)
    error = tail + 4.0 * _EPS * abs_sum

    if gamma_ > 1.0:
        # 两个共轭极点的贡献
        zeta = x ** (1.0 / gamma_) * cmath.exp(1j * math.pi / gamma_)
        pole = (2.0 / gamma_) * (zeta ** (1.0 - delta) * cmath.exp(zeta)).real
        value += pole
        error += 4.0 * _EPS * abs(pole)
    elif gamma_ == 1.0:
        if delta != math.floor(delta):
            return None
        pole = (-x) ** int(1.0 - delta) * math.exp(-x)
        value += pole
        error += 4.0 * _EPS * abs(pole)

    return value, error


def _ml_kummer(gamma_: float, delta: float, x: float,
               config: SpecFunConfig) -> Optional[Tuple[float, float]]:
    """
    γ = 1：E_{1,δ}(-x) = e^{-x} ₁F₁(δ-1; δ; x) / Γ(δ)

    ₁F₁(δ-1; δ; x) = 1 + (δ-1) Σ_{k≥1} x^k / (k! (k+δ-1))，求和各项同号
    """
    if gamma_ != 1.0 or not delta > 0.0 or x > 700.0:
        return None

    log_x = math.log(x)
    terms = []
    error = 0.0
    for k in range(1, config.max_terms + 1):
        log_fact = log_gamma(k + 1.0)
        log_mag = k * log_x - log_fact - math.log(k + delta - 1.0)
        mag = math.exp(log_mag)
        terms.append(mag)
        error += mag * _EPS * (2.0 + k * abs(log_x) + log_fact)
        if k > x and mag <= 0.1 * _EPS * math.fsum(terms):
            break
    else:
        return None

    total = math.fsum(terms)
    factor = math.exp(-x) * reciprocal_gamma(delta)
    bracket = 1.0 + (delta - 1.0) * total
    value = factor * bracket
    error = abs(factor) * (abs(delta - 1.0) * (error + _EPS * total) + 4.0 * _EPS * abs(bracket))
    return value, error + 4.0 * _EPS * abs(value)


def _ml_integral(gamma_: float, delta: float, x: float,
                 config: SpecFunConfig) -> Optional[Tuple[float, float]]:
    """
    负实轴上的实积分表示（0 < γ < 2，γ ≠ 1）

    γ > 1 时 Hankel 围道收缩到割线后还留下 t^γ = z 的两个共轭极点的留数
    """
    if not 0.0 < gamma_ < 2.0 or gamma_ == 1.0:
        return None

    if delta >= 1.0 + gamma_:
        # E(γ,δ,z) = (E(γ,δ-γ,z) - 1/Γ(δ-γ)) / z
        inner = _ml_integral(gamma_, delta - gamma_, x, config)
        if inner is None:
            return None
        value, error = inner
        rg = reciprocal_gamma(delta - gamma_)
        return (value - rg) / (-x), (error + _EPS * abs(rg)) / x

    power = (1.0 - delta) / gamma_
    sin_a = _sinpi(1.0 - delta)
    sin_b = _sinpi(1.0 - delta + gamma_)
    cos_g = math.cos(math.pi * gamma_)
    norm = 1.0 / (gamma_ * math.pi)

    def kernel(chi):
        if chi == 0.0:
            return 0.0 if power > 0.0 else (norm * x * sin_b / x ** 2 if power == 0.0 else 0.0)
        numerator = chi * sin_a + x * sin_b
        denominator = chi * chi + 2.0 * chi * x * cos_g + x * x
        return norm * chi ** power * math.exp(-chi ** (1.0 / gamma_)) * numerator / denominator

    upper = 750.0 ** gamma_
    # 分母的近零点 χ ≈ x 与指数衰减的几个尺度
    points = sorted({p for p in [x] + [s ** gamma_ for s in (5.0, 10.0, 20.0, 40.0)]
                     if 0.0 < p < upper})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, abserr = integrate.quad(kernel, 0.0, upper, points=points,
                                       epsabs=0.0, epsrel=1e-13, limit=500)
    error = abserr + 8.0 * _EPS * abs(value)

    if gamma_ > 1.0:
        zeta = x ** (1.0 / gamma_) * cmath.exp(1j * math.pi / gamma_)
        pole = (2.0 / gamma_) * (zeta ** (1.0 - delta) * cmath.exp(zeta)).real
        value += pole
        error += 4.0 * _EPS * abs(pole)
    return value, error


def mittag_leffler(gamma_: float, delta: float, z: float,
                   config: Optional[SpecFunConfig] = None) -> float:
    """
    广义 Mittag-Leffler 函数 E_{γ,δ}(z) = Σ z^k / Γ(γk+δ)，z ≤ 0

    依次尝试级数、渐近展开、积分表示（γ = 1 时为 Kummer 变换），
    取第一个误差估计满足 ml_rel_tol 的结果
    """
    config = config or DEFAULT_CONFIG
    if not 0.0 < gamma_ < 2.0:
        raise DomainError(f"Mittag-Leffler 要求 0 < γ < 2，收到 γ={gamma_}")
    z = float(z)
    if z > 0.0 or not math.isfinite(z):
        raise DomainError(f"Mittag-Leffler 只支持负实轴 z ≤ 0，收到 z={z}")

    if z == 0.0:
        return reciprocal_gamma(delta)

    x = -z
    if x <= config.ml_crossover:
        methods = (_ml_series, _ml_asymptotic, _ml_integral, _ml_kummer)
    else:
        methods = (_ml_asymptotic, _ml_series, _ml_integral, _ml_kummer)

    for method in methods:
        result = method(gamma_, delta, x, config)
        if result is None:
            continue
        value, error = result
        if math.isfinite(value) and error <= config.ml_rel_tol * abs(value):
            return value

    raise AccuracyLossError(
        f"无法在 {config.ml_rel_tol:.0e} 精度内计算 E_{{{gamma_},{delta}}}({z})"
    )
