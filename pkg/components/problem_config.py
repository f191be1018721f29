"""
用户自定义问题的配置文件解析

文件格式（INI）：

    [domain]
    l = 1.0
    T = 1.0
    smooth = no              # 可选，解在闭区域上光滑时取 yes

    [coefficients]
    p = 1.0
    c = 0, 0, 1              # c(x) = c0 + c1 x + c2 x² ...

    [initial]
    phi = 16 2 2             # a i j，表示 a·x^i·(l-x)^j，多项用 ';' 分隔

    [source]
    f = 1 1 1 0; 2 0 0 1     # a i j q，表示 a·x^i·(l-x)^j·t^q

    # 可选，格式同 [source]，在 x = 0 与 x = l 处取值；缺省为齐次边界
    [boundary]
    g = ...

    # 可选，格式同 [source]
    [exact]
    u = ...
"""
import configparser
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from components.errors import ConfigError, DomainError
from components.solver import ProblemSpec

# ';' 用作项分隔符，行内注释只认 '#'
_INLINE_COMMENTS = ("#",)


@dataclass(frozen=True)
class Polynomial:
    """c(x) = Σ c_i x^i"""
    coefficients: Tuple[float, ...]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        result = np.zeros_like(x)
        for coef in reversed(self.coefficients):
            result = result * x + coef
        return result


@dataclass(frozen=True)
class TermSum:
    """Σ a·x^i·(l-x)^j·t^q"""
    l: float
    terms: Tuple[Tuple[float, int, int, float], ...]

    def __call__(self, x, t: float = 0.0):
        x = np.asarray(x, dtype=float)
        result = np.zeros_like(x)
        for a, i, j, q in self.terms:
            result = result + a * x ** i * (self.l - x) ** j * float(t) ** q
        return result


@dataclass(frozen=True)
class SpaceTerms:
    """只依赖 x 的项（初值）"""
    inner: TermSum

    def __call__(self, x):
        return self.inner(x, 0.0)


def _parse_terms(text: str, width: int, where: str) -> Tuple[Tuple[float, ...], ...]:
    """解析 "a i j [q]; a i j [q]" 形式的项列表"""
    terms = []
    for chunk in str(text).split(';'):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split()
        if len(parts) != width:
            raise ConfigError(f"[{where}] 每项需要 {width} 个数，实际为 '{chunk}'")
        try:
            a = float(parts[0])
            i, j = int(parts[1]), int(parts[2])
            q = float(parts[3]) if width == 4 else 0.0
        except ValueError as e:
            raise ConfigError(f"[{where}] 无法解析 '{chunk}': {e}") from e
        if i < 0 or j < 0:
            raise ConfigError(f"[{where}] 指数 i, j 必须为非负整数: '{chunk}'")
        if q < 0.0:
            raise ConfigError(f"[{where}] 时间指数 q 必须 ≥ 0: '{chunk}'")
        terms.append((a, i, j, q))
    if not terms:
        raise ConfigError(f"[{where}] 至少需要一项")
    return tuple(terms)


def _get(parser: configparser.ConfigParser, section: str, key: str) -> str:
    if not parser.has_section(section):
        raise ConfigError(f"缺少配置段: [{section}]")
    if not parser.has_option(section, key):
        raise ConfigError(f"[{section}] 缺少字段: {key}")
    return parser.get(section, key)


def _get_float(parser: configparser.ConfigParser, section: str, key: str) -> float:
    raw = _get(parser, section, key)
    try:
        return float(raw)
    except ValueError as e:
        raise ConfigError(f"[{section}] {key} 不是数字: '{raw}'") from e


def parse_problem_text(text: str, name: str = "user_problem") -> ProblemSpec:
    """从配置文本构造 ProblemSpec"""
    parser = configparser.ConfigParser(inline_comment_prefixes=_INLINE_COMMENTS)
    # 保留字段大小写（T 与 t 区分）
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"配置文件格式错误: {e}") from e

    l = _get_float(parser, "domain", "l")
    T = _get_float(parser, "domain", "T")
    p = _get_float(parser, "coefficients", "p")
    if not l > 0.0 or not T > 0.0:
        raise ConfigError(f"[domain] l 与 T 必须为正: l={l}, T={T}")

    raw_c = _get(parser, "coefficients", "c")
    try:
        c_coef = tuple(float(item) for item in raw_c.split(',') if item.strip())
    except ValueError as e:
        raise ConfigError(f"[coefficients] c 不是数字列表: '{raw_c}'") from e
    if not c_coef:
        raise ConfigError("[coefficients] c 至少需要一个系数")

    phi_terms = _parse_terms(_get(parser, "initial", "phi"), 3, "initial")
    source_terms = _parse_terms(_get(parser, "source", "f"), 4, "source")

    exact: Optional[TermSum] = None
    if parser.has_section("exact"):
        exact = TermSum(l, _parse_terms(_get(parser, "exact", "u"), 4, "exact"))

    boundary: Optional[TermSum] = None
    if parser.has_section("boundary"):
        boundary = TermSum(l, _parse_terms(_get(parser, "boundary", "g"), 4, "boundary"))

    try:
        smooth = parser.getboolean("domain", "smooth", fallback=False)
    except ValueError as e:
        raise ConfigError(f"[domain] smooth 应为 yes / no: {e}") from e

    try:
        return ProblemSpec(
            name=name,
            p=p,
            c=Polynomial(c_coef),
            f=TermSum(l, source_terms),
            phi=SpaceTerms(TermSum(l, phi_terms)),
            l=l,
            T=T,
            exact=exact,
            boundary=boundary,
            smooth=smooth,
        )
    except DomainError as e:
        raise ConfigError(f"问题定义无效: {e}") from e


def load_problem(path) -> ProblemSpec:
    """读取问题配置文件"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"问题配置文件不存在: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"读取问题配置文件失败: {e}") from e
    return parse_problem_text(text, name=path.stem)
