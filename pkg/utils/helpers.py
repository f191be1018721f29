"""
通用工具函数：日志、数字格式化、列表解析
"""
import logging
import math
import sys
from typing import List, Optional

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def get_logger(name: str) -> logging.Logger:
    """获取模块日志器"""
    return logging.getLogger(f"fracsolver.{name}")


def setup_logging(verbose: bool = False) -> None:
    """配置根日志器（只在命令行入口调用一次）"""
    root = logging.getLogger("fracsolver")
    if root.handlers:
        root.setLevel(logging.DEBUG if verbose else logging.INFO)
        return

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt="%H:%M:%S"))
    root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    root.propagate = False


def format_sci(value: Optional[float]) -> str:
    """误差表格式：三位小数、指数不补零，例如 1.855E-2"""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    if value == 0.0:
        return "0.000E0"

    mantissa, exponent = f"{value:.3E}".split("E")
    return f"{mantissa}E{int(exponent)}"


def format_rate(rate: Optional[float], flagged: bool = False) -> str:
    """格式化收敛率（保留 3 位小数）"""
    if flagged:
        return "exact"
    if rate is None:
        return ""
    return f"{rate:.3f}"


def parse_float_list(text: str) -> List[float]:
    """解析逗号分隔的浮点数列表"""
    items = [item.strip() for item in str(text).split(',') if item.strip()]
    if not items:
        raise ValueError(f"空列表: '{text}'")
    return [float(item) for item in items]


def parse_int_list(text: str) -> List[int]:
    """
    解析整数列表

    支持两种写法：
      - "64,128,256"
      - "64..1024"  逐次加倍的区间
    """
    text = str(text).strip()
    if '..' in text:
        start_str, stop_str = text.split('..', 1)
        start, stop = int(start_str), int(stop_str)
        if start < 1 or stop < start:
            raise ValueError(f"区间格式错误: '{text}'")
        values = []
        current = start
        while current <= stop:
            values.append(current)
            current *= 2
        if values[-1] != stop:
            raise ValueError(f"区间终点 {stop} 不是起点 {start} 的 2 的幂倍")
        return values

    items = [item.strip() for item in text.split(',') if item.strip()]
    if not items:
        raise ValueError(f"空列表: '{text}'")
    return [int(item) for item in items]


def is_doubling(values: List[int]) -> bool:
    """检查序列是否逐次加倍"""
    return all(b == 2 * a for a, b in zip(values, values[1:]))
