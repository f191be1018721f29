"""
结果表格输出
CSV（每个网格一行）与按 α 分行排列的 markdown（误差行下方为收敛率行）
"""
from pathlib import Path
from typing import List, Sequence

import pandas as pd

from config import SUPPORTED_FORMATS
from components.errors import ConfigError
from components.harness import ConvergenceReport, GrowthReport
from utils.helpers import format_sci, get_logger

logger = get_logger("report")


def _size_label(N: int, M: int) -> str:
    return f"N=M={N}" if N == M else f"N={N},M={M}"


def convergence_frame(reports: Sequence[ConvergenceReport]) -> pd.DataFrame:
    """多个报告合并为 CSV 格式的长表"""
    frames = [report.to_frame() for report in reports]
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()


def convergence_layout(reports: Sequence[ConvergenceReport]) -> pd.DataFrame:
    """宽表：每个 α 两行，第一行误差，第二行收敛率"""
    rows = []
    for report in reports:
        labels = [_size_label(N, M) for N, M in report.sizes]
        error_row = {'α': f"{report.alpha:g}", 'TOC': f"{report.toc:.3g}"}
        rate_row = {'α': "", 'TOC': ""}
        for label, error, rate in zip(labels, report.errors, report.rate_cells()):
            error_row[label] = format_sci(error)
            rate_row[label] = rate
        rows.extend([error_row, rate_row])
    return pd.DataFrame(rows).fillna("")


def growth_frame(reports: Sequence[GrowthReport]) -> pd.DataFrame:
    frames = [report.to_frame() for report in reports]
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()


def growth_layout(reports: Sequence[GrowthReport]) -> pd.DataFrame:
    """宽表：每个 α 一行增长率"""
    rows = []
    for report in reports:
        row = {'α': f"{report.alpha:g}",
               'expected': "" if report.expected is None else f"{report.expected:.3g}"}
        for (N, M), g in zip(report.sizes, report.growth):
            row[_size_label(N, M)] = f"{g:.3f}"
        rows.append(row)
    return pd.DataFrame(rows).fillna("")


def render(frame: pd.DataFrame, fmt: str) -> str:
    """把表格渲染为 csv 或 markdown 文本"""
    if fmt not in SUPPORTED_FORMATS:
        raise ConfigError(f"不支持的输出格式: {fmt}（可选 {', '.join(SUPPORTED_FORMATS)}）")
    if fmt == "csv":
        return frame.to_csv(index=False, lineterminator="\n")
    return frame.to_markdown(index=False, stralign="right") + "\n"


def render_convergence(reports: Sequence[ConvergenceReport], fmt: str) -> str:
    if fmt == "md":
        return render(convergence_layout(reports), fmt)
    return render(convergence_frame(reports), fmt)


def render_growth(reports: Sequence[GrowthReport], fmt: str) -> str:
    if fmt == "md":
        return render(growth_layout(reports), fmt)
    return render(growth_frame(reports), fmt)


def write_text(text: str, path) -> Path:
    """写出表格文件，目录不存在时自动创建"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("✅ 已写出 %s", path)
    return path


def grid_frame(values, x, t) -> pd.DataFrame:
    """数值解网格：行为 x_m，列为 t_n"""
    columns: List[str] = [f"{tn:.17g}" for tn in t]
    frame = pd.DataFrame(values, columns=columns)
    frame.insert(0, "x", x)
    return frame
