"""
创建示例问题配置文件
把算例 3（α 固定）写成 [source] 项的形式，供 --problem 使用
"""
import math
import sys
from pathlib import Path

# 添加项目根目录到路径
project_root = Path(__file__).parent
sys.path.append(str(project_root))

SAMPLE_ALPHA = 0.5


def sample_problem_text(alpha: float = SAMPLE_ALPHA) -> str:
    """
    算例 3：u = (1+t³)·16x²(1-x)² + 5t^{3+α}，l = 1，c(x) = x²

    2 - 12x + 12x² 写成 2 - 12·x(1-x)
    """
    cubic = 6.0 / math.gamma(4.0 - alpha)
    shifted = math.gamma(4.0 + alpha) / 6.0

    source_terms = [
        (16.0 * cubic, 2, 2, 3.0 - alpha),
        (5.0 * shifted, 0, 0, 3.0),
        (-32.0, 0, 0, 0.0),
        (-32.0, 0, 0, 3.0),
        (192.0, 1, 1, 0.0),
        (192.0, 1, 1, 3.0),
        (16.0, 4, 2, 0.0),
        (16.0, 4, 2, 3.0),
        (5.0, 2, 0, 3.0 + alpha),
    ]
    boundary_terms = [
        (5.0, 0, 0, 3.0 + alpha),
    ]
    exact_terms = [
        (16.0, 2, 2, 0.0),
        (16.0, 2, 2, 3.0),
        (5.0, 0, 0, 3.0 + alpha),
    ]

    def join(terms):
        return "; ".join(f"{a!r} {i} {j} {q!r}" for a, i, j, q in terms)

    return "\n".join([
        f"# 算例 3，α = {alpha}（运行时请使用 --alpha {alpha}）",
        "[domain]",
        "l = 1.0",
        "T = 1.0",
        "smooth = yes",
        "",
        "[coefficients]",
        "p = 1.0",
        "c = 0, 0, 1",
        "",
        "[initial]",
        "phi = 16 2 2",
        "",
        "[source]",
        f"f = {join(source_terms)}",
        "",
        "# u(0,t) = u(1,t) = 5t^{3+α}",
        "[boundary]",
        f"g = {join(boundary_terms)}",
        "",
        "[exact]",
        f"u = {join(exact_terms)}",
        "",
    ])


def main():
    """写出示例文件"""
    output_dir = project_root / "data"
    output_dir.mkdir(exist_ok=True)
    path = output_dir / "sample_problem.ini"

    try:
        path.write_text(sample_problem_text(), encoding="utf-8")
    except OSError as e:
        print(f"❌ 写出示例文件失败: {e}")
        return False

    print(f"✅ 示例问题已写出: {path}")
    print(f"💡 试运行: python run.py table --problem {path} --alpha {SAMPLE_ALPHA} --n 8..64")
    return True


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
