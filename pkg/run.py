"""
启动脚本
检查运行环境后进入命令行入口

用法:
    python run.py table --example 1 --scheme l1 --r uniform --n 64..1024
    python run.py verify
"""
import os
import sys
from pathlib import Path

# 添加项目根目录到路径
project_root = Path(__file__).parent
sys.path.append(str(project_root))


def check_environment():
    """检查运行环境"""
    required_files = [
        "config.py",
        "components/cli.py",
        "components/solver.py",
    ]

    missing_files = [f for f in required_files if not os.path.exists(project_root / f)]
    if missing_files:
        print("❌ 缺少必需文件:", file=sys.stderr)
        for f in missing_files:
            print(f"   - {f}", file=sys.stderr)
        return False

    # 检查Python包
    try:
        import numpy
        import pandas
        import scipy
    except ImportError as e:
        print(f"❌ 缺少依赖包: {e}", file=sys.stderr)
        print("💡 请运行: pip install -r requirements.txt", file=sys.stderr)
        return False

    return True


def main():
    """主函数"""
    if not check_environment():
        print("\n⚠️  环境检查失败，请解决问题后重试", file=sys.stderr)
        sys.exit(1)

    from components.cli import main as cli_main

    try:
        sys.exit(cli_main(sys.argv[1:]))
    except KeyboardInterrupt:
        print("\n👋 计算已中断", file=sys.stderr)
        sys.exit(130)


if __name__ == "__main__":
    main()
