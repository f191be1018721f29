"""
测试公共配置
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到路径
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from components.mesh import graded_mesh, uniform_grid  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_meshes():
    """若干 (T, N, r) 组合的分级网格"""
    return [graded_mesh(T, N, r) for T, N, r in
            [(1.0, 1, 1.0), (1.0, 4, 1.0), (1.0, 16, 2.0), (10.0, 32, 4.5), (1.0, 64, 9.0)]]


@pytest.fixture
def unit_grid():
    return uniform_grid(1.0, 8)
