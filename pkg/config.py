"""
分数阶反应扩散求解器配置文件
"""

# 特殊函数配置
SPECFUN_CONFIG = {
    "rel_tol": 1e-15,          # 连分式 / 级数迭代的相对容差
    "max_terms": 2000,         # 级数、连分式最大迭代次数
    "ml_crossover": 8.0,       # Mittag-Leffler 级数 → 渐近展开的 |z| 阈值
    "ml_rel_tol": 1e-10,       # Mittag-Leffler 结果需要达到的相对精度
}

# 求解器配置
SOLVER_CONFIG = {
    "residual_tol": 1e-11,     # 回代残差检查（相对每行尺度）
    "min_time_intervals": 1,
    "min_space_intervals": 2,
    "spatial_length_tol": 1e-12,
}

# 收敛率统计配置
HARNESS_CONFIG = {
    "rate_floor": 1e-13,       # 两个误差都低于该值时，收敛率标记为 exact
    "growth_times": (1.0, 10.0),
    "exactness_tol": 1e-10,
}

# 退出码
EXIT_CODES = {
    "success": 0,
    "config_error": 2,
    "verification_failure": 3,
    "numerical_failure": 4,
}

# 标准算例使用的 α
STANDARD_ALPHAS = [0.2, 0.4, 0.6, 0.8]

# 默认的 N 序列（逐次加倍）
DEFAULT_N_LIST = [64, 128, 256, 512, 1024]

# 输出列
CSV_COLUMNS = ['alpha', 'scheme', 'r', 'T', 'N', 'M', 'error', 'rate', 'toc']
GROWTH_COLUMNS = ['alpha', 'scheme', 'r', 'N', 'M', 'error_T1', 'error_T10', 'growth', 'expected']
VERIFY_COLUMNS = ['check', 'alpha', 'scheme', 'N', 'passed', 'detail']

# 算例名称映射（命令行参数 → 内部标识）
EXAMPLE_ALIASES = {
    "1": "example1",
    "example1": "example1",
    "2": "example2",
    "example2": "example2",
    "3": "example3",
    "example3": "example3",
    "exact": "fitted_exactness",
    "fitted_exactness": "fitted_exactness",
}

# 支持的输出格式
SUPPORTED_FORMATS = ['csv', 'md']
