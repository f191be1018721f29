"""
异常定义
"""


class FractionalSolverError(Exception):
    """所有求解器异常的基类"""


class DomainError(FractionalSolverError, ValueError):
    """参数超出定义域"""


class AccuracyLossError(FractionalSolverError, ArithmeticError):
    """无法保证要求的数值精度"""


class NumericalFailure(FractionalSolverError, ArithmeticError):
    """追赶法遇到非正主元"""


class IncompatibleGridError(FractionalSolverError, ValueError):
    """网格不匹配"""


class MissingExactSolutionError(FractionalSolverError, ValueError):
    """问题没有精确解"""


class ConfigError(FractionalSolverError, ValueError):
    """命令行参数或问题配置文件错误"""
