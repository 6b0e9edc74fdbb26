"""
错误类型
仿真中的不可行性是数据（标志、违约列表），不抛异常；这里只定义真正的错误。
"""

from typing import List, Optional

__all__ = [
    'TrafficSteeringError', 'ConfigError', 'ConfigParseError', 'DomainError',
    'ConstraintBreach', 'ShapeMismatchError', 'CheckpointError',
    'SearchSpaceTooLarge', 'TraceError',
]


class TrafficSteeringError(Exception):
    """所有错误的根类型"""


class ConfigError(TrafficSteeringError, ValueError):
    """配置错误，violations 为全部违约条目"""

    def __init__(self, message: str, violations: Optional[List] = None):
        super().__init__(message)
        self.violations = list(violations or [])


class ConfigParseError(ConfigError):
    """YAML解析失败，带行列号（从1开始）"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")
        self.line = line
        self.column = column


class DomainError(TrafficSteeringError, ValueError):
    """数值核函数的定义域错误"""


class ConstraintBreach(TrafficSteeringError):
    """严格模式下的约束破坏（uRLLC SNR下限、Big-M耦合）"""


class ShapeMismatchError(TrafficSteeringError, ValueError):
    """网络/状态维度不一致"""


class CheckpointError(TrafficSteeringError):
    """检查点版本、形状或截断错误"""


class SearchSpaceTooLarge(TrafficSteeringError):
    """穷举搜索空间超限"""

    def __init__(self, size: int, limit: int):
        super().__init__(f"search space of {size} assignments exceeds the limit {limit}")
        self.size = size
        self.limit = limit


class TraceError(TrafficSteeringError):
    """轨迹文件缺失或格式错误"""
