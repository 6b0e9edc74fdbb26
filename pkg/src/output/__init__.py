"""
输出模块：指标CSV、运行清单、检查点与轨迹文件
"""

from .result_exporter import *
from .checkpoint import *
from .trace_io import *
