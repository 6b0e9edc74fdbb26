"""
核心模块：配置类型、混合参数集RB网格、错误类型
"""

from .errors import *
from .system_config import *
from .rb_grid import *
