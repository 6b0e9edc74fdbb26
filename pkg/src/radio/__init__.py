"""
无线资源模型：速率方程、队列、时延、切片配额、分配数据结构
"""

from .rate_model import *
from .assignment import *
from .latency import *
from .slicing import *
