"""
算法模块：流量分割启发式、功率分配；DDQN 与基准方案在子包中
"""

from .flow_split import *
from .power_allocation import *
