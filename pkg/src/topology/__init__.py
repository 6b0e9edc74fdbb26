"""
拓扑与信道建模模块
"""

from .topology_base import *
from .channel_model import *
