"""
流量建模模块
"""

from .traffic_model import *
