"""
仿真编排：帧循环、回合、训练与评估、指标
"""

from .frame_loop import *
from .episode import *
from .metrics import *
from .trainer import *
