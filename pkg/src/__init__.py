"""
ORAN智能流量引导仿真包
eMBB/uRLLC双切片下行链路：流量分割、DDQN资源块分配、逐TTI功率分配
"""

__version__ = "0.3.0"
