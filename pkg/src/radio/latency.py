"""
uRLLC 时延提取
τ_u = 常数项 + δ_i × (用户 u 在切片 i 上最晚被占用的TTI序号，从1开始)，跨RU和跨切片取最大
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

try:
    from core.rb_grid import RBGrid
    from core.system_config import SystemConfig
    from radio.assignment import RBAssignment
except ImportError:
    from ..core.rb_grid import RBGrid
    from ..core.system_config import SystemConfig
    from .assignment import RBAssignment

__all__ = ['UNSCHEDULED', 'LatencyReport', 'worst_urllc_latency', 'user_latency']


class _Unscheduled:
    """有到达但没有任何RB的用户的时延哨兵"""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return 'UNSCHEDULED'

    def __reduce__(self):
        return (_Unscheduled, ())


UNSCHEDULED = _Unscheduled()


@dataclass(frozen=True)
class LatencyReport:
    """
    一帧的 uRLLC 时延报告

    user_ids: uRLLC 用户的全局索引
    latency: 每个用户的时延 (s)；没有RB的用户为 NaN
    unscheduled: 有到达但没有RB的用户掩码
    """
    user_ids: np.ndarray
    latency: np.ndarray
    unscheduled: np.ndarray

    def of(self, user: int) -> Union[float, _Unscheduled, None]:
        """单个用户的时延；无到达且无RB时为 None"""
        idx = int(np.nonzero(self.user_ids == user)[0][0])
        if self.unscheduled[idx]:
            return UNSCHEDULED
        value = self.latency[idx]
        return None if np.isnan(value) else float(value)

    @property
    def worst(self) -> float:
        """已调度用户中的最差时延，没有已调度用户时为0"""
        defined = self.latency[~np.isnan(self.latency)]
        return float(defined.max()) if defined.size else 0.0

    @property
    def num_unscheduled(self) -> int:
        return int(np.sum(self.unscheduled))


def user_latency(assignment: RBAssignment, grid: RBGrid, user: int, constants_total: float = 0.0) -> Optional[float]:
    """单个用户的时延，用户在两个切片上都没有RB时返回 None"""
    latest = 0.0
    for slice_index, slice_grid in enumerate(grid.slices):
        mask = assignment.user_mask(slice_index, user)
        if not mask.any():
            continue
        last_tti = int(np.nonzero(mask.any(axis=0))[0].max()) + 1
        latest = max(latest, slice_grid.tti_duration * last_tti)
    if latest == 0.0:
        return None
    return constants_total + latest


def worst_urllc_latency(assignment: RBAssignment, grid: RBGrid, config: SystemConfig,
                        urllc_packets: Optional[np.ndarray] = None) -> LatencyReport:
    """
    计算所有 uRLLC 用户的时延

    Args:
        assignment: 本帧RB分配
        grid: RB网格
        config: 系统配置（提供 uRLLC 用户索引与时延常数）
        urllc_packets: 每个 uRLLC 用户本帧到达包数；None 表示都有需求

    Returns:
        LatencyReport: 逐用户时延，report.worst 为最差值
    """
    user_ids = config.urllc_user_ids
    if urllc_packets is None:
        demand = np.ones(len(user_ids), dtype=bool)
    else:
        demand = np.asarray(urllc_packets) > 0

    constants_total = config.latency_constants.total
    latency = np.full(len(user_ids), np.nan)
    unscheduled = np.zeros(len(user_ids), dtype=bool)
    for idx, user in enumerate(user_ids):
        value = user_latency(assignment, grid, int(user), constants_total)
        if value is None:
            unscheduled[idx] = bool(demand[idx])
        else:
            latency[idx] = value
    return LatencyReport(user_ids=user_ids, latency=latency, unscheduled=unscheduled)
