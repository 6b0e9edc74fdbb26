"""
信道模型
瑞利衰落加路径损耗的有效信道增益 g = |h|²·10^(-PL/10)
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

try:
    from core.rb_grid import RBGrid
    from topology.topology_base import Topology, path_loss_db, PATH_LOSS_MIN_DISTANCE
except ImportError:
    from ..core.rb_grid import RBGrid
    from .topology_base import Topology, path_loss_db, PATH_LOSS_MIN_DISTANCE

__all__ = ['ChannelGains', 'sample_channel_gains', 'large_scale_gain']


@dataclass(frozen=True)
class ChannelGains:
    """
    一帧的信道增益
    per_slice[i] 形状为 (M, U, F_i, T_i)
    """
    per_slice: Tuple[np.ndarray, np.ndarray]

    def __getitem__(self, slice_index: int) -> np.ndarray:
        return self.per_slice[slice_index]

    def at_tti(self, slice_index: int, tti: int) -> np.ndarray:
        """切片 i 在 TTI t_i 的增益 (M, U, F_i)"""
        return self.per_slice[slice_index][..., tti]

    def frame_mean(self, slice_index: int) -> np.ndarray:
        """帧内各TTI的平均增益 (M, U, F_i)，作为学习状态中的信道摘要"""
        gains = self.per_slice[slice_index]
        if gains.shape[-1] == 0:
            return np.zeros(gains.shape[:-1])
        return gains.mean(axis=-1)

    def is_valid(self) -> bool:
        return all(np.all(np.isfinite(g)) and np.all(g > 0) for g in self.per_slice)


def large_scale_gain(topology: Topology, min_distance: float = PATH_LOSS_MIN_DISTANCE) -> np.ndarray:
    """大尺度增益 10^(-PL/10)，形状 (M, U)"""
    return 10.0 ** (-np.asarray(path_loss_db(topology.distances(), min_distance)) / 10.0)


def sample_channel_gains(topology: Topology, grid: RBGrid, rng: np.random.Generator,
                         fading_block: str = 'tti', rayleigh: bool = True,
                         min_distance: float = PATH_LOSS_MIN_DISTANCE) -> ChannelGains:
    """
    采样一帧的信道增益

    Args:
        topology: RU/用户拓扑
        grid: RB网格
        rng: 随机数生成器
        fading_block: 'tti' 每个TTI独立衰落；'frame' 整帧保持
        rayleigh: False 时衰落恒为1（只有路径损耗）

    Returns:
        ChannelGains: 每个 (m,u,f_i,t_i) 独立的指数分布(均值1)功率衰落
    """
    base = large_scale_gain(topology, min_distance)
    num_rus, num_users = base.shape
    per_slice = []
    for slice_grid in grid.slices:
        shape = (num_rus, num_users, slice_grid.num_rbs, slice_grid.num_ttis)
        if not rayleigh:
            fading = np.ones(shape)
        elif fading_block == 'frame':
            block = rng.exponential(1.0, size=shape[:-1] + (1,))
            fading = np.broadcast_to(block, shape).copy()
        else:
            fading = rng.exponential(1.0, size=shape)
        # 指数分布在0处有非零概率密度，钳位保证增益严格为正
        fading = np.maximum(fading, np.finfo(float).tiny)
        per_slice.append(fading * base[:, :, None, None])
    return ChannelGains(per_slice=tuple(per_slice))
