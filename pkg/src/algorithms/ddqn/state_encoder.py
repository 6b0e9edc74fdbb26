"""
状态编码
每个智能体的状态：到达 λ、分流 φ̂、上一帧队列 q、上一帧本切片信道摘要、配额向量
"""

from typing import Optional

import numpy as np

try:
    from core.rb_grid import RBGrid
    from core.system_config import SystemConfig, EMBB_SLICE
    from radio.slicing import SliceQuotas
except ImportError:
    from ...core.rb_grid import RBGrid
    from ...core.system_config import SystemConfig, EMBB_SLICE
    from ...radio.slicing import SliceQuotas

__all__ = ['state_dim', 'encode_state', 'normalize_gain_db']


def state_dim(config: SystemConfig, grid: RBGrid, slice_index: int) -> int:
    m, u = config.num_rus, config.num_users
    quota_len = config.urllc_users if slice_index == EMBB_SLICE else config.embb_users
    return u + 2 * m * u + m * u * grid[slice_index].num_rbs + quota_len


def normalize_gain_db(gains: np.ndarray, bounds) -> np.ndarray:
    """10·log10(g) 按 bounds 线性映射到 [-1, 1] 并截断"""
    low, high = bounds
    db = 10.0 * np.log10(np.maximum(gains, np.finfo(float).tiny))
    return np.clip(2.0 * (db - low) / (high - low) - 1.0, -1.0, 1.0)


def encode_state(packets: np.ndarray, phi: np.ndarray, queues_prev: np.ndarray,
                 gains_prev: Optional[np.ndarray], quotas: SliceQuotas,
                 config: SystemConfig, grid: RBGrid, slice_index: int) -> np.ndarray:
    """
    编码第 slice_index 个智能体的状态

    Args:
        packets: 本帧到达包数 (U,)
        phi: 本帧分流 (M, U)
        queues_prev: 上一帧末队列 (M, U)
        gains_prev: 上一帧本切片的平均增益 (M, U, F_i)；首帧为 None，对应块置0
        quotas: 本帧配额；eMBB切片智能体取 e_ur，uRLLC切片智能体取 e_em

    Returns:
        np.ndarray: 定长状态向量
    """
    slice_grid = grid[slice_index]
    m, u = config.num_rus, config.num_users

    traffic = np.asarray(packets, dtype=float) / config.max_arrivals
    split = np.asarray(phi, dtype=float).reshape(-1)
    queue = np.asarray(queues_prev, dtype=float).reshape(-1) / config.queue_cap
    if gains_prev is None:
        channel = np.zeros(m * u * slice_grid.num_rbs)
    else:
        channel = normalize_gain_db(np.asarray(gains_prev), config.gain_db_bounds).reshape(-1)

    if slice_index == EMBB_SLICE:
        quota = quotas.e_ur.astype(float) / max(slice_grid.num_resources, 1)
    else:
        quota = quotas.e_em.astype(float) / max(slice_grid.num_resources, 1)

    return np.concatenate([traffic, split, queue, channel, quota])
