"""
切片感知的RB配额
uRLLC 专用切片容量 Ω、逐用户份额 Ω_u、溢出配额 e_ur 和 eMBB 复用配额 e_em，每帧计算一次
"""

import math
from dataclasses import dataclass

import numpy as np

try:
    from core.rb_grid import RBGrid, split_bandwidth
    from core.system_config import SystemConfig, latency_window_ttis
except ImportError:
    from ..core.rb_grid import RBGrid, split_bandwidth
    from ..core.system_config import SystemConfig, latency_window_ttis

__all__ = ['SliceQuotas', 'split_bandwidth', 'urllc_capacity', 'per_user_capacity', 'quotas',
           'overflow_window_ttis']


@dataclass(frozen=True)
class SliceQuotas:
    """
    一帧的配额
    omega_u / e_ur 按 uRLLC 用户排列，e_em 按 eMBB 用户排列
    """
    omega: int
    omega_u: np.ndarray
    e_ur: np.ndarray
    e_em: np.ndarray


def urllc_capacity(grid: RBGrid, latency_budget: float, rounding: str = 'floor') -> int:
    """Ω = F_2 × (D_ur/δ_2 向下取整)"""
    urllc = grid.urllc
    return urllc.num_rbs * latency_window_ttis(latency_budget, urllc.tti_duration, rounding)


def overflow_window_ttis(grid: RBGrid, latency_budget: float) -> int:
    """uRLLC 溢出到 eMBB 切片时可用的TTI窗口 ceil(D_ur/δ_1)，不超过 T_1"""
    embb = grid.embb
    return min(latency_window_ttis(latency_budget, embb.tti_duration, 'ceil'), embb.num_ttis)


def per_user_capacity(urllc_packets, omega: int) -> np.ndarray:
    """
    Ω_u = λ_u/Σλ·Ω，最大余数法取整

    整数份额之和恰为 Ω；余数相同时索引小的用户优先
    """
    packets = np.asarray(urllc_packets, dtype=float)
    total = packets.sum()
    if total <= 0 or omega <= 0:
        return np.zeros(len(packets), dtype=np.int64)

    shares = packets / total * omega
    base = np.floor(shares).astype(np.int64)
    remaining = int(omega - base.sum())
    if remaining > 0:
        # 稳定排序保证平局时小索引优先
        order = np.argsort(-(shares - base), kind='stable')
        base[order[:remaining]] += 1
    return base


def quotas(urllc_packets, embb_packets, grid: RBGrid, config: SystemConfig) -> SliceQuotas:
    """
    计算本帧配额

    e_ur = ⌈max(λ^ur − Ω_u, 0) / divisor⌉
    e_em = ⌊(F_2·T_2 − Σ min(λ^ur, Ω_u)) / U_em⌋，本帧无到达的 eMBB 用户取0，
    因而空闲系统允许空分配；e_em·U_em ≤ F_2·T_2 不受影响

    Args:
        urllc_packets: 每个 uRLLC 用户到达包数 λ^ur
        embb_packets: 每个 eMBB 用户到达包数 λ^em（无到达的 eMBB 用户配额为0）
        grid: RB网格
        config: 系统配置

    Returns:
        SliceQuotas
    """
    urllc_packets = np.asarray(urllc_packets, dtype=np.int64)
    embb_packets = np.asarray(embb_packets, dtype=np.int64)

    omega = urllc_capacity(grid, config.latency_budget, config.urllc_window_rounding)
    omega_u = per_user_capacity(urllc_packets, omega)

    divisor = config.urllc_overflow_divisor
    overflow = np.maximum(urllc_packets - omega_u, 0)
    e_ur = -(-overflow // divisor)

    embb_count = len(embb_packets)
    if embb_count:
        leftover = grid.urllc.num_resources - int(np.minimum(urllc_packets, omega_u).sum())
        per_user = max(math.floor(leftover / embb_count), 0)
        e_em = np.where(embb_packets > 0, per_user, 0).astype(np.int64)
    else:
        e_em = np.zeros(0, dtype=np.int64)

    return SliceQuotas(omega=omega, omega_u=omega_u, e_ur=e_ur.astype(np.int64), e_em=e_em)
