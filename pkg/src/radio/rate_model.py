"""
物理层速率、队列递推与全局效用
eMBB 用香农速率；uRLLC 用有限码长近似（信道色散 V 取 1）
"""

import math

import numpy as np
from scipy.special import erfc, erfcinv

try:
    from core.errors import DomainError, ConstraintBreach
except ImportError:
    from ..core.errors import DomainError, ConstraintBreach

__all__ = [
    'LOG2_E', 'q_function', 'inverse_q', 'fbl_penalty', 'snr', 'embb_rate', 'urllc_rate',
    'update_queue', 'utility', 'big_m_breaches',
]

LOG2_E = math.log2(math.e)

# uRLLC SNR下限判定的相对容差
_SNR_FLOOR_RTOL = 1e-9


def q_function(x):
    """高斯Q函数 Q(x) = ½·erfc(x/√2)"""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def inverse_q(p: float) -> float:
    """
    Q函数的反函数 Q^{-1}(p)

    Raises:
        DomainError: p 不在 (0,1) 内
    """
    if not (0.0 < p < 1.0) or not math.isfinite(p):
        raise DomainError(f"inverse_q is defined on (0,1), got {p}")
    # Q(x)=p  <=>  erfc(x/√2)=2p
    return float(math.sqrt(2.0) * erfcinv(2.0 * p))


def fbl_penalty(error_prob: float, tti_duration: float, rb_bandwidth: float) -> float:
    """有限码长惩罚 Ψ = Q^{-1}(P_e)/√(δ_i·β_i)，V≈1"""
    if tti_duration * rb_bandwidth <= 0:
        raise DomainError(f"delta*beta must be positive, got {tti_duration * rb_bandwidth}")
    return inverse_q(error_prob) / math.sqrt(tti_duration * rb_bandwidth)


def snr(power, gains, noise_power: float):
    return np.asarray(power, dtype=float) * np.asarray(gains, dtype=float) / noise_power


def embb_rate(power, gains, assignment, rb_bandwidth, noise_power: float) -> float:
    """
    eMBB 子流速率 (bits/s)

    Args:
        power, gains, assignment: 同形状数组，对应一个 (m,u) 子流的各RB
        rb_bandwidth: 标量或逐RB的 β
        noise_power: N0 (W)

    未分配的RB（assignment=0）贡献为0
    """
    mask = np.asarray(assignment, dtype=bool)
    per_rb = np.asarray(rb_bandwidth, dtype=float) * np.log2(1.0 + snr(power, gains, noise_power))
    return float(np.sum(np.where(mask, per_rb, 0.0)))


def urllc_rate(power, gains, assignment, rb_bandwidth, noise_power: float, psi,
               snr_floor: float = None) -> float:
    """
    uRLLC 子流速率 (bits/s): Σ β·[log2(1+SNR) − log2(e)·Ψ]

    Raises:
        ConstraintBreach: 给定 snr_floor 且某个已分配RB的 SNR 低于下限
    """
    mask = np.asarray(assignment, dtype=bool)
    link_snr = snr(power, gains, noise_power)
    if snr_floor is not None and np.any(mask):
        assigned = np.broadcast_to(link_snr, mask.shape)[mask]
        if np.any(assigned < snr_floor * (1.0 - _SNR_FLOOR_RTOL)):
            raise ConstraintBreach(
                f"uRLLC RB below the SNR floor {snr_floor:.4g}: min SNR {assigned.min():.4g}")
    per_rb = np.asarray(rb_bandwidth, dtype=float) * (np.log2(1.0 + link_snr) - LOG2_E * np.asarray(psi))
    return float(np.sum(np.where(mask, per_rb, 0.0)))


def update_queue(queue, arrival_bits, served_bits):
    """队列递推 q' = max(0, q + a − s)，支持标量和数组"""
    updated = np.maximum(0.0, np.asarray(queue, dtype=float) + arrival_bits - served_bits)
    if np.ndim(updated) == 0:
        return float(updated)
    return updated


def utility(avg_queues, worst_latency: float, omega: float, ref_queue: float, ref_latency: float) -> float:
    """
    全局效用（越小越好）: ω·Σ_u q̄_u/q0 + (1−ω)·max_u τ̄_u/τ0

    Args:
        avg_queues: 各 eMBB 用户的平均队列长度 (bits)
        worst_latency: 最差 uRLLC 用户时延 (s)
    """
    if ref_queue <= 0 or ref_latency <= 0:
        raise DomainError("reference queue and latency must be positive")
    queue_term = float(np.sum(avg_queues)) / ref_queue
    return omega * queue_term + (1.0 - omega) * worst_latency / ref_latency


def big_m_breaches(power, assignment) -> np.ndarray:
    """Big-M 耦合检查：返回 assignment=0 但功率>0 的位置索引"""
    power = np.asarray(power, dtype=float)
    mask = np.asarray(assignment, dtype=bool)
    return np.argwhere((~mask) & (power > 0.0))
