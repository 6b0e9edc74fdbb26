"""
连续松弛上界
每个细时钟TTI上将RB独占约束松弛为 π ∈ [0,1]、每RB Σ_{m,u} π ≤ 1，
以 π 的投影梯度上升 + p 的精确注水求 eMBB 可达比特的上界，并加上 Frank-Wolfe 对偶间隙作为证书。
帧目标的下界由流体积压递推和 uRLLC 时延下界给出。
"""

import logging
import math
from dataclasses import dataclass
from typing import List

import numpy as np

try:
    from radio.rate_model import utility
    from algorithms.power_allocation import capped_water_filling
    from algorithms.ddqn.reward import compute_reward
    from simulation.frame_loop import FrameContext, FrameInputs
except ImportError:
    from ...radio.rate_model import utility
    from ..power_allocation import capped_water_filling
    from ..ddqn.reward import compute_reward
    from ...simulation.frame_loop import FrameContext, FrameInputs

logger = logging.getLogger(__name__)

__all__ = [
    'RelaxedCapacity', 'RelaxedFrameBound', 'project_capped_simplex',
    'relaxed_tick_capacity', 'relaxed_frame_bound', 'MAX_ITERATIONS', 'TOLERANCE',
]

MAX_ITERATIONS = 500
TOLERANCE = 1e-6

# 迭代中 π 的下界，保证梯度有限
_PI_FLOOR = 1e-9
LN2 = math.log(2.0)


def project_capped_simplex(values: np.ndarray) -> np.ndarray:
    """逐行投影到 {x ∈ [0,1]^n : Σx ≤ 1}，values 形状 (rows, n)"""
    clipped = np.clip(values, 0.0, 1.0)
    over = clipped.sum(axis=1) > 1.0
    if not np.any(over):
        return clipped
    rows = values[over]
    # 投影到概率单纯形（排序法）
    ordered = -np.sort(-rows, axis=1)
    cumsum = np.cumsum(ordered, axis=1) - 1.0
    index = np.arange(1, rows.shape[1] + 1)
    rho = np.sum(ordered - cumsum / index > 0, axis=1)
    theta = cumsum[np.arange(len(rows)), rho - 1] / rho
    clipped[over] = np.maximum(rows - theta[:, None], 0.0)
    return clipped


@dataclass(frozen=True)
class RelaxedCapacity:
    """单TTI松弛容量：value 为最后可行迭代的值，certified 为带对偶间隙的上界"""
    value: float
    certified: float
    gap: float
    iterations: int
    converged: bool


def _evaluate(pi: np.ndarray, weights: np.ndarray, gain_ratio: np.ndarray, budget: float):
    """
    固定 π 时最优功率下的目标值与梯度

    pi, gain_ratio: (M, K, n)，K 为 eMBB 用户数，n 为活跃RB数；gain_ratio = g/N0
    """
    num_rus = pi.shape[0]
    value = 0.0
    grad = np.zeros_like(pi)
    for m in range(num_rus):
        p_m = pi[m].reshape(-1)
        a_m = gain_ratio[m].reshape(-1)
        w_m = np.broadcast_to(weights, pi[m].shape).reshape(-1)
        positive = p_m > 0
        if budget <= 0 or not np.any(positive):
            continue
        _, level, _ = capped_water_filling(
            p_m[positive] * w_m[positive], p_m[positive] / a_m[positive],
            np.zeros(int(positive.sum()), dtype=np.int64), np.array([math.inf]), budget)
        # 每单位 π 的功率 s = (w·L − 1/a)^+
        s = np.maximum(w_m * level - 1.0 / a_m, 0.0)
        rate = w_m * np.log2(1.0 + a_m * s)
        value += float(np.sum(p_m * rate))
        nu = 1.0 / (level * LN2) if level > 0 else 0.0
        grad[m] = (rate - nu * s).reshape(pi[m].shape)
    return value, grad


def _fw_gap(pi: np.ndarray, grad: np.ndarray) -> float:
    """max_{π' 可行} ∇·(π' − π)：每个RB选梯度最大的正分量"""
    per_rb = grad.reshape(-1, grad.shape[-1]).max(axis=0)
    return float(np.sum(np.maximum(per_rb, 0.0)) - np.sum(grad * pi))


def relaxed_tick_capacity(gain_ratio: np.ndarray, weights: np.ndarray, budget: float,
                          max_iterations: int = MAX_ITERATIONS, tolerance: float = TOLERANCE) -> RelaxedCapacity:
    """
    单TTI的松弛 eMBB 容量上界 (bits)

    Args:
        gain_ratio: (M, K, n) 的 g/N0
        weights: (n,) 的 β·δ_fine
        budget: 每RU功率预算 (W)
    """
    num_rus, num_users, num_rbs = gain_ratio.shape
    if num_rus * num_users * num_rbs == 0 or budget <= 0:
        return RelaxedCapacity(0.0, 0.0, 0.0, 0, True)

    pi = np.full(gain_ratio.shape, 1.0 / (num_rus * num_users))
    value, grad = _evaluate(pi, weights, gain_ratio, budget)
    best_certified = value + max(_fw_gap(pi, grad), 0.0)
    step0 = 0.5 / max(float(np.max(np.abs(grad))), 1e-12)
    converged = False
    iterations = 0

    for iterations in range(1, max_iterations + 1):
        step = step0 / math.sqrt(iterations)
        candidate = pi + step * grad
        # 按RB投影：把 (M, K) 展平为一行
        flat = np.moveaxis(candidate, -1, 0).reshape(num_rbs, -1)
        projected = project_capped_simplex(flat)
        projected = np.maximum(projected, _PI_FLOOR)
        totals = projected.sum(axis=1, keepdims=True)
        projected = np.where(totals > 1.0, projected / totals, projected)
        new_pi = np.moveaxis(projected.reshape(num_rbs, num_rus, num_users), 0, -1)

        change = float(np.max(np.abs(new_pi - pi)))
        pi = new_pi
        value, grad = _evaluate(pi, weights, gain_ratio, budget)
        best_certified = min(best_certified, value + max(_fw_gap(pi, grad), 0.0))
        if change < tolerance:
            converged = True
            break

    if not converged:
        logger.debug(f"relaxed capacity did not converge in {max_iterations} iterations; "
                     f"certified bound {best_certified:.4g}")
    return RelaxedCapacity(value=value, certified=best_certified, gap=best_certified - value,
                           iterations=iterations, converged=converged)


@dataclass(frozen=True)
class RelaxedFrameBound:
    """
    一帧的松弛界
    objective 是帧效用的下界（最小化意义），embb_bits 是可服务 eMBB 比特的上界
    """
    tick_capacity: List[RelaxedCapacity]
    avg_queue_bits: float
    embb_bits: float
    final_backlog: float
    latency_bound: float
    objective: float
    reward: float

    @property
    def converged(self) -> bool:
        return all(c.converged for c in self.tick_capacity)


def _tick_gain_ratio(ctx: FrameContext, inputs: FrameInputs, tick: int):
    config = ctx.config
    embb = config.embb_user_ids
    ratios, weights = [], []
    for slice_index, slice_grid in enumerate(ctx.grid.slices):
        tti = tick // config.tick_ratio(slice_index)
        if slice_grid.num_rbs == 0 or tti >= slice_grid.num_ttis:
            continue
        gains = inputs.gains[slice_index][:, embb, :, tti]
        ratios.append(gains / config.noise_power)
        weights.append(np.full(slice_grid.num_rbs, slice_grid.rb_bandwidth * config.fine_tti))
    if not ratios:
        return np.zeros((config.num_rus, len(embb), 0)), np.zeros(0)
    return np.concatenate(ratios, axis=-1), np.concatenate(weights)


def relaxed_frame_bound(ctx: FrameContext, inputs: FrameInputs, initial_backlog: float = 0.0,
                        max_iterations: int = MAX_ITERATIONS) -> RelaxedFrameBound:
    """
    帧级松弛界

    eMBB 积压按流体递推 F_k = max(0, F_{k−1} + a_k − C_k)，C_k 为松弛容量上界；
    有 uRLLC 到达时时延下界为 min δ_i + 常数项
    """
    config = ctx.config
    num_ticks = config.fine_ticks
    embb_arrivals = float(inputs.arrivals.embb(config).sum() * config.packet_size_embb)
    arrivals = np.zeros(num_ticks)
    if num_ticks:
        if config.arrival_crediting == 'frame':
            arrivals[0] = embb_arrivals
        else:
            arrivals[:] = embb_arrivals / num_ticks

    capacities = []
    backlog = float(initial_backlog)
    samples = np.zeros(num_ticks)
    served = 0.0
    for tick in range(num_ticks):
        gain_ratio, weights = _tick_gain_ratio(ctx, inputs, tick)
        capacity = relaxed_tick_capacity(gain_ratio, weights, config.max_power_per_ru, max_iterations)
        capacities.append(capacity)
        available = backlog + arrivals[tick]
        served += min(available, capacity.certified)
        backlog = max(0.0, available - capacity.certified)
        samples[tick] = backlog

    if np.any(inputs.arrivals.urllc(config) > 0):
        durations = [s.tti_duration for s in ctx.grid.slices if s.num_rbs > 0]
        latency_bound = (min(durations) if durations else 0.0) + config.latency_constants.total
    else:
        latency_bound = 0.0

    avg_queue = float(samples.mean()) if num_ticks else 0.0
    objective = utility([avg_queue], latency_bound, config.omega, config.ref_queue, config.ref_latency)
    return RelaxedFrameBound(
        tick_capacity=capacities,
        avg_queue_bits=avg_queue,
        embb_bits=served,
        final_backlog=backlog,
        latency_bound=latency_bound,
        objective=objective,
        reward=compute_reward(served, latency_bound, 0, config),
    )
