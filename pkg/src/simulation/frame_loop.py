"""
两时间尺度帧循环
帧内 φ̂ 与 π̂ 固定；功率在细时钟的每个TTI上重新求解，队列随之递推
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

try:
    from core.rb_grid import RBGrid, build_rb_grid
    from core.system_config import SystemConfig
    from radio.assignment import RBAssignment
    from radio.latency import LatencyReport, worst_urllc_latency
    from radio.rate_model import fbl_penalty, update_queue, utility
    from radio.slicing import SliceQuotas, quotas as compute_quotas
    from topology.channel_model import ChannelGains
    from traffic.traffic_model import TrafficArrivals
    from algorithms.power_allocation import (
        build_tti_problem, solve_power_tti, frame_feasibility, FeasibilityReport)
    from algorithms.ddqn.constraints import Violation, check_constraints
    from algorithms.ddqn.reward import compute_reward
except ImportError:
    from ..core.rb_grid import RBGrid, build_rb_grid
    from ..core.system_config import SystemConfig
    from ..radio.assignment import RBAssignment
    from ..radio.latency import LatencyReport, worst_urllc_latency
    from ..radio.rate_model import fbl_penalty, update_queue, utility
    from ..radio.slicing import SliceQuotas, quotas as compute_quotas
    from ..topology.channel_model import ChannelGains
    from ..traffic.traffic_model import TrafficArrivals
    from ..algorithms.power_allocation import (
        build_tti_problem, solve_power_tti, frame_feasibility, FeasibilityReport)
    from ..algorithms.ddqn.constraints import Violation, check_constraints
    from ..algorithms.ddqn.reward import compute_reward

logger = logging.getLogger(__name__)

__all__ = ['FrameContext', 'FrameInputs', 'FrameOutcome', 'frame_quotas', 'run_frame']


@dataclass(frozen=True)
class FrameContext:
    """一次仿真中不变的量：配置、RB网格与两个切片的有限码长惩罚"""
    config: SystemConfig
    grid: RBGrid
    psi: Tuple[float, float]

    @classmethod
    def build(cls, config: SystemConfig) -> 'FrameContext':
        grid = build_rb_grid(config)
        psi = tuple(fbl_penalty(config.error_prob, n.tti_duration, n.rb_bandwidth) for n in config.numerologies)
        return cls(config=config, grid=grid, psi=psi)


@dataclass(frozen=True)
class FrameInputs:
    """一帧的随机输入"""
    frame: int
    gains: ChannelGains
    arrivals: TrafficArrivals


@dataclass(frozen=True)
class FrameOutcome:
    """
    一帧的结果
    比特守恒: arrival_bits + 帧初队列 = served_bits + queues + dropped_bits（逐子流）
    """
    frame: int
    served_bits: np.ndarray        # (M, U)
    capacity_bits: np.ndarray      # (M, U)
    arrival_bits: np.ndarray       # (M, U)
    dropped_bits: np.ndarray       # (M, U)
    queues: np.ndarray             # (M, U) 帧末（丢弃后）
    avg_queue_bits: float          # 帧内各TTI eMBB 总积压的平均
    embb_bits: float
    latency: LatencyReport
    violations: List[Violation]
    feasibility: FeasibilityReport
    infeasible_ticks: int
    reward: float
    utility: float
    quotas: SliceQuotas

    @property
    def num_penalties(self) -> int:
        return len(self.violations) + self.feasibility.num_breaches + self.infeasible_ticks

    @property
    def feasible(self) -> bool:
        return self.num_penalties == 0

    @property
    def worst_latency(self) -> float:
        return self.latency.worst

    def embb_throughput(self, frame_duration: float) -> float:
        return self.embb_bits / frame_duration


def frame_quotas(ctx: FrameContext, arrivals: TrafficArrivals) -> SliceQuotas:
    config = ctx.config
    return compute_quotas(arrivals.urllc(config), arrivals.embb(config), ctx.grid, config)


def run_frame(ctx: FrameContext, queues: np.ndarray, phi: np.ndarray, assignment: RBAssignment,
              inputs: FrameInputs) -> FrameOutcome:
    """
    执行一帧

    Args:
        ctx: 帧上下文
        queues: 帧初各子流队列 (M, U)，不会被修改
        phi: 本帧分流 (M, U)
        assignment: 本帧RB分配
        inputs: 本帧信道增益与到达

    Returns:
        FrameOutcome: 不可行性记录在结果中，从不抛出
    """
    config = ctx.config
    num_ticks = config.fine_ticks
    embb_mask = ~config.is_urllc
    phi = np.asarray(phi, dtype=float)
    packets = inputs.arrivals.packets

    arrival_bits = phi * inputs.arrivals.bits[None, :]
    q = np.array(queues, dtype=float, copy=True)
    served_total = np.zeros_like(q)
    capacity_total = np.zeros_like(q)
    infeasible_ticks = 0
    queue_samples = np.zeros(num_ticks)

    if config.arrival_crediting == 'frame':
        q = q + arrival_bits
    per_tick_arrivals = arrival_bits / num_ticks

    coarse = max(range(len(config.numerologies)), key=config.tick_ratio)
    coarse_ratio = config.tick_ratio(coarse)
    hold = config.power_update == 'slice_tti' and coarse_ratio > 1
    held_coarse = None

    for tick in range(num_ticks):
        if config.arrival_crediting == 'tti':
            q = q + per_tick_arrivals
        problem = build_tti_problem(assignment, inputs.gains, ctx.grid, config, tick, q, ctx.psi)
        on_coarse = problem.slice_index == coarse
        if hold and tick % coarse_ratio:
            # 粗粒度切片在其TTI内活跃集合与顺序不变，沿用边界处的功率
            held_power = np.full(problem.num_active, np.nan)
            held_power[on_coarse] = held_coarse
            outcome = solve_power_tti(problem, config, held_power)
        else:
            outcome = solve_power_tti(problem, config)
            held_coarse = outcome.allocation.power[on_coarse]
        q = update_queue(q, 0.0, outcome.served_bits)
        served_total += outcome.served_bits
        capacity_total += outcome.capacity_bits
        infeasible_ticks += len(outcome.infeasible_rus)
        queue_samples[tick] = float(q[:, embb_mask].sum())

    feasibility = frame_feasibility(served_total, phi, packets, q, config)

    # 超过 q_max 的积压按比例尾丢弃
    dropped = np.zeros_like(q)
    totals = q.sum(axis=1)
    for ru in np.nonzero(totals > config.queue_cap)[0]:
        kept = q[ru] * (config.queue_cap / totals[ru])
        dropped[ru] = q[ru] - kept
        q[ru] = kept
    if dropped.any():
        logger.debug(f"frame {inputs.frame}: tail-dropped {dropped.sum():.0f} bits above q_max")

    frame_quota = frame_quotas(ctx, inputs.arrivals)
    violations = check_constraints(assignment, frame_quota, ctx.grid, packets, config)
    latency = worst_urllc_latency(assignment, ctx.grid, config, inputs.arrivals.urllc(config))

    embb_bits = float(served_total[:, embb_mask].sum())
    num_penalties = len(violations) + feasibility.num_breaches + infeasible_ticks
    reward = compute_reward(embb_bits, latency.worst, num_penalties, config)
    avg_queue = float(queue_samples.mean()) if num_ticks else 0.0
    frame_utility = utility([avg_queue], latency.worst, config.omega, config.ref_queue, config.ref_latency)

    if infeasible_ticks:
        logger.debug(f"frame {inputs.frame}: {infeasible_ticks} RU-ticks without enough power for uRLLC")

    return FrameOutcome(
        frame=inputs.frame,
        served_bits=served_total,
        capacity_bits=capacity_total,
        arrival_bits=arrival_bits,
        dropped_bits=dropped,
        queues=q,
        avg_queue_bits=avg_queue,
        embb_bits=embb_bits,
        latency=latency,
        violations=violations,
        feasibility=feasibility,
        infeasible_ticks=infeasible_ticks,
        reward=reward,
        utility=frame_utility,
        quotas=frame_quota,
    )
