"""
短时间尺度功率分配
每个细时钟TTI、每个RU独立求解：
  阶段A 为每个 uRLLC RB 分配传完一个包所需的最小功率（严格优先）
  阶段B 将剩余预算以带积压上限的加权注水分配给 eMBB RB
注水水位由排序断点精确求出，不做迭代
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

try:
    from core.rb_grid import RBGrid
    from core.system_config import SystemConfig
    from radio.assignment import RBAssignment, PowerAllocation
    from radio.rate_model import LOG2_E
    from topology.channel_model import ChannelGains
except ImportError:
    from ..core.rb_grid import RBGrid
    from ..core.system_config import SystemConfig
    from ..radio.assignment import RBAssignment, PowerAllocation
    from ..radio.rate_model import LOG2_E
    from ..topology.channel_model import ChannelGains

logger = logging.getLogger(__name__)

__all__ = [
    'min_power_for_packet', 'TTIProblem', 'PowerSolveOutcome', 'build_tti_problem',
    'saturation_level', 'capped_water_filling', 'solve_power_tti', 'rb_bits',
    'FeasibilityReport', 'frame_feasibility', 'FEASIBILITY_SLACK',
]

LN2 = math.log(2.0)

# 帧级需求判定的绝对容差 (bits)
FEASIBILITY_SLACK = 1e-9

# 2^x 的指数上限，超过视为无穷
_MAX_LOG2_LEVEL = 1000.0


def min_power_for_packet(gain: float, rb_bandwidth: float, tti_duration: float, packet_bits: float,
                         snr_floor: float, noise_power: float, psi: float) -> float:
    """
    uRLLC RB 传完一个包的最小功率

    p = (N0/g)·max(Γ0, 2^(Z/(βδ) + log2(e)·Ψ) − 1)
    """
    required_snr = 2.0 ** (packet_bits / (rb_bandwidth * tti_duration) + LOG2_E * psi) - 1.0
    return noise_power / gain * max(snr_floor, required_snr)


@dataclass(frozen=True)
class TTIProblem:
    """
    单个细时钟TTI的功率分配输入，每个条目是一个活跃RB
    weight = β·δ_fine，即该RB每单位 log2(1+SNR) 在本TTI交付的比特数
    backlog[m][u] 为各子流当前剩余积压 (bits)
    """
    slice_index: np.ndarray
    rb: np.ndarray
    ru: np.ndarray
    user: np.ndarray
    gain: np.ndarray
    weight: np.ndarray
    rb_bandwidth: np.ndarray
    tti_duration: np.ndarray
    psi: np.ndarray
    is_urllc: np.ndarray
    backlog: np.ndarray

    @property
    def num_active(self) -> int:
        return len(self.rb)


@dataclass(frozen=True)
class PowerSolveOutcome:
    """
    单TTI功率分配结果

    served_bits: 受积压限制的实际服务比特 (M, U)
    capacity_bits: 同样预算下不受积压限制的可达比特 (M, U)，用于分流观测
    infeasible_rus: 阶段A超出预算的RU，这些RU本TTI功率全部为0
    """
    allocation: PowerAllocation
    served_bits: np.ndarray
    capacity_bits: np.ndarray
    feasible: bool
    infeasible_rus: Tuple[int, ...] = ()
    kkt_residual: float = 0.0


def build_tti_problem(assignment: RBAssignment, gains: ChannelGains, grid: RBGrid, config: SystemConfig,
                      tick: int, backlog: np.ndarray, psi: Tuple[float, float]) -> TTIProblem:
    """收集细时钟第 tick 个TTI上两个切片的活跃RB"""
    fine = config.fine_tti
    is_urllc_user = config.is_urllc
    parts = []
    for slice_index, slice_grid in enumerate(grid.slices):
        tti = tick // config.tick_ratio(slice_index)
        if slice_grid.num_rbs == 0 or tti >= slice_grid.num_ttis:
            continue
        rbs, rus, users = assignment.active(slice_index, tti)
        n = len(rbs)
        parts.append(dict(
            slice_index=np.full(n, slice_index, dtype=np.int64),
            rb=rbs, ru=rus, user=users,
            gain=gains[slice_index][rus, users, rbs, tti],
            weight=np.full(n, slice_grid.rb_bandwidth * fine),
            rb_bandwidth=np.full(n, slice_grid.rb_bandwidth),
            tti_duration=np.full(n, slice_grid.tti_duration),
            psi=np.full(n, psi[slice_index]),
            is_urllc=is_urllc_user[users],
        ))

    keys = ('slice_index', 'rb', 'ru', 'user', 'gain', 'weight', 'rb_bandwidth', 'tti_duration', 'psi', 'is_urllc')
    if parts:
        columns = {k: np.concatenate([p[k] for p in parts]) for k in keys}
    else:
        columns = {k: np.zeros(0, dtype=np.int64 if k in ('slice_index', 'rb', 'ru', 'user') else float)
                   for k in keys}
        columns['is_urllc'] = np.zeros(0, dtype=bool)
    return TTIProblem(backlog=np.asarray(backlog, dtype=float), **columns)


def saturation_level(weights: np.ndarray, inv_gain: np.ndarray, cap: float) -> float:
    """
    子流的饱和水位 L*：在水位 L 下 Σ_j w_j·log2(1 + a_j·(w_j·L − 1/a_j)^+) = cap

    Args:
        weights: 子流各RB的权重 w_j
        inv_gain: 各RB的 1/a_j = N0/g_j
        cap: 积压上限 (bits)，可为 inf
    """
    if not math.isfinite(cap):
        return math.inf
    if cap <= 0 or len(weights) == 0:
        return 0.0
    thresholds = inv_gain / weights
    order = np.argsort(thresholds, kind='stable')
    cum_w = 0.0
    cum_wlog = 0.0
    for k, j in enumerate(order):
        cum_w += weights[j]
        cum_wlog += weights[j] * math.log2(weights[j] / inv_gain[j])
        log2_level = (cap - cum_wlog) / cum_w
        if log2_level > _MAX_LOG2_LEVEL:
            return math.inf
        level = 2.0 ** log2_level
        upper = thresholds[order[k + 1]] if k + 1 < len(order) else math.inf
        if level <= upper:
            return max(level, float(thresholds[j]))
    return math.inf


def _power_at_level(level: float, weights, inv_gain, sat_levels) -> np.ndarray:
    effective = np.minimum(level, sat_levels)
    with np.errstate(invalid='ignore'):
        power = weights * effective - inv_gain
    return np.where(np.isfinite(power), np.maximum(power, 0.0), 0.0)


def capped_water_filling(weights: np.ndarray, inv_gain: np.ndarray, groups: np.ndarray,
                         caps: np.ndarray, budget: float) -> Tuple[np.ndarray, float, np.ndarray]:
    """
    带子流上限的加权注水

    max Σ_j w_j·log2(1 + p_j/inv_gain_j)  s.t. Σp ≤ budget，各子流比特 ≤ caps[group]
    解为 p_j = (w_j·min(L, L*_group) − 1/a_j)^+

    Returns:
        (powers, level, sat_levels)：level 为 inf 表示所有子流都已饱和、预算有剩余
    """
    n = len(weights)
    if n == 0 or budget <= 0:
        return np.zeros(n), 0.0, np.full(n, math.inf)

    sat_levels = np.empty(n)
    for g in np.unique(groups):
        members = groups == g
        sat_levels[members] = saturation_level(weights[members], inv_gain[members], float(caps[g]))

    # 全部饱和仍不超预算：不必用满
    if np.all(np.isfinite(sat_levels)):
        saturated = _power_at_level(math.inf, weights, inv_gain, sat_levels)
        if saturated.sum() <= budget:
            return saturated, math.inf, sat_levels

    thresholds = inv_gain / weights
    breakpoints = np.unique(np.concatenate([thresholds, sat_levels[np.isfinite(sat_levels)]]))
    totals = np.array([_power_at_level(b, weights, inv_gain, sat_levels).sum() for b in breakpoints])

    above = np.nonzero(totals >= budget)[0]
    if above.size:
        k = int(above[0])
        hi = breakpoints[k]
        lo = breakpoints[k - 1] if k > 0 else hi
        lo_total = totals[k - 1] if k > 0 else 0.0
        if hi == lo:
            level = hi
        else:
            # 相邻断点之间 P(L) 是线性的
            level = lo + (budget - lo_total) * (hi - lo) / (totals[k] - lo_total)
    else:
        lo = breakpoints[-1]
        slope = float(np.sum(weights[(sat_levels > lo) & (thresholds <= lo)]))
        level = lo + (budget - totals[-1]) / slope

    powers = _power_at_level(level, weights, inv_gain, sat_levels)
    total = powers.sum()
    if total > budget:
        powers = powers * (budget / total)
    return powers, level, sat_levels


def _kkt_residual(powers, weights, inv_gain, level, sat_levels) -> float:
    """未饱和RB的边际效用相对水位 1/(L·ln2) 的最大相对偏差"""
    if not math.isfinite(level) or level <= 0 or len(powers) == 0:
        return 0.0
    nu = 1.0 / (level * LN2)
    free = sat_levels > level
    marginal = weights / ((inv_gain + powers) * LN2)
    active = free & (powers > 0)
    residual = 0.0
    if np.any(active):
        residual = float(np.max(np.abs(marginal[active] - nu)) / nu)
    idle = free & (powers <= 0)
    if np.any(idle):
        residual = max(residual, float(np.max(np.maximum(marginal[idle] - nu, 0.0)) / nu))
    return residual


def rb_bits(problem: TTIProblem, power: np.ndarray, noise_power: float) -> np.ndarray:
    """每个活跃RB本TTI交付的比特；uRLLC RB 扣除有限码长惩罚"""
    spectral = np.log2(1.0 + power * problem.gain / noise_power)
    spectral = np.where(problem.is_urllc, np.maximum(spectral - LOG2_E * problem.psi, 0.0), spectral)
    return problem.weight * spectral


def _per_subflow(problem: TTIProblem, values: np.ndarray) -> np.ndarray:
    num_rus, num_users = problem.backlog.shape
    flat = np.bincount(problem.ru * num_users + problem.user, weights=values, minlength=num_rus * num_users)
    return flat.reshape(num_rus, num_users)


def solve_power_tti(problem: TTIProblem, config: SystemConfig,
                    held_power: Optional[np.ndarray] = None) -> PowerSolveOutcome:
    """
    求解单TTI功率分配

    Args:
        problem: 活跃RB、真实增益与剩余积压
        config: 系统配置（P_max、N0、Γ0、Z_ur）
        held_power: 与活跃RB对齐，非 NaN 的条目沿用给定功率，只对其余条目求解

    Returns:
        PowerSolveOutcome: 分配满足盒约束和每RU预算；阶段A超预算的RU标记为不可行
    """
    num_rus, num_users = problem.backlog.shape
    n = problem.num_active
    held = np.zeros(n, dtype=bool) if held_power is None else ~np.isnan(held_power)
    power = np.where(held, held_power, 0.0) if held_power is not None else np.zeros(n)
    capacity_power = power.copy()
    infeasible = []
    residual = 0.0
    noise = config.noise_power
    budget = config.max_power_per_ru
    inv_gain = noise / problem.gain if n else np.zeros(0)
    held_bits = _per_subflow(problem, np.where(held, rb_bits(problem, power, noise), 0.0))

    for ru in range(num_rus):
        on_ru = problem.ru == ru
        if not np.any(on_ru):
            continue
        # 保持的功率来自同一预算下的可行分配，求和误差不计
        fixed = min(float(power[on_ru & held].sum()), budget)

        # 阶段A: uRLLC 最小功率
        urllc_idx = np.nonzero(on_ru & problem.is_urllc & ~held)[0]
        for j in urllc_idx:
            power[j] = min_power_for_packet(
                problem.gain[j], problem.rb_bandwidth[j], problem.tti_duration[j],
                config.packet_size_urllc, config.urllc_snr_floor, noise, problem.psi[j])
        phase_a = fixed + float(power[urllc_idx].sum())
        if phase_a > budget:
            power[on_ru] = 0.0
            capacity_power[on_ru] = 0.0
            infeasible.append(ru)
            logger.debug(f"RU {ru}: uRLLC minimum power {phase_a:.4g} W exceeds budget {budget:.4g} W")
            continue
        capacity_power[urllc_idx] = power[urllc_idx]

        # 阶段B: eMBB 带上限注水
        embb_idx = np.nonzero(on_ru & ~problem.is_urllc & ~held)[0]
        if embb_idx.size == 0:
            continue
        residual_budget = max(budget - phase_a, 0.0)
        users = problem.user[embb_idx]
        caps = np.maximum(problem.backlog[ru] - held_bits[ru], 0.0)
        p_embb, level, sat_levels = capped_water_filling(
            problem.weight[embb_idx], inv_gain[embb_idx], users, caps, residual_budget)
        power[embb_idx] = p_embb
        residual = max(residual, _kkt_residual(p_embb, problem.weight[embb_idx], inv_gain[embb_idx],
                                               level, sat_levels))

        p_uncapped, _, _ = capped_water_filling(
            problem.weight[embb_idx], inv_gain[embb_idx], users,
            np.full(num_users, math.inf), residual_budget)
        capacity_power[embb_idx] = p_uncapped

    bits = rb_bits(problem, power, noise)
    served = np.minimum(_per_subflow(problem, bits), problem.backlog)
    capacity = _per_subflow(problem, rb_bits(problem, capacity_power, noise))

    allocation = PowerAllocation(
        slice_index=problem.slice_index, rb=problem.rb, ru=problem.ru, user=problem.user, power=power)
    return PowerSolveOutcome(
        allocation=allocation,
        served_bits=served,
        capacity_bits=capacity,
        feasible=not infeasible,
        infeasible_rus=tuple(infeasible),
        kkt_residual=residual,
    )


@dataclass(frozen=True)
class FeasibilityReport:
    """帧末可行性：需求违约 (m, u, demand, served) 与队列违约 (m, total)"""
    demand_breaches: List[Tuple[int, int, float, float]] = field(default_factory=list)
    queue_breaches: List[Tuple[int, float]] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.demand_breaches and not self.queue_breaches

    @property
    def num_breaches(self) -> int:
        return len(self.demand_breaches) + len(self.queue_breaches)


def frame_feasibility(served_bits: np.ndarray, phi: np.ndarray, packets: np.ndarray,
                      queues: np.ndarray, config: SystemConfig) -> FeasibilityReport:
    """
    帧末检查

    Args:
        served_bits: 本帧各子流累计服务比特 (M, U)
        phi: 本帧分流比例 (M, U)
        packets: 本帧各用户到达包数 (U,)
        queues: 帧末队列 (M, U)

    需求 φ·λ·Z 严格检查（仅 FEASIBILITY_SLACK 的浮点容差），每RU队列总和 ≤ q_max 为非严格
    """
    demand = np.asarray(phi) * (np.asarray(packets) * config.packet_bits)[None, :]
    served_bits = np.asarray(served_bits)
    demand_breaches = [
        (int(m), int(u), float(demand[m, u]), float(served_bits[m, u]))
        for m, u in np.argwhere((demand > 0) & (served_bits + FEASIBILITY_SLACK < demand))
    ]
    totals = np.asarray(queues).sum(axis=1)
    queue_breaches = [(int(m), float(totals[m])) for m in np.nonzero(totals > config.queue_cap)[0]]
    return FeasibilityReport(demand_breaches=demand_breaches, queue_breaches=queue_breaches)
