"""
穷举最优（仅用于小规模实例）
枚举所有 RB 分配，逐个执行一帧，取满足约束且效用最小者
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

try:
    from core.errors import SearchSpaceTooLarge
    from core.system_config import SystemConfig
    from radio.assignment import RBAssignment
    from algorithms.flow_split import uniform_flow_split
    from algorithms.ddqn.constraints import check_constraints
    from simulation.frame_loop import FrameContext, FrameInputs, FrameOutcome, frame_quotas, run_frame
except ImportError:
    from ...core.errors import SearchSpaceTooLarge
    from ...core.system_config import SystemConfig
    from ...radio.assignment import RBAssignment
    from ..flow_split import uniform_flow_split
    from ..ddqn.constraints import check_constraints
    from ...simulation.frame_loop import FrameContext, FrameInputs, FrameOutcome, frame_quotas, run_frame

logger = logging.getLogger(__name__)

__all__ = ['BRUTE_FORCE_LIMIT', 'BruteForceResult', 'search_space_size', 'brute_force_optimum']

BRUTE_FORCE_LIMIT = 10 ** 7


@dataclass(frozen=True)
class BruteForceResult:
    """assignment 为 None 表示没有满足约束的分配"""
    assignment: Optional[RBAssignment]
    objective: float
    outcome: Optional[FrameOutcome]
    evaluated: int
    feasible_count: int
    search_space: int


def search_space_size(ctx: FrameContext) -> int:
    """(1 + M·U)^(Σ F_i·T_i)"""
    config = ctx.config
    heads = sum(s.num_resources for s in ctx.grid.slices)
    return (1 + config.num_rus * config.num_users) ** heads


def brute_force_optimum(config: SystemConfig, inputs: FrameInputs, queues: Optional[np.ndarray] = None,
                        phi: Optional[np.ndarray] = None, limit: int = BRUTE_FORCE_LIMIT,
                        ctx: Optional[FrameContext] = None) -> BruteForceResult:
    """
    穷举一帧的最优 RB 分配

    Args:
        config: 系统配置
        inputs: 本帧信道与到达
        queues: 帧初队列，缺省为全零
        phi: 分流，缺省为均匀
        limit: 搜索空间上限

    Returns:
        BruteForceResult: 效用相等时保留字典序最小的分配

    Raises:
        SearchSpaceTooLarge: 搜索空间超过 limit
    """
    ctx = ctx if ctx is not None else FrameContext.build(config)
    size = search_space_size(ctx)
    if size > limit:
        raise SearchSpaceTooLarge(size, limit)

    queues = np.zeros((config.num_rus, config.num_users)) if queues is None else queues
    phi = uniform_flow_split(config.num_rus, config.num_users).phi if phi is None else phi
    frame_quota = frame_quotas(ctx, inputs.arrivals)
    packets = inputs.arrivals.packets
    split = ctx.grid.embb.num_resources
    choices_per_head = range(1 + config.num_rus * config.num_users)
    heads = sum(s.num_resources for s in ctx.grid.slices)

    best_assignment, best_outcome, best_objective = None, None, math.inf
    evaluated = feasible_count = 0
    for flat in itertools.product(choices_per_head, repeat=heads):
        evaluated += 1
        assignment = RBAssignment.from_choices((flat[:split], flat[split:]), ctx.grid,
                                               config.num_rus, config.num_users)
        if check_constraints(assignment, frame_quota, ctx.grid, packets, config):
            continue
        outcome = run_frame(ctx, queues, phi, assignment, inputs)
        if outcome.infeasible_ticks:
            continue
        feasible_count += 1
        # 严格改进才替换，保证确定性
        if outcome.utility < best_objective:
            best_assignment, best_outcome, best_objective = assignment, outcome, outcome.utility

    logger.info(f"brute force: {evaluated} assignments, {feasible_count} feasible, best {best_objective:.6g}")
    return BruteForceResult(
        assignment=best_assignment,
        objective=best_objective,
        outcome=best_outcome,
        evaluated=evaluated,
        feasible_count=feasible_count,
        search_space=size,
    )
