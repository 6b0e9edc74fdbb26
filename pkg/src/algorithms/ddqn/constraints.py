"""
RB分配的约束检查
uRLLC 溢出配额、eMBB 复用配额、uRLLC 时延预算（含未调度用户）与正交性
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Union

import numpy as np

try:
    from core.rb_grid import RBGrid
    from core.system_config import SystemConfig, EMBB_SLICE, URLLC_SLICE
    from radio.assignment import RBAssignment, orthogonality_breaches
    from radio.latency import worst_urllc_latency
    from radio.slicing import SliceQuotas, overflow_window_ttis
except ImportError:
    from ...core.rb_grid import RBGrid
    from ...core.system_config import SystemConfig, EMBB_SLICE, URLLC_SLICE
    from ...radio.assignment import RBAssignment, orthogonality_breaches
    from ...radio.latency import worst_urllc_latency
    from ...radio.slicing import SliceQuotas, overflow_window_ttis

__all__ = ['ViolationKind', 'Violation', 'check_constraints']


class ViolationKind(Enum):
    URLLC_OVERFLOW_QUOTA = "urllc_overflow_quota"
    EMBB_REUSE_QUOTA = "embb_reuse_quota"
    LATENCY_BUDGET = "latency_budget"
    UNSCHEDULED = "unscheduled"
    ORTHOGONALITY = "orthogonality"


@dataclass(frozen=True)
class Violation:
    """一次约束违约；user 为全局用户索引，正交性违约时为 None"""
    kind: ViolationKind
    user: Optional[int]
    required: float
    actual: float

    def __str__(self):
        who = f"user {self.user}" if self.user is not None else "grid"
        return f"{self.kind.value} ({who}): required {self.required:g}, got {self.actual:g}"


def check_constraints(assignment: Union[RBAssignment, Sequence[np.ndarray]], quotas: SliceQuotas,
                      grid: RBGrid, packets: np.ndarray, config: SystemConfig) -> List[Violation]:
    """
    检查一帧的RB分配

    Args:
        assignment: RBAssignment，或每切片的二值张量 (M, U, F_i, T_i)
        quotas: 本帧配额
        grid: RB网格
        packets: 本帧各用户到达包数 (U,)
        config: 系统配置

    Returns:
        List[Violation]: 每个违约实例一条；二值输入存在正交性冲突时只报告冲突
    """
    if not isinstance(assignment, RBAssignment):
        breaches = orthogonality_breaches(assignment)
        if breaches:
            return [Violation(ViolationKind.ORTHOGONALITY, None, 1, 2) for _ in breaches]
        assignment = RBAssignment.from_binary(assignment)

    violations = []
    packets = np.asarray(packets)

    # uRLLC 溢出到 eMBB 切片，须落在时延窗口内
    window = overflow_window_ttis(grid, config.latency_budget)
    for idx, user in enumerate(config.urllc_user_ids):
        required = int(quotas.e_ur[idx])
        if required <= 0:
            continue
        actual = assignment.count(EMBB_SLICE, int(user), tti_limit=window)
        if actual < required:
            violations.append(Violation(ViolationKind.URLLC_OVERFLOW_QUOTA, int(user), required, actual))

    # eMBB 复用 uRLLC 切片的剩余RB
    for idx, user in enumerate(config.embb_user_ids):
        required = int(quotas.e_em[idx])
        if required <= 0:
            continue
        actual = assignment.count(URLLC_SLICE, int(user))
        if actual < required:
            violations.append(Violation(ViolationKind.EMBB_REUSE_QUOTA, int(user), required, actual))

    report = worst_urllc_latency(assignment, grid, config, packets[config.embb_users:])
    # 时延预算不留容差：未受罚的帧时延 ≤ D_ur 严格成立
    budget = config.latency_budget
    for idx, user in enumerate(report.user_ids):
        if report.unscheduled[idx]:
            violations.append(Violation(ViolationKind.UNSCHEDULED, int(user), config.latency_budget, np.inf))
        elif not np.isnan(report.latency[idx]) and report.latency[idx] > budget:
            violations.append(Violation(ViolationKind.LATENCY_BUDGET, int(user),
                                        config.latency_budget, float(report.latency[idx])))
    return violations
