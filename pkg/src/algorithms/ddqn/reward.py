"""
共享奖励
"""

try:
    from core.system_config import SystemConfig
except ImportError:
    from ...core.system_config import SystemConfig

__all__ = ['compute_reward']


def compute_reward(embb_bits: float, worst_latency: float, num_violations: int, config: SystemConfig,
                   power_feasible: bool = True) -> float:
    """
    r = ω·(本帧eMBB服务比特/R0) − (1−ω)·(最差uRLLC时延/τ0)

    有违约或功率不可行时，每次违约累加一次 penalty_value
    """
    if num_violations > 0 or not power_feasible:
        return config.penalty_value * max(num_violations, 1)
    return (config.omega * embb_bits / config.ref_rate
            - (1.0 - config.omega) * worst_latency / config.ref_latency)
