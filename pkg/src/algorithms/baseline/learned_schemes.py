"""
基于 DDQN 的方案：所提方案、均匀分流、固定参数集
三者共享训练与评估流程，只在分流方式或参数集上不同
"""

import logging
from dataclasses import replace
from typing import Dict, Optional, Sequence

try:
    from core.system_config import SystemConfig, NumerologyConfig
    from simulation.metrics import MetricsSeries
    from simulation.trainer import TrainingResult, train, evaluate
    from algorithms.baseline.baseline_interface import BaselineScheme, SchemeId
except ImportError:
    from ...core.system_config import SystemConfig, NumerologyConfig
    from ...simulation.metrics import MetricsSeries
    from ...simulation.trainer import TrainingResult, train, evaluate
    from .baseline_interface import BaselineScheme, SchemeId

logger = logging.getLogger(__name__)

__all__ = [
    'FIXED_NUMEROLOGY', 'fixed_numerology_config', 'LearnedScheme', 'ProposedScheme',
    'UniformPhiScheme', 'FixedNumerologyScheme', 'run_proposed', 'run_uniform_phi', 'run_fixed_numerology',
]

# 两个切片都用 15 kHz 子载波间隔的参数集
FIXED_NUMEROLOGY = NumerologyConfig(180e3, 1e-3)


def fixed_numerology_config(config: SystemConfig) -> SystemConfig:
    """
    两个切片使用同一参数集 (180 kHz, 1 ms)

    1 ms 的 TTI 长于 0.5 ms 时延预算，时延窗口取上整以保留至少一个 TTI；
    实际时延按 TTI 结束时刻计算，不做强制
    """
    return replace(config, numerologies=(FIXED_NUMEROLOGY, FIXED_NUMEROLOGY), urllc_window_rounding='ceil')


class LearnedScheme(BaselineScheme):
    """每个种子训练一次，再在各功率点上贪婪评估"""

    flow_split = 'heuristic'

    def __init__(self, config: SystemConfig, options: Optional[Dict] = None):
        super().__init__(config, options)
        self.trained: Dict[int, TrainingResult] = {}

    def scheme_config(self, config: SystemConfig) -> SystemConfig:
        return config

    def run_seed(self, seed: int, power_points: Optional[Sequence[float]] = None) -> MetricsSeries:
        base = self.scheme_config(self.config)
        result = self.trained.get(seed)
        if result is None:
            result = train(base, seed, epochs=self.options.get('epochs'), flow_split=self.flow_split,
                           progress_every=self.options.get('progress_every', 0))
            self.trained[seed] = result
            logger.info(f"{self.name}: trained seed {seed} in {result.elapsed:.1f}s")

        series = []
        for config in self.power_configs(power_points):
            series.append(evaluate(result.agents, self.scheme_config(config), [seed], scheme=self.name,
                                   flow_split=self.flow_split, num_frames=self.options.get('eval_frames')))
        return MetricsSeries.concat(series)


class ProposedScheme(LearnedScheme):
    """启发式分流 + 多智能体DDQN + 注水功率分配"""
    scheme_id = SchemeId.PROPOSED


class UniformPhiScheme(LearnedScheme):
    """各RU均匀分流，其余与所提方案相同"""
    scheme_id = SchemeId.UNIFORM_PHI
    flow_split = 'uniform'


class FixedNumerologyScheme(LearnedScheme):
    """两个切片使用相同参数集"""
    scheme_id = SchemeId.FIXED_NUMEROLOGY

    def scheme_config(self, config: SystemConfig) -> SystemConfig:
        return fixed_numerology_config(config)


def run_proposed(config: SystemConfig, seed: int, epochs: Optional[int] = None) -> MetricsSeries:
    return ProposedScheme(config, {'epochs': epochs}).run_seed(seed)


def run_uniform_phi(config: SystemConfig, seed: int, epochs: Optional[int] = None) -> MetricsSeries:
    return UniformPhiScheme(config, {'epochs': epochs}).run_seed(seed)


def run_fixed_numerology(config: SystemConfig, seed: int, epochs: Optional[int] = None) -> MetricsSeries:
    return FixedNumerologyScheme(config, {'epochs': epochs}).run_seed(seed)
