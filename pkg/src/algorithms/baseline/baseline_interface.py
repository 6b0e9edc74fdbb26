"""
对比方案统一接口
定义所有方案的标识、结果数据结构与抽象基类
"""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

try:
    from core.system_config import SystemConfig
    from simulation.metrics import MetricsSeries
except ImportError:
    from ...core.system_config import SystemConfig
    from ...simulation.metrics import MetricsSeries

logger = logging.getLogger(__name__)


class SchemeId(Enum):
    PROPOSED = 'proposed'
    UNIFORM_PHI = 'uniform_phi'
    FIXED_NUMEROLOGY = 'fixed_numerology'
    RELAXED_UPPER_BOUND = 'relaxed_upper_bound'
    BRUTE_FORCE = 'brute_force'

    @classmethod
    def parse(cls, name: str) -> 'SchemeId':
        try:
            return cls(name)
        except ValueError:
            raise ValueError(f"unknown scheme '{name}'; expected one of {[s.value for s in cls]}") from None


@dataclass
class SchemeResult:
    """单个种子上一个方案的结果"""
    scheme: SchemeId
    seed: int
    metrics: MetricsSeries
    success: bool
    computation_time: float
    metadata: Dict = field(default_factory=dict)
    error: Optional[str] = None


class BaselineScheme(ABC):
    """方案抽象基类：给定种子，在若干功率点上产出逐帧指标"""

    scheme_id: SchemeId

    def __init__(self, config: SystemConfig, options: Optional[Dict] = None):
        self.config = config
        self.options = options or {}
        self.name = self.scheme_id.value
        self.execution_stats = {
            'total_time': 0.0,
            'total_runs': 0,
            'successful_runs': 0,
            'failed_runs': 0,
        }

    @abstractmethod
    def run_seed(self, seed: int, power_points: Optional[Sequence[float]] = None) -> MetricsSeries:
        """
        在单个种子上运行方案

        Args:
            seed: 随机种子，决定拓扑、信道与到达（与其它方案配对）
            power_points: 功率预算 (dBm) 列表；None 表示只用配置中的 P_max

        Returns:
            MetricsSeries: 每个功率点每帧一行
        """

    def power_configs(self, power_points: Optional[Sequence[float]]) -> List[SystemConfig]:
        if power_points is None:
            return [self.config]
        return [self.config.with_power_dbm(float(p)) for p in power_points]

    def run_scheme(self, seeds: Sequence[int], power_points: Optional[Sequence[float]] = None) -> List[SchemeResult]:
        """在所有种子上运行；单个种子的失败记录在结果中，不中断其它种子"""
        print(f"🚀 开始运行 {self.name} 方案")
        print(f"   种子: {list(seeds)}")

        start_time = time.time()
        results = []
        for seed in seeds:
            seed_start = time.time()
            try:
                metrics = self.run_seed(seed, power_points)
                result = SchemeResult(self.scheme_id, seed, metrics, True, time.time() - seed_start)
            except Exception as e:
                logger.exception(f"{self.name} failed on seed {seed}")
                result = SchemeResult(self.scheme_id, seed, MetricsSeries(), False,
                                      time.time() - seed_start, error=str(e))
            results.append(result)

            self.execution_stats['total_runs'] += 1
            if result.success:
                self.execution_stats['successful_runs'] += 1
            else:
                self.execution_stats['failed_runs'] += 1

        total_time = time.time() - start_time
        self.execution_stats['total_time'] += total_time

        success_count = sum(1 for r in results if r.success)
        print(f"✅ {self.name} 方案完成 (耗时: {total_time:.2f}s)")
        print(f"   成功率: {success_count}/{len(results)}")
        return results

    def get_scheme_info(self) -> Dict:
        return {
            'name': self.name,
            'description': self.__doc__ or f"{self.name} 方案",
            'options': dict(self.options),
            'execution_stats': self.execution_stats.copy(),
        }

    def get_performance_metrics(self, results: List[SchemeResult]) -> Dict:
        """跨种子汇总：均值指标与计算时间"""
        if not results:
            return {}
        successful = [r for r in results if r.success]
        metrics = {
            'scheme': self.name,
            'total_seeds': len(results),
            'successful_seeds': len(successful),
            'failed_seeds': len(results) - len(successful),
        }
        if successful:
            merged = MetricsSeries.concat(r.metrics for r in successful)
            metrics.update({
                'embb_throughput_bps': merged.mean('embb_throughput_bps'),
                'worst_urllc_latency_s': merged.mean('worst_urllc_latency_s'),
                'avg_queue_bits': merged.mean('avg_queue_bits'),
                'reward': merged.mean('reward'),
                'feasible_ratio': merged.mean('feasible'),
                'avg_computation_time': sum(r.computation_time for r in successful) / len(successful),
            })
        return metrics
