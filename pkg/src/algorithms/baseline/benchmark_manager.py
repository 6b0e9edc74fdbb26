"""
基准测试管理器
在配对种子与功率点上运行多方案对比，可选多进程并行
"""

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence, Tuple

try:
    from core.system_config import SystemConfig
    from simulation.metrics import MetricsSeries
    from algorithms.baseline.baseline_interface import BaselineScheme, SchemeId, SchemeResult
    from algorithms.baseline.learned_schemes import ProposedScheme, UniformPhiScheme, FixedNumerologyScheme
    from algorithms.baseline.oracle_schemes import RelaxedUpperBoundScheme, BruteForceScheme
except ImportError:
    from ...core.system_config import SystemConfig
    from ...simulation.metrics import MetricsSeries
    from .baseline_interface import BaselineScheme, SchemeId, SchemeResult
    from .learned_schemes import ProposedScheme, UniformPhiScheme, FixedNumerologyScheme
    from .oracle_schemes import RelaxedUpperBoundScheme, BruteForceScheme

logger = logging.getLogger(__name__)

SCHEME_CLASSES = {
    SchemeId.PROPOSED: ProposedScheme,
    SchemeId.UNIFORM_PHI: UniformPhiScheme,
    SchemeId.FIXED_NUMEROLOGY: FixedNumerologyScheme,
    SchemeId.RELAXED_UPPER_BOUND: RelaxedUpperBoundScheme,
    SchemeId.BRUTE_FORCE: BruteForceScheme,
}

# 默认对比的方案（穷举只适用于小实例，需显式指定）
DEFAULT_SCHEMES = (SchemeId.PROPOSED, SchemeId.UNIFORM_PHI, SchemeId.FIXED_NUMEROLOGY, SchemeId.RELAXED_UPPER_BOUND)


def build_scheme(scheme: SchemeId, config: SystemConfig, options: Optional[Dict] = None) -> BaselineScheme:
    return SCHEME_CLASSES[scheme](config, options)


def _run_worker(scheme_name: str, config: SystemConfig, options: Dict, seed: int,
                power_points: Optional[Sequence[float]]) -> Tuple[str, int, MetricsSeries, float, Optional[str]]:
    """工作进程入口：每个 (方案, 种子) 一个独立的仿真世界"""
    start = time.time()
    try:
        scheme = build_scheme(SchemeId(scheme_name), config, options)
        return scheme_name, seed, scheme.run_seed(seed, power_points), time.time() - start, None
    except Exception as e:
        return scheme_name, seed, MetricsSeries(), time.time() - start, f"{type(e).__name__}: {e}"


class BenchmarkManager:
    """基准测试管理器"""

    def __init__(self, config: SystemConfig, options: Optional[Dict[str, Any]] = None):
        self.config = config
        self.options = options or {}
        self.schemes: Dict[SchemeId, BaselineScheme] = {}
        for scheme_id in SCHEME_CLASSES:
            self.register_scheme(build_scheme(scheme_id, config, self.options))

    def register_scheme(self, scheme: BaselineScheme):
        self.schemes[scheme.scheme_id] = scheme

    def run_benchmark(self, seeds: Sequence[int], power_points: Optional[Sequence[float]] = None,
                      schemes: Optional[Sequence[SchemeId]] = None, workers: int = 1) -> Dict[str, Any]:
        """
        运行配对基准测试

        Args:
            seeds: 种子列表，所有方案共享
            power_points: 功率点 (dBm)，None 表示配置中的 P_max
            schemes: 方案列表，缺省为 DEFAULT_SCHEMES
            workers: >1 时每个 (方案, 种子) 在独立进程中运行

        Returns:
            Dict: 方案名 -> {'results': [SchemeResult], 'metrics': dict}，以及 'series' 合并后的指标
        """
        schemes = list(schemes) if schemes is not None else list(DEFAULT_SCHEMES)
        print(f"🚀 开始基准测试")
        print(f"   方案: {', '.join(s.value for s in schemes)}")
        print(f"   种子: {list(seeds)}")
        if power_points is not None:
            print(f"   功率点: {list(power_points)} dBm")

        if workers > 1:
            per_scheme = self._run_parallel(schemes, seeds, power_points, workers)
        else:
            per_scheme = {s: self.schemes[s].run_scheme(seeds, power_points) for s in schemes}

        benchmark_results: Dict[str, Any] = {}
        for scheme_id, results in per_scheme.items():
            scheme = self.schemes[scheme_id]
            errors = [f"seed {r.seed}: {r.error}" for r in results if not r.success]
            entry = {'results': results, 'metrics': scheme.get_performance_metrics(results)}
            if errors:
                entry['error'] = '; '.join(errors)
                print(f"❌ {scheme_id.value} 执行失败: {entry['error']}")
            benchmark_results[scheme_id.value] = entry

        benchmark_results['series'] = MetricsSeries.concat(
            r.metrics for results in per_scheme.values() for r in results if r.success)
        print(f"✅ 基准测试完成")
        return benchmark_results

    def _run_parallel(self, schemes: List[SchemeId], seeds: Sequence[int],
                      power_points: Optional[Sequence[float]], workers: int) -> Dict[SchemeId, List[SchemeResult]]:
        collected: Dict[SchemeId, List[SchemeResult]] = {s: [] for s in schemes}
        with ProcessPoolExecutor(max_workers=min(workers, os.cpu_count() or 1)) as pool:
            futures = [pool.submit(_run_worker, s.value, self.config, self.options, seed, power_points)
                       for s in schemes for seed in seeds]
            for future in as_completed(futures):
                name, seed, series, elapsed, error = future.result()
                scheme_id = SchemeId(name)
                collected[scheme_id].append(
                    SchemeResult(scheme_id, seed, series, error is None, elapsed, error=error))
                print(f"   {'✅' if error is None else '❌'} {name} 种子 {seed} ({elapsed:.1f}s)")
        for results in collected.values():
            results.sort(key=lambda r: r.seed)
        return collected

    def generate_comparison_table(self, benchmark_results: Dict[str, Any]) -> str:
        """生成对比表格（每个方案、功率点一行）"""
        series = benchmark_results.get('series')
        if series is None or not len(series):
            return "没有基准测试结果"

        table = "方案性能对比表\n"
        table += "=" * 96 + "\n"
        table += (f"{'方案':<22} {'P_max(dBm)':<11} {'eMBB吞吐(Mbps)':<16} {'uRLLC时延(ms)':<15} "
                  f"{'平均队列(bits)':<15} {'可行率':<8}\n")
        table += "-" * 96 + "\n"
        for row in series.aggregate().itertuples(index=False):
            table += (f"{row.scheme:<22} {row.p_max_dbm:<11.1f} {row.embb_throughput_bps_mean / 1e6:<16.4f} "
                      f"{row.worst_urllc_latency_s_mean * 1e3:<15.4f} {row.avg_queue_bits_mean:<15.1f} "
                      f"{row.feasible_mean:<8.2%}\n")
        for name, data in benchmark_results.items():
            if name != 'series' and 'error' in data:
                table += f"{name:<22} ERROR: {data['error']}\n"
        table += "=" * 96
        return table

    def generate_detailed_report(self, benchmark_results: Dict[str, Any]) -> str:
        report = "基准测试详细报告\n"
        report += "=" * 60 + "\n\n"
        for name, data in benchmark_results.items():
            if name == 'series':
                continue
            report += f"方案: {name}\n"
            report += "-" * 30 + "\n"
            if 'error' in data:
                report += f"❌ 部分种子失败: {data['error']}\n"
            metrics = data['metrics']
            if metrics.get('successful_seeds'):
                report += f"成功种子数: {metrics['successful_seeds']}/{metrics['total_seeds']}\n"
                report += f"eMBB吞吐: {metrics['embb_throughput_bps'] / 1e6:.4f} Mbps\n"
                report += f"最差uRLLC时延: {metrics['worst_urllc_latency_s'] * 1e3:.4f} ms\n"
                report += f"平均队列: {metrics['avg_queue_bits']:.1f} bits\n"
                report += f"平均奖励: {metrics['reward']:.4f}\n"
                report += f"可行帧比例: {metrics['feasible_ratio']:.2%}\n"
                report += f"平均耗时/种子: {metrics['avg_computation_time']:.2f}s\n"
            report += "\n"
        return report

    def save_results(self, benchmark_results: Dict[str, Any], output_dir: str = "results"):
        """保存逐帧指标、聚合表、对比表与详细报告"""
        try:
            from output.result_exporter import write_metrics
        except ImportError:
            from ...output.result_exporter import write_metrics

        os.makedirs(output_dir, exist_ok=True)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")

        metrics_file = os.path.join(output_dir, f"benchmark_metrics_{timestamp}.csv")
        write_metrics(benchmark_results['series'], metrics_file)

        summary_file = os.path.join(output_dir, f"benchmark_results_{timestamp}.json")
        clean = {name: {'metrics': data['metrics'], 'error': data.get('error')}
                 for name, data in benchmark_results.items() if name != 'series'}
        with open(summary_file, 'w', encoding='utf-8') as f:
            json.dump(clean, f, indent=2, ensure_ascii=False, default=str)

        table_file = os.path.join(output_dir, f"benchmark_table_{timestamp}.txt")
        with open(table_file, 'w', encoding='utf-8') as f:
            f.write(self.generate_comparison_table(benchmark_results))

        report_file = os.path.join(output_dir, f"benchmark_report_{timestamp}.txt")
        with open(report_file, 'w', encoding='utf-8') as f:
            f.write(self.generate_detailed_report(benchmark_results))

        print(f"📊 基准测试结果已保存:")
        print(f"   逐帧指标: {metrics_file}")
        print(f"   汇总结果: {summary_file}")
        print(f"   对比表格: {table_file}")
        print(f"   详细报告: {report_file}")
        return metrics_file, summary_file, table_file, report_file


def run_quick_benchmark(config: SystemConfig, seeds: Sequence[int],
                        schemes: Optional[Sequence[SchemeId]] = None, options: Optional[Dict] = None) -> Dict[str, Any]:
    """快速基准测试的便捷函数"""
    manager = BenchmarkManager(config, options)
    results = manager.run_benchmark(seeds, schemes=schemes)
    print("\n" + manager.generate_comparison_table(results))
    return results
