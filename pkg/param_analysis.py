#!/usr/bin/env python3
"""
参数敏感性分析
功率预算扫描与 uRLLC 带宽比例 α 扫描，检查吞吐/队列随功率的单调趋势
"""

import sys
import time
from pathlib import Path
from datetime import datetime

import numpy as np

# 添加项目路径
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root / 'src'))

from config import load_config, scenario_path
from core.errors import TrafficSteeringError
from algorithms.baseline import ProposedScheme, RelaxedUpperBoundScheme
from simulation import MetricsSeries, require_valid
from output import ResultExporter


class ParameterAnalysis:
    def __init__(self, base_config, options=None):
        self.base_config = base_config
        self.options = options or {}

    def run_schemes(self, config, power_points):
        """所提方案与松弛上界在同一组种子上的指标"""
        seeds = list(config.seeds)
        series = []
        for scheme in (ProposedScheme(config, self.options), RelaxedUpperBoundScheme(config, self.options)):
            series.extend(r.metrics for r in scheme.run_scheme(seeds, power_points) if r.success)
        return MetricsSeries.concat(series)

    def check_monotone(self, aggregate, scheme, column, increasing, max_inversions=1):
        """按功率排序后检查均值趋势，采样噪声最多造成 max_inversions 次反转"""
        values = aggregate[aggregate['scheme'] == scheme].sort_values('p_max_dbm')[f"{column}_mean"].to_numpy()
        steps = np.diff(values) if increasing else -np.diff(values)
        inversions = int(np.count_nonzero(steps < 0))
        ok = inversions <= max_inversions
        trend = '上升' if increasing else '下降'
        print(f"   {'✅' if ok else '⚠️ '} {scheme} {column} 随功率{trend} (反转 {inversions} 次): "
              f"{', '.join(f'{v:.4g}' for v in values)}")
        return ok

    def analyze_power(self):
        """功率预算扫描"""
        print("\n📊 分析功率预算 P_max")
        power_points = list(self.base_config.power_sweep_dbm)
        print(f"   测试值: {power_points} dBm")
        series = self.run_schemes(self.base_config, power_points)
        aggregate = series.aggregate()

        print("\n🔬 单调性检查:")
        for scheme in sorted(aggregate['scheme'].unique()):
            self.check_monotone(aggregate, scheme, 'embb_throughput_bps', increasing=True)
            self.check_monotone(aggregate, scheme, 'avg_queue_bits', increasing=False)
        return series

    def analyze_alpha(self, alpha_values=(0.2, 0.4, 0.6, 0.8)):
        """uRLLC 带宽比例 α 扫描（配置中的 P_max）"""
        print("\n📊 分析uRLLC带宽比例 α")
        print(f"   测试值: {list(alpha_values)}")
        results = {}
        for alpha in alpha_values:
            print(f"   测试 α={alpha}...")
            try:
                config = self.base_config.with_overrides(alpha=alpha)
                require_valid(config)
                start_time = time.time()
                series = self.run_schemes(config, None)
                proposed = series.for_scheme(ProposedScheme.scheme_id.value)
                results[alpha] = {
                    'throughput_bps': proposed.mean('embb_throughput_bps'),
                    'latency_s': proposed.mean('worst_urllc_latency_s'),
                    'avg_queue_bits': proposed.mean('avg_queue_bits'),
                    'reward': proposed.mean('reward'),
                    'feasible': proposed.mean('feasible'),
                    'execution_time': time.time() - start_time,
                }
                print(f"     吞吐: {results[alpha]['throughput_bps'] / 1e6:.4f} Mbps, "
                      f"时延: {results[alpha]['latency_s'] * 1e3:.4f} ms, "
                      f"可行率: {results[alpha]['feasible']:.1%}")
            except TrafficSteeringError as e:
                print(f"     ❌ 失败: {e}")
                results[alpha] = {'error': str(e)}
        return self.find_best_parameter('alpha', results)

    def find_best_parameter(self, param_name, results):
        """按平均奖励选最优值"""
        valid_results = {k: v for k, v in results.items() if 'error' not in v}
        if not valid_results:
            print(f"   ❌ {param_name}参数测试全部失败")
            return None, None

        best_value = max(valid_results, key=lambda x: (valid_results[x]['reward'], valid_results[x]['feasible']))
        best_result = valid_results[best_value]
        print(f"\n🎯 最优{param_name}值: {best_value}")
        print(f"   平均奖励: {best_result['reward']:.4f}")
        print(f"   可行帧比例: {best_result['feasible']:.1%}")
        return best_value, best_result

    def run_full_analysis(self):
        print("🚀 参数敏感性分析")
        print("=" * 60)
        exporter = ResultExporter('results')
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")

        series = self.analyze_power()
        best_alpha, best_result = self.analyze_alpha()

        try:
            metrics_path = exporter.export_metrics(series, 'power_sweep', timestamp)
            aggregate_path = exporter.export_aggregate(series, 'power_sweep', timestamp)
            extra = {'best_alpha': best_alpha}
            if best_result:
                extra.update({f"best_alpha_{k}": v for k, v in best_result.items()})
            report_path = exporter.generate_summary_report(series, self.base_config, extra, timestamp)
            print(f"\n📊 参数分析结果已保存:")
            print(f"   数据文件: {metrics_path}")
            print(f"   聚合文件: {aggregate_path}")
            print(f"   报告文件: {report_path}")
        except OSError as e:
            print(f"⚠️  结果导出失败: {e}")
        return series, best_alpha


def main():
    """主函数"""
    print("🎯 ORAN流量引导参数分析工具")
    config_file = sys.argv[1] if len(sys.argv) > 1 else scenario_path('quick')
    config = load_config(config_file)

    analyzer = ParameterAnalysis(config)
    analyzer.run_full_analysis()

    print("\n✅ 参数分析完成!")


if __name__ == "__main__":
    main()
