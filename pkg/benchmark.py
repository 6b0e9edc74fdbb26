#!/usr/bin/env python3
"""
方案对比基准测试
所有方案在同一组种子、同一功率预算上配对比较，并核对：
  松弛上界的吞吐不低于其它方案
  所提方案的吞吐不低于均匀分流，且至少为固定参数集的 1.10 倍
  所提方案的学习曲线末段高于起始段
"""

import math
import sys
from pathlib import Path
from datetime import datetime

import numpy as np

# 添加项目路径
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root / 'src'))

from config import load_config, scenario_path
from algorithms.baseline import BenchmarkManager, DEFAULT_SCHEMES, SchemeId


def learning_gain(curve):
    """末 10% 与前 10% 回合平均奖励之差占曲线极差的比例；平坦曲线记为0"""
    curve = np.asarray(curve, dtype=float)
    if curve.size < 2:
        return 0.0
    span = float(curve.max() - curve.min())
    if span <= 0:
        return 0.0
    k = max(1, curve.size // 10)
    return float(curve[-k:].mean() - curve[:k].mean()) / span


class SchemeBenchmark:
    def __init__(self, config, options=None):
        self.config = config
        self.manager = BenchmarkManager(config, options or {})

    def check_bound(self, series):
        """逐帧核对：松弛上界的 eMBB 吞吐不低于任一可行方案"""
        frame = series.frame
        bound = frame[frame['scheme'] == SchemeId.RELAXED_UPPER_BOUND.value]
        if bound.empty:
            print("⚠️  未运行松弛上界，跳过核对")
            return True
        keys = ['seed', 'p_max_dbm', 'frame']
        joined = frame[frame['scheme'] != SchemeId.RELAXED_UPPER_BOUND.value].merge(
            bound[keys + ['embb_throughput_bps']], on=keys, suffixes=('', '_bound'))
        # 松弛界的积压跨帧按流体传递，逐帧吞吐只在首帧严格可比，故比较回合累计
        totals = joined.groupby(['scheme', 'seed', 'p_max_dbm'])[['embb_throughput_bps', 'embb_throughput_bps_bound']].sum()
        breaches = totals[totals['embb_throughput_bps'] > totals['embb_throughput_bps_bound'] * (1 + 1e-9)]
        if breaches.empty:
            print(f"✅ 松弛上界核对通过 ({len(totals)} 个回合)")
            return True
        print(f"❌ 松弛上界被超过 {len(breaches)} 次:")
        print(breaches.to_string())
        return False

    def check_ordering(self, series, margin=1.10, min_seeds=5):
        """
        配对种子上的平均 eMBB 吞吐：所提方案不低于均匀分流，且不低于固定参数集的 margin 倍

        只统计三个方案都成功运行的 (功率, 种子)；种子数不足 min_seeds 视为未通过
        """
        proposed = SchemeId.PROPOSED.value
        rivals = {SchemeId.UNIFORM_PHI.value: 1.0, SchemeId.FIXED_NUMEROLOGY.value: margin}
        frame = series.frame
        present = [name for name in rivals if name in set(frame['scheme'])]
        if proposed not in set(frame['scheme']) or not present:
            print("⚠️  缺少所提方案或对比方案，跳过排序核对")
            return True

        per_seed = frame.groupby(['p_max_dbm', 'seed', 'scheme'])['embb_throughput_bps'].mean().unstack('scheme')
        paired = per_seed.dropna(subset=[proposed] + present)
        if paired.empty:
            print("❌ 没有三个方案都成功的种子")
            return False
        ok = True
        for p_max_dbm, table in paired.groupby(level='p_max_dbm'):
            seeds = len(table)
            means = table.mean()
            for name in present:
                passed = seeds >= min_seeds and means[proposed] >= rivals[name] * means[name]
                ok = ok and passed
                print(f"   {'✅' if passed else '❌'} {p_max_dbm:.1f} dBm, {seeds} 个种子: "
                      f"{proposed} {means[proposed] / 1e6:.4f} Mbps vs "
                      f"{rivals[name]:.2f} × {name} {rivals[name] * means[name] / 1e6:.4f} Mbps")
        return ok

    def check_learning(self, curves, threshold=0.2, min_passing=None):
        """
        学习曲线核对：末 10% 回合的平均奖励比前 10% 高出至少 threshold 倍曲线极差

        Args:
            curves: 种子 -> 每回合平均奖励
            min_passing: 需通过的种子数，缺省为 3/4（向上取整）
        """
        if not curves:
            print("⚠️  没有学习曲线，跳过核对")
            return True
        gains = {seed: learning_gain(curve) for seed, curve in curves.items()}
        needed = math.ceil(0.75 * len(gains)) if min_passing is None else min_passing
        passing = sum(gain >= threshold for gain in gains.values())
        ok = passing >= needed
        for seed, gain in sorted(gains.items()):
            print(f"   {'✅' if gain >= threshold else '⚠️ '} 种子 {seed}: 奖励提升 {gain:.1%} 极差")
        print(f"   {'✅' if ok else '❌'} 学习曲线核对: {passing}/{len(gains)} 个种子通过 (需要 {needed})")
        return ok

    def display_results(self, results):
        print("\n" + "=" * 90)
        print("📊 方案对比结果")
        print("=" * 90)
        print(self.manager.generate_comparison_table(results))
        print("=" * 90)

    def run_benchmark(self, seeds=None, schemes=None):
        print("🎯 开始方案对比基准测试")
        print("=" * 60)
        seeds = list(seeds) if seeds is not None else list(self.config.seeds)
        results = self.manager.run_benchmark(seeds, [self.config.max_power_dbm], schemes or DEFAULT_SCHEMES)
        self.display_results(results)
        print("\n🔬 结果核对:")
        self.check_bound(results['series'])
        self.check_ordering(results['series'])
        proposed = self.manager.schemes.get(SchemeId.PROPOSED)
        if proposed is not None:
            self.check_learning({seed: r.learning_curve for seed, r in proposed.trained.items()})

        try:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            output_dir = Path('results') / f"benchmark_{timestamp}"
            self.manager.save_results(results, str(output_dir))
            print(f"\n📊 结果已导出: {output_dir}")
        except OSError as e:
            print(f"⚠️  导出失败: {e}")
        return results


def main():
    """主函数"""
    print("🔧 ORAN流量引导方案对比")
    config_file = sys.argv[1] if len(sys.argv) > 1 else scenario_path('quick')
    config = load_config(config_file)
    print(f"   配置: {config_file}")
    benchmark = SchemeBenchmark(config)
    benchmark.run_benchmark()
    print("\n✅ 基准测试完成!")


if __name__ == "__main__":
    main()
