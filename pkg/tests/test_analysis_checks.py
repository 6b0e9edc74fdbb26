import numpy as np
import pandas as pd
import pytest

from benchmark import SchemeBenchmark, learning_gain
from config import load_scenario
from param_analysis import ParameterAnalysis
from algorithms.baseline import SchemeId
from simulation import MetricsSeries
from simulation.trainer import train


def _records(scheme, throughputs, p_max_dbm=28.0):
    """每个种子两帧，帧均值等于给定吞吐"""
    return [{
        'frame': frame,
        'scheme': scheme,
        'seed': seed,
        'p_max_dbm': p_max_dbm,
        'embb_throughput_bps': value + (frame - 0.5) * 1e4,
        'worst_urllc_latency_s': 0.25e-3,
        'avg_queue_bits': 100.0,
        'reward': 0.0,
        'feasible': True,
    } for seed, value in enumerate(throughputs) for frame in range(2)]


def _series(proposed, uniform, fixed):
    return MetricsSeries.from_records(
        _records('proposed', proposed) + _records('uniform_phi', uniform) + _records('fixed_numerology', fixed))


def test_ordering_check_on_paired_seeds(desk_config):
    benchmark = SchemeBenchmark(desk_config)
    proposed = [10e6, 11e6, 12e6, 13e6, 14e6]
    assert benchmark.check_ordering(_series(proposed, [11.5e6] * 5, [10e6] * 5))
    # 12 < 1.10 × 11.5
    assert not benchmark.check_ordering(_series(proposed, [11.5e6] * 5, [11.5e6] * 5))
    assert not benchmark.check_ordering(_series(proposed, [12.5e6] * 5, [10e6] * 5))
    # 只有 4 个配对种子
    assert not benchmark.check_ordering(_series(proposed[:4], [1e6] * 4, [1e6] * 4))


def test_ordering_check_uses_only_paired_seeds(desk_config):
    benchmark = SchemeBenchmark(desk_config)
    # 种子 5 只有所提方案运行过，不计入均值
    series = _series([12e6] * 5 + [1e6], [11e6] * 5, [10e6] * 5)
    assert benchmark.check_ordering(series)
    assert not benchmark.check_ordering(series, min_seeds=6)


def test_learning_gain():
    rising = np.linspace(0.0, 1.0, 100)
    assert learning_gain(rising) == pytest.approx(90.0 / 99.0)
    assert learning_gain(rising[::-1]) == pytest.approx(-90.0 / 99.0)
    assert learning_gain(np.full(50, -0.3)) == 0.0
    assert learning_gain([0.5]) == 0.0
    # 不足 10 个回合时首尾各取一个
    assert learning_gain([0.0, 1.0, 0.5]) == pytest.approx(0.5)


def test_learning_check_needs_three_of_four_seeds(desk_config):
    benchmark = SchemeBenchmark(desk_config)
    rising = np.linspace(-1.0, 0.0, 40)
    flat = np.zeros(40)
    assert benchmark.check_learning({0: rising, 1: rising, 2: rising, 3: flat})
    assert not benchmark.check_learning({0: rising, 1: rising, 2: flat, 3: flat})
    assert not benchmark.check_learning({0: rising}, threshold=1.0)


def _aggregate(column, values, powers=(10.0, 22.0, 34.0, 46.0, 16.0)):
    return pd.DataFrame({'scheme': 'proposed', 'p_max_dbm': list(powers), f"{column}_mean": values})


def test_monotone_check_allows_one_inversion(desk_config):
    analysis = ParameterAnalysis(desk_config)
    check = analysis.check_monotone
    # 按功率排序后: 1, 2, 1.9, 3, 4
    assert check(_aggregate('embb_throughput_bps', [1.0, 1.9, 3.0, 4.0, 2.0]), 'proposed',
                 'embb_throughput_bps', increasing=True)
    # 一次大幅反转也只算一次
    assert check(_aggregate('embb_throughput_bps', [1.0, 0.1, 3.0, 4.0, 2.0]), 'proposed',
                 'embb_throughput_bps', increasing=True)
    # 两次小幅反转: 1, 0.99, 2, 1.99, 3
    assert not check(_aggregate('embb_throughput_bps', [1.0, 2.0, 1.99, 3.0, 0.99]), 'proposed',
                     'embb_throughput_bps', increasing=True)
    assert check(_aggregate('avg_queue_bits', [500.0, 300.0, 200.0, 100.0, 400.0]), 'proposed',
                 'avg_queue_bits', increasing=False)
    assert not check(_aggregate('avg_queue_bits', [100.0, 300.0, 200.0, 400.0, 500.0]), 'proposed',
                     'avg_queue_bits', increasing=False)


@pytest.mark.slow
def test_learning_sanity_at_desk_scale(desk_config):
    curves = {seed: train(desk_config, seed).learning_curve for seed in range(4)}
    assert SchemeBenchmark(desk_config).check_learning(curves)


@pytest.mark.slow
def test_scheme_ordering_at_desk_scale():
    config = load_scenario('desk')
    benchmark = SchemeBenchmark(config)
    results = benchmark.manager.run_benchmark(
        range(5), [config.max_power_dbm], [SchemeId.PROPOSED, SchemeId.UNIFORM_PHI, SchemeId.FIXED_NUMEROLOGY])
    assert benchmark.check_ordering(results['series'])
