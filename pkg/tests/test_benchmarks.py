import math

import numpy as np
import pytest

from core.errors import SearchSpaceTooLarge
from core.rb_grid import build_rb_grid
from radio.assignment import RBAssignment
from algorithms.power_allocation import TTIProblem, solve_power_tti
from algorithms.ddqn import check_constraints
from algorithms.baseline import (
    BenchmarkManager, SchemeId, brute_force_optimum, fixed_numerology_config, project_capped_simplex,
    relaxed_frame_bound, relaxed_tick_capacity, search_space_size)
from algorithms.flow_split import uniform_flow_split
from simulation import FrameInputs, generate_trace, run_frame
from traffic.traffic_model import TrafficArrivals


def test_project_capped_simplex():
    inside = np.array([[0.2, 0.3], [0.0, 1.0]])
    np.testing.assert_allclose(project_capped_simplex(inside), inside)
    np.testing.assert_allclose(project_capped_simplex(np.array([[2.0, 0.0]])), [[1.0, 0.0]])
    np.testing.assert_allclose(project_capped_simplex(np.array([[0.8, 0.8]])), [[0.5, 0.5]])
    np.testing.assert_allclose(project_capped_simplex(np.array([[-1.0, 0.4]])), [[0.0, 0.4]])


def test_relaxed_capacity_single_link_closed_form(desk_config):
    gain, weight = 1e-12, 180.0
    budget = desk_config.max_power_per_ru
    relaxed = relaxed_tick_capacity(np.full((1, 1, 1), gain / desk_config.noise_power), np.array([weight]), budget)
    expected = weight * math.log2(1.0 + budget * gain / desk_config.noise_power)
    assert relaxed.certified == pytest.approx(expected, rel=1e-6)
    assert relaxed.converged

    # 与单RB功率分配一致
    problem = TTIProblem(
        slice_index=np.zeros(1, dtype=np.int64), rb=np.zeros(1, dtype=np.int64), ru=np.zeros(1, dtype=np.int64),
        user=np.zeros(1, dtype=np.int64), gain=np.array([gain]), weight=np.array([weight]),
        rb_bandwidth=np.array([180e3]), tti_duration=np.array([1e-3]), psi=np.zeros(1),
        is_urllc=np.zeros(1, dtype=bool), backlog=np.full((1, 1), np.inf))
    assert solve_power_tti(problem, desk_config).served_bits[0, 0] == pytest.approx(relaxed.certified, rel=1e-6)


def test_relaxed_capacity_empty_or_zero_budget():
    assert relaxed_tick_capacity(np.zeros((2, 0, 3)), np.ones(3), 1.0).certified == 0.0
    assert relaxed_tick_capacity(np.ones((1, 1, 1)), np.ones(1), 0.0).certified == 0.0


def test_relaxed_capacity_bounds_integral_assignments(rng):
    gain_ratio = 10.0 ** rng.uniform(1, 4, size=(2, 2, 3))
    weights = np.full(3, 90.0)
    relaxed = relaxed_tick_capacity(gain_ratio, weights, 1.0)
    # 每个RB分给某个 (m,u)，每RU独立注水
    best = 0.0
    choices = [(m, k) for m in range(2) for k in range(2)]
    for combo in np.ndindex(4, 4, 4):
        total = 0.0
        for m in range(2):
            rbs = [j for j, c in enumerate(combo) if choices[c][0] == m]
            if not rbs:
                continue
            a = np.array([gain_ratio[m, choices[combo[j]][1], j] for j in rbs])
            w = weights[rbs]
            p = _water_fill(w, 1.0 / a, 1.0)
            total += float(np.sum(w * np.log2(1.0 + a * p)))
        best = max(best, total)
    assert relaxed.certified >= best * (1 - 1e-9)


def _water_fill(weights, inv_gain, budget):
    lo, hi = 0.0, (budget + inv_gain.sum()) / weights.min()
    for _ in range(200):
        level = (lo + hi) / 2
        if np.maximum(weights * level - inv_gain, 0.0).sum() > budget:
            hi = level
        else:
            lo = level
    return np.maximum(weights * lo - inv_gain, 0.0)


def test_search_space_size(tiny_ctx, desk_ctx):
    assert search_space_size(tiny_ctx) == 625
    assert search_space_size(desk_ctx) == 9 ** 16


def test_brute_force_refuses_large_instances(tiny_config, tiny_ctx, desk_config):
    inputs = generate_trace(tiny_ctx, 0, 0, 1).frames[0]
    with pytest.raises(SearchSpaceTooLarge) as info:
        brute_force_optimum(tiny_config, inputs, limit=100)
    assert info.value.size == 625
    with pytest.raises(SearchSpaceTooLarge):
        brute_force_optimum(desk_config, inputs)


def test_brute_force_zero_arrivals_picks_empty_assignment(tiny_config, tiny_ctx):
    gains = generate_trace(tiny_ctx, 0, 0, 1).frames[0].gains
    arrivals = TrafficArrivals(frame=0, packets=np.zeros(2, dtype=np.int64), packet_bits=tiny_config.packet_bits)
    best = brute_force_optimum(tiny_config, FrameInputs(0, gains, arrivals), ctx=tiny_ctx)
    assert best.evaluated == 625
    assert best.objective == 0.0
    assert best.assignment.num_assigned == 0


@pytest.mark.slow
def test_relaxed_bound_below_brute_force_below_feasible_schemes(tiny_config, tiny_ctx):
    rng = np.random.default_rng(0)
    phi = uniform_flow_split(2, 2).phi
    compared = 0
    # 50 个随机极小实例：每个种子独立的拓扑、信道与到达
    for seed in range(50):
        trace = generate_trace(tiny_ctx, seed, 0, 1)
        for inputs in trace.frames:
            bound = relaxed_frame_bound(tiny_ctx, inputs)
            best = brute_force_optimum(tiny_config, inputs, ctx=tiny_ctx)
            if best.assignment is None:
                continue
            compared += 1
            assert not check_constraints(best.assignment, best.outcome.quotas, tiny_ctx.grid,
                                         inputs.arrivals.packets, tiny_config)
            assert bound.objective <= best.objective + 1e-9
            assert bound.embb_bits >= best.outcome.embb_bits * (1 - 1e-9)

            # 任意可行的整数分配都不优于穷举最优
            for _ in range(20):
                choices = [rng.integers(0, 5, size=2), rng.integers(0, 5, size=2)]
                assignment = RBAssignment.from_choices(choices, tiny_ctx.grid, 2, 2)
                if check_constraints(assignment, best.outcome.quotas, tiny_ctx.grid,
                                     inputs.arrivals.packets, tiny_config):
                    continue
                outcome = run_frame(tiny_ctx, np.zeros((2, 2)), phi, assignment, inputs)
                if outcome.infeasible_ticks:
                    continue
                assert best.objective <= outcome.utility + 1e-12
    assert compared > 0


def test_fixed_numerology_config(full_config):
    config = fixed_numerology_config(full_config)
    grid = build_rb_grid(config)
    assert [(s.num_rbs, s.num_ttis) for s in grid.slices] == [(44, 10), (10, 10)]
    assert config.urllc_window_rounding == 'ceil'
    assert config.fine_ticks == 10


def test_scheme_ids():
    assert SchemeId.parse('relaxed_upper_bound') is SchemeId.RELAXED_UPPER_BOUND
    with pytest.raises(ValueError):
        SchemeId.parse('round_robin')


def test_relaxed_scheme_through_manager(tiny_config):
    manager = BenchmarkManager(tiny_config, {'eval_frames': 3})
    results = manager.run_benchmark([0], None, [SchemeId.RELAXED_UPPER_BOUND])
    series = results['series']
    assert len(series) == 3
    assert series.frame['feasible'].all()
    assert (series.frame['embb_throughput_bps'] >= 0).all()
    assert 'error' not in results['relaxed_upper_bound']


@pytest.mark.slow
def test_learned_and_oracle_schemes_share_traces(tiny_config):
    manager = BenchmarkManager(tiny_config, {'eval_frames': 2, 'epochs': 1})
    results = manager.run_benchmark([0], None, [SchemeId.PROPOSED, SchemeId.BRUTE_FORCE])
    series = results['series']
    assert sorted(series.frame['scheme'].unique()) == ['brute_force', 'proposed']
    assert len(series) == 4
    assert 'error' not in results['proposed']
