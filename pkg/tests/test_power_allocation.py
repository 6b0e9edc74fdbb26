import itertools
import math

import numpy as np
import pytest

from algorithms.power_allocation import (
    TTIProblem, capped_water_filling, frame_feasibility, min_power_for_packet, rb_bits, saturation_level,
    solve_power_tti)

LN2 = math.log(2.0)


def _problem(gains, users, is_urllc=None, backlog=None, rus=None, num_rus=1, num_users=2,
             rb_bandwidth=180e3, tti_duration=1e-3, psi=0.23):
    n = len(gains)
    return TTIProblem(
        slice_index=np.zeros(n, dtype=np.int64),
        rb=np.arange(n),
        ru=np.zeros(n, dtype=np.int64) if rus is None else np.asarray(rus),
        user=np.asarray(users),
        gain=np.asarray(gains, dtype=float),
        weight=np.full(n, rb_bandwidth * tti_duration),
        rb_bandwidth=np.full(n, rb_bandwidth),
        tti_duration=np.full(n, tti_duration),
        psi=np.full(n, psi),
        is_urllc=np.zeros(n, dtype=bool) if is_urllc is None else np.asarray(is_urllc),
        backlog=np.full((num_rus, num_users), 1e12) if backlog is None else np.asarray(backlog, dtype=float),
    )


def _objective(powers, weights, inv_gain):
    return float(np.sum(weights * np.log2(1.0 + powers / inv_gain)))


def test_min_power_snr_floor_binds():
    psi = 0.23033
    power = min_power_for_packet(1e-10, 720e3, 0.25e-3, 256.0, 3.162, 1e-14, psi)
    required = 2.0 ** (256.0 / 180.0 + psi / LN2) - 1.0
    assert required == pytest.approx(2.374, abs=1e-3)
    assert power == pytest.approx(3.162 * 1e-14 / 1e-10)


def test_min_power_degenerate_cases():
    # Z = βδ、Ψ = 0、Γ0 = 0 时 SNR = 1
    assert min_power_for_packet(2.0, 1e3, 1e-3, 1.0, 0.0, 1.0, 0.0) == pytest.approx(0.5)
    assert min_power_for_packet(1e-10, 720e3, 0.25e-3, 0.0, 3.162, 1e-14, 0.0) == pytest.approx(3.162e-4)


def _simplex_grid(n, budget, points=10_000):
    """预算单纯形 Σp = budget 上的规则网格，点数不超过 points"""
    if n == 1:
        return np.array([[budget]])
    steps = 1
    while math.comb(steps + n, n - 1) <= points:
        steps += 1
    bars = np.array(list(itertools.combinations(range(steps + n - 1), n - 1)))
    edges = np.column_stack([np.full(len(bars), -1), bars, np.full(len(bars), steps + n - 1)])
    return (np.diff(edges, axis=1) - 1) * (budget / steps)


def _grid_search(problem, budget, noise):
    """网格上 Σ_u min(积压_u, Σ_j bits_j) 的最大值；目标对功率单调，只需搜索用满预算的面"""
    grid = _simplex_grid(problem.num_active, budget)
    bits = problem.weight * np.log2(1.0 + grid * problem.gain / noise)
    members = problem.user[:, None] == np.arange(problem.backlog.shape[1])[None, :]
    per_user = np.minimum(bits @ members, problem.backlog[0])
    return float(per_user.sum(axis=1).max())


@pytest.mark.parametrize('capped', [False, True])
def test_water_filling_matches_grid_search(desk_config, capped):
    rng = np.random.default_rng(31 if capped else 30)
    budget = desk_config.max_power_per_ru
    for _ in range(50):
        n = int(rng.integers(1, 7))
        users = rng.integers(0, 2, size=n)
        gains = 10.0 ** rng.uniform(-13, -10, size=n)
        problem = _problem(gains, users)
        outcome = solve_power_tti(problem, desk_config)
        if capped:
            # 积压取不限积压时服务量的一部分，上限必然起作用
            backlog = outcome.served_bits * rng.uniform(0.2, 0.9, size=(1, 2))
            problem = _problem(gains, users, backlog=backlog)
            outcome = solve_power_tti(problem, desk_config)
            assert np.all(outcome.served_bits <= backlog * (1 + 1e-9))
        else:
            assert outcome.allocation.power.sum() == pytest.approx(budget)
            assert outcome.kkt_residual < 1e-6

        achieved = float(outcome.served_bits.sum())
        best = _grid_search(problem, budget, desk_config.noise_power)
        assert achieved >= best * (1 - 1e-9)
        if n <= 2:
            assert achieved == pytest.approx(best, rel=1e-4)


def test_water_filling_kkt(rng):
    for n in range(1, 7):
        weights = rng.uniform(10.0, 100.0, size=n)
        inv_gain = rng.uniform(0.01, 2.0, size=n)
        powers, level, _ = capped_water_filling(weights, inv_gain, np.zeros(n, dtype=np.int64),
                                                np.array([math.inf]), 2.0)
        assert powers.sum() == pytest.approx(2.0)
        assert np.all(powers >= 0)
        nu = 1.0 / (level * LN2)
        marginal = weights / ((inv_gain + powers) * LN2)
        active = powers > 0
        np.testing.assert_allclose(marginal[active], nu, rtol=1e-6)
        assert np.all(marginal[~active] <= nu * (1 + 1e-6))


def test_saturation_level_serves_exactly_the_cap():
    weights = np.array([100.0, 100.0])
    inv_gain = np.array([0.01, 0.02])
    level = saturation_level(weights, inv_gain, 500.0)
    powers = np.maximum(weights * level - inv_gain, 0.0)
    assert _objective(powers, weights, inv_gain) == pytest.approx(500.0)
    assert saturation_level(weights, inv_gain, math.inf) == math.inf
    assert saturation_level(weights, inv_gain, 0.0) == 0.0


def test_single_rb_uses_full_budget(desk_config):
    problem = _problem([1e-12], [0])
    outcome = solve_power_tti(problem, desk_config)
    assert outcome.feasible
    np.testing.assert_allclose(outcome.allocation.power, [desk_config.max_power_per_ru])
    expected = 180e3 * 1e-3 * math.log2(1.0 + desk_config.max_power_per_ru * 1e-12 / desk_config.noise_power)
    assert outcome.served_bits[0, 0] == pytest.approx(expected)


def test_equal_rbs_share_power_equally(desk_config):
    outcome = solve_power_tti(_problem([1e-12, 1e-12], [0, 0]), desk_config)
    power = outcome.allocation.power
    assert power[0] == pytest.approx(power[1])
    assert power.sum() == pytest.approx(desk_config.max_power_per_ru)
    assert outcome.kkt_residual < 1e-6


def test_small_backlog_caps_service(desk_config):
    backlog = np.array([[50.0, 0.0]])
    outcome = solve_power_tti(_problem([1e-12, 1e-12], [0, 0], backlog=backlog), desk_config)
    assert outcome.served_bits[0, 0] == pytest.approx(50.0, rel=1e-9)
    assert outcome.allocation.power.sum() < desk_config.max_power_per_ru
    # 可达比特不受积压限制
    assert outcome.capacity_bits[0, 0] > 50.0


def test_urllc_gets_minimum_power_first(desk_config):
    problem = _problem([1e-12, 1e-12], [0, 1], is_urllc=[False, True], rb_bandwidth=720e3,
                       tti_duration=0.25e-3, psi=0.23033)
    outcome = solve_power_tti(problem, desk_config)
    floor = min_power_for_packet(1e-12, 720e3, 0.25e-3, desk_config.packet_size_urllc,
                                 desk_config.urllc_snr_floor, desk_config.noise_power, 0.23033)
    assert outcome.feasible
    assert outcome.allocation.power[1] == pytest.approx(floor)
    assert outcome.allocation.power.sum() == pytest.approx(desk_config.max_power_per_ru)
    bits = rb_bits(problem, outcome.allocation.power, desk_config.noise_power)
    assert bits[1] >= desk_config.packet_size_urllc * (1 - 1e-9)


def test_urllc_over_budget_zeroes_the_ru(desk_config):
    # 深衰落：所需功率远超 1 W
    problem = _problem([1e-20, 1e-12, 1e-12], [1, 0, 0], is_urllc=[True, False, False],
                       rus=[0, 0, 1], num_rus=2)
    outcome = solve_power_tti(problem, desk_config)
    assert not outcome.feasible
    assert outcome.infeasible_rus == (0,)
    np.testing.assert_allclose(outcome.allocation.power[:2], 0.0)
    assert outcome.allocation.power[2] == pytest.approx(desk_config.max_power_per_ru)
    np.testing.assert_allclose(outcome.served_bits[0], 0.0)


def test_power_respects_budget_per_ru(desk_config, rng):
    for _ in range(20):
        n = int(rng.integers(1, 8))
        problem = _problem(10.0 ** rng.uniform(-13, -10, size=n), rng.integers(0, 2, size=n),
                           rus=rng.integers(0, 2, size=n), num_rus=2,
                           backlog=rng.uniform(0.0, 2000.0, size=(2, 2)))
        outcome = solve_power_tti(problem, desk_config)
        totals = outcome.allocation.per_ru_total(2)
        assert np.all(totals <= desk_config.max_power_per_ru * (1 + 1e-9))
        assert np.all(outcome.served_bits <= problem.backlog + 1e-9)


def test_held_power_is_kept_and_the_rest_shares_the_remainder(desk_config):
    budget = desk_config.max_power_per_ru
    problem = _problem([1e-12, 1e-12, 1e-12], [0, 0, 1])
    outcome = solve_power_tti(problem, desk_config, held_power=np.array([0.3 * budget, np.nan, np.nan]))
    power = outcome.allocation.power
    assert power[0] == 0.3 * budget
    assert power[1] == pytest.approx(power[2])
    assert power.sum() == pytest.approx(budget)


def test_held_bits_count_against_the_backlog(desk_config):
    problem = _problem([1e-12, 1e-12], [0, 0])
    held = np.array([0.5 * desk_config.max_power_per_ru, np.nan])
    held_bits = float(rb_bits(problem, np.array([held[0], 0.0]), desk_config.noise_power)[0])
    capped = _problem([1e-12, 1e-12], [0, 0], backlog=[[held_bits + 10.0, 0.0]])
    outcome = solve_power_tti(capped, desk_config, held_power=held)
    assert outcome.served_bits[0, 0] == pytest.approx(held_bits + 10.0, rel=1e-9)
    bits = rb_bits(capped, outcome.allocation.power, desk_config.noise_power)
    assert bits[1] == pytest.approx(10.0, rel=1e-6)


def test_held_power_leaving_no_room_for_urllc_is_infeasible(desk_config):
    problem = _problem([1e-12, 1e-12], [0, 1], is_urllc=[False, True], rb_bandwidth=720e3,
                       tti_duration=0.25e-3, psi=0.23033)
    outcome = solve_power_tti(problem, desk_config, held_power=np.array([desk_config.max_power_per_ru, np.nan]))
    assert not outcome.feasible
    np.testing.assert_array_equal(outcome.allocation.power, 0.0)


def test_frame_feasibility(desk_config):
    phi = np.full((2, 4), 0.5)
    packets = np.array([1, 0, 0, 0])
    served = np.zeros((2, 4))
    served[0, 0] = 99.0
    served[1, 0] = 100.0
    report = frame_feasibility(served, phi, packets, np.zeros((2, 4)), desk_config)
    assert not report.feasible
    assert report.demand_breaches == [(0, 0, 100.0, 99.0)]

    served[0, 0] = 100.0
    queues = np.zeros((2, 4))
    queues[0, :2] = desk_config.queue_cap / 2
    report = frame_feasibility(served, phi, packets, queues, desk_config)
    assert report.feasible
    queues[0, 2] = 1.0
    assert frame_feasibility(served, phi, packets, queues, desk_config).num_breaches == 1
