import numpy as np
import pytest

from radio.assignment import IDLE, RBAssignment
from topology.channel_model import ChannelGains
from traffic.traffic_model import TrafficArrivals
from simulation import FrameContext, FrameInputs, Rollout, generate_trace, run_episode, run_frame


def _inputs(ctx, packets, gain=1e-10, frame=0):
    config = ctx.config
    per_slice = tuple(np.full((config.num_rus, config.num_users, s.num_rbs, s.num_ttis), gain)
                      for s in ctx.grid.slices)
    arrivals = TrafficArrivals(frame=frame, packets=np.asarray(packets, dtype=np.int64),
                               packet_bits=config.packet_bits)
    return FrameInputs(frame=frame, gains=ChannelGains(per_slice=per_slice), arrivals=arrivals)


def _random_policy(ctx, seed):
    rng = np.random.default_rng(seed)
    config = ctx.config

    def policy(observation):
        owners = tuple(rng.integers(IDLE, config.num_rus * config.num_users, size=(s.num_rbs, s.num_ttis))
                       for s in ctx.grid.slices)
        return RBAssignment(owners=owners, num_rus=config.num_rus, num_users=config.num_users)

    return policy


def test_zero_arrivals_and_empty_assignment(tiny_ctx):
    config = tiny_ctx.config
    assignment = RBAssignment.empty(tiny_ctx.grid, config.num_rus, config.num_users)
    outcome = run_frame(tiny_ctx, np.zeros((2, 2)), np.full((2, 2), 0.5), assignment, _inputs(tiny_ctx, [0, 0]))
    assert outcome.embb_bits == 0.0
    assert outcome.reward == 0.0
    assert outcome.utility == 0.0
    assert outcome.feasible
    np.testing.assert_array_equal(outcome.queues, 0.0)


def test_single_packet_is_drained(tiny_ctx):
    config = tiny_ctx.config
    # eMBB 用户0独占全部四个RB，由 RU 0 服务
    owners = tuple(np.zeros((s.num_rbs, s.num_ttis), dtype=np.int64) for s in tiny_ctx.grid.slices)
    assignment = RBAssignment(owners=owners, num_rus=2, num_users=2)
    phi = np.array([[1.0, 1.0], [0.0, 0.0]])
    queues = np.zeros((2, 2))
    outcome = run_frame(tiny_ctx, queues, phi, assignment, _inputs(tiny_ctx, [1, 0]))
    assert outcome.served_bits[0, 0] == pytest.approx(config.packet_size_embb)
    np.testing.assert_allclose(outcome.queues, 0.0, atol=1e-9)
    assert outcome.violations == []
    assert outcome.feasible
    assert outcome.reward > 0
    # 输入队列不被修改
    np.testing.assert_array_equal(queues, 0.0)


def test_unserved_urllc_is_penalised(tiny_ctx):
    config = tiny_ctx.config
    assignment = RBAssignment.empty(tiny_ctx.grid, config.num_rus, config.num_users)
    outcome = run_frame(tiny_ctx, np.zeros((2, 2)), np.full((2, 2), 0.5), assignment, _inputs(tiny_ctx, [0, 1]))
    assert not outcome.feasible
    assert outcome.reward == pytest.approx(config.penalty_value * outcome.num_penalties)
    assert outcome.latency.num_unscheduled == 1


def test_bits_are_conserved_per_frame(tiny_ctx):
    trace = generate_trace(tiny_ctx, seed=3, episode=0, num_frames=8)
    rollout = Rollout(tiny_ctx, trace)
    policy = _random_policy(tiny_ctx, 0)
    while not rollout.done:
        start = rollout.queues.copy()
        observation = rollout.observe()
        outcome = rollout.step(observation.phi, policy(observation))
        np.testing.assert_allclose(outcome.arrival_bits + start,
                                   outcome.served_bits + outcome.queues + outcome.dropped_bits,
                                   rtol=1e-12, atol=1e-6)
        assert np.all(outcome.queues.sum(axis=1) <= tiny_ctx.config.queue_cap * (1 + 1e-12))
    assert rollout.conservation_gap() == pytest.approx(0.0, abs=1e-6)


def test_tail_drop_above_queue_cap(tiny_ctx):
    config = tiny_ctx.config
    assignment = RBAssignment.empty(tiny_ctx.grid, config.num_rus, config.num_users)
    packets = int(3 * config.queue_cap / config.packet_size_embb)
    outcome = run_frame(tiny_ctx, np.zeros((2, 2)), np.array([[1.0, 1.0], [0.0, 0.0]]), assignment,
                        _inputs(tiny_ctx, [packets, 0]))
    assert outcome.queues[0].sum() == pytest.approx(config.queue_cap)
    assert outcome.dropped_bits[0, 0] == pytest.approx(packets * config.packet_size_embb - config.queue_cap)


def test_episode_is_deterministic(tiny_ctx):
    first = run_episode(tiny_ctx, generate_trace(tiny_ctx, 5, 0, 6), _random_policy(tiny_ctx, 1))
    second = run_episode(tiny_ctx, generate_trace(tiny_ctx, 5, 0, 6), _random_policy(tiny_ctx, 1))
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a.served_bits, b.served_bits)
        assert a.reward == b.reward


def test_traces_differ_across_seeds_and_share_topology(tiny_ctx):
    a = generate_trace(tiny_ctx, 0, 0, 3)
    b = generate_trace(tiny_ctx, 1, 0, 3)
    assert not np.array_equal(a.frames[0].gains[0], b.frames[0].gains[0])
    again = generate_trace(tiny_ctx, 0, 1, 3, topology=a.topology)
    np.testing.assert_array_equal(again.topology.user_positions, a.topology.user_positions)


def test_first_frame_uses_uniform_split(tiny_ctx):
    trace = generate_trace(tiny_ctx, 0, 0, 3)
    rollout = Rollout(tiny_ctx, trace)
    np.testing.assert_allclose(rollout.observe().phi, 0.5)
    with pytest.raises(ValueError):
        Rollout(tiny_ctx, trace, flow_split='random')


def _coarse_and_fine(ctx):
    """eMBB 切片 (1 ms) 第 0 个RB 与 uRLLC 切片 (0.25 ms) 第 1 个TTI的RB 都给 RU 0 的 eMBB 用户 0"""
    config = ctx.config
    owners = tuple(np.full((s.num_rbs, s.num_ttis), IDLE, dtype=np.int64) for s in ctx.grid.slices)
    owners[0][0, 0] = 0
    owners[1][0, 1] = 0
    return RBAssignment(owners=owners, num_rus=config.num_rus, num_users=config.num_users)


def test_coarse_slice_power_is_held_within_its_tti(desk_config):
    held_ctx = FrameContext.build(desk_config.with_overrides(power_update='slice_tti'))
    tick_ctx = FrameContext.build(desk_config)
    config = held_ctx.config
    assert config.tick_ratio(0) == 4
    queues = np.zeros((config.num_rus, config.num_users))
    queues[0, 0] = 5e4
    phi = np.full(queues.shape, 0.5)

    held = run_frame(held_ctx, queues, phi, _coarse_and_fine(held_ctx), _inputs(held_ctx, [0, 0, 0, 0]))
    # 整个 1 ms 内粗粒度RB保持满功率，细粒度RB在第 1 个细时钟TTI分不到功率
    weight = held_ctx.grid.embb.rb_bandwidth * config.fine_tti
    snr = config.max_power_per_ru * 1e-10 / config.noise_power
    assert held.served_bits[0, 0] == pytest.approx(4 * weight * np.log2(1.0 + snr))

    # 每个细时钟TTI重解时，第 1 个TTI两块RB共同注水，服务更多
    per_tick = run_frame(tick_ctx, queues, phi, _coarse_and_fine(tick_ctx), _inputs(tick_ctx, [0, 0, 0, 0]))
    assert per_tick.served_bits[0, 0] > held.served_bits[0, 0]


def test_bits_are_conserved_with_held_power(desk_config):
    ctx = FrameContext.build(desk_config.with_overrides(power_update='slice_tti'))
    rollout = Rollout(ctx, generate_trace(ctx, seed=4, episode=0, num_frames=4))
    policy = _random_policy(ctx, 2)
    while not rollout.done:
        observation = rollout.observe()
        rollout.step(observation.phi, policy(observation))
    assert rollout.conservation_gap() == pytest.approx(0.0, abs=1e-6)
