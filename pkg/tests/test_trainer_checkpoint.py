import numpy as np
import pytest

from core.errors import CheckpointError, ConfigError
from output.checkpoint import load_checkpoint, save_checkpoint
from simulation import FrameContext, build_agents, ddqn_policy, evaluate, require_valid, train


def _assert_same_agents(first, second):
    for a, b in zip(first, second):
        assert a.spec == b.spec
        assert a.epsilon == b.epsilon
        assert a.train_steps == b.train_steps
        for p, q in zip(a.eval_net.params + a.target_net.params, b.eval_net.params + b.target_net.params):
            np.testing.assert_array_equal(p, q)


def test_build_agents_is_seeded(tiny_ctx):
    first = build_agents(tiny_ctx, 3)
    _assert_same_agents(first, build_agents(tiny_ctx, 3))
    other = build_agents(tiny_ctx, 4)
    assert not np.array_equal(first[0].eval_net.params[0], other[0].eval_net.params[0])
    for agent in first:
        for p, q in zip(agent.eval_net.params, agent.target_net.params):
            np.testing.assert_array_equal(p, q)


def test_agent_shapes(tiny_ctx):
    embb, urllc = build_agents(tiny_ctx, 0)
    assert (embb.spec.num_heads, embb.spec.num_choices) == (2, 5)
    assert (urllc.spec.num_heads, urllc.spec.num_choices) == (2, 5)
    assert embb.eval_net.layer_sizes == (embb.spec.state_dim, 32, 32, 10)


def test_require_valid_rejects_bad_config(tiny_config):
    with pytest.raises(ConfigError) as info:
        require_valid(tiny_config.with_overrides(alpha=1.5))
    assert any(v.rule == 'alpha in (0,1)' for v in info.value.violations)


def test_zero_epochs_leaves_agents_untouched(tiny_config, tiny_ctx):
    result = train(tiny_config, seed=0, epochs=0)
    assert len(result.learning_curve) == 0
    _assert_same_agents(result.agents, build_agents(tiny_ctx, 0))


@pytest.mark.slow
def test_training_is_reproducible(tiny_config):
    config = tiny_config.with_overrides(batch_size=4, frames_per_episode=5)
    first = train(config, seed=1, epochs=3)
    second = train(config, seed=1, epochs=3)
    np.testing.assert_array_equal(first.learning_curve, second.learning_curve)
    assert first.losses == second.losses
    assert len(first.losses) > 0
    _assert_same_agents(first.agents, second.agents)
    assert first.agents[0].epsilon < config.epsilon_schedule[0]


@pytest.mark.slow
def test_greedy_evaluation(tiny_config):
    agents = train(tiny_config, seed=0, epochs=1).agents
    series = evaluate(agents, tiny_config, [0, 1], num_frames=4)
    assert len(series) == 8
    assert series == evaluate(agents, tiny_config, [0, 1], num_frames=4)
    frame = series.frame
    feasible = frame[frame['feasible']]
    assert (feasible['worst_urllc_latency_s'] <= tiny_config.latency_budget).all()
    assert (frame['avg_queue_bits'] >= 0).all()


def test_greedy_policy_builds_valid_assignments(tiny_ctx):
    from simulation import Rollout, generate_trace
    policy = ddqn_policy(tiny_ctx, build_agents(tiny_ctx, 0))
    rollout = Rollout(tiny_ctx, generate_trace(tiny_ctx, 0, 0, 2))
    assignment = policy(rollout.observe())
    for owners, slice_grid in zip(assignment.owners, tiny_ctx.grid.slices):
        assert owners.shape == (slice_grid.num_rbs, slice_grid.num_ttis)
        assert owners.min() >= -1 and owners.max() < 4


def test_checkpoint_round_trip(tiny_config, tiny_ctx, tmp_path):
    agents = build_agents(tiny_ctx, 2)
    agents[0].epsilon = 0.3
    agents[1].optimizer.t = 7
    path = save_checkpoint(agents, tmp_path / 'agents.ckpt')
    loaded = load_checkpoint(path, tiny_config)
    _assert_same_agents(agents, loaded)
    assert loaded[1].optimizer.t == 7
    for m, n in zip(agents[1].optimizer.m, loaded[1].optimizer.m):
        np.testing.assert_array_equal(m, n)


def test_checkpoint_bytes_are_deterministic(tiny_ctx, tmp_path):
    a = save_checkpoint(build_agents(tiny_ctx, 5), tmp_path / 'a.ckpt').read_bytes()
    b = save_checkpoint(build_agents(tiny_ctx, 5), tmp_path / 'b.ckpt').read_bytes()
    assert a == b
    assert a[:4] == b'TSCK'


def test_checkpoint_rejects_damaged_files(tiny_config, tiny_ctx, tmp_path):
    data = save_checkpoint(build_agents(tiny_ctx, 0), tmp_path / 'good.ckpt').read_bytes()

    truncated = tmp_path / 'truncated.ckpt'
    truncated.write_bytes(data[:-8])
    with pytest.raises(CheckpointError):
        load_checkpoint(truncated, tiny_config)

    trailing = tmp_path / 'trailing.ckpt'
    trailing.write_bytes(data + b'\x00' * 8)
    with pytest.raises(CheckpointError):
        load_checkpoint(trailing, tiny_config)

    foreign = tmp_path / 'foreign.ckpt'
    foreign.write_bytes(b'NOPE' + data[4:])
    with pytest.raises(CheckpointError):
        load_checkpoint(foreign, tiny_config)

    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / 'missing.ckpt', tiny_config)


def test_checkpoint_rejects_other_shapes(tiny_config, tiny_ctx, tmp_path):
    path = save_checkpoint(build_agents(tiny_ctx, 0), tmp_path / 'agents.ckpt')
    with pytest.raises(CheckpointError, match='state_dim'):
        load_checkpoint(path, tiny_config.with_overrides(num_rus=3))
    with pytest.raises(CheckpointError, match='layers'):
        load_checkpoint(path, tiny_config.with_overrides(hidden_layers=(16, 16)))
