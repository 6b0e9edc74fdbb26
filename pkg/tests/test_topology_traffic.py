import numpy as np
import pytest

from core.rb_grid import build_rb_grid
from topology import Topology, UserClass, path_loss_db, sample_topology
from topology.channel_model import ChannelGains, large_scale_gain, sample_channel_gains
from traffic.traffic_model import sample_arrivals


def test_path_loss():
    assert path_loss_db(1000.0) == pytest.approx(128.1)
    assert path_loss_db(100.0) == pytest.approx(90.5)
    assert path_loss_db(500.0) == pytest.approx(116.78, abs=0.01)
    # 近距离钳位
    assert path_loss_db(1.0) == path_loss_db(10.0)
    np.testing.assert_allclose(path_loss_db(np.array([100.0, 1000.0])), [90.5, 128.1])


def test_sample_topology_inside_disk(full_config, rng):
    topology = sample_topology(full_config, rng)
    assert topology.num_rus == 4
    assert topology.num_users == 12
    assert np.all(topology.user_radii() <= full_config.cell_radius + 1e-9)
    assert topology.user_class[:9] == [UserClass.EMBB] * 9
    assert topology.user_class[9:] == [UserClass.URLLC] * 3


def test_sample_topology_zero_radius(desk_config, rng):
    topology = sample_topology(desk_config.with_overrides(cell_radius=0.0), rng)
    np.testing.assert_allclose(topology.user_positions, 0.0)
    np.testing.assert_allclose(topology.ru_positions, 0.0)


def test_sample_topology_is_deterministic(desk_config):
    first = sample_topology(desk_config, np.random.default_rng(7))
    second = sample_topology(desk_config, np.random.default_rng(7))
    np.testing.assert_array_equal(first.user_positions, second.user_positions)


def _fixed_topology(distance, num_users=1):
    return Topology(
        ru_positions=np.array([[0.0, 0.0]]),
        user_positions=np.tile([[distance, 0.0]], (num_users, 1)),
        user_class=[UserClass.EMBB] * num_users,
    )


def test_channel_without_fading_is_path_loss(full_config, rng):
    grid = build_rb_grid(full_config)
    gains = sample_channel_gains(_fixed_topology(1000.0), grid, rng, rayleigh=False)
    np.testing.assert_allclose(gains[0], 10.0 ** -12.81)
    np.testing.assert_allclose(gains[1], 10.0 ** -12.81)
    assert gains[0].shape == (1, 1, 44, 10)
    assert gains.is_valid()


def test_rayleigh_fading_has_unit_mean(full_config, rng):
    grid = build_rb_grid(full_config)
    topology = _fixed_topology(500.0, num_users=25)
    base = float(large_scale_gain(topology)[0, 0])
    samples = np.concatenate([
        sample_channel_gains(topology, grid, rng)[0].reshape(-1) for _ in range(10)])
    assert samples.size >= 1e5
    assert np.mean(samples) / base == pytest.approx(1.0, rel=0.02)


def test_frame_fading_block_is_constant_over_ttis(full_config, rng):
    grid = build_rb_grid(full_config)
    gains = sample_channel_gains(_fixed_topology(300.0), grid, rng, fading_block='frame')
    slice_gains = gains[0]
    np.testing.assert_array_equal(slice_gains, np.broadcast_to(slice_gains[..., :1], slice_gains.shape))
    np.testing.assert_allclose(gains.frame_mean(0), slice_gains[..., 0])


def test_channel_gains_validity():
    assert not ChannelGains(per_slice=(np.ones((1, 1, 1, 1)), np.zeros((1, 1, 1, 1)))).is_valid()


def test_zero_arrival_rates(desk_config, rng):
    config = desk_config.with_overrides(arrival_rate_embb=0.0, arrival_rate_urllc=0.0)
    for t in range(20):
        arrivals = sample_arrivals(config, rng, t)
        assert arrivals.frame == t
        assert np.all(arrivals.packets == 0)


def test_arrival_means(desk_config, rng):
    num_frames = 20000
    packets = np.stack([sample_arrivals(desk_config, rng, t).packets for t in range(num_frames)])
    embb = packets[:, :desk_config.embb_users].reshape(-1)
    urllc = packets[:, desk_config.embb_users:].reshape(-1)
    for values, rate in ((embb, desk_config.arrival_rate_embb), (urllc, desk_config.arrival_rate_urllc)):
        # 泊松方差等于均值
        assert abs(values.mean() - rate) <= 4.0 * np.sqrt(rate / values.size)


def test_arrival_bits_and_classes(desk_config, rng):
    arrivals = sample_arrivals(desk_config, rng, 0)
    np.testing.assert_allclose(arrivals.bits, arrivals.packets * desk_config.packet_bits)
    assert len(arrivals.embb(desk_config)) == 3
    assert len(arrivals.urllc(desk_config)) == 1
