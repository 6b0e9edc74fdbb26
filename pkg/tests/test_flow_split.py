import numpy as np
import pytest

from algorithms.flow_split import (
    FlowSplit, RateWindow, estimate_flow_split, push_observation, uniform_flow_split)


def test_window_mean_and_eviction():
    window = RateWindow(3)
    for value in (1.0, 2.0, 3.0):
        push_observation(window, np.array([[value]]))
    np.testing.assert_allclose(window.mean(), [[2.0]])
    push_observation(window, np.array([[4.0]]))
    assert len(window) == 3
    np.testing.assert_allclose(window.mean(), [[3.0]])


def test_partial_window_averages_available_frames():
    window = RateWindow(5)
    push_observation(window, np.array([[2.0], [4.0]]))
    push_observation(window, np.array([[4.0], [8.0]]))
    np.testing.assert_allclose(window.mean(), [[3.0], [6.0]])


def test_empty_window_and_bad_rates():
    window = RateWindow(2)
    with pytest.raises(ValueError):
        window.mean()
    with pytest.raises(ValueError):
        window.push(np.array([[-1.0]]))
    with pytest.raises(ValueError):
        RateWindow(0)


def test_estimate_proportional_to_mean_rates():
    window = push_observation(RateWindow(5), np.array([[3.0, 0.0], [1.0, 0.0]]))
    split = estimate_flow_split(window)
    # 第二个用户没有观测速率，回退到 1/M
    np.testing.assert_allclose(split.phi, [[0.75, 0.5], [0.25, 0.5]])
    assert split.is_valid()


def test_uniform_split():
    split = uniform_flow_split(4, 3)
    np.testing.assert_allclose(split.phi, np.full((4, 3), 0.25))
    assert split.is_valid()
    assert split.num_rus == 4


def test_invalid_split():
    assert not FlowSplit(phi=np.array([[0.7], [0.7]])).is_valid()
    assert not FlowSplit(phi=np.array([[1.5], [-0.5]])).is_valid()
