import math

import numpy as np
import pytest
from scipy.optimize import brentq

from core.errors import ConstraintBreach, DomainError
from radio.rate_model import (
    big_m_breaches, embb_rate, fbl_penalty, inverse_q, q_function, update_queue, urllc_rate, utility)


def test_inverse_q_known_values():
    assert inverse_q(0.5) == pytest.approx(0.0, abs=1e-12)
    assert inverse_q(1e-3) == pytest.approx(3.0902, abs=1e-4)
    assert inverse_q(0.02275) == pytest.approx(2.000, abs=1e-3)


def test_inverse_q_inverts_q_function():
    for p in np.logspace(-9, math.log10(0.999), 60):
        assert abs(float(q_function(inverse_q(p))) - p) <= 1e-9


def test_inverse_q_matches_root_finding():
    for p in (1e-6, 1e-5, 1e-3, 0.1, 0.5):
        root = brentq(lambda x: float(q_function(x)) - p, -10.0, 10.0, xtol=1e-14)
        assert inverse_q(p) == pytest.approx(root, abs=1e-9)
    # Ψ 与求根得到的 Q^{-1} 一致
    root = brentq(lambda x: float(q_function(x)) - 1e-3, 0.0, 10.0, xtol=1e-14)
    assert fbl_penalty(1e-3, 1e-3, 180e3) == pytest.approx(root / math.sqrt(180.0), abs=1e-9)


@pytest.mark.parametrize('p', [0.0, 1.0, -0.1, 1.5, float('nan')])
def test_inverse_q_rejects_out_of_domain(p):
    with pytest.raises(DomainError):
        inverse_q(p)


def test_fbl_penalty():
    assert fbl_penalty(1e-3, 1e-3, 180e3) == pytest.approx(0.23033, abs=1e-4)
    assert fbl_penalty(1e-3, 1e-3, 720e3) == pytest.approx(0.11516, abs=1e-4)
    # Ψ 随 δ·β 增大而减小
    assert fbl_penalty(1e-3, 0.25e-3, 720e3) < fbl_penalty(1e-3, 0.25e-3, 180e3)


def test_fbl_penalty_rejects_zero_block():
    with pytest.raises(DomainError):
        fbl_penalty(1e-3, 0.0, 180e3)


def test_embb_rate_single_and_double_rb():
    # SNR = p·g/N0
    assert embb_rate([3.0], [1.0], [1], 180e3, 1.0) == pytest.approx(360e3)
    assert embb_rate([1.0, 3.0], [1.0, 1.0], [1, 1], 180e3, 1.0) == pytest.approx(540e3)


def test_embb_rate_ignores_unassigned_rbs():
    assert embb_rate([1.0, 3.0], [1.0, 1.0], [0, 1], 180e3, 1.0) == pytest.approx(360e3)
    assert embb_rate([1.0], [1.0], [0], 180e3, 1.0) == 0.0


def test_urllc_rate_subtracts_dispersion():
    rate = urllc_rate([3.0], [1.0], [1], 720e3, 1.0, 0.25)
    assert rate == pytest.approx(1.1803e6, rel=1e-4)
    assert rate < embb_rate([3.0], [1.0], [1], 720e3, 1.0)


def test_urllc_rate_below_snr_floor():
    with pytest.raises(ConstraintBreach):
        urllc_rate([1.0], [1.0], [1], 720e3, 1.0, 0.25, snr_floor=3.1622777)
    # 未分配的RB不参与门限检查
    assert urllc_rate([1.0], [1.0], [0], 720e3, 1.0, 0.25, snr_floor=3.1622777) == 0.0


def test_update_queue():
    assert update_queue(0, 100, 40) == 60
    assert update_queue(50, 0, 100) == 0
    assert update_queue(10, 5, 15) == 0
    np.testing.assert_allclose(update_queue(np.array([0.0, 50.0]), 100.0, np.array([40.0, 200.0])), [60.0, 0.0])


def test_utility_weighting():
    # 队列项 0.4，时延项 0.8
    assert utility([40.0], 0.8e-3, 0.5, 100.0, 1e-3) == pytest.approx(0.6)
    assert utility([20.0, 20.0], 0.0, 1.0, 100.0, 1e-3) == pytest.approx(0.4)


def test_utility_requires_positive_references():
    with pytest.raises(DomainError):
        utility([1.0], 0.0, 0.5, 0.0, 1e-3)


def test_big_m_breaches():
    power = np.array([[0.0, 1.0], [2.0, 0.0]])
    assignment = np.array([[0, 1], [0, 0]])
    np.testing.assert_array_equal(big_m_breaches(power, assignment), [[1, 0]])
    assert big_m_breaches(power, power > 0).size == 0
