"""
流量分割启发式
以最近 W 帧观测速率的滑动平均估计每个用户在各RU上的分流比例
"""

from collections import deque
from dataclasses import dataclass
from typing import Deque

import numpy as np

__all__ = ['FlowSplit', 'RateWindow', 'push_observation', 'estimate_flow_split', 'uniform_flow_split']

_ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class FlowSplit:
    """φ[m][u]，每列（每个用户）和为1"""
    phi: np.ndarray   # (M, U)

    @property
    def num_rus(self) -> int:
        return self.phi.shape[0]

    def is_valid(self) -> bool:
        return bool(np.all(self.phi >= 0) and np.all(self.phi <= 1)
                    and np.allclose(self.phi.sum(axis=0), 1.0, atol=_ROW_SUM_TOL))


class RateWindow:
    """最近 W 帧每个 (m,u) 的观测速率"""

    def __init__(self, window: int):
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        self.window = window
        self._frames: Deque[np.ndarray] = deque(maxlen=window)

    def __len__(self):
        return len(self._frames)

    def push(self, observed_rates) -> 'RateWindow':
        rates = np.asarray(observed_rates, dtype=float)
        if np.any(rates < 0):
            raise ValueError("observed rates must be non-negative")
        self._frames.append(rates.copy())
        return self

    def mean(self) -> np.ndarray:
        """部分窗口时取已有帧的平均"""
        if not self._frames:
            raise ValueError("rate window is empty")
        return np.mean(np.stack(self._frames), axis=0)


def push_observation(window: RateWindow, observed_rates) -> RateWindow:
    """加入一帧观测，窗口满时淘汰最旧的一帧"""
    return window.push(observed_rates)


def uniform_flow_split(num_rus: int, num_users: int) -> FlowSplit:
    """均匀分流 φ = 1/M"""
    if num_rus < 1:
        raise ValueError(f"num_rus must be >= 1, got {num_rus}")
    return FlowSplit(phi=np.full((num_rus, num_users), 1.0 / num_rus))


def estimate_flow_split(window: RateWindow) -> FlowSplit:
    """
    φ̂_{m,u} = R̄_{m,u} / Σ_m R̄_{m,u}

    某用户的分母为0时回退到 1/M
    """
    mean_rates = window.mean()
    num_rus = mean_rates.shape[0]
    totals = mean_rates.sum(axis=0)
    phi = np.full_like(mean_rates, 1.0 / num_rus)
    served = totals > 0
    phi[:, served] = mean_rates[:, served] / totals[served]
    return FlowSplit(phi=phi)
