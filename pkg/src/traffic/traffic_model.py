"""
流量模型
每个用户每帧的到达包数服从泊松分布，均值由业务类型决定
"""

from dataclasses import dataclass

import numpy as np

try:
    from core.system_config import SystemConfig
except ImportError:
    from ..core.system_config import SystemConfig

__all__ = ['TrafficArrivals', 'sample_arrivals']


@dataclass(frozen=True)
class TrafficArrivals:
    """一帧的到达：packets[u] 为非负整数，packet_bits[u] 为对应业务的包大小"""
    frame: int
    packets: np.ndarray       # (U,) int
    packet_bits: np.ndarray   # (U,) float

    @property
    def bits(self) -> np.ndarray:
        return self.packets * self.packet_bits

    def urllc(self, config: SystemConfig) -> np.ndarray:
        return self.packets[config.embb_users:]

    def embb(self, config: SystemConfig) -> np.ndarray:
        return self.packets[:config.embb_users]

    def __str__(self):
        return f"Arrivals(frame={self.frame}, packets={self.packets.tolist()})"


def sample_arrivals(config: SystemConfig, rng: np.random.Generator, t: int) -> TrafficArrivals:
    """
    采样第 t 帧的到达

    每个用户独立泊松，eMBB均值 arrival_rate_embb，uRLLC均值 arrival_rate_urllc (packets/frame)
    """
    means = np.where(config.is_urllc, config.arrival_rate_urllc, config.arrival_rate_embb)
    packets = rng.poisson(means).astype(np.int64)
    return TrafficArrivals(frame=t, packets=packets, packet_bits=config.packet_bits)

