"""
混合参数集RB网格
两个切片各自的RB数 F_i、TTI数 T_i 与切片带宽 B_i
"""

import math
from dataclasses import dataclass
from typing import Tuple

from .system_config import SystemConfig, EMBB_SLICE, URLLC_SLICE

__all__ = ['SliceGrid', 'RBGrid', 'build_rb_grid', 'split_bandwidth']

_FLOOR_TOL = 1e-9


@dataclass(frozen=True)
class SliceGrid:
    """单个切片的资源网格"""
    num_rbs: int
    num_ttis: int
    bandwidth: float
    rb_bandwidth: float
    tti_duration: float

    @property
    def num_resources(self) -> int:
        return self.num_rbs * self.num_ttis

    def tti_of_tick(self, tick: int, ratio: int) -> int:
        return tick // ratio


@dataclass(frozen=True)
class RBGrid:
    """两个切片的RB网格（索引0为eMBB切片，1为uRLLC切片）"""
    slices: Tuple[SliceGrid, SliceGrid]
    guard_band: float

    def __getitem__(self, slice_index: int) -> SliceGrid:
        return self.slices[slice_index]

    @property
    def embb(self) -> SliceGrid:
        return self.slices[EMBB_SLICE]

    @property
    def urllc(self) -> SliceGrid:
        return self.slices[URLLC_SLICE]

    @property
    def total_bandwidth(self) -> float:
        return self.slices[0].bandwidth + self.slices[1].bandwidth + self.guard_band


def split_bandwidth(bandwidth: float, alpha: float, guard_band: float) -> Tuple[float, float]:
    """
    切片带宽划分: B_1=(1-α)B, B_2=αB-B_G

    Raises:
        ValueError: α不在(0,1)或 αB <= B_G
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    if alpha * bandwidth <= guard_band:
        raise ValueError(f"alpha*B={alpha * bandwidth} must exceed the guard band {guard_band}")
    embb_bandwidth = (1.0 - alpha) * bandwidth
    # B_2 取差值，保证 B_1 + B_2 + B_G = B 精确成立
    urllc_bandwidth = bandwidth - embb_bandwidth - guard_band
    return embb_bandwidth, urllc_bandwidth


def build_rb_grid(config: SystemConfig) -> RBGrid:
    """由（已校验的）配置构建RB网格，纯函数"""
    slice_bandwidths = split_bandwidth(config.bandwidth, config.alpha, config.guard_band)
    slices = []
    for numerology, slice_bandwidth in zip(config.numerologies, slice_bandwidths):
        num_rbs = int(math.floor(slice_bandwidth / numerology.rb_bandwidth + _FLOOR_TOL))
        num_ttis = int(round(config.frame_duration / numerology.tti_duration))
        slices.append(SliceGrid(
            num_rbs=max(num_rbs, 0),
            num_ttis=num_ttis,
            bandwidth=slice_bandwidth,
            rb_bandwidth=numerology.rb_bandwidth,
            tti_duration=numerology.tti_duration,
        ))
    return RBGrid(slices=tuple(slices), guard_band=config.guard_band)
