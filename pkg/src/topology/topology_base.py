"""
RU/用户拓扑
用户在圆形小区内均匀分布，RU 均匀布置在半径为 cell_radius/2 的圆上
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List

import numpy as np

try:
    from core.system_config import SystemConfig
except ImportError:
    from ..core.system_config import SystemConfig

__all__ = ['UserClass', 'Topology', 'sample_topology', 'path_loss_db', 'PATH_LOSS_MIN_DISTANCE']

# 路径损耗的最小距离钳位 (m)
PATH_LOSS_MIN_DISTANCE = 10.0


class UserClass(Enum):
    """业务类型枚举"""
    EMBB = "embb"
    URLLC = "urllc"


@dataclass(frozen=True)
class Topology:
    """RU与用户的二维位置 (m)"""
    ru_positions: np.ndarray      # (M, 2)
    user_positions: np.ndarray    # (U, 2)
    user_class: List[UserClass]

    @property
    def num_rus(self) -> int:
        return self.ru_positions.shape[0]

    @property
    def num_users(self) -> int:
        return self.user_positions.shape[0]

    def distances(self) -> np.ndarray:
        """RU到用户的距离矩阵 (M, U)"""
        delta = self.ru_positions[:, None, :] - self.user_positions[None, :, :]
        return np.sqrt(np.sum(delta ** 2, axis=-1))

    def user_radii(self) -> np.ndarray:
        return np.sqrt(np.sum(self.user_positions ** 2, axis=-1))


def ru_ring_positions(num_rus: int, radius: float) -> np.ndarray:
    """M 个 RU 均匀分布在给定半径的圆上"""
    angles = 2.0 * np.pi * np.arange(num_rus) / max(num_rus, 1)
    return np.stack([radius * np.cos(angles), radius * np.sin(angles)], axis=-1)


def sample_topology(config: SystemConfig, rng: np.random.Generator) -> Topology:
    """
    采样拓扑

    Args:
        config: 系统配置
        rng: 显式的随机数生成器（每个回合独立的流）

    Returns:
        Topology: 用户在半径 cell_radius 的圆盘内均匀分布
    """
    num_users = config.num_users
    # 圆盘内均匀分布: r = R*sqrt(U)
    radii = config.cell_radius * np.sqrt(rng.uniform(0.0, 1.0, size=num_users))
    angles = rng.uniform(0.0, 2.0 * np.pi, size=num_users)
    user_positions = np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=-1)

    user_class = [UserClass.EMBB] * config.embb_users + [UserClass.URLLC] * config.urllc_users
    return Topology(
        ru_positions=ru_ring_positions(config.num_rus, config.cell_radius / 2.0),
        user_positions=user_positions,
        user_class=user_class,
    )


def path_loss_db(distance_m, min_distance: float = PATH_LOSS_MIN_DISTANCE):
    """路径损耗 128.1 + 37.6·log10(d/1000)，d 以米计并在 min_distance 处钳位"""
    distance = np.maximum(np.asarray(distance_m, dtype=float), min_distance)
    loss = 128.1 + 37.6 * np.log10(distance / 1000.0)
    if np.ndim(loss) == 0:
        return float(loss)
    return loss
