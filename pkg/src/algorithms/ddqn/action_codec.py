"""
因子化动作空间
每个切片的每个RB (f_i, t_i) 是一个分类头，类别 0 为空闲，c ≥ 1 对应 (m, u) = divmod(c−1, U)
"""

from typing import Sequence, Tuple

import numpy as np

try:
    from core.rb_grid import RBGrid
    from core.system_config import SystemConfig
    from radio.assignment import RBAssignment
except ImportError:
    from ...core.rb_grid import RBGrid
    from ...core.system_config import SystemConfig
    from ...radio.assignment import RBAssignment

__all__ = ['num_heads', 'num_choices', 'head_to_rb', 'decode_action', 'encode_action']


def num_heads(grid: RBGrid, slice_index: int) -> int:
    return grid[slice_index].num_resources


def num_choices(config: SystemConfig) -> int:
    return 1 + config.num_rus * config.num_users


def head_to_rb(head: int, grid: RBGrid, slice_index: int) -> Tuple[int, int]:
    """头索引到 (f_i, t_i)"""
    return divmod(head, grid[slice_index].num_ttis)


def decode_action(choices: Sequence[np.ndarray], grid: RBGrid, config: SystemConfig) -> RBAssignment:
    """两个智能体的选择拼成联合动作并解码为RB分配"""
    return RBAssignment.from_choices(choices, grid, config.num_rus, config.num_users)


def encode_action(assignment: RBAssignment) -> Tuple[np.ndarray, np.ndarray]:
    return tuple(assignment.choices(i) for i in range(len(assignment.owners)))
