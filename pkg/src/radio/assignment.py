"""
RB分配与功率分配的数据结构
每个切片的 RB 由一个所有者网格表示，结构上保证正交性：一个RB只属于一个 (m,u)
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

try:
    from core.rb_grid import RBGrid
except ImportError:
    from ..core.rb_grid import RBGrid

__all__ = ['IDLE', 'RBAssignment', 'PowerAllocation', 'orthogonality_breaches']

# 空闲RB的所有者编码
IDLE = -1


@dataclass(frozen=True)
class RBAssignment:
    """
    一帧的RB分配
    owners[i] 形状 (F_i, T_i)；值为 IDLE 或 m*U + u（全局用户索引）
    """
    owners: Tuple[np.ndarray, np.ndarray]
    num_rus: int
    num_users: int

    @classmethod
    def empty(cls, grid: RBGrid, num_rus: int, num_users: int) -> 'RBAssignment':
        owners = tuple(np.full((s.num_rbs, s.num_ttis), IDLE, dtype=np.int64) for s in grid.slices)
        return cls(owners=owners, num_rus=num_rus, num_users=num_users)

    @classmethod
    def from_choices(cls, choices: Sequence[np.ndarray], grid: RBGrid,
                     num_rus: int, num_users: int) -> 'RBAssignment':
        """由每个切片的类别选择（0=空闲，c>0 对应 owner=c-1）构造，按 (f, t) 行优先"""
        owners = []
        for slice_choices, slice_grid in zip(choices, grid.slices):
            arr = np.asarray(slice_choices, dtype=np.int64).reshape(slice_grid.num_rbs, slice_grid.num_ttis)
            owners.append(arr - 1)
        return cls(owners=tuple(owners), num_rus=num_rus, num_users=num_users)

    @classmethod
    def from_binary(cls, binaries: Sequence[np.ndarray]) -> 'RBAssignment':
        """
        由二值张量 pi[i] (M, U, F_i, T_i) 构造

        Raises:
            ValueError: 某个RB被分配给多个 (m,u)
        """
        breaches = orthogonality_breaches(binaries)
        if breaches:
            raise ValueError(f"orthogonality violated at (slice, f, t) {breaches[:5]}")
        num_rus, num_users = binaries[0].shape[:2]
        owners = []
        for pi in binaries:
            pi = np.asarray(pi)
            flat = pi.reshape(num_rus * num_users, pi.shape[2], pi.shape[3])
            owner = np.where(flat.any(axis=0), flat.argmax(axis=0), IDLE).astype(np.int64)
            owners.append(owner)
        return cls(owners=tuple(owners), num_rus=num_rus, num_users=num_users)

    def owner(self, slice_index: int, rb: int, tti: int) -> Optional[Tuple[int, int]]:
        code = int(self.owners[slice_index][rb, tti])
        if code == IDLE:
            return None
        return divmod(code, self.num_users)

    def choices(self, slice_index: int) -> np.ndarray:
        """每个头的类别选择 (F_i·T_i,)"""
        return (self.owners[slice_index] + 1).reshape(-1)

    def encode(self) -> Tuple[int, ...]:
        """字典序比较用的编码（切片0在前）"""
        return tuple(int(c) for i in range(len(self.owners)) for c in self.choices(i))

    def binary(self, slice_index: int) -> np.ndarray:
        """二值张量 (M, U, F_i, T_i)"""
        owner = self.owners[slice_index]
        num_rbs, num_ttis = owner.shape
        pi = np.zeros((self.num_rus * self.num_users, num_rbs, num_ttis), dtype=np.uint8)
        rb_idx, tti_idx = np.nonzero(owner != IDLE)
        pi[owner[rb_idx, tti_idx], rb_idx, tti_idx] = 1
        return pi.reshape(self.num_rus, self.num_users, num_rbs, num_ttis)

    def user_mask(self, slice_index: int, user: int, tti_limit: Optional[int] = None) -> np.ndarray:
        """用户 u 在切片 i（前 tti_limit 个TTI内）跨所有RU的RB掩码 (F_i, T_i)"""
        owner = self.owners[slice_index]
        mask = (owner != IDLE) & (owner % self.num_users == user)
        if tti_limit is not None:
            mask[:, tti_limit:] = False
        return mask

    def count(self, slice_index: int, user: int, tti_limit: Optional[int] = None) -> int:
        return int(self.user_mask(slice_index, user, tti_limit).sum())

    def active(self, slice_index: int, tti: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """切片 i 在 TTI t_i 的已分配RB: (rb, ru, user)"""
        column = self.owners[slice_index][:, tti] if self.owners[slice_index].size else np.zeros(0, dtype=np.int64)
        rbs = np.nonzero(column != IDLE)[0]
        rus, users = np.divmod(column[rbs], self.num_users)
        return rbs, rus, users

    @property
    def num_assigned(self) -> int:
        return int(sum((o != IDLE).sum() for o in self.owners))


def orthogonality_breaches(binaries: Sequence[np.ndarray]) -> List[Tuple[int, int, int]]:
    """二值张量中同一RB被多个 (m,u) 占用的位置 (slice, f, t)"""
    breaches = []
    for slice_index, pi in enumerate(binaries):
        per_rb = np.asarray(pi).sum(axis=(0, 1))
        for rb, tti in np.argwhere(per_rb > 1):
            breaches.append((slice_index, int(rb), int(tti)))
    return breaches


@dataclass(frozen=True)
class PowerAllocation:
    """
    单个细时钟TTI的功率分配（仅包含活跃RB）
    每个条目: 切片、RB、RU、用户、功率 (W)
    """
    slice_index: np.ndarray
    rb: np.ndarray
    ru: np.ndarray
    user: np.ndarray
    power: np.ndarray

    @classmethod
    def empty(cls) -> 'PowerAllocation':
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z, z, z, np.zeros(0))

    def per_ru_total(self, num_rus: int) -> np.ndarray:
        return np.bincount(self.ru, weights=self.power, minlength=num_rus)

    def dense(self, slice_index: int, num_rus: int, num_users: int, num_rbs: int) -> np.ndarray:
        """展开为 (M, U, F_i) 的功率张量"""
        dense = np.zeros((num_rus, num_users, num_rbs))
        sel = self.slice_index == slice_index
        dense[self.ru[sel], self.user[sel], self.rb[sel]] = self.power[sel]
        return dense
