"""
经验回放缓冲区：容量有限的先进先出环形存储，均匀采样
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

__all__ = ['Experience', 'Minibatch', 'ReplayBuffer', 'store_transition']


@dataclass(frozen=True)
class Experience:
    """单条经验 (s, a, r, s', terminal)"""
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    terminal: bool = False


@dataclass(frozen=True)
class Minibatch:
    states: np.ndarray       # (B, d)
    actions: np.ndarray      # (B, H)
    rewards: np.ndarray      # (B,)
    next_states: np.ndarray  # (B, d)
    terminals: np.ndarray    # (B,) bool

    def __len__(self):
        return len(self.rewards)

    @classmethod
    def from_experiences(cls, experiences) -> 'Minibatch':
        return cls(
            states=np.stack([e.state for e in experiences]),
            actions=np.stack([np.asarray(e.action, dtype=np.int64) for e in experiences]),
            rewards=np.array([e.reward for e in experiences], dtype=np.float64),
            next_states=np.stack([e.next_state for e in experiences]),
            terminals=np.array([e.terminal for e in experiences], dtype=bool),
        )


class ReplayBuffer:
    """回放缓冲区：列表环形存储，满后覆盖最旧的一条；下标按从旧到新计"""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._memory: List[Experience] = []
        self._position = 0

    def __len__(self):
        return len(self._memory)

    def __getitem__(self, index: int) -> Experience:
        size = len(self._memory)
        if not -size <= index < size:
            raise IndexError(f"replay index {index} out of range for {size} experiences")
        return self._memory[(self._position + index) % size]

    def append(self, experience: Experience):
        if len(self._memory) < self.capacity:
            self._memory.append(experience)
        else:
            self._memory[self._position] = experience
            self._position = (self._position + 1) % self.capacity

    def sample(self, batch_size: int, rng: np.random.Generator) -> Optional[Minibatch]:
        """均匀无放回采样；数据不足时返回 None"""
        if len(self._memory) < batch_size:
            return None
        indices = rng.choice(len(self._memory), size=batch_size, replace=False)
        return Minibatch.from_experiences([self._memory[i] for i in indices])


def store_transition(buffer: ReplayBuffer, state, action, reward: float, next_state,
                     terminal: bool = False) -> ReplayBuffer:
    buffer.append(Experience(
        state=np.asarray(state, dtype=np.float64),
        action=np.asarray(action, dtype=np.int64),
        reward=float(reward),
        next_state=np.asarray(next_state, dtype=np.float64),
        terminal=bool(terminal),
    ))
    return buffer
