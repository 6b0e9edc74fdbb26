"""
DDQN智能体
每个切片一个智能体，评估网络选动作、目标网络估值；两个智能体共享同一标量奖励
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

try:
    from core.system_config import SystemConfig
    from core.errors import ShapeMismatchError
    from algorithms.ddqn.network import MLP, Adam, q_forward, td_loss_and_grads
    from algorithms.ddqn.replay_buffer import ReplayBuffer, Minibatch, store_transition
except ImportError:
    from ...core.system_config import SystemConfig
    from ...core.errors import ShapeMismatchError
    from .network import MLP, Adam, q_forward, td_loss_and_grads
    from .replay_buffer import ReplayBuffer, Minibatch, store_transition

logger = logging.getLogger(__name__)

__all__ = ['AgentSpec', 'DDQNAgent', 'ddqn_target', 'soft_update', 'hard_update', 'select_action']


@dataclass(frozen=True)
class AgentSpec:
    """智能体的维度描述"""
    name: str
    slice_index: int
    state_dim: int
    num_heads: int
    num_choices: int

    @property
    def output_dim(self) -> int:
        return self.num_heads * self.num_choices


def ddqn_target(rewards: np.ndarray, gamma: float, next_states: np.ndarray, eval_net: MLP, target_net: MLP,
                num_heads: int, terminals: Optional[np.ndarray] = None) -> np.ndarray:
    """
    y = r + γ·Q_target(s', argmax_a Q_eval(s', a))，逐头计算；终止帧 y = r

    Returns:
        np.ndarray: (B, H)
    """
    if eval_net.param_shapes != target_net.param_shapes:
        raise ShapeMismatchError("evaluation and target networks differ in shape")
    rewards = np.asarray(rewards, dtype=np.float64).reshape(-1)
    next_states = np.atleast_2d(next_states)
    if terminals is None:
        terminals = np.zeros(len(rewards), dtype=bool)

    best = np.argmax(q_forward(eval_net, next_states, num_heads), axis=-1)
    q_target = q_forward(target_net, next_states, num_heads)
    bootstrap = np.take_along_axis(q_target, best[..., None], axis=-1)[..., 0]
    continuing = (~np.asarray(terminals, dtype=bool)).astype(np.float64)
    return rewards[:, None] + gamma * continuing[:, None] * bootstrap


def soft_update(target_net: MLP, eval_net: MLP, tau: float):
    """θ^μ ← τ·θ^Q + (1−τ)·θ^μ"""
    for target_param, eval_param in zip(target_net.params, eval_net.params):
        target_param *= (1.0 - tau)
        target_param += tau * eval_param


def hard_update(target_net: MLP, eval_net: MLP):
    for target_param, eval_param in zip(target_net.params, eval_net.params):
        target_param[...] = eval_param


class DDQNAgent:
    """
    DDQN智能体

    eval_net/target_net 初始化为相同参数，replay 为本智能体的回放缓冲区
    """

    def __init__(self, spec: AgentSpec, config: SystemConfig, rng: Optional[np.random.Generator] = None,
                 eval_net: Optional[MLP] = None):
        self.spec = spec
        self.config = config
        layer_sizes = (spec.state_dim, *config.hidden_layers, spec.output_dim)
        self.eval_net = eval_net if eval_net is not None else MLP(layer_sizes, rng=rng)
        if self.eval_net.layer_sizes != layer_sizes:
            raise ShapeMismatchError(
                f"{spec.name}: network layers {self.eval_net.layer_sizes} != expected {layer_sizes}")
        self.target_net = self.eval_net.copy()
        self.optimizer = Adam(self.eval_net.param_shapes, config.learning_rate, config.adam_betas, config.adam_eps)
        self.replay = ReplayBuffer(config.replay_capacity)
        self.epsilon = float(config.epsilon_schedule[0])
        self.train_steps = 0

    @property
    def name(self) -> str:
        return self.spec.name

    def q_values(self, state: np.ndarray) -> np.ndarray:
        return q_forward(self.eval_net, state, self.spec.num_heads)

    def greedy_action(self, state: np.ndarray) -> np.ndarray:
        # np.argmax 平局取最小索引
        return np.argmax(self.q_values(state), axis=-1).astype(np.int64)

    def select_action(self, state: np.ndarray, rng: np.random.Generator, epsilon: Optional[float] = None) -> np.ndarray:
        """ε-贪婪：每帧一次随机数决定整个动作是探索还是贪婪"""
        epsilon = self.epsilon if epsilon is None else epsilon
        if rng.random() < epsilon:
            return rng.integers(0, self.spec.num_choices, size=self.spec.num_heads, dtype=np.int64)
        return self.greedy_action(state)

    def remember(self, state, action, reward: float, next_state, terminal: bool = False):
        store_transition(self.replay, state, action, reward, next_state, terminal)

    def train_on_batch(self, batch: Minibatch) -> float:
        """对一个小批量做一次 Adam 更新并更新目标网络，返回更新前的损失"""
        targets = ddqn_target(batch.rewards, self.config.discount, batch.next_states,
                              self.eval_net, self.target_net, self.spec.num_heads, batch.terminals)
        loss, grads = td_loss_and_grads(self.eval_net, batch.states, batch.actions, targets)
        self.optimizer.step(self.eval_net.params, grads)
        self.train_steps += 1

        if self.config.target_update == 'soft':
            soft_update(self.target_net, self.eval_net, self.config.soft_update_coeff)
        elif self.train_steps % self.config.target_update_period == 0:
            hard_update(self.target_net, self.eval_net)
        return loss

    def train_step(self, rng: np.random.Generator) -> Optional[float]:
        """从回放缓冲区采样训练一次；样本不足 batch_size 时不更新并返回 None"""
        batch = self.replay.sample(self.config.batch_size, rng)
        if batch is None:
            return None
        return self.train_on_batch(batch)

    def decay_epsilon(self):
        _, end, decay = self.config.epsilon_schedule
        self.epsilon = max(end, self.epsilon * decay)


def select_action(agent: DDQNAgent, state: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return agent.select_action(state, rng)
