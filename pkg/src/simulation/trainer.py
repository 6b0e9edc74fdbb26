"""
多智能体DDQN训练与贪婪评估
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

try:
    from core.system_config import SystemConfig, EMBB_SLICE, URLLC_SLICE
    from core.errors import ConfigError
    from core.system_config import validate_config
    from radio.assignment import RBAssignment
    from algorithms.ddqn.agent import AgentSpec, DDQNAgent
    from algorithms.ddqn.action_codec import num_heads, num_choices, decode_action
    from algorithms.ddqn.state_encoder import state_dim, encode_state
    from simulation.frame_loop import FrameContext
    from simulation.episode import (
        EVALUATION_EPISODE_OFFSET, FrameObservation, Rollout, generate_trace, exploration_rng, run_episode)
    from simulation.metrics import MetricsSeries, outcome_records
except ImportError:
    from ..core.system_config import SystemConfig, EMBB_SLICE, URLLC_SLICE
    from ..core.errors import ConfigError
    from ..core.system_config import validate_config
    from ..radio.assignment import RBAssignment
    from ..algorithms.ddqn.agent import AgentSpec, DDQNAgent
    from ..algorithms.ddqn.action_codec import num_heads, num_choices, decode_action
    from ..algorithms.ddqn.state_encoder import state_dim, encode_state
    from .frame_loop import FrameContext
    from .episode import (
        EVALUATION_EPISODE_OFFSET, FrameObservation, Rollout, generate_trace, exploration_rng, run_episode)
    from .metrics import MetricsSeries, outcome_records

logger = logging.getLogger(__name__)

__all__ = [
    'AgentPair', 'TrainingResult', 'build_agents', 'encode_observation', 'ddqn_policy',
    'train', 'evaluate', 'require_valid',
]

AgentPair = Tuple[DDQNAgent, DDQNAgent]

_AGENT_NAMES = ('embb_slice', 'urllc_slice')
_INIT_STREAM = 4


def require_valid(config: SystemConfig):
    violations = validate_config(config)
    if violations:
        raise ConfigError("invalid configuration: " + "; ".join(str(v) for v in violations), violations)


@dataclass
class TrainingResult:
    agents: AgentPair
    learning_curve: np.ndarray
    losses: List[float] = field(default_factory=list)
    elapsed: float = 0.0


def build_agents(ctx: FrameContext, seed: int) -> AgentPair:
    """每个切片一个智能体，评估网络与目标网络初始参数相同"""
    config, grid = ctx.config, ctx.grid
    rng = np.random.default_rng(np.random.SeedSequence([seed, _INIT_STREAM]))
    agents = []
    for slice_index in (EMBB_SLICE, URLLC_SLICE):
        spec = AgentSpec(
            name=_AGENT_NAMES[slice_index],
            slice_index=slice_index,
            state_dim=state_dim(config, grid, slice_index),
            num_heads=num_heads(grid, slice_index),
            num_choices=num_choices(config),
        )
        agents.append(DDQNAgent(spec, config, rng))
    return tuple(agents)


def encode_observation(ctx: FrameContext, observation: FrameObservation, slice_index: int) -> np.ndarray:
    gains_prev = None if observation.gains_prev is None else observation.gains_prev[slice_index]
    return encode_state(observation.packets, observation.phi, observation.queues_prev, gains_prev,
                        observation.quotas, ctx.config, ctx.grid, slice_index)


def ddqn_policy(ctx: FrameContext, agents: AgentPair,
                rng: Optional[np.random.Generator] = None) -> Callable[[FrameObservation], RBAssignment]:
    """rng 为 None 时贪婪（ε=0）"""

    def policy(observation: FrameObservation) -> RBAssignment:
        choices = []
        for agent in agents:
            state = encode_observation(ctx, observation, agent.spec.slice_index)
            if rng is None:
                choices.append(agent.greedy_action(state))
            else:
                choices.append(agent.select_action(state, rng))
        return decode_action(choices, ctx.grid, ctx.config)

    return policy


def train(config: SystemConfig, seed: int, epochs: Optional[int] = None, flow_split: str = 'heuristic',
          agents: Optional[AgentPair] = None, progress_every: int = 0) -> TrainingResult:
    """
    训练两个协作智能体

    Args:
        config: 系统配置
        seed: 随机种子（拓扑、信道、到达、探索各自独立的流）
        epochs: 回合数，缺省取 config.epochs
        flow_split: 'heuristic' 或 'uniform'
        agents: 继续训练已有的智能体
        progress_every: >0 时每隔若干回合打印进度

    Returns:
        TrainingResult: 智能体与每回合平均奖励曲线
    """
    require_valid(config)
    ctx = FrameContext.build(config)
    epochs = config.epochs if epochs is None else epochs
    agents = agents if agents is not None else build_agents(ctx, seed)
    rng = exploration_rng(seed)
    topology = None
    curve = []
    losses = []
    start = time.time()

    for epoch in range(epochs):
        trace = generate_trace(ctx, seed, epoch, config.frames_per_episode, topology)
        topology = trace.topology
        rollout = Rollout(ctx, trace, flow_split)
        observation = rollout.observe()
        states = [encode_observation(ctx, observation, a.spec.slice_index) for a in agents]
        rewards = []

        while not rollout.done:
            actions = [agent.select_action(state, rng) for agent, state in zip(agents, states)]
            assignment = decode_action(actions, ctx.grid, config)
            outcome = rollout.step(observation.phi, assignment)
            terminal = rollout.done
            if not terminal:
                observation = rollout.observe()
                next_states = [encode_observation(ctx, observation, a.spec.slice_index) for a in agents]
            else:
                next_states = states

            for agent, state, action, next_state in zip(agents, states, actions, next_states):
                agent.remember(state, action, outcome.reward, next_state, terminal)
                loss = agent.train_step(rng)
                if loss is not None:
                    losses.append(loss)
            rewards.append(outcome.reward)
            states = next_states

        for agent in agents:
            agent.decay_epsilon()
        curve.append(float(np.mean(rewards)) if rewards else 0.0)
        logger.debug(f"epoch {epoch}: mean reward {curve[-1]:.4f}, epsilon {agents[0].epsilon:.3f}")
        if progress_every and (epoch + 1) % progress_every == 0:
            print(f"   回合 {epoch + 1}/{epochs}: 平均奖励={curve[-1]:.4f}, ε={agents[0].epsilon:.3f}")

    elapsed = time.time() - start
    logger.info(f"training finished: seed={seed}, epochs={epochs}, {elapsed:.1f}s")
    return TrainingResult(agents=agents, learning_curve=np.array(curve), losses=losses, elapsed=elapsed)


def evaluate(agents: AgentPair, config: SystemConfig, seeds: Sequence[int], scheme: str = 'proposed',
             flow_split: str = 'heuristic', num_frames: Optional[int] = None) -> MetricsSeries:
    """
    贪婪评估

    每个种子推演一个评估回合；同一种子的轨迹与其它方案相同
    """
    require_valid(config)
    ctx = FrameContext.build(config)
    num_frames = config.eval_frames if num_frames is None else num_frames
    policy = ddqn_policy(ctx, agents)
    records = []
    for seed in seeds:
        trace = generate_trace(ctx, seed, EVALUATION_EPISODE_OFFSET, num_frames)
        outcomes = run_episode(ctx, trace, policy, flow_split)
        records.extend(outcome_records(outcomes, scheme, seed, config.max_power_dbm, config.frame_duration))
    return MetricsSeries.from_records(records)
