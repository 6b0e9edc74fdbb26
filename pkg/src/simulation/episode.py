"""
回合：随机流、轨迹生成与单次推演
同一种子下所有方案使用相同的拓扑与到达序列（配对比较）
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

try:
    from core.system_config import SystemConfig, EMBB_SLICE, URLLC_SLICE
    from radio.assignment import RBAssignment
    from radio.slicing import SliceQuotas
    from topology.topology_base import Topology, sample_topology
    from topology.channel_model import ChannelGains, sample_channel_gains
    from traffic.traffic_model import sample_arrivals
    from algorithms.flow_split import RateWindow, estimate_flow_split, uniform_flow_split, push_observation
    from simulation.frame_loop import FrameContext, FrameInputs, FrameOutcome, frame_quotas, run_frame
except ImportError:
    from ..core.system_config import SystemConfig, EMBB_SLICE, URLLC_SLICE
    from ..radio.assignment import RBAssignment
    from ..radio.slicing import SliceQuotas
    from ..topology.topology_base import Topology, sample_topology
    from ..topology.channel_model import ChannelGains, sample_channel_gains
    from ..traffic.traffic_model import sample_arrivals
    from ..algorithms.flow_split import RateWindow, estimate_flow_split, uniform_flow_split, push_observation
    from .frame_loop import FrameContext, FrameInputs, FrameOutcome, frame_quotas, run_frame

logger = logging.getLogger(__name__)

__all__ = [
    'EVALUATION_EPISODE_OFFSET', 'topology_rng', 'exploration_rng', 'channel_rng', 'traffic_rng',
    'EpisodeTrace', 'generate_trace', 'FrameObservation', 'Rollout', 'run_episode',
]

# 评估回合的编号偏移，与训练回合的随机流错开
EVALUATION_EPISODE_OFFSET = 1_000_000

_TOPOLOGY, _EXPLORATION, _CHANNEL, _TRAFFIC = range(4)


def _rng(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(list(key)))


def topology_rng(seed: int) -> np.random.Generator:
    return _rng(seed, _TOPOLOGY)


def exploration_rng(seed: int) -> np.random.Generator:
    return _rng(seed, _EXPLORATION)


def channel_rng(seed: int, episode: int) -> np.random.Generator:
    return _rng(seed, _CHANNEL, episode)


def traffic_rng(seed: int, episode: int) -> np.random.Generator:
    return _rng(seed, _TRAFFIC, episode)


@dataclass(frozen=True)
class EpisodeTrace:
    """一个回合的全部随机输入"""
    topology: Topology
    frames: List[FrameInputs]

    def __len__(self):
        return len(self.frames)


def generate_trace(ctx: FrameContext, seed: int, episode: int, num_frames: int,
                   topology: Optional[Topology] = None) -> EpisodeTrace:
    """
    生成回合轨迹

    拓扑来自种子的拓扑流（同一种子的所有回合共享部署）；信道与到达来自按回合划分的独立流
    """
    config = ctx.config
    if topology is None:
        topology = sample_topology(config, topology_rng(seed))
    chan = channel_rng(seed, episode)
    traf = traffic_rng(seed, episode)
    frames = []
    for t in range(num_frames):
        gains = sample_channel_gains(topology, ctx.grid, chan, fading_block=config.fading_block,
                                     min_distance=config.min_distance)
        frames.append(FrameInputs(frame=t, gains=gains, arrivals=sample_arrivals(config, traf, t)))
    return EpisodeTrace(topology=topology, frames=frames)


@dataclass(frozen=True)
class FrameObservation:
    """帧初智能体可见的信息（信道只到上一帧）"""
    frame: int
    packets: np.ndarray
    phi: np.ndarray
    queues_prev: np.ndarray
    gains_prev: Optional[Tuple[np.ndarray, np.ndarray]]
    quotas: SliceQuotas


class Rollout:
    """
    单个可变的仿真世界
    队列跨帧保留，每回合重置；分流由速率窗口估计或固定为均匀
    """

    def __init__(self, ctx: FrameContext, trace: EpisodeTrace, flow_split: str = 'heuristic'):
        if flow_split not in ('heuristic', 'uniform'):
            raise ValueError(f"unknown flow split mode: {flow_split}")
        self.ctx = ctx
        self.trace = trace
        self.flow_split = flow_split
        config = ctx.config
        self.queues = np.zeros((config.num_rus, config.num_users))
        self.window = RateWindow(config.window)
        self.gains_prev: Optional[Tuple[np.ndarray, np.ndarray]] = None
        self.frame_index = 0
        self.totals = {'arrival_bits': 0.0, 'served_bits': 0.0, 'dropped_bits': 0.0}

    @property
    def done(self) -> bool:
        return self.frame_index >= len(self.trace)

    def current_phi(self) -> np.ndarray:
        config = self.ctx.config
        # 首帧及均匀方案: φ = 1/M
        if self.flow_split == 'uniform' or len(self.window) == 0:
            return uniform_flow_split(config.num_rus, config.num_users).phi
        return estimate_flow_split(self.window).phi

    def observe(self, frame_index: Optional[int] = None) -> FrameObservation:
        index = self.frame_index if frame_index is None else frame_index
        inputs = self.trace.frames[index]
        return FrameObservation(
            frame=index,
            packets=inputs.arrivals.packets,
            phi=self.current_phi(),
            queues_prev=self.queues.copy(),
            gains_prev=self.gains_prev,
            quotas=frame_quotas(self.ctx, inputs.arrivals),
        )

    def step(self, phi: np.ndarray, assignment: RBAssignment) -> FrameOutcome:
        """执行当前帧并推进世界状态"""
        inputs = self.trace.frames[self.frame_index]
        outcome = run_frame(self.ctx, self.queues, phi, assignment, inputs)

        self.queues = outcome.queues
        # 分流观测使用可达比特，避免需求驱动的吸收态
        push_observation(self.window, outcome.capacity_bits / self.ctx.config.frame_duration)
        self.gains_prev = (inputs.gains.frame_mean(EMBB_SLICE), inputs.gains.frame_mean(URLLC_SLICE))
        self.frame_index += 1

        self.totals['arrival_bits'] += float(outcome.arrival_bits.sum())
        self.totals['served_bits'] += float(outcome.served_bits.sum())
        self.totals['dropped_bits'] += float(outcome.dropped_bits.sum())
        return outcome

    def conservation_gap(self) -> float:
        """回合内 到达 − 服务 − 帧末队列 − 丢弃"""
        return (self.totals['arrival_bits'] - self.totals['served_bits']
                - float(self.queues.sum()) - self.totals['dropped_bits'])


def run_episode(ctx: FrameContext, trace: EpisodeTrace,
                policy: Callable[[FrameObservation], RBAssignment],
                flow_split: str = 'heuristic') -> List[FrameOutcome]:
    """用给定的分配策略推演整个回合"""
    rollout = Rollout(ctx, trace, flow_split)
    outcomes = []
    while not rollout.done:
        observation = rollout.observe()
        outcomes.append(rollout.step(observation.phi, policy(observation)))
    return outcomes
