"""
界与最优基准方案
松弛上界逐帧给出目标的下界（吞吐的上界）；穷举方案逐帧选最优分配，仅适用于小实例
"""

import logging
from typing import Dict, Optional, Sequence

try:
    from core.system_config import SystemConfig
    from radio.assignment import RBAssignment
    from simulation.frame_loop import FrameContext
    from simulation.episode import EVALUATION_EPISODE_OFFSET, Rollout, generate_trace
    from simulation.metrics import MetricsSeries, outcome_records
    from simulation.trainer import require_valid
    from algorithms.baseline.baseline_interface import BaselineScheme, SchemeId
    from algorithms.baseline.relaxed_bound import MAX_ITERATIONS, relaxed_frame_bound
    from algorithms.baseline.brute_force import BRUTE_FORCE_LIMIT, brute_force_optimum, search_space_size
except ImportError:
    from ...core.system_config import SystemConfig
    from ...radio.assignment import RBAssignment
    from ...simulation.frame_loop import FrameContext
    from ...simulation.episode import EVALUATION_EPISODE_OFFSET, Rollout, generate_trace
    from ...simulation.metrics import MetricsSeries, outcome_records
    from ...simulation.trainer import require_valid
    from .baseline_interface import BaselineScheme, SchemeId
    from .relaxed_bound import MAX_ITERATIONS, relaxed_frame_bound
    from .brute_force import BRUTE_FORCE_LIMIT, brute_force_optimum, search_space_size

logger = logging.getLogger(__name__)

__all__ = ['RelaxedUpperBoundScheme', 'BruteForceScheme', 'run_relaxed_upper_bound', 'run_brute_force']


class RelaxedUpperBoundScheme(BaselineScheme):
    """
    连续松弛上界
    使用当前帧的完美信道信息；eMBB 积压按池化流体队列跨帧传递
    """
    scheme_id = SchemeId.RELAXED_UPPER_BOUND

    def run_seed(self, seed: int, power_points: Optional[Sequence[float]] = None) -> MetricsSeries:
        records = []
        num_frames = self.options.get('eval_frames') or self.config.eval_frames
        max_iterations = self.options.get('max_iterations', MAX_ITERATIONS)
        for config in self.power_configs(power_points):
            require_valid(config)
            ctx = FrameContext.build(config)
            trace = generate_trace(ctx, seed, EVALUATION_EPISODE_OFFSET, num_frames)
            backlog = 0.0
            not_converged = 0
            for inputs in trace.frames:
                bound = relaxed_frame_bound(ctx, inputs, backlog, max_iterations)
                # 池化积压不超过各RU队列上限之和
                backlog = min(bound.final_backlog, config.num_rus * config.queue_cap)
                not_converged += 0 if bound.converged else 1
                records.append({
                    'frame': inputs.frame,
                    'scheme': self.name,
                    'seed': int(seed),
                    'p_max_dbm': float(config.max_power_dbm),
                    'embb_throughput_bps': bound.embb_bits / config.frame_duration,
                    'worst_urllc_latency_s': bound.latency_bound,
                    'avg_queue_bits': bound.avg_queue_bits,
                    'reward': bound.reward,
                    'feasible': True,
                })
            if not_converged:
                logger.warning(f"relaxed bound: {not_converged}/{len(trace)} frames hit the iteration cap "
                               f"(seed {seed}, {config.max_power_dbm:.1f} dBm); certified bounds still valid")
        return MetricsSeries.from_records(records)


class BruteForceScheme(BaselineScheme):
    """逐帧穷举最优 RB 分配（启发式分流），无可行分配时该帧不分配任何RB"""
    scheme_id = SchemeId.BRUTE_FORCE

    def run_seed(self, seed: int, power_points: Optional[Sequence[float]] = None) -> MetricsSeries:
        records = []
        num_frames = self.options.get('eval_frames') or self.config.eval_frames
        limit = self.options.get('limit', BRUTE_FORCE_LIMIT)
        for config in self.power_configs(power_points):
            require_valid(config)
            ctx = FrameContext.build(config)
            logger.info(f"brute force search space: {search_space_size(ctx)} assignments per frame")
            trace = generate_trace(ctx, seed, EVALUATION_EPISODE_OFFSET, num_frames)
            rollout = Rollout(ctx, trace, 'heuristic')
            outcomes = []
            while not rollout.done:
                observation = rollout.observe()
                inputs = trace.frames[rollout.frame_index]
                best = brute_force_optimum(config, inputs, rollout.queues, observation.phi, limit, ctx)
                assignment = best.assignment
                if assignment is None:
                    assignment = RBAssignment.empty(ctx.grid, config.num_rus, config.num_users)
                outcomes.append(rollout.step(observation.phi, assignment))
            records.extend(outcome_records(outcomes, self.name, seed, config.max_power_dbm, config.frame_duration))
        return MetricsSeries.from_records(records)


def run_relaxed_upper_bound(config: SystemConfig, seed: int, options: Optional[Dict] = None) -> MetricsSeries:
    return RelaxedUpperBoundScheme(config, options).run_seed(seed)


def run_brute_force(config: SystemConfig, seed: int, options: Optional[Dict] = None) -> MetricsSeries:
    return BruteForceScheme(config, options).run_seed(seed)
