"""
对比方案模块
所提方案、均匀分流、固定参数集、连续松弛上界与小规模穷举最优
"""

from .baseline_interface import SchemeId, SchemeResult, BaselineScheme
from .relaxed_bound import (
    RelaxedCapacity, RelaxedFrameBound, project_capped_simplex, relaxed_tick_capacity, relaxed_frame_bound)
from .brute_force import BRUTE_FORCE_LIMIT, BruteForceResult, search_space_size, brute_force_optimum
from .learned_schemes import (
    fixed_numerology_config, ProposedScheme, UniformPhiScheme, FixedNumerologyScheme,
    run_proposed, run_uniform_phi, run_fixed_numerology)
from .oracle_schemes import RelaxedUpperBoundScheme, BruteForceScheme, run_relaxed_upper_bound, run_brute_force
from .benchmark_manager import SCHEME_CLASSES, DEFAULT_SCHEMES, BenchmarkManager, build_scheme, run_quick_benchmark

__all__ = [
    'SchemeId', 'SchemeResult', 'BaselineScheme',
    'RelaxedCapacity', 'RelaxedFrameBound', 'project_capped_simplex', 'relaxed_tick_capacity', 'relaxed_frame_bound',
    'BRUTE_FORCE_LIMIT', 'BruteForceResult', 'search_space_size', 'brute_force_optimum',
    'fixed_numerology_config', 'ProposedScheme', 'UniformPhiScheme', 'FixedNumerologyScheme',
    'run_proposed', 'run_uniform_phi', 'run_fixed_numerology',
    'RelaxedUpperBoundScheme', 'BruteForceScheme', 'run_relaxed_upper_bound', 'run_brute_force',
    'SCHEME_CLASSES', 'DEFAULT_SCHEMES', 'BenchmarkManager', 'build_scheme', 'run_quick_benchmark',
]
