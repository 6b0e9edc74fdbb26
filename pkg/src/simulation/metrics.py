"""
指标序列
每帧一行，列与指标CSV一致；跨种子、方案、功率点的聚合用 pandas 完成
"""

from typing import Iterable, List, Optional

import numpy as np
import pandas as pd

try:
    from simulation.frame_loop import FrameOutcome
except ImportError:
    from .frame_loop import FrameOutcome

__all__ = ['METRIC_COLUMNS', 'MetricsSeries', 'outcome_records']

METRIC_COLUMNS = [
    'frame', 'scheme', 'seed', 'p_max_dbm', 'embb_throughput_bps',
    'worst_urllc_latency_s', 'avg_queue_bits', 'reward', 'feasible',
]

_VALUE_COLUMNS = ['embb_throughput_bps', 'worst_urllc_latency_s', 'avg_queue_bits', 'reward', 'feasible']


def outcome_records(outcomes: Iterable[FrameOutcome], scheme: str, seed: int, p_max_dbm: float,
                    frame_duration: float) -> List[dict]:
    return [{
        'frame': int(o.frame),
        'scheme': scheme,
        'seed': int(seed),
        'p_max_dbm': float(p_max_dbm),
        'embb_throughput_bps': float(o.embb_throughput(frame_duration)),
        'worst_urllc_latency_s': float(o.worst_latency),
        'avg_queue_bits': float(o.avg_queue_bits),
        'reward': float(o.reward),
        'feasible': bool(o.feasible),
    } for o in outcomes]


class MetricsSeries:
    """逐帧指标"""

    def __init__(self, frame: Optional[pd.DataFrame] = None):
        if frame is None:
            frame = pd.DataFrame({c: pd.Series(dtype=_dtype(c)) for c in METRIC_COLUMNS})
        missing = [c for c in METRIC_COLUMNS if c not in frame.columns]
        if missing:
            raise ValueError(f"metrics frame is missing columns {missing}")
        self.frame = frame[METRIC_COLUMNS].reset_index(drop=True)

    @classmethod
    def from_records(cls, records: List[dict]) -> 'MetricsSeries':
        if not records:
            return cls()
        return cls(pd.DataFrame.from_records(records, columns=METRIC_COLUMNS))

    @classmethod
    def concat(cls, series: Iterable['MetricsSeries']) -> 'MetricsSeries':
        frames = [s.frame for s in series if len(s)]
        if not frames:
            return cls()
        merged = pd.concat(frames, ignore_index=True)
        return cls(merged.sort_values(['scheme', 'p_max_dbm', 'seed', 'frame'], kind='stable'))

    def __len__(self):
        return len(self.frame)

    def __eq__(self, other):
        return isinstance(other, MetricsSeries) and self.frame.equals(other.frame)

    def for_scheme(self, scheme: str) -> 'MetricsSeries':
        return MetricsSeries(self.frame[self.frame['scheme'] == scheme])

    def aggregate(self) -> pd.DataFrame:
        """按 (方案, 功率) 聚合：各指标均值、标准差与可行帧比例"""
        if not len(self):
            return pd.DataFrame(columns=['scheme', 'p_max_dbm', 'frames'])
        values = self.frame.assign(feasible=self.frame['feasible'].astype(float))
        grouped = values.groupby(['scheme', 'p_max_dbm'], sort=True)
        stats = grouped[_VALUE_COLUMNS].agg(['mean', 'std'])
        stats.columns = [f"{name}_{stat}" for name, stat in stats.columns]
        stats['frames'] = grouped.size()
        stats['seeds'] = grouped['seed'].nunique()
        return stats.reset_index()

    def episode_summary(self) -> pd.DataFrame:
        """每个 (方案, 种子, 功率) 回合的均值"""
        values = self.frame.assign(feasible=self.frame['feasible'].astype(float))
        return values.groupby(['scheme', 'seed', 'p_max_dbm'], sort=True)[_VALUE_COLUMNS].mean().reset_index()

    def mean(self, column: str) -> float:
        return float(np.mean(self.frame[column])) if len(self) else 0.0


def _dtype(column: str):
    if column in ('frame', 'seed'):
        return 'int64'
    if column == 'scheme':
        return 'object'
    if column == 'feasible':
        return 'bool'
    return 'float64'
