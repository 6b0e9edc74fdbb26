#!/usr/bin/env python3
"""
结果导出器
逐帧指标CSV、聚合表、学习曲线、运行清单与实验摘要报告

指标CSV格式：逗号分隔，表头
    frame,scheme,seed,p_max_dbm,embb_throughput_bps,worst_urllc_latency_s,avg_queue_bits,reward,feasible
浮点数以 repr 写出（最短可回读十进制），feasible 为 True/False
"""

import csv
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

try:
    from core.system_config import SystemConfig
    from simulation.metrics import METRIC_COLUMNS, MetricsSeries
except ImportError:
    from ..core.system_config import SystemConfig
    from ..simulation.metrics import METRIC_COLUMNS, MetricsSeries

logger = logging.getLogger(__name__)

__all__ = [
    'write_metrics', 'read_metrics', 'merge_metrics_files', 'config_hash', 'code_version',
    'RunManifest', 'ResultExporter',
]

_DTYPES = {
    'frame': 'int64', 'scheme': 'object', 'seed': 'int64', 'p_max_dbm': 'float64',
    'embb_throughput_bps': 'float64', 'worst_urllc_latency_s': 'float64',
    'avg_queue_bits': 'float64', 'reward': 'float64', 'feasible': 'bool',
}


def _cell(column: str, value) -> str:
    if column in ('frame', 'seed'):
        return str(int(value))
    if column == 'scheme':
        return str(value)
    if column == 'feasible':
        return str(bool(value))
    return repr(float(value))


def write_metrics(series: MetricsSeries, path) -> Path:
    """写出逐帧指标；空序列只写表头"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(METRIC_COLUMNS)
        for row in series.frame.itertuples(index=False):
            writer.writerow([_cell(c, v) for c, v in zip(METRIC_COLUMNS, row)])
    return path


def read_metrics(path) -> MetricsSeries:
    frame = pd.read_csv(path, float_precision='round_trip', dtype={'scheme': object})
    missing = [c for c in METRIC_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"{path}: metrics file is missing columns {missing}")
    if frame['feasible'].dtype == object:
        frame['feasible'] = frame['feasible'].map({'True': True, 'False': False})
    return MetricsSeries(frame.astype(_DTYPES))


def merge_metrics_files(paths: Iterable) -> MetricsSeries:
    """合并各工作进程写出的指标文件"""
    return MetricsSeries.concat(read_metrics(p) for p in paths)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def config_hash(config: SystemConfig) -> str:
    """配置的 SHA-256（字段名排序的规范 JSON）"""
    canonical = json.dumps(_jsonable(asdict(config)), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def code_version() -> str:
    try:
        from src import __version__
    except ImportError:
        try:
            from .. import __version__
        except ImportError:
            __version__ = 'unknown'
    return __version__


@dataclass
class RunManifest:
    """每次运行的清单：由 (配置, 种子, 代码版本) 可完全复现"""
    config_hash: str
    seeds: List[int]
    scheme: str
    code_version: str
    started_at: str
    finished_at: str = ''
    output_paths: Dict[str, str] = field(default_factory=dict)
    config_path: Optional[str] = None

    @classmethod
    def start(cls, config: SystemConfig, seeds: Sequence[int], scheme: str,
              config_path: Optional[str] = None) -> 'RunManifest':
        return cls(config_hash=config_hash(config), seeds=[int(s) for s in seeds], scheme=scheme,
                   code_version=code_version(), started_at=datetime.now().isoformat(timespec='seconds'),
                   config_path=config_path)

    def finish(self, **output_paths: str) -> 'RunManifest':
        self.output_paths.update({k: str(v) for k, v in output_paths.items()})
        self.finished_at = datetime.now().isoformat(timespec='seconds')
        return self

    def save(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(asdict(self), f, indent=2, ensure_ascii=False)
        return path

    @classmethod
    def load(cls, path) -> 'RunManifest':
        with open(path, 'r', encoding='utf-8') as f:
            return cls(**json.load(f))


class ResultExporter:
    """结果导出器类"""

    def __init__(self, output_dir: str = "results"):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def export_metrics(self, series: MetricsSeries, name: str, timestamp: str = None) -> str:
        """
        导出逐帧指标

        Args:
            series: 指标序列
            name: 文件名前缀（通常为方案名或 sweep）
            timestamp: 时间戳，缺省为当前时间
        """
        timestamp = timestamp or datetime.now().strftime("%Y%m%d_%H%M%S")
        filepath = self.output_dir / f"{name}_metrics_{timestamp}.csv"
        print(f"📊 导出逐帧指标到: {filepath}")
        write_metrics(series, filepath)
        print(f"   ✅ 已导出 {len(series)} 行")
        return str(filepath)

    def export_aggregate(self, series: MetricsSeries, name: str, timestamp: str = None) -> str:
        """按 (方案, 功率) 的均值与标准差，供绘图工具直接读取"""
        timestamp = timestamp or datetime.now().strftime("%Y%m%d_%H%M%S")
        filepath = self.output_dir / f"{name}_aggregate_{timestamp}.csv"
        series.aggregate().to_csv(filepath, index=False, float_format=None)
        print(f"📊 导出聚合结果到: {filepath}")
        return str(filepath)

    def export_learning_curve(self, curve: Sequence[float], scheme: str, seed: int, timestamp: str = None) -> str:
        timestamp = timestamp or datetime.now().strftime("%Y%m%d_%H%M%S")
        filepath = self.output_dir / f"{scheme}_seed{seed}_learning_curve_{timestamp}.csv"
        with open(filepath, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f)
            writer.writerow(['epoch', 'mean_reward'])
            for epoch, value in enumerate(curve):
                writer.writerow([epoch, repr(float(value))])
        print(f"📈 导出学习曲线到: {filepath}")
        return str(filepath)

    def write_manifest(self, manifest: RunManifest, name: str, timestamp: str = None) -> str:
        timestamp = timestamp or datetime.now().strftime("%Y%m%d_%H%M%S")
        filepath = self.output_dir / f"{name}_manifest_{timestamp}.json"
        manifest.save(filepath)
        return str(filepath)

    def generate_summary_report(self, series: MetricsSeries, config: SystemConfig,
                                extra: Optional[Dict[str, Any]] = None, timestamp: str = None) -> str:
        """
        生成实验摘要报告

        Args:
            series: 所有方案的逐帧指标
            config: 系统配置
            extra: 附加信息（例如训练耗时），逐行写出
            timestamp: 时间戳
        """
        timestamp = timestamp or datetime.now().strftime("%Y%m%d_%H%M%S")
        filepath = self.output_dir / f"experiment_summary_{timestamp}.txt"
        print(f"📝 生成实验摘要报告: {filepath}")

        aggregate = series.aggregate()
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write("ORAN流量引导实验摘要报告\n")
            f.write("=" * 60 + "\n")
            f.write(f"生成时间: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n")
            f.write(f"代码版本: {code_version()}\n")
            f.write(f"配置哈希: {config_hash(config)}\n\n")

            f.write("系统配置:\n")
            f.write("-" * 30 + "\n")
            f.write(f"  RU数: {config.num_rus}, eMBB用户: {config.embb_users}, uRLLC用户: {config.urllc_users}\n")
            f.write(f"  带宽: {config.bandwidth / 1e6:.2f} MHz, α={config.alpha}, 保护带: {config.guard_band / 1e3:.0f} kHz\n")
            for i, n in enumerate(config.numerologies):
                f.write(f"  切片{i + 1}: β={n.rb_bandwidth / 1e3:.0f} kHz, δ={n.tti_duration * 1e3:.3f} ms\n")
            f.write(f"  帧长: {config.frame_duration * 1e3:.1f} ms, 时延预算: {config.latency_budget * 1e3:.2f} ms\n\n")

            f.write("方案对比:\n")
            f.write("-" * 30 + "\n")
            for row in aggregate.itertuples(index=False):
                f.write(f"{row.scheme} @ {row.p_max_dbm:.1f} dBm ({row.seeds} 种子, {row.frames} 帧):\n")
                f.write(f"  eMBB吞吐: {row.embb_throughput_bps_mean / 1e6:.4f} ± "
                        f"{np.nan_to_num(row.embb_throughput_bps_std) / 1e6:.4f} Mbps\n")
                f.write(f"  最差uRLLC时延: {row.worst_urllc_latency_s_mean * 1e3:.4f} ms\n")
                f.write(f"  平均队列: {row.avg_queue_bits_mean:.1f} bits\n")
                f.write(f"  平均奖励: {row.reward_mean:.4f}\n")
                f.write(f"  可行帧比例: {row.feasible_mean * 100:.2f}%\n")
            f.write("\n")

            if extra:
                f.write("附加信息:\n")
                f.write("-" * 30 + "\n")
                for key, value in extra.items():
                    f.write(f"  {key}: {value}\n")
                f.write("\n")

            f.write("=" * 60 + "\n")
            f.write("报告生成完成\n")

        print(f"   ✅ 已生成实验摘要报告")
        return str(filepath)
