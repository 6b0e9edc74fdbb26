"""
轨迹导出与回放
一个目录对应一个回合：topology.csv、gains.csv、arrivals.csv，浮点数以最短可回读十进制写出
"""

import csv
import logging
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd

try:
    from core.errors import TraceError
    from core.system_config import SystemConfig
    from core.rb_grid import RBGrid
    from topology.topology_base import Topology, UserClass
    from topology.channel_model import ChannelGains
    from traffic.traffic_model import TrafficArrivals
    from simulation.frame_loop import FrameInputs
    from simulation.episode import EpisodeTrace
except ImportError:
    from ..core.errors import TraceError
    from ..core.system_config import SystemConfig
    from ..core.rb_grid import RBGrid
    from ..topology.topology_base import Topology, UserClass
    from ..topology.channel_model import ChannelGains
    from ..traffic.traffic_model import TrafficArrivals
    from ..simulation.frame_loop import FrameInputs
    from ..simulation.episode import EpisodeTrace

logger = logging.getLogger(__name__)

__all__ = ['TOPOLOGY_FILE', 'GAINS_FILE', 'ARRIVALS_FILE', 'dump_trace', 'load_trace']

TOPOLOGY_FILE = 'topology.csv'
GAINS_FILE = 'gains.csv'
ARRIVALS_FILE = 'arrivals.csv'

_TOPOLOGY_COLUMNS = ['kind', 'index', 'x', 'y', 'user_class']
_GAIN_COLUMNS = ['frame', 'slice', 'ru', 'user', 'rb', 'tti', 'gain']
_ARRIVAL_COLUMNS = ['frame', 'user', 'packets']


def dump_trace(trace: EpisodeTrace, directory) -> Path:
    """把回合轨迹写入目录"""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    topology = trace.topology

    with open(directory / TOPOLOGY_FILE, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(_TOPOLOGY_COLUMNS)
        for m, (x, y) in enumerate(topology.ru_positions):
            writer.writerow(['ru', m, repr(float(x)), repr(float(y)), ''])
        for u, (x, y) in enumerate(topology.user_positions):
            writer.writerow(['user', u, repr(float(x)), repr(float(y)), topology.user_class[u].value])

    with open(directory / GAINS_FILE, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(_GAIN_COLUMNS)
        for inputs in trace.frames:
            for slice_index, gains in enumerate(inputs.gains.per_slice):
                for (m, u, rb, tti), value in np.ndenumerate(gains):
                    writer.writerow([inputs.frame, slice_index, m, u, rb, tti, repr(float(value))])

    with open(directory / ARRIVALS_FILE, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(_ARRIVAL_COLUMNS)
        for inputs in trace.frames:
            for u, packets in enumerate(inputs.arrivals.packets):
                writer.writerow([inputs.frame, u, int(packets)])

    logger.info(f"trace with {len(trace)} frames dumped to {directory}")
    return directory


def _read(path: Path, columns: List[str]) -> pd.DataFrame:
    if not path.exists():
        raise TraceError(f"trace file missing: {path}")
    try:
        frame = pd.read_csv(path, float_precision='round_trip', keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise TraceError(f"cannot parse {path}: {e}") from e
    if list(frame.columns) != columns:
        raise TraceError(f"{path.name}: expected columns {columns}, found {list(frame.columns)}")
    return frame


def load_trace(directory, config: SystemConfig, grid: RBGrid) -> EpisodeTrace:
    """
    读取轨迹目录，重建与生成时逐位相同的 EpisodeTrace

    Raises:
        TraceError: 文件缺失、列名不符或维度与配置不一致
    """
    directory = Path(directory)
    topo = _read(directory / TOPOLOGY_FILE, _TOPOLOGY_COLUMNS)
    gains = _read(directory / GAINS_FILE, _GAIN_COLUMNS)
    arrivals = _read(directory / ARRIVALS_FILE, _ARRIVAL_COLUMNS)

    rus = topo[topo['kind'] == 'ru'].sort_values('index')
    users = topo[topo['kind'] == 'user'].sort_values('index')
    if len(rus) != config.num_rus or len(users) != config.num_users:
        raise TraceError(f"trace has {len(rus)} RUs and {len(users)} users; "
                         f"config expects {config.num_rus} and {config.num_users}")
    topology = Topology(
        ru_positions=rus[['x', 'y']].to_numpy(dtype=np.float64),
        user_positions=users[['x', 'y']].to_numpy(dtype=np.float64),
        user_class=[UserClass(c) for c in users['user_class']],
    )

    frame_ids = sorted(set(arrivals['frame']))
    frames = []
    for t in frame_ids:
        per_slice = []
        for slice_index, slice_grid in enumerate(grid.slices):
            shape = (config.num_rus, config.num_users, slice_grid.num_rbs, slice_grid.num_ttis)
            rows = gains[(gains['frame'] == t) & (gains['slice'] == slice_index)]
            if len(rows) != int(np.prod(shape)):
                raise TraceError(f"frame {t}, slice {slice_index}: {len(rows)} gain rows, expected shape {shape}")
            tensor = np.empty(shape)
            index = rows[['ru', 'user', 'rb', 'tti']].to_numpy(dtype=np.int64)
            tensor[tuple(index.T)] = rows['gain'].to_numpy(dtype=np.float64)
            per_slice.append(tensor)

        packets = arrivals[arrivals['frame'] == t].sort_values('user')['packets'].to_numpy(dtype=np.int64)
        if len(packets) != config.num_users:
            raise TraceError(f"frame {t}: {len(packets)} arrival rows, expected {config.num_users}")
        frames.append(FrameInputs(
            frame=int(t),
            gains=ChannelGains(per_slice=tuple(per_slice)),
            arrivals=TrafficArrivals(frame=int(t), packets=packets, packet_bits=config.packet_bits),
        ))

    logger.info(f"trace with {len(frames)} frames loaded from {directory}")
    return EpisodeTrace(topology=topology, frames=frames)
