"""
智能体检查点

文件格式（小端）:
    b"TSCK"                 4 字节魔数
    uint32 version          格式版本
    uint32 header_len       JSON 头长度
    header                  UTF-8 JSON：每个智能体的维度、层宽、ε、训练步数、Adam 步数
    payload                 '<f8' 数组，按智能体依次为 θ^Q、θ^μ、Adam m、Adam v，
                            每组内按 [W0, b0, W1, b1, ...]
"""

import json
import logging
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

try:
    from core.errors import CheckpointError
    from core.system_config import SystemConfig
    from core.rb_grid import build_rb_grid
    from algorithms.ddqn.agent import AgentSpec, DDQNAgent
    from algorithms.ddqn.network import MLP
    from algorithms.ddqn.action_codec import num_heads, num_choices
    from algorithms.ddqn.state_encoder import state_dim
except ImportError:
    from ..core.errors import CheckpointError
    from ..core.system_config import SystemConfig
    from ..core.rb_grid import build_rb_grid
    from ..algorithms.ddqn.agent import AgentSpec, DDQNAgent
    from ..algorithms.ddqn.network import MLP
    from ..algorithms.ddqn.action_codec import num_heads, num_choices
    from ..algorithms.ddqn.state_encoder import state_dim

logger = logging.getLogger(__name__)

__all__ = ['CHECKPOINT_MAGIC', 'CHECKPOINT_VERSION', 'save_checkpoint', 'load_checkpoint']

CHECKPOINT_MAGIC = b"TSCK"
CHECKPOINT_VERSION = 1
_FLOAT = np.dtype('<f8')
_UINT = np.dtype('<u4')


def _agent_header(agent: DDQNAgent) -> dict:
    spec = agent.spec
    return {
        'name': spec.name,
        'slice_index': spec.slice_index,
        'state_dim': spec.state_dim,
        'num_heads': spec.num_heads,
        'num_choices': spec.num_choices,
        'layer_sizes': list(agent.eval_net.layer_sizes),
        'epsilon': agent.epsilon,
        'train_steps': agent.train_steps,
        'adam_t': agent.optimizer.t,
    }


def _agent_arrays(agent: DDQNAgent) -> List[np.ndarray]:
    return [*agent.eval_net.params, *agent.target_net.params, *agent.optimizer.m, *agent.optimizer.v]


def save_checkpoint(agents: Sequence[DDQNAgent], path) -> Path:
    """保存两个智能体，返回写入的路径"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = json.dumps({'agents': [_agent_header(a) for a in agents]}, sort_keys=True).encode('utf-8')
    with open(path, 'wb') as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(np.array([CHECKPOINT_VERSION, len(header)], dtype=_UINT).tobytes())
        f.write(header)
        for agent in agents:
            for array in _agent_arrays(agent):
                f.write(np.ascontiguousarray(array, dtype=_FLOAT).tobytes())
    logger.info(f"checkpoint saved: {path}")
    return path


def _expected_specs(config: SystemConfig) -> List[Tuple[int, int, int]]:
    grid = build_rb_grid(config)
    return [(state_dim(config, grid, i), num_heads(grid, i), num_choices(config)) for i in range(2)]


def _read_arrays(buffer: memoryview, offset: int, shapes) -> Tuple[List[np.ndarray], int]:
    arrays = []
    for shape in shapes:
        count = int(np.prod(shape, dtype=np.int64))
        end = offset + count * _FLOAT.itemsize
        if end > len(buffer):
            raise CheckpointError(f"checkpoint truncated: need {end} bytes, file has {len(buffer)}")
        arrays.append(np.frombuffer(buffer[offset:end], dtype=_FLOAT).reshape(shape).astype(np.float64))
        offset = end
    return arrays, offset


def load_checkpoint(path, config: SystemConfig) -> Tuple[DDQNAgent, DDQNAgent]:
    """
    读取检查点并重建智能体

    Raises:
        CheckpointError: 魔数、版本不符，维度与配置不一致，或文件截断
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e

    buffer = memoryview(data)
    if len(buffer) < 12 or bytes(buffer[:4]) != CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path} is not a checkpoint file")
    version, header_len = (int(v) for v in np.frombuffer(buffer[4:12], dtype=_UINT))
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"checkpoint version {version} is not supported (expected {CHECKPOINT_VERSION})")
    if 12 + header_len > len(buffer):
        raise CheckpointError("checkpoint truncated inside the header")
    try:
        header = json.loads(bytes(buffer[12:12 + header_len]).decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"corrupt checkpoint header: {e}") from e

    expected = _expected_specs(config)
    entries = header.get('agents', [])
    if len(entries) != len(expected):
        raise CheckpointError(f"checkpoint holds {len(entries)} agents, expected {len(expected)}")

    offset = 12 + int(header_len)
    agents = []
    for entry, (dim, heads, choices) in zip(entries, expected):
        found = (entry['state_dim'], entry['num_heads'], entry['num_choices'])
        if found != (dim, heads, choices):
            raise CheckpointError(
                f"agent {entry['name']}: checkpoint has state_dim={found[0]}, heads={found[1]}, "
                f"choices={found[2]}; config needs state_dim={dim}, heads={heads}, choices={choices}")
        layer_sizes = (dim, *config.hidden_layers, heads * choices)
        if tuple(entry['layer_sizes']) != layer_sizes:
            raise CheckpointError(
                f"agent {entry['name']}: checkpoint layers {tuple(entry['layer_sizes'])} != config layers {layer_sizes}")

        shapes = _param_shapes(layer_sizes)
        eval_params, offset = _read_arrays(buffer, offset, shapes)
        target_params, offset = _read_arrays(buffer, offset, shapes)
        adam_m, offset = _read_arrays(buffer, offset, shapes)
        adam_v, offset = _read_arrays(buffer, offset, shapes)

        spec = AgentSpec(entry['name'], int(entry['slice_index']), dim, heads, choices)
        agent = DDQNAgent(spec, config, eval_net=MLP(layer_sizes, params=eval_params))
        agent.target_net = MLP(layer_sizes, params=target_params)
        agent.optimizer.m = adam_m
        agent.optimizer.v = adam_v
        agent.optimizer.t = int(entry['adam_t'])
        agent.epsilon = float(entry['epsilon'])
        agent.train_steps = int(entry['train_steps'])
        agents.append(agent)

    if offset != len(buffer):
        raise CheckpointError(f"checkpoint has {len(buffer) - offset} trailing bytes")
    logger.info(f"checkpoint loaded: {path}")
    return tuple(agents)


def _param_shapes(layer_sizes) -> List[Tuple[int, ...]]:
    shapes = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        shapes.extend([(fan_in, fan_out), (fan_out,)])
    return shapes
