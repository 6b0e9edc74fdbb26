#!/usr/bin/env python3
"""
配置管理
读取 YAML 配置文件（严格模式：未知键报错），换算单位后构造 SystemConfig

文件结构（除 network.num_rus / embb_users / urllc_users 与 spectrum.bandwidth 外均有默认值）:
    extends: default          # 可选，先合并同目录下的基础文件（场景文件使用）
    network:    num_rus, embb_users, urllc_users, cell_radius, min_distance
    spectrum:   bandwidth, alpha, guard_band, numerologies: [{rb_bandwidth, tti_duration}] x2
    radio:      max_power_dbm, noise_power_dbm, urllc_snr_floor_db, error_prob, fading_block,
                power_update
    traffic:    packet_size_embb, packet_size_urllc, arrival_rate_embb, arrival_rate_urllc,
                required_rate_embb, arrival_crediting
    qos:        frame_duration, latency_budget, queue_cap, urllc_window_rounding,
                latency_constants: {cu_proc, du_proc, ru_proc, mh_tx, fh_tx}
    utility:    omega, ref_queue, ref_latency, ref_rate, penalty_value, urllc_overflow_divisor
    learning:   window, discount, target_update, target_update_period, soft_update_coeff,
                replay_capacity, batch_size, learning_rate, adam_betas, adam_eps, hidden_layers,
                epsilon_schedule, max_arrivals, gain_db_bounds
    simulation: epochs, frames_per_episode, eval_frames, seeds, power_sweep_dbm
    output:     output_dir, log_level, include_timestamp
"""

import copy
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

project_root = Path(__file__).parent
sys.path.insert(0, str(project_root / 'src'))

from core.errors import ConfigError, ConfigParseError
from core.system_config import (
    SystemConfig, NumerologyConfig, LatencyConstants, validate_config, dbm_to_watt, watt_to_dbm, db_to_linear)

CONFIG_DIR = project_root / 'config'
DEFAULT_CONFIG = CONFIG_DIR / 'default.yaml'
SCENARIOS_DIR = CONFIG_DIR / 'scenarios'

REQUIRED_KEYS = ['network.num_rus', 'network.embb_users', 'network.urllc_users', 'spectrum.bandwidth']


def _tuple(value):
    return tuple(value)


def _numerologies(value):
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError("spectrum.numerologies: exactly two entries expected")
    result = []
    for i, entry in enumerate(value):
        if not isinstance(entry, dict):
            raise ConfigError(f"spectrum.numerologies[{i}]: mapping expected")
        unknown = sorted(set(entry) - {'rb_bandwidth', 'tti_duration'})
        if unknown:
            raise ConfigError(f"unknown key spectrum.numerologies[{i}].{unknown[0]}")
        missing = sorted({'rb_bandwidth', 'tti_duration'} - set(entry))
        if missing:
            raise ConfigError(f"missing required key spectrum.numerologies[{i}].{missing[0]}")
        result.append(NumerologyConfig(float(entry['rb_bandwidth']), float(entry['tti_duration'])))
    return tuple(result)


def _latency_constants(value):
    if not isinstance(value, dict):
        raise ConfigError("qos.latency_constants: mapping expected")
    allowed = {'cu_proc', 'du_proc', 'ru_proc', 'mh_tx', 'fh_tx'}
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ConfigError(f"unknown key qos.latency_constants.{unknown[0]}")
    return LatencyConstants(**{k: float(v) for k, v in value.items()})


# 文件键 -> (SystemConfig 字段, 转换函数)
SCHEMA: Dict[str, Dict[str, Tuple[Optional[str], Any]]] = {
    'network': {
        'num_rus': ('num_rus', int),
        'embb_users': ('embb_users', int),
        'urllc_users': ('urllc_users', int),
        'cell_radius': ('cell_radius', float),
        'min_distance': ('min_distance', float),
    },
    'spectrum': {
        'bandwidth': ('bandwidth', float),
        'alpha': ('alpha', float),
        'guard_band': ('guard_band', float),
        'numerologies': ('numerologies', _numerologies),
    },
    'radio': {
        'max_power_dbm': ('max_power_per_ru', dbm_to_watt),
        'noise_power_dbm': ('noise_power', dbm_to_watt),
        'urllc_snr_floor_db': ('urllc_snr_floor', db_to_linear),
        'error_prob': ('error_prob', float),
        'fading_block': ('fading_block', str),
        'power_update': ('power_update', str),
    },
    'traffic': {
        'packet_size_embb': ('packet_size_embb', float),
        'packet_size_urllc': ('packet_size_urllc', float),
        'arrival_rate_embb': ('arrival_rate_embb', float),
        'arrival_rate_urllc': ('arrival_rate_urllc', float),
        'required_rate_embb': ('required_rate_embb', float),
        'arrival_crediting': ('arrival_crediting', str),
    },
    'qos': {
        'frame_duration': ('frame_duration', float),
        'latency_budget': ('latency_budget', float),
        'queue_cap': ('queue_cap', float),
        'urllc_window_rounding': ('urllc_window_rounding', str),
        'latency_constants': ('latency_constants', _latency_constants),
    },
    'utility': {
        'omega': ('omega', float),
        'ref_queue': ('ref_queue', float),
        'ref_latency': ('ref_latency', float),
        'ref_rate': ('ref_rate', float),
        'penalty_value': ('penalty_value', float),
        'urllc_overflow_divisor': ('urllc_overflow_divisor', int),
    },
    'learning': {
        'window': ('window', int),
        'discount': ('discount', float),
        'target_update': ('target_update', str),
        'target_update_period': ('target_update_period', int),
        'soft_update_coeff': ('soft_update_coeff', float),
        'replay_capacity': ('replay_capacity', int),
        'batch_size': ('batch_size', int),
        'learning_rate': ('learning_rate', float),
        'adam_betas': ('adam_betas', _tuple),
        'adam_eps': ('adam_eps', float),
        'hidden_layers': ('hidden_layers', _tuple),
        'epsilon_schedule': ('epsilon_schedule', _tuple),
        'max_arrivals': ('max_arrivals', float),
        'gain_db_bounds': ('gain_db_bounds', _tuple),
    },
    'simulation': {
        'epochs': ('epochs', int),
        'frames_per_episode': ('frames_per_episode', int),
        'eval_frames': ('eval_frames', int),
        'seeds': ('seeds', _tuple),
        'power_sweep_dbm': ('power_sweep_dbm', _tuple),
    },
    # 不进入 SystemConfig 的运行设置
    'output': {
        'output_dir': (None, str),
        'log_level': (None, str),
        'include_timestamp': (None, bool),
    },
}

DEFAULT_OUTPUT = {'output_dir': 'results', 'log_level': 'INFO', 'include_timestamp': True}


def read_yaml(path) -> Dict[str, Any]:
    """读取 YAML；语法错误转为带行列号的 ConfigParseError"""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"配置文件不存在: {path}") from None
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        line = mark.line + 1 if mark is not None else None
        column = mark.column + 1 if mark is not None else None
        raise ConfigParseError(f"{path}: {getattr(e, 'problem', None) or e}", line, column) from e
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigParseError(f"{path}: top level must be a mapping", 1, 1)
    return raw


def merge_config(base: Dict, override: Dict) -> Dict:
    """递归合并配置（原地修改 base）"""
    for key, value in override.items():
        if key in base and isinstance(base[key], dict) and isinstance(value, dict):
            merge_config(base[key], value)
        else:
            base[key] = copy.deepcopy(value)
    return base


def _resolve(path: Path, seen: Optional[List[Path]] = None) -> Dict[str, Any]:
    """处理 extends 链，返回合并后的原始字典"""
    seen = seen or []
    path = path.resolve()
    if path in seen:
        raise ConfigError(f"circular extends: {' -> '.join(str(p) for p in seen + [path])}")
    raw = read_yaml(path)
    parent = raw.pop('extends', None)
    if parent is None:
        return raw
    candidates = [path.parent / f"{parent}.yaml", CONFIG_DIR / f"{parent}.yaml"]
    parent_path = next((c for c in candidates if c.exists()), candidates[-1])
    return merge_config(_resolve(parent_path, seen + [path]), raw)


def check_schema(raw: Dict[str, Any]) -> None:
    """未知键以点路径报错，缺失必填键报错"""
    for section, values in raw.items():
        if section not in SCHEMA:
            raise ConfigError(f"unknown key {section}")
        if not isinstance(values, dict):
            raise ConfigError(f"{section}: mapping expected")
        for key in values:
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
    for dotted in REQUIRED_KEYS:
        section, key = dotted.split('.')
        if key not in raw.get(section, {}):
            raise ConfigError(f"missing required key {dotted}")


def build_system_config(raw: Dict[str, Any]) -> SystemConfig:
    check_schema(raw)
    fields = {}
    for section, values in raw.items():
        for key, value in values.items():
            field_name, convert = SCHEMA[section][key]
            if field_name is None or value is None:
                continue
            try:
                fields[field_name] = convert(value)
            except ConfigError:
                raise
            except (TypeError, ValueError) as e:
                raise ConfigError(f"{section}.{key}: invalid value {value!r} ({e})") from e
    config = SystemConfig(**fields)
    violations = validate_config(config)
    if violations:
        raise ConfigError("invalid configuration: " + "; ".join(str(v) for v in violations), violations)
    return config


def load_config(config_file=DEFAULT_CONFIG) -> SystemConfig:
    """
    加载配置文件

    Raises:
        ConfigParseError: YAML 语法错误（带行列号）
        ConfigError: 未知键、缺失必填键或校验失败
    """
    return build_system_config(_resolve(Path(config_file)))


def load_output_settings(config_file=DEFAULT_CONFIG) -> Dict[str, Any]:
    raw = _resolve(Path(config_file))
    return merge_config(dict(DEFAULT_OUTPUT), raw.get('output', {}))


def list_scenarios() -> List[str]:
    """列出可用场景"""
    if not SCENARIOS_DIR.exists():
        return []
    return sorted(file.stem for file in SCENARIOS_DIR.glob('*.yaml'))


def scenario_path(scenario_name: str) -> Path:
    path = SCENARIOS_DIR / f'{scenario_name}.yaml'
    if not path.exists():
        raise ConfigError(f"unknown scenario '{scenario_name}'; available: {list_scenarios()}")
    return path


def load_scenario(scenario_name: str) -> SystemConfig:
    """加载场景配置（场景文件通过 extends 与默认配置合并）"""
    return load_config(scenario_path(scenario_name))


def config_to_dict(config: SystemConfig) -> Dict[str, Dict[str, Any]]:
    """SystemConfig 转回文件结构（功率以 dBm/dB 表示）"""
    result: Dict[str, Dict[str, Any]] = {}
    for section, keys in SCHEMA.items():
        for key, (field_name, _) in keys.items():
            if field_name is None:
                continue
            value = getattr(config, field_name)
            if key.endswith('_dbm') and not isinstance(value, tuple):
                value = watt_to_dbm(value)
            elif key == 'urllc_snr_floor_db':
                value = 10.0 * math.log10(value) if value > 0 else -math.inf
            elif key == 'numerologies':
                value = [{'rb_bandwidth': n.rb_bandwidth, 'tti_duration': n.tti_duration} for n in value]
            elif key == 'latency_constants':
                value = {k: getattr(value, k) for k in ('cu_proc', 'du_proc', 'ru_proc', 'mh_tx', 'fh_tx')}
            elif isinstance(value, tuple):
                value = list(value)
            result.setdefault(section, {})[key] = value
    return result


def dotted_items(tree: Dict[str, Any], prefix: str = '') -> List[Tuple[str, Any]]:
    """把嵌套字典展开为 (点路径, 值) 列表"""
    items = []
    for key, value in tree.items():
        path = f"{prefix}.{key}" if prefix else str(key)
        if isinstance(value, dict):
            items.extend(dotted_items(value, path))
        else:
            items.append((path, value))
    return items
