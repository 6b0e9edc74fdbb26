"""
系统配置类型
物理层、切片、流量与学习超参数的不可变配置，以及配置校验
"""

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

__all__ = [
    'NumerologyConfig', 'LatencyConstants', 'SystemConfig', 'ConfigViolation',
    'validate_config', 'dbm_to_watt', 'watt_to_dbm', 'db_to_linear', 'latency_window_ttis',
    'EMBB_SLICE', 'URLLC_SLICE',
]

# 切片索引约定：0 为 eMBB 切片 (i=1)，1 为 uRLLC 切片 (i=2)
EMBB_SLICE = 0
URLLC_SLICE = 1

# 整数倍判定的相对容差
_RATIO_TOL = 1e-9


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(watt: float) -> float:
    return 10.0 * math.log10(watt) + 30.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _is_integer_ratio(numerator: float, denominator: float) -> bool:
    if denominator <= 0:
        return False
    ratio = numerator / denominator
    return abs(ratio - round(ratio)) <= _RATIO_TOL * max(1.0, abs(ratio)) and round(ratio) >= 1


def latency_window_ttis(latency_budget: float, tti_duration: float, rounding: str = 'floor') -> int:
    """时延预算内可用的TTI个数（floor 或 ceil）"""
    ratio = latency_budget / tti_duration
    if rounding == 'ceil':
        return int(math.ceil(ratio - _RATIO_TOL))
    return int(math.floor(ratio + _RATIO_TOL))


@dataclass(frozen=True)
class NumerologyConfig:
    """单个切片的参数集：RB带宽 β_i (Hz) 和 TTI 时长 δ_i (s)"""
    rb_bandwidth: float
    tti_duration: float


@dataclass(frozen=True)
class LatencyConstants:
    """端到端时延中的常数项 (s)，默认全为0"""
    cu_proc: float = 0.0
    du_proc: float = 0.0
    ru_proc: float = 0.0
    mh_tx: float = 0.0
    fh_tx: float = 0.0

    @property
    def total(self) -> float:
        return self.cu_proc + self.du_proc + self.ru_proc + self.mh_tx + self.fh_tx


@dataclass(frozen=True)
class SystemConfig:
    """系统配置（构造后不可变，可在并发仿真实例间只读共享）"""
    # 网络
    num_rus: int
    embb_users: int
    urllc_users: int
    cell_radius: float = 500.0
    min_distance: float = 10.0

    # 频谱与参数集
    bandwidth: float = 10e6
    alpha: float = 0.2
    guard_band: float = 180e3
    numerologies: Tuple[NumerologyConfig, NumerologyConfig] = (
        NumerologyConfig(180e3, 1e-3),
        NumerologyConfig(720e3, 0.25e-3),
    )

    # 无线
    noise_power: float = 1e-14           # W (-110 dBm)
    max_power_per_ru: float = 39.810717  # W (46 dBm)
    urllc_snr_floor: float = 3.1622777   # 线性 (5 dB)
    error_prob: float = 1e-3
    fading_block: str = 'tti'            # tti | frame
    power_update: str = 'tick'           # tick | slice_tti

    # 流量
    packet_size_embb: float = 2000.0     # bits
    packet_size_urllc: float = 256.0     # bits
    arrival_rate_embb: float = 21.12     # packets/frame
    arrival_rate_urllc: float = 1.12     # packets/frame
    required_rate_embb: float = 10e6     # bits/s
    arrival_crediting: str = 'frame'     # frame | tti

    # QoS
    frame_duration: float = 10e-3
    latency_budget: float = 0.5e-3
    queue_cap: float = 80000.0           # bits (10 KB)
    latency_constants: LatencyConstants = field(default_factory=LatencyConstants)
    urllc_window_rounding: str = 'floor'

    # 效用与奖励
    omega: float = 0.5
    ref_queue: Optional[float] = None    # 缺省为 queue_cap
    ref_latency: Optional[float] = None  # 缺省为 latency_budget
    ref_rate: Optional[float] = None     # bits/frame，缺省为 U_em·required_rate·Δ
    penalty_value: float = -1.0
    urllc_overflow_divisor: int = 2

    # 学习
    window: int = 5
    discount: float = 0.99
    target_update: str = 'soft'          # soft | hard
    target_update_period: int = 100
    soft_update_coeff: float = 0.01
    replay_capacity: int = 1_000_000
    batch_size: int = 100
    learning_rate: float = 1e-3
    adam_betas: Tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    hidden_layers: Tuple[int, ...] = (512, 512, 512, 512)
    epsilon_schedule: Tuple[float, float, float] = (1.0, 0.05, 0.995)
    max_arrivals: float = 50.0
    gain_db_bounds: Tuple[float, float] = (-160.0, -60.0)

    # 仿真
    epochs: int = 300
    frames_per_episode: int = 20
    eval_frames: int = 100
    seeds: Tuple[int, ...] = (0, 1, 2, 3, 4)
    power_sweep_dbm: Tuple[float, ...] = (10.0, 16.0, 22.0, 28.0, 34.0, 40.0, 46.0)

    def __post_init__(self):
        # 参考值缺省解析，仍保持不可变
        if self.ref_queue is None:
            object.__setattr__(self, 'ref_queue', float(self.queue_cap))
        if self.ref_latency is None:
            object.__setattr__(self, 'ref_latency', float(self.latency_budget))
        if self.ref_rate is None:
            object.__setattr__(self, 'ref_rate',
                               float(max(self.embb_users, 1) * self.required_rate_embb * self.frame_duration))

    @property
    def num_users(self) -> int:
        return self.embb_users + self.urllc_users

    @property
    def max_power_dbm(self) -> float:
        return watt_to_dbm(self.max_power_per_ru)

    @property
    def embb_user_ids(self) -> np.ndarray:
        return np.arange(self.embb_users)

    @property
    def urllc_user_ids(self) -> np.ndarray:
        return np.arange(self.embb_users, self.num_users)

    @property
    def is_urllc(self) -> np.ndarray:
        """按全局用户索引的 uRLLC 掩码（eMBB 用户在前）"""
        mask = np.zeros(self.num_users, dtype=bool)
        mask[self.embb_users:] = True
        return mask

    @property
    def packet_bits(self) -> np.ndarray:
        """按全局用户索引的包大小 (bits)"""
        return np.where(self.is_urllc, self.packet_size_urllc, self.packet_size_embb).astype(float)

    @property
    def fine_tti(self) -> float:
        return min(n.tti_duration for n in self.numerologies)

    @property
    def fine_ticks(self) -> int:
        return int(round(self.frame_duration / self.fine_tti))

    def tick_ratio(self, slice_index: int) -> int:
        """切片 TTI 相对于细时钟的倍数"""
        return int(round(self.numerologies[slice_index].tti_duration / self.fine_tti))

    def with_power_dbm(self, dbm: float) -> 'SystemConfig':
        return replace(self, max_power_per_ru=dbm_to_watt(dbm))

    def with_overrides(self, **changes) -> 'SystemConfig':
        return replace(self, **changes)


@dataclass(frozen=True)
class ConfigViolation:
    """一条配置违约"""
    field: str
    rule: str

    def __str__(self):
        return f"{self.field}: {self.rule}"


def validate_config(config: SystemConfig) -> List[ConfigViolation]:
    """
    校验配置不变式

    Returns:
        List[ConfigViolation]: 全部违约；为空表示配置合法
    """
    violations = []

    def check(condition: bool, field_name: str, rule: str):
        if not condition:
            violations.append(ConfigViolation(field_name, rule))

    check(config.num_rus >= 1, 'num_rus', 'num_rus >= 1')
    check(config.embb_users >= 0, 'embb_users', 'embb_users >= 0')
    check(config.urllc_users >= 0, 'urllc_users', 'urllc_users >= 0')
    check(config.num_users >= 1, 'embb_users', 'at least one user')
    check(config.cell_radius >= 0, 'cell_radius', 'cell_radius >= 0')
    check(config.min_distance > 0, 'min_distance', 'min_distance > 0')

    check(0.0 < config.alpha < 1.0, 'alpha', 'alpha in (0,1)')
    check(config.alpha * config.bandwidth - config.guard_band > 0, 'guard_band', 'alpha*B - B_G > 0')
    check(config.guard_band >= 0, 'guard_band', 'guard_band >= 0')
    check(len(config.numerologies) == 2, 'numerologies', 'exactly two numerologies')

    for i, numerology in enumerate(config.numerologies):
        check(numerology.rb_bandwidth > 0, f'numerologies[{i}].rb_bandwidth', 'beta_i > 0')
        check(numerology.tti_duration > 0, f'numerologies[{i}].tti_duration', 'delta_i > 0')
        if numerology.tti_duration > 0:
            check(_is_integer_ratio(config.frame_duration, numerology.tti_duration),
                  f'numerologies[{i}].tti_duration', 'Delta multiple of delta_i')

    durations = sorted(n.tti_duration for n in config.numerologies)
    if durations[0] > 0:
        check(_is_integer_ratio(durations[1], durations[0]), 'numerologies',
              'coarse delta multiple of fine delta')

    check(config.latency_budget <= config.frame_duration, 'latency_budget', 'D_ur <= Delta')
    check(config.latency_budget > 0, 'latency_budget', 'D_ur > 0')
    check(config.urllc_window_rounding in ('floor', 'ceil'), 'urllc_window_rounding', 'floor or ceil')
    urllc_tti = config.numerologies[URLLC_SLICE].tti_duration
    if urllc_tti > 0 and config.latency_budget > 0:
        check(latency_window_ttis(config.latency_budget, urllc_tti, config.urllc_window_rounding) >= 1,
              'latency_budget', 'floor(D_ur/delta_2) >= 1')

    check(config.queue_cap > 0, 'queue_cap', 'q_max > 0')
    check(config.max_power_per_ru > 0, 'max_power_per_ru', 'P_max > 0')
    check(config.noise_power > 0, 'noise_power', 'N0 > 0')
    check(config.urllc_snr_floor >= 0, 'urllc_snr_floor', 'Gamma0 >= 0')
    check(0.0 < config.error_prob < 1.0, 'error_prob', 'P_e in (0,1)')
    check(config.fading_block in ('tti', 'frame'), 'fading_block', 'tti or frame')
    check(config.power_update in ('tick', 'slice_tti'), 'power_update', 'tick or slice_tti')
    check(config.arrival_crediting in ('frame', 'tti'), 'arrival_crediting', 'frame or tti')
    check(config.packet_size_embb >= 0 and config.packet_size_urllc >= 0, 'packet_size', 'Z >= 0')
    check(config.arrival_rate_embb >= 0 and config.arrival_rate_urllc >= 0, 'arrival_rate', 'lambda >= 0')

    for name in ('cu_proc', 'du_proc', 'ru_proc', 'mh_tx', 'fh_tx'):
        check(getattr(config.latency_constants, name) >= 0, f'latency_constants.{name}', 'constant >= 0')

    check(0.0 <= config.omega <= 1.0, 'omega', 'omega in [0,1]')
    check(config.ref_queue > 0, 'ref_queue', 'q0 > 0')
    check(config.ref_latency > 0, 'ref_latency', 'tau0 > 0')
    check(config.ref_rate > 0, 'ref_rate', 'R0 > 0')
    check(config.penalty_value < 0, 'penalty_value', 'penalty_value < 0')
    check(config.urllc_overflow_divisor >= 1, 'urllc_overflow_divisor', 'divisor >= 1')

    check(config.window >= 1, 'window', 'W >= 1')
    check(0.0 <= config.discount < 1.0, 'discount', 'gamma in [0,1)')
    check(config.target_update in ('soft', 'hard'), 'target_update', 'soft or hard')
    check(config.target_update_period >= 1, 'target_update_period', 'C >= 1')
    check(0.0 <= config.soft_update_coeff <= 1.0, 'soft_update_coeff', 'soft_update_coeff in [0,1]')
    check(config.replay_capacity >= 1, 'replay_capacity', 'capacity >= 1')
    check(1 <= config.batch_size <= config.replay_capacity, 'batch_size', '1 <= batch_size <= capacity')
    check(config.learning_rate > 0, 'learning_rate', 'learning_rate > 0')
    check(len(config.hidden_layers) >= 1 and all(h >= 1 for h in config.hidden_layers),
          'hidden_layers', 'at least one positive hidden layer')
    start, end, decay = config.epsilon_schedule
    check(0.0 <= end <= start <= 1.0, 'epsilon_schedule', '0 <= end <= start <= 1')
    check(0.0 < decay <= 1.0, 'epsilon_schedule', 'decay in (0,1]')
    check(config.max_arrivals > 0, 'max_arrivals', 'max_arrivals > 0')
    check(config.gain_db_bounds[0] < config.gain_db_bounds[1], 'gain_db_bounds', 'min < max')
    check(config.frames_per_episode >= 1, 'frames_per_episode', 'T >= 1')
    check(config.epochs >= 0, 'epochs', 'epochs >= 0')
    check(config.eval_frames >= 1, 'eval_frames', 'eval_frames >= 1')

    return violations
