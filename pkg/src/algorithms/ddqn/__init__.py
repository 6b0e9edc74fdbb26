"""
多智能体DDQN RB分配模块
"""

from .network import MLP, Adam, q_forward, td_loss_and_grads
from .replay_buffer import Experience, Minibatch, ReplayBuffer, store_transition
from .state_encoder import state_dim, encode_state, normalize_gain_db
from .action_codec import num_heads, num_choices, head_to_rb, decode_action, encode_action
from .constraints import ViolationKind, Violation, check_constraints
from .reward import compute_reward
from .agent import AgentSpec, DDQNAgent, ddqn_target, soft_update, hard_update, select_action

__all__ = [
    'MLP', 'Adam', 'q_forward', 'td_loss_and_grads',
    'Experience', 'Minibatch', 'ReplayBuffer', 'store_transition',
    'state_dim', 'encode_state', 'normalize_gain_db',
    'num_heads', 'num_choices', 'head_to_rb', 'decode_action', 'encode_action',
    'ViolationKind', 'Violation', 'check_constraints',
    'compute_reward',
    'AgentSpec', 'DDQNAgent', 'ddqn_target', 'soft_update', 'hard_update', 'select_action',
]
