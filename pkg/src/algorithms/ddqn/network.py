"""
全连接Q网络与Adam优化器（numpy实现）
隐藏层 ReLU，输出层线性；输出按 (heads, choices) 解释
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

try:
    from core.errors import ShapeMismatchError
except ImportError:
    from ...core.errors import ShapeMismatchError

__all__ = ['MLP', 'Adam', 'q_forward', 'td_loss_and_grads']


class MLP:
    """
    多层感知机
    params 按 [W0, b0, W1, b1, ...] 排列，W_k 形状 (in, out)
    """

    def __init__(self, layer_sizes: Sequence[int], rng: Optional[np.random.Generator] = None,
                 params: Optional[List[np.ndarray]] = None):
        self.layer_sizes = tuple(int(s) for s in layer_sizes)
        if len(self.layer_sizes) < 2:
            raise ShapeMismatchError(f"an MLP needs at least input and output sizes, got {self.layer_sizes}")
        if params is not None:
            self._check_params(params)
            self.params = [np.array(p, dtype=np.float64) for p in params]
        else:
            rng = rng if rng is not None else np.random.default_rng()
            self.params = self._init_params(rng)

    def _init_params(self, rng: np.random.Generator) -> List[np.ndarray]:
        params = []
        for fan_in, fan_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            # He初始化，适配ReLU
            scale = np.sqrt(2.0 / max(fan_in, 1))
            params.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            params.append(np.zeros(fan_out))
        return params

    def _check_params(self, params: Sequence[np.ndarray]):
        expected = self.param_shapes
        actual = [tuple(np.shape(p)) for p in params]
        if actual != expected:
            raise ShapeMismatchError(f"parameter shapes {actual} do not match layer sizes {expected}")

    @property
    def param_shapes(self) -> List[Tuple[int, ...]]:
        shapes = []
        for fan_in, fan_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            shapes.extend([(fan_in, fan_out), (fan_out,)])
        return shapes

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    def copy(self) -> 'MLP':
        return MLP(self.layer_sizes, params=[p.copy() for p in self.params])

    def forward(self, inputs: np.ndarray, keep_cache: bool = False):
        """
        前向传播

        Args:
            inputs: (batch, input_dim) 或 (input_dim,)

        Returns:
            输出 (batch, output_dim)；keep_cache 时同时返回各层输入和预激活
        """
        x = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        if x.shape[1] != self.input_dim:
            raise ShapeMismatchError(f"input dimension {x.shape[1]} != network input {self.input_dim}")
        activations = [x]
        pre_activations = []
        num_layers = len(self.params) // 2
        for k in range(num_layers):
            z = activations[-1] @ self.params[2 * k] + self.params[2 * k + 1]
            pre_activations.append(z)
            if k < num_layers - 1:
                activations.append(np.maximum(z, 0.0))
        output = pre_activations[-1]
        if keep_cache:
            return output, (activations, pre_activations)
        return output

    def backward(self, cache, grad_output: np.ndarray) -> List[np.ndarray]:
        """由输出梯度反传得到各参数梯度，顺序与 params 一致"""
        activations, pre_activations = cache
        num_layers = len(self.params) // 2
        grads = [None] * len(self.params)
        delta = grad_output
        for k in reversed(range(num_layers)):
            grads[2 * k] = activations[k].T @ delta
            grads[2 * k + 1] = delta.sum(axis=0)
            if k > 0:
                delta = (delta @ self.params[2 * k].T) * (pre_activations[k - 1] > 0)
        return grads


class Adam:
    """Adam优化器，原地更新参数"""

    def __init__(self, shapes: Sequence[Tuple[int, ...]], learning_rate: float = 1e-3,
                 betas: Tuple[float, float] = (0.9, 0.999), eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]
        self.t = 0

    def step(self, params: List[np.ndarray], grads: Sequence[np.ndarray]):
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + self.eps)


def q_forward(network: MLP, state: np.ndarray, num_heads: int) -> np.ndarray:
    """
    Q值 (heads, choices)；批量输入时为 (batch, heads, choices)
    """
    state = np.asarray(state, dtype=np.float64)
    output = network.forward(state)
    if network.output_dim % max(num_heads, 1) != 0:
        raise ShapeMismatchError(f"output dimension {network.output_dim} is not divisible by {num_heads} heads")
    num_choices = network.output_dim // max(num_heads, 1)
    q_values = output.reshape(output.shape[0], num_heads, num_choices)
    return q_values[0] if state.ndim == 1 else q_values


def td_loss_and_grads(network: MLP, states: np.ndarray, actions: np.ndarray, targets: np.ndarray):
    """
    均方TD损失 L = mean_{batch,heads} (y − Q(s,a))²，只计入所选动作

    Args:
        states: (B, d)
        actions: (B, H) 每个头所选类别
        targets: (B, H)

    Returns:
        (loss, grads)
    """
    batch, num_heads = actions.shape
    output, cache = network.forward(states, keep_cache=True)
    q_values = output.reshape(batch, num_heads, -1)
    taken = np.take_along_axis(q_values, actions[..., None], axis=-1)[..., 0]
    error = taken - targets
    count = max(batch * num_heads, 1)
    loss = float(np.sum(error ** 2) / count)

    grad_q = np.zeros_like(q_values)
    np.put_along_axis(grad_q, actions[..., None], (2.0 * error / count)[..., None], axis=-1)
    grads = network.backward(cache, grad_q.reshape(batch, -1))
    return loss, grads
