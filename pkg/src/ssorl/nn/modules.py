"""Feed-forward and attention building blocks on top of the autograd core.

All builders follow the same two-call pattern: `init_*` registers parameters
under a name prefix in a ParamSet, the matching forward function runs the
computation. Weights start uniform in +-sqrt(6/(fan_in+fan_out)), biases at
zero.
"""

from __future__ import annotations

import numpy as np

from ssorl.errors import ContractViolation
from ssorl.nn import tensor as T
from ssorl.nn.params import ParamSet
from ssorl.nn.tensor import Tensor

_ACTIVATIONS = {"relu": T.relu, "tanh": T.tanh, "linear": lambda x: x}


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=(fan_in, fan_out))


def init_linear(ps: ParamSet, name: str, fan_in: int, fan_out: int, rng: np.random.Generator):
    ps.add(f"{name}.w", glorot_uniform(rng, fan_in, fan_out))
    ps.add(f"{name}.b", np.zeros(fan_out))


def linear(ps: ParamSet, name: str, x: Tensor) -> Tensor:
    return x @ ps[f"{name}.w"] + ps[f"{name}.b"]


def init_mlp(ps: ParamSet, prefix: str, layer_sizes: list[int], rng: np.random.Generator):
    """Register an MLP: layer_sizes = [in, hidden..., out]."""
    for i in range(len(layer_sizes) - 1):
        init_linear(ps, f"{prefix}.l{i}", layer_sizes[i], layer_sizes[i + 1], rng)


def mlp_forward(
    ps: ParamSet,
    x: Tensor | np.ndarray,
    layer_sizes: list[int],
    activation: str = "relu",
    prefix: str = "mlp",
) -> Tensor:
    """Dense forward pass; `activation` applies to hidden layers, output is linear.

    Accepts a single input row or a batch (leading batch axis).
    """
    act = _ACTIVATIONS[activation]
    x = T.as_tensor(x)
    if x.data.shape[-1] != layer_sizes[0]:
        raise ContractViolation(
            f"layer 0 expects input width {layer_sizes[0]}, got {x.data.shape[-1]}"
        )
    n_layers = len(layer_sizes) - 1
    for i in range(n_layers):
        w = ps[f"{prefix}.l{i}.w"]
        if x.data.shape[-1] != w.data.shape[0]:
            raise ContractViolation(
                f"layer {i} expects input width {w.data.shape[0]}, got {x.data.shape[-1]}"
            )
        x = x @ w + ps[f"{prefix}.l{i}.b"]
        if i < n_layers - 1:
            x = act(x)
    return x


def init_layer_norm(ps: ParamSet, name: str, dim: int):
    ps.add(f"{name}.g", np.ones(dim))
    ps.add(f"{name}.b", np.zeros(dim))


def layer_norm(ps: ParamSet, name: str, x: Tensor, eps: float = 1e-5) -> Tensor:
    mu = x.mean(axis=-1, keepdims=True)
    centered = x - mu
    var = T.square(centered).mean(axis=-1, keepdims=True)
    normed = centered / T.sqrt(var + eps)
    return normed * ps[f"{name}.g"] + ps[f"{name}.b"]


def init_attention_block(
    ps: ParamSet, prefix: str, dim: int, n_heads: int, rng: np.random.Generator, ff_mult: int = 4
):
    if dim % n_heads != 0:
        raise ContractViolation(f"dim {dim} not divisible by heads {n_heads}")
    init_layer_norm(ps, f"{prefix}.ln1", dim)
    init_linear(ps, f"{prefix}.qkv", dim, 3 * dim, rng)
    init_linear(ps, f"{prefix}.proj", dim, dim, rng)
    init_layer_norm(ps, f"{prefix}.ln2", dim)
    init_linear(ps, f"{prefix}.ff1", dim, ff_mult * dim, rng)
    init_linear(ps, f"{prefix}.ff2", ff_mult * dim, dim, rng)


def causal_attention_block(
    ps: ParamSet,
    tokens: Tensor,
    prefix: str,
    n_heads: int,
    context: int,
    dropout_p: float = 0.0,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """Pre-norm transformer block with a causal mask: output t sees inputs <= t.

    `tokens` is (batch, seq, dim) or (seq, dim); seq must not exceed `context`.
    """
    squeeze = tokens.data.ndim == 2
    if squeeze:
        tokens = tokens.reshape(1, *tokens.data.shape)
    b, t, dim = tokens.data.shape
    if t > context:
        raise ContractViolation(f"sequence length {t} exceeds context {context}")
    head_dim = dim // n_heads

    h = layer_norm(ps, f"{prefix}.ln1", tokens)
    qkv = linear(ps, f"{prefix}.qkv", h)  # (b, t, 3*dim)
    qkv = qkv.reshape(b, t, 3, n_heads, head_dim).transpose((2, 0, 3, 1, 4))
    q, k, v = qkv[0], qkv[1], qkv[2]  # each (b, heads, t, head_dim)

    scores = (q @ k.transpose((0, 1, 3, 2))) * (1.0 / np.sqrt(head_dim))
    mask = np.triu(np.full((t, t), -np.inf), k=1)
    scores = scores + Tensor(mask)
    attn = T.softmax(scores, axis=-1)
    if dropout_p > 0.0:
        attn = T.dropout(attn, dropout_p, rng)
    ctx = attn @ v  # (b, heads, t, head_dim)
    ctx = ctx.transpose((0, 2, 1, 3)).reshape(b, t, dim)
    ctx = linear(ps, f"{prefix}.proj", ctx)
    if dropout_p > 0.0:
        ctx = T.dropout(ctx, dropout_p, rng)
    x = tokens + ctx

    h2 = layer_norm(ps, f"{prefix}.ln2", x)
    ff = T.relu(linear(ps, f"{prefix}.ff1", h2))
    ff = linear(ps, f"{prefix}.ff2", ff)
    if dropout_p > 0.0:
        ff = T.dropout(ff, dropout_p, rng)
    out = x + ff
    if squeeze:
        out = out.reshape(t, dim)
    return out
