"""Adaptive-moment optimizer, warmup schedule, gradient utilities."""

from __future__ import annotations

import numpy as np

from ssorl.errors import ContractViolation
from ssorl.nn.params import ParamSet
from ssorl.nn.tensor import Tensor


def grad(loss: Tensor, ps: ParamSet) -> dict[str, np.ndarray]:
    """Reverse-mode gradients of a scalar loss for every parameter in `ps`.

    Parameters not reachable from the loss get zero gradients. Leaves the
    ParamSet's transient .grad fields cleared.
    """
    if loss.data.size != 1:
        raise ContractViolation(f"loss must be scalar, got shape {loss.data.shape}")
    ps.zero_grads()
    loss.backward()
    out = {}
    for name, t in ps.params.items():
        out[name] = t.grad if t.grad is not None else np.zeros_like(t.data)
    ps.zero_grads()
    return out


def adam_step(
    ps: ParamSet,
    grads: dict[str, np.ndarray],
    lr: float,
    betas: tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
    weight_decay: float = 0.0,
) -> ParamSet:
    """One bias-corrected adaptive-moment update, in place.

    `weight_decay` is decoupled (applied directly to the parameter, not the
    gradient). Raises on non-finite gradients, naming the parameter.
    """
    b1, b2 = betas
    for name, g in grads.items():
        if name not in ps.params:
            raise ContractViolation(f"gradient for unknown parameter {name!r}")
        if g.shape != ps.params[name].data.shape:
            raise ContractViolation(
                f"gradient shape {g.shape} does not match parameter "
                f"{name!r} shape {ps.params[name].data.shape}"
            )
        if not np.all(np.isfinite(g)):
            raise ContractViolation(f"non-finite gradient for parameter {name!r}")
    ps.step_count += 1
    t = ps.step_count
    bc1 = 1.0 - b1**t
    bc2 = 1.0 - b2**t
    for name, g in grads.items():
        p = ps.params[name]
        if name not in ps.m:
            ps.m[name] = np.zeros_like(p.data)
            ps.v[name] = np.zeros_like(p.data)
        m = ps.m[name]
        v = ps.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        update = (m / bc1) / (np.sqrt(v / bc2) + eps)
        if weight_decay > 0.0:
            p.data -= lr * weight_decay * p.data
        p.data -= lr * update
    return ps


def warmup_lr(base_lr: float, step: int, warmup_steps: int) -> float:
    """Linear warmup from 0 to base_lr over `warmup_steps`, then constant."""
    if warmup_steps <= 0 or step >= warmup_steps:
        return base_lr
    return base_lr * (step + 1) / warmup_steps


def clip_grad_norm(grads: dict[str, np.ndarray], max_norm: float) -> dict[str, np.ndarray]:
    """Scale all gradients so their global L2 norm is at most `max_norm`."""
    total = np.sqrt(sum(float((g * g).sum()) for g in grads.values()))
    if total > max_norm and total > 0.0:
        scale = max_norm / total
        return {k: g * scale for k, g in grads.items()}
    return grads
