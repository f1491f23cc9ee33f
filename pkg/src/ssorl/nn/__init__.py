from ssorl.nn.checkpoint import load_checkpoint, restore_paramset, save_checkpoint
from ssorl.nn.modules import (
    causal_attention_block,
    init_attention_block,
    init_layer_norm,
    init_linear,
    init_mlp,
    layer_norm,
    linear,
    mlp_forward,
)
from ssorl.nn.optim import adam_step, clip_grad_norm, grad, warmup_lr
from ssorl.nn.params import ParamSet
from ssorl.nn.tensor import Tensor

__all__ = [
    "Tensor",
    "ParamSet",
    "grad",
    "adam_step",
    "warmup_lr",
    "clip_grad_norm",
    "init_linear",
    "linear",
    "init_mlp",
    "mlp_forward",
    "init_layer_norm",
    "layer_norm",
    "init_attention_block",
    "causal_attention_block",
    "save_checkpoint",
    "load_checkpoint",
    "restore_paramset",
]
