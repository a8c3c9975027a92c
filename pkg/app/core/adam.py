"""
Adam with bias correction, keyed by parameter name.
"""
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from app.core.tensor import Tensor
from app.errors import DimensionError, NonFiniteGradientError


@dataclass
class AdamState:
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(state: AdamState, params: Dict[str, Tensor], grads: Dict[str, np.ndarray]) -> None:
    """Update `params` in place from `grads`; raises before touching anything on a bad gradient."""
    next_step = state.step + 1
    for name, param in params.items():
        g = grads[name]
        if g.shape != param.shape:
            raise DimensionError(f"gradient for '{name}' has shape {g.shape}, expected {param.shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradientError(next_step, name)

    state.step = next_step
    bc1 = 1.0 - state.beta1 ** state.step
    bc2 = 1.0 - state.beta2 ** state.step
    step_size = state.lr / bc1

    for name, param in params.items():
        g = grads[name]
        if name not in state.m:
            state.m[name] = np.zeros_like(param.data)
            state.v[name] = np.zeros_like(param.data)

        m, v = state.m[name], state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)

        param.data -= step_size * m / (np.sqrt(v / bc2) + state.eps)


class Adam:
    """Thin owner of an AdamState bound to a fixed parameter dict."""

    def __init__(self, params: Dict[str, Tensor], lr: float = 0.01,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.state = AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps)

    def step(self) -> None:
        grads = {
            name: (p.grad if p.grad is not None else np.zeros_like(p.data))
            for name, p in self.params.items()
        }
        adam_step(self.state, self.params, grads)
