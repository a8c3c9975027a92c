from typing import Dict, List, Sequence, Tuple

import numpy as np

from app.core.tensor import Tensor, affine_forward


def glorot_uniform(fan_in: int, fan_out: int, rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class Mlp:
    """
    Fully-connected network with ReLU on every hidden layer and a linear
    output layer. Parameters are named `<prefix>.w<i>` / `<prefix>.b<i>`.
    """

    def __init__(self, widths: Sequence[int], prefix: str, rng: np.random.Generator):
        self.widths = tuple(widths)
        self.prefix = prefix
        self.layers: List[Tuple[Tensor, Tensor]] = []
        for i, (fan_in, fan_out) in enumerate(zip(self.widths[:-1], self.widths[1:])):
            w = Tensor(glorot_uniform(fan_in, fan_out, rng), requires_grad=True, name=f"{prefix}.w{i}")
            b = Tensor(np.zeros(fan_out), requires_grad=True, name=f"{prefix}.b{i}")
            self.layers.append((w, b))

    def __call__(self, x: Tensor) -> Tensor:
        last = len(self.layers) - 1
        for i, (w, b) in enumerate(self.layers):
            x = affine_forward(x, w, b)
            if i < last:
                x = x.relu()
        return x

    def detached(self) -> "Mlp":
        """Copy sharing the weights but recording no graph; safe to call from worker threads."""
        copy = Mlp.__new__(Mlp)
        copy.widths = self.widths
        copy.prefix = self.prefix
        copy.layers = [(w.detach(), b.detach()) for w, b in self.layers]
        return copy

    def parameters(self) -> Dict[str, Tensor]:
        params: Dict[str, Tensor] = {}
        for w, b in self.layers:
            params[w.name] = w
            params[b.name] = b
        return params
