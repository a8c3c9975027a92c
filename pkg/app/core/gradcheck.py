"""
Central-difference validation of analytic gradients.
"""
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from app.core.tensor import Tensor

# (parameter name, flat index)
Coordinate = Tuple[str, int]


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / (abs(analytic) + abs(numeric) + 1e-12)


def analytic_gradients(f: Callable[[], Tensor], params: Dict[str, Tensor]) -> Dict[str, np.ndarray]:
    """Gradients of f() at the current values; parameters f does not reach get zeros."""
    for p in params.values():
        p.grad = None
    loss = f()
    loss.backward()
    return {name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data)) for name, p in params.items()}


def numeric_gradient(f: Callable[[], Tensor], params: Dict[str, Tensor], coordinate: Coordinate, h: float = 1e-6) -> float:
    name, index = coordinate
    flat = params[name].data.reshape(-1)
    original = flat[index]
    flat[index] = original + h
    plus = f().item()
    flat[index] = original - h
    minus = f().item()
    flat[index] = original
    return (plus - minus) / (2.0 * h)


def grad_check(
    f: Callable[[], Tensor],
    params: Dict[str, Tensor],
    h: float = 1e-6,
    coordinates: Optional[Sequence[Coordinate]] = None,
    reference: Optional[Callable[[], Tensor]] = None,
    min_magnitude: float = 0.0,
) -> float:
    """
    Max relative error between backward() and central differences.

    `f` rebuilds the scalar graph from the current parameter values on every
    call; any randomness inside it must be frozen by the caller. Without
    `coordinates`, every entry whose analytic gradient exceeds `min_magnitude`
    is checked.

    `reference`, when given, is differentiated numerically in place of `f`:
    for surrogate estimators whose adjoint is the gradient of another function.
    """
    grads = analytic_gradients(f, params)
    if coordinates is None:
        coordinates = [
            (name, int(i))
            for name, g in grads.items()
            for i in np.flatnonzero(np.abs(g.reshape(-1)) >= min_magnitude)
        ]
    target = reference if reference is not None else f

    worst = 0.0
    for name, index in coordinates:
        numeric = numeric_gradient(target, params, (name, index), h)
        worst = max(worst, relative_error(float(grads[name].reshape(-1)[index]), numeric))
    return worst


def sample_coordinates(
    grads: Dict[str, np.ndarray],
    count: int,
    rng: np.random.Generator,
    min_magnitude: float = 0.0,
    prefixes: Iterable[str] = (),
    top: Optional[int] = None,
) -> list:
    """
    Draw up to `count` distinct coordinates whose analytic gradient exceeds
    `min_magnitude`, spread round-robin over the parameter groups named by
    `prefixes`. With `top`, each group only offers its `top` largest-magnitude
    entries.
    """
    groups = list(prefixes) or [""]
    pools = []
    for prefix in groups:
        pool = [
            (abs(float(g.reshape(-1)[i])), name, int(i))
            for name, g in sorted(grads.items())
            if name.startswith(prefix)
            for i in np.flatnonzero(np.abs(g.reshape(-1)) > min_magnitude)
        ]
        if top is not None:
            pool = sorted(pool, key=lambda entry: -entry[0])[:top]
        order = rng.choice(len(pool), size=len(pool), replace=False) if pool else []
        pools.append([(pool[j][1], pool[j][2]) for j in order])

    chosen = []
    depth = 0
    while len(chosen) < count and any(depth < len(pool) for pool in pools):
        for pool in pools:
            if depth < len(pool) and len(chosen) < count:
                chosen.append(pool[depth])
        depth += 1
    return chosen
