"""
Reverse-mode differentiation over float64 numpy arrays.

A Tensor holds a value, an adjoint slot and, when it was produced by an
operation on differentiable inputs, a closure mapping the output adjoint to
the adjoints of its parents. backward() runs every closure exactly once, in
reverse topological order, starting from a scalar root.
"""
from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.errors import DimensionError, NonFiniteError

ArrayLike = Union["Tensor", np.ndarray, float, int]
BackwardFn = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum an adjoint back down to the shape of a broadcast operand."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _as_tensor(value: ArrayLike) -> "Tensor":
    return value if isinstance(value, Tensor) else Tensor(value)


_grad_enabled = True


@contextmanager
def no_grad() -> Iterator[None]:
    """Evaluate without recording the graph (single-threaded use)."""
    global _grad_enabled
    previous = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = previous


class Tensor:
    """A float64 array that records how it was computed."""

    __slots__ = ("data", "grad", "requires_grad", "name", "_parents", "_backward", "_op")

    def __init__(self, data, requires_grad: bool = False, name: str = ""):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[BackwardFn] = None
        self._op = "leaf"

    @classmethod
    def _from_op(cls, data, parents: Sequence["Tensor"], backward: BackwardFn, op: str) -> "Tensor":
        data = np.asarray(data, dtype=np.float64)
        if not np.all(np.isfinite(data)):
            raise NonFiniteError(f"operation '{op}' produced non-finite values")
        out = cls(data)
        out._op = op
        if _grad_enabled and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
        return out

    def __repr__(self) -> str:
        label = f" name={self.name}" if self.name else ""
        return f"Tensor(shape={self.shape}, op={self._op}{label})"

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise DimensionError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    # ── Graph traversal ──────────────────────────────────────────────────────

    def _topological_order(self) -> List["Tensor"]:
        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited:
                    stack.append((parent, False))
        return order

    def backward(self) -> None:
        """Populate .grad on every node reachable from this scalar root."""
        if self.data.size != 1:
            raise DimensionError(f"backward() needs a scalar root, got shape {self.shape}")
        order = self._topological_order()
        for node in order:
            node.grad = np.zeros_like(node.data)
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is None:
                continue
            grads = node._backward(node.grad)
            for parent, g in zip(node._parents, grads):
                if g is None or not parent.requires_grad:
                    continue
                parent.grad += g

    # ── Arithmetic ───────────────────────────────────────────────────────────

    def __add__(self, other: ArrayLike) -> "Tensor":
        other = _as_tensor(other)
        a_shape, b_shape = self.shape, other.shape
        return Tensor._from_op(
            self.data + other.data,
            (self, other),
            lambda g: (_unbroadcast(g, a_shape), _unbroadcast(g, b_shape)),
            "add",
        )

    __radd__ = __add__

    def __neg__(self) -> "Tensor":
        return Tensor._from_op(-self.data, (self,), lambda g: (-g,), "neg")

    def __sub__(self, other: ArrayLike) -> "Tensor":
        other = _as_tensor(other)
        a_shape, b_shape = self.shape, other.shape
        return Tensor._from_op(
            self.data - other.data,
            (self, other),
            lambda g: (_unbroadcast(g, a_shape), -_unbroadcast(g, b_shape)),
            "sub",
        )

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        return _as_tensor(other) - self

    def __mul__(self, other: ArrayLike) -> "Tensor":
        other = _as_tensor(other)
        a, b = self.data, other.data
        return Tensor._from_op(
            a * b,
            (self, other),
            lambda g: (_unbroadcast(g * b, a.shape), _unbroadcast(g * a, b.shape)),
            "mul",
        )

    __rmul__ = __mul__

    def __truediv__(self, other: ArrayLike) -> "Tensor":
        other = _as_tensor(other)
        a, b = self.data, other.data
        return Tensor._from_op(
            a / b,
            (self, other),
            lambda g: (_unbroadcast(g / b, a.shape), _unbroadcast(-g * a / (b * b), b.shape)),
            "div",
        )

    def __rtruediv__(self, other: ArrayLike) -> "Tensor":
        return _as_tensor(other) / self

    def __pow__(self, exponent: float) -> "Tensor":
        x = self.data
        return Tensor._from_op(
            x ** exponent,
            (self,),
            lambda g: (g * exponent * x ** (exponent - 1),),
            f"pow{exponent}",
        )

    def __matmul__(self, other: "Tensor") -> "Tensor":
        other = _as_tensor(other)
        a, b = self.data, other.data
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise DimensionError(f"matmul shape mismatch: {a.shape} @ {b.shape}")
        return Tensor._from_op(a @ b, (self, other), lambda g: (g @ b.T, a.T @ g), "matmul")

    # ── Elementwise ──────────────────────────────────────────────────────────

    def exp(self) -> "Tensor":
        out = np.exp(self.data)
        return Tensor._from_op(out, (self,), lambda g: (g * out,), "exp")

    def log(self) -> "Tensor":
        x = self.data
        return Tensor._from_op(np.log(x), (self,), lambda g: (g / x,), "log")

    def relu(self) -> "Tensor":
        # subgradient at exactly 0 is 0
        mask = self.data > 0
        return Tensor._from_op(self.data * mask, (self,), lambda g: (g * mask,), "relu")

    def clip_nonnegative(self) -> "Tensor":
        """max(0, x) whose adjoint passes where x >= 0."""
        mask = self.data >= 0
        return Tensor._from_op(np.where(mask, self.data, 0.0), (self,), lambda g: (g * mask,), "clip0")

    def clamp_min(self, floor: float) -> "Tensor":
        mask = self.data >= floor
        return Tensor._from_op(np.maximum(self.data, floor), (self,), lambda g: (g * mask,), "clamp_min")

    # ── Reductions ───────────────────────────────────────────────────────────

    def sum(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        shape = self.shape

        def backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, shape),)

        return Tensor._from_op(self.data.sum(axis=axis, keepdims=keepdims), (self,), backward, "sum")

    def mean(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        count = self.data.size if axis is None else self.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    def max(self, axis: int = -1) -> "Tensor":
        """Maximum along an axis; the adjoint goes to the first argmax."""
        shape = self.shape
        idx = np.expand_dims(np.argmax(self.data, axis=axis), axis)
        out = np.take_along_axis(self.data, idx, axis=axis).squeeze(axis)

        def backward(g):
            grad = np.zeros(shape)
            np.put_along_axis(grad, idx, np.expand_dims(g, axis), axis=axis)
            return (grad,)

        return Tensor._from_op(out, (self,), backward, "max")

    def softmax(self, axis: int = -1) -> "Tensor":
        shifted = self.data - self.data.max(axis=axis, keepdims=True)
        e = np.exp(shifted)
        s = e / e.sum(axis=axis, keepdims=True)
        return Tensor._from_op(
            s,
            (self,),
            lambda g: (s * (g - (g * s).sum(axis=axis, keepdims=True)),),
            "softmax",
        )

    def log_softmax(self, axis: int = -1) -> "Tensor":
        shifted = self.data - self.data.max(axis=axis, keepdims=True)
        lse = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
        out = shifted - lse
        s = np.exp(out)
        return Tensor._from_op(
            out,
            (self,),
            lambda g: (g - s * g.sum(axis=axis, keepdims=True),),
            "log_softmax",
        )

    # ── Shape and indexing ───────────────────────────────────────────────────

    def reshape(self, *shape: int) -> "Tensor":
        original = self.shape
        return Tensor._from_op(
            self.data.reshape(*shape), (self,), lambda g: (g.reshape(original),), "reshape"
        )

    def __getitem__(self, key) -> "Tensor":
        """Basic (int/slice) indexing only."""
        shape = self.shape

        def backward(g):
            grad = np.zeros(shape)
            grad[key] = g
            return (grad,)

        return Tensor._from_op(self.data[key], (self,), backward, "getitem")

    def take(self, indices: np.ndarray) -> "Tensor":
        """Gather entries along the last axis."""
        indices = np.asarray(indices, dtype=np.int64)
        shape = self.shape

        def backward(g):
            grad = np.zeros(shape)
            np.add.at(np.moveaxis(grad, -1, 0), indices, np.moveaxis(g, -1, 0))
            return (grad,)

        return Tensor._from_op(np.take(self.data, indices, axis=-1), (self,), backward, "take")

    def embed(self, positions: np.ndarray, length: int) -> "Tensor":
        """Scatter the last axis into a zero array of `length` at unique `positions`."""
        positions = np.asarray(positions, dtype=np.int64)
        if positions.shape[0] != self.shape[-1]:
            raise DimensionError(f"embed needs {self.shape[-1]} positions, got {positions.shape[0]}")
        out = np.zeros(self.shape[:-1] + (length,))
        out[..., positions] = self.data
        return Tensor._from_op(out, (self,), lambda g: (g[..., positions],), "embed")

    def pick(self, indices: np.ndarray) -> "Tensor":
        """Row-wise selection out[k] = x[k, indices[k]] on a 2-D tensor."""
        indices = np.asarray(indices, dtype=np.int64)
        if self.ndim != 2 or indices.shape != (self.shape[0],):
            raise DimensionError(f"pick needs a [K, M] tensor and K indices, got {self.shape}")
        rows = np.arange(self.shape[0])
        shape = self.shape

        def backward(g):
            grad = np.zeros(shape)
            grad[rows, indices] = g
            return (grad,)

        return Tensor._from_op(self.data[rows, indices], (self,), backward, "pick")


def stack(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    count = len(tensors)
    return Tensor._from_op(
        np.stack([t.data for t in tensors], axis=axis),
        tuple(tensors),
        lambda g: tuple(np.take(g, i, axis=axis) for i in range(count)),
        "stack",
    )


def straight_through(hard: np.ndarray, soft: Tensor) -> Tensor:
    """Forward value `hard`, adjoint routed unchanged into `soft`."""
    hard = np.asarray(hard, dtype=np.float64)
    if hard.shape != soft.shape:
        raise DimensionError(f"straight-through shapes differ: {hard.shape} vs {soft.shape}")
    return Tensor._from_op(hard, (soft,), lambda g: (g,), "straight_through")


def affine_forward(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """out[r, c] = sum_k x[r, k] * w[k, c] + b[c]."""
    xd, wd = x.data, w.data
    if xd.ndim != 2 or wd.ndim != 2 or xd.shape[1] != wd.shape[0] or b.shape != (wd.shape[1],):
        raise DimensionError(f"affine shape mismatch: x{xd.shape} w{wd.shape} b{b.shape}")
    return Tensor._from_op(
        xd @ wd + b.data,
        (x, w, b),
        lambda g: (g @ wd.T, xd.T @ g, g.sum(axis=0)),
        "affine",
    )


def relu(x: Tensor) -> Tensor:
    return x.relu()


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    return x.softmax(axis)


def log_softmax(x: Tensor, axis: int = -1) -> Tensor:
    return x.log_softmax(axis)
