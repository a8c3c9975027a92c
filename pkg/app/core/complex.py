"""
Complex vectors as (re, im) pairs of real tensors, and the unitary DFT.

Both transform directions carry a 1/sqrt(L) factor, so the inverse transform
matches the 4N-point IFFT convention of the ACO-OFDM modulator and each
direction is the adjoint of the other.
"""
from dataclasses import dataclass

import numpy as np

from app.core.tensor import Tensor
from app.errors import DimensionError, UnsupportedLengthError


@dataclass(frozen=True)
class ComplexTensor:
    re: Tensor
    im: Tensor

    def __post_init__(self):
        if self.re.shape != self.im.shape:
            raise DimensionError(f"re/im shapes differ: {self.re.shape} vs {self.im.shape}")

    @classmethod
    def from_numpy(cls, values: np.ndarray, requires_grad: bool = False) -> "ComplexTensor":
        values = np.asarray(values, dtype=np.complex128)
        return cls(
            Tensor(values.real.copy(), requires_grad=requires_grad),
            Tensor(values.imag.copy(), requires_grad=requires_grad),
        )

    @property
    def shape(self):
        return self.re.shape

    def numpy(self) -> np.ndarray:
        return self.re.data + 1j * self.im.data

    def conj(self) -> "ComplexTensor":
        return ComplexTensor(self.re, -self.im)

    def scale(self, factor) -> "ComplexTensor":
        return ComplexTensor(self.re * factor, self.im * factor)

    def take(self, indices: np.ndarray) -> "ComplexTensor":
        return ComplexTensor(self.re.take(indices), self.im.take(indices))

    def abs2(self) -> Tensor:
        return self.re * self.re + self.im * self.im


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def unitary_dft(v: ComplexTensor, inverse: bool = False) -> ComplexTensor:
    """
    Unitary DFT along the last axis.

    inverse=True computes x(n) = (1/sqrt(L)) sum_k V(k) exp(+j 2 pi n k / L).
    The adjoint of the unitary IFFT is the unitary FFT and vice versa, which is
    what the backward closure applies to the complex output adjoint.
    """
    length = v.shape[-1]
    if not is_power_of_two(length):
        raise UnsupportedLengthError(f"DFT length {length} is not a power of two")

    transform = np.fft.ifft if inverse else np.fft.fft
    adjoint = np.fft.fft if inverse else np.fft.ifft

    out = transform(v.re.data + 1j * v.im.data, axis=-1, norm="ortho")

    def backward(g):
        adj = adjoint(g[0] + 1j * g[1], axis=-1, norm="ortho")
        return adj.real, adj.imag

    stacked = Tensor._from_op(
        np.stack([out.real, out.imag]),
        (v.re, v.im),
        backward,
        "idft" if inverse else "dft",
    )
    return ComplexTensor(stacked[0], stacked[1])
