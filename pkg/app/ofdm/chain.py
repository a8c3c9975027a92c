"""
ACO-OFDM physical chain.

Only the odd subcarriers 1, 3, ..., 2N-1 carry data (with their conjugates
mirrored at 4N-1, 4N-3, ...), so the 4N-point unitary IFFT is real and
antisymmetric, x(n) = -x(n + 2N). Zero-clipping then loses no information:
on the data subcarriers the spectrum of the clipped signal is exactly half
the transmitted data.
"""
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from app.core import ComplexTensor, Tensor, is_power_of_two, unitary_dft
from app.errors import ConsistencyError, DimensionError, UnsupportedLengthError
from app.models.signals import NoiseSpec

IMAG_TOLERANCE = 1e-10


@dataclass(frozen=True)
class OfdmFrame:
    """One ACO-OFDM symbol, or a batch of them along leading axes."""

    n_data: int
    data: ComplexTensor
    freq: ComplexTensor
    time_unclipped: Tensor
    time_clipped: Tensor


def as_complex_tensor(data: Union[ComplexTensor, np.ndarray]) -> ComplexTensor:
    if isinstance(data, ComplexTensor):
        return data
    return ComplexTensor.from_numpy(np.asarray(data))


def data_positions(n_data: int) -> np.ndarray:
    return 2 * np.arange(n_data) + 1


def mirror_positions(n_data: int) -> np.ndarray:
    return 4 * n_data - data_positions(n_data)


def hermitian_map(data: Union[ComplexTensor, np.ndarray]) -> ComplexTensor:
    """[0, X0, 0, X1, ..., 0, X_{N-1}, 0, X*_{N-1}, ..., 0, X*_0]."""
    data = as_complex_tensor(data)
    n_data = data.shape[-1]
    if not is_power_of_two(n_data):
        raise UnsupportedLengthError(f"n_data={n_data} is not a power of two")
    length = 4 * n_data
    pos, mirror = data_positions(n_data), mirror_positions(n_data)
    re = data.re.embed(pos, length) + data.re.embed(mirror, length)
    im = data.im.embed(pos, length) - data.im.embed(mirror, length)
    return ComplexTensor(re, im)


def modulate(data: Union[ComplexTensor, np.ndarray]) -> OfdmFrame:
    data = as_complex_tensor(data)
    freq = hermitian_map(data)
    time = unitary_dft(freq, inverse=True)

    residual = float(np.max(np.abs(time.im.data))) if time.im.size else 0.0
    if residual >= IMAG_TOLERANCE:
        raise ConsistencyError(f"IFFT output has imaginary residue {residual:.3e}; Hermitian mapping broken")

    time_unclipped = time.re
    return OfdmFrame(
        n_data=data.shape[-1],
        data=data,
        freq=freq,
        time_unclipped=time_unclipped,
        time_clipped=time_unclipped.clip_nonnegative(),
    )


def draw_noise(shape, noise: NoiseSpec, rng: np.random.Generator) -> np.ndarray:
    if noise.sigma2 == 0.0:
        return np.zeros(shape)
    return rng.normal(0.0, np.sqrt(noise.sigma2), size=shape)


def channel(
    x: Tensor,
    noise: NoiseSpec,
    rng: Optional[np.random.Generator] = None,
    z: Optional[np.ndarray] = None,
) -> Tensor:
    """y = x + z with unit channel gain. Pass `z` to reuse a noise realization."""
    if z is None:
        if rng is None:
            raise ValueError("channel() needs either rng or a noise realization z")
        z = draw_noise(x.shape, noise, rng)
    elif z.shape != x.shape:
        raise DimensionError(f"noise shape {z.shape} does not match signal shape {x.shape}")
    return x + z


def demodulate(y: Tensor) -> ComplexTensor:
    """Unitary FFT of the received samples, keeping the data subcarriers 1, 3, ..., 2N-1."""
    length = y.shape[-1]
    if length % 4 != 0:
        raise DimensionError(f"received frame length {length} is not a multiple of 4")
    spectrum = unitary_dft(ComplexTensor(y, Tensor(np.zeros(y.shape))), inverse=False)
    return spectrum.take(data_positions(length // 4))
