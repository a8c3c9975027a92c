import numpy as np
import pytest

from app.core import ComplexTensor, Tensor, grad_check, unitary_dft
from app.errors import DimensionError, UnsupportedLengthError


def _random_complex(rng, size):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def test_impulse_inverse_is_constant():
    out = unitary_dft(ComplexTensor.from_numpy(np.array([1, 0, 0, 0])), inverse=True)
    np.testing.assert_allclose(out.numpy(), [0.5, 0.5, 0.5, 0.5], atol=1e-15)


def test_inverse_uses_positive_exponent():
    v = np.zeros(8, dtype=complex)
    v[1] = 1.0
    out = unitary_dft(ComplexTensor.from_numpy(v), inverse=True).numpy()
    n = np.arange(8)
    np.testing.assert_allclose(out, np.exp(2j * np.pi * n / 8) / np.sqrt(8), atol=1e-15)


def test_round_trip_and_parseval(rng):
    v = _random_complex(rng, 256)
    x = unitary_dft(ComplexTensor.from_numpy(v), inverse=True)
    back = unitary_dft(x, inverse=False).numpy()
    np.testing.assert_allclose(back, v, atol=1e-12)
    energy = np.sum(np.abs(v) ** 2)
    assert abs(np.sum(np.abs(x.numpy()) ** 2) - energy) <= 1e-12 * energy


@pytest.mark.parametrize("length", [4, 16, 64, 256, 1024])
def test_isometry_over_lengths(rng, length):
    v = _random_complex(rng, length)
    energy = np.sum(np.abs(v) ** 2)
    out = unitary_dft(ComplexTensor.from_numpy(v), inverse=True).numpy()
    assert abs(np.sum(np.abs(out) ** 2) - energy) <= 1e-12 * energy


@pytest.mark.parametrize("length", [3, 6, 12])
def test_non_power_of_two_rejected(length):
    with pytest.raises(UnsupportedLengthError):
        unitary_dft(ComplexTensor.from_numpy(np.ones(length)), inverse=True)


@pytest.mark.parametrize("inverse", [True, False])
def test_dft_gradients_match_finite_differences(rng, inverse):
    v = ComplexTensor.from_numpy(_random_complex(rng, 16), requires_grad=True)
    c_re, c_im = rng.normal(size=16), rng.normal(size=16)

    def loss():
        out = unitary_dft(v, inverse=inverse)
        return (out.re * c_re).sum() + (out.im * out.im * c_im).sum()

    assert grad_check(loss, {"re": v.re, "im": v.im}) < 1e-6


def test_batched_transform_acts_on_last_axis(rng):
    v = _random_complex(rng, (3, 8))
    out = unitary_dft(ComplexTensor.from_numpy(v), inverse=False).numpy()
    np.testing.assert_allclose(out, np.fft.fft(v, axis=-1) / np.sqrt(8), atol=1e-12)


def test_mismatched_parts_rejected():
    with pytest.raises(DimensionError):
        ComplexTensor(Tensor(np.zeros(4)), Tensor(np.zeros(3)))
