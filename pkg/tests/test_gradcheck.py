import numpy as np
import pytest

from app.core import Mlp, Tensor, grad_check
from app.core.gradcheck import analytic_gradients, numeric_gradient, relative_error, sample_coordinates


def test_relative_error_is_symmetric_and_safe_at_zero():
    assert relative_error(0.0, 0.0) == 0.0
    assert relative_error(1.0, 1.1) == relative_error(1.1, 1.0)


def test_quadratic_form(rng):
    a = rng.normal(size=(4, 4))
    a = a @ a.T
    x = Tensor(rng.normal(size=(4, 1)), requires_grad=True)

    def loss():
        return ((Tensor(a) @ x) * x).sum()

    assert grad_check(loss, {"x": x}) < 1e-7


def test_three_layer_relu_mlp(rng):
    net = Mlp((3, 8, 8, 4), "net", rng)
    x = Tensor(rng.normal(size=(6, 3)))
    targets = rng.integers(0, 4, size=6)

    def loss():
        return -net(x).log_softmax(axis=-1).pick(targets).mean()

    assert grad_check(loss, net.parameters(), min_magnitude=1e-6) < 1e-5


def test_sample_coordinates_spreads_over_groups_and_respects_floor(rng):
    grads = {
        "a.w": np.array([0.0, 5.0, 1e-9]),
        "b.w": np.array([[2.0, 0.0], [3.0, 4.0]]),
    }
    coords = sample_coordinates(grads, 6, rng, min_magnitude=1e-6, prefixes=("a.", "b."))
    # only four entries clear the floor
    assert len(coords) == 4
    assert len(set(coords)) == 4
    assert [name for name, _ in coords[:2]] == ["a.w", "b.w"]
    for name, index in coords:
        assert abs(grads[name].reshape(-1)[index]) > 1e-6


def test_sample_coordinates_top_keeps_largest(rng):
    grads = {"w": np.array([1.0, -9.0, 3.0, 8.0])}
    coords = sample_coordinates(grads, 20, rng, top=2)
    assert sorted(index for _, index in coords) == [1, 3]


def test_analytic_gradients_copies(rng):
    w = Tensor(rng.normal(size=3), requires_grad=True)
    grads = analytic_gradients(lambda: (w * w).sum(), {"w": w})
    np.testing.assert_allclose(grads["w"], 2 * w.data)
    w.grad[:] = 0.0
    assert np.any(grads["w"] != 0.0)


def test_sample_coordinates_never_repeats(rng):
    grads = {"nn1.w": rng.normal(size=(4, 5)), "nn2.w": rng.normal(size=30), "nn3.b": rng.normal(size=3)}
    coords = sample_coordinates(grads, 20, rng, prefixes=("nn1.", "nn2.", "nn3."))
    assert len(coords) == 20
    assert len(set(coords)) == 20
    assert sum(name == "nn3.b" for name, _ in coords) == 3


def test_min_magnitude_skips_round_off_sized_gradients():
    w = Tensor(np.array([1.0, 2e-9]), requires_grad=True)

    def loss():
        # second entry has a true gradient of 4e-9, below central-difference resolution
        return (w * w).sum() + Tensor(1e3)

    assert grad_check(loss, {"w": w}, min_magnitude=1e-6) < 1e-5


def test_reference_is_differentiated_in_place_of_f(rng):
    w = Tensor(rng.normal(size=3), requires_grad=True)
    assert grad_check(lambda: (w * 3.0).sum(), {"w": w}, reference=lambda: (w * 3.0).sum() + 5.0) < 1e-9
    assert grad_check(lambda: (w * 3.0).sum(), {"w": w}, reference=lambda: (w * 2.0).sum()) > 0.1


def test_analytic_gradients_resets_unreached_parameters(rng):
    a = Tensor(rng.normal(size=2), requires_grad=True)
    b = Tensor(rng.normal(size=2), requires_grad=True)
    analytic_gradients(lambda: (a * b).sum(), {"a": a, "b": b})
    grads = analytic_gradients(lambda: (a * a).sum(), {"a": a, "b": b})
    np.testing.assert_array_equal(grads["b"], np.zeros(2))


def test_numeric_gradient_restores_the_parameter(rng):
    w = Tensor(rng.normal(size=4), requires_grad=True)
    before = w.data.copy()
    assert numeric_gradient(lambda: (w * w).sum(), {"w": w}, ("w", 2)) == pytest.approx(2 * before[2], rel=1e-6)
    np.testing.assert_array_equal(w.data, before)
