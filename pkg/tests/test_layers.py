import numpy as np

from app.core import Mlp, Tensor, glorot_uniform


def test_glorot_bounds(rng):
    w = glorot_uniform(128, 512, rng)
    assert w.shape == (128, 512)
    assert np.max(np.abs(w)) <= np.sqrt(6.0 / 640.0)


def test_mlp_names_shapes_and_zero_biases(rng):
    net = Mlp((2, 128, 512, 128, 16), "nn3", rng)
    params = net.parameters()
    assert sorted(params) == sorted([f"nn3.w{i}" for i in range(4)] + [f"nn3.b{i}" for i in range(4)])
    assert params["nn3.w1"].shape == (128, 512)
    assert all(not np.any(params[f"nn3.b{i}"].data) for i in range(4))
    assert net(Tensor(np.ones((5, 2)))).shape == (5, 16)


def test_output_layer_is_linear(rng):
    net = Mlp((1, 4), "lin", rng)
    out = net(Tensor([[-10.0]]))
    np.testing.assert_allclose(out.data, -10.0 * net.parameters()["lin.w0"].data)


def test_detached_copy_shares_weights_without_graph(rng):
    net = Mlp((2, 8, 3), "d", rng)
    copy = net.detached()
    x = Tensor(np.ones((1, 2)))
    np.testing.assert_array_equal(copy(x).data, net(x).data)
    assert not copy(x).requires_grad
    assert net(x).requires_grad
