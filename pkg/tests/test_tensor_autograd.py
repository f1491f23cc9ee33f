import numpy as np
import pytest

from ssorl.errors import ContractViolation
from ssorl.nn import ParamSet, Tensor, grad
from ssorl.nn import tensor as T

from fd_oracle import fd_gradients, max_rel_error


def test_sum_gradient_is_ones():
    ps = ParamSet()
    p = ps.add("p", np.arange(12.0).reshape(3, 4))
    g = grad(p.sum(), ps)
    np.testing.assert_array_equal(g["p"], np.ones((3, 4)))


def test_quadratic_gradient_is_identity():
    ps = ParamSet()
    p = ps.add("p", np.array([1.0, -2.0]))
    loss = (T.square(p) * 0.5).sum()
    g = grad(loss, ps)
    np.testing.assert_allclose(g["p"], np.array([1.0, -2.0]))


def test_unreached_parameter_gets_zero_gradient():
    ps = ParamSet()
    a = ps.add("a", np.ones(3))
    ps.add("b", np.ones(2))
    g = grad(a.sum(), ps)
    np.testing.assert_array_equal(g["b"], np.zeros(2))


def test_non_scalar_loss_rejected():
    ps = ParamSet()
    p = ps.add("p", np.ones(3))
    with pytest.raises(ContractViolation):
        grad(p * 2.0, ps)


def test_broadcast_add_backward():
    ps = ParamSet()
    b = ps.add("b", np.array([1.0, 2.0]))
    x = Tensor(np.ones((5, 2)))
    g = grad(((x + b) * 3.0).sum(), ps)
    np.testing.assert_allclose(g["b"], np.full(2, 15.0))


def test_repeated_node_accumulates():
    ps = ParamSet()
    p = ps.add("p", np.array([3.0]))
    loss = (p * p).sum()  # d/dp p^2 = 2p
    g = grad(loss, ps)
    np.testing.assert_allclose(g["p"], np.array([6.0]))


def test_getitem_backward_scatters():
    ps = ParamSet()
    p = ps.add("p", np.arange(6.0).reshape(3, 2))
    idx = np.array([0, 2, 0])
    loss = p[idx].sum()
    g = grad(loss, ps)
    np.testing.assert_array_equal(g["p"], np.array([[2.0, 2.0], [0.0, 0.0], [1.0, 1.0]]))


@pytest.mark.parametrize("seed", range(3))
def test_composite_graph_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    ps = ParamSet()
    w1 = ps.add("w1", rng.normal(size=(4, 5)))
    b1 = ps.add("b1", rng.normal(size=5))
    w2 = ps.add("w2", rng.normal(size=(5, 2)))
    x = rng.normal(size=(7, 4))

    def loss_fn():
        h = T.tanh(Tensor(x) @ w1 + b1)
        out = h @ w2
        return T.square(out).mean() + T.exp(out * 0.1).sum() * 0.01

    analytic = grad(loss_fn(), ps)
    numeric = fd_gradients(loss_fn, ps)
    assert max_rel_error(analytic, numeric) < 1e-6


def test_softmax_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    ps = ParamSet()
    z = ps.add("z", rng.normal(size=(3, 4)))
    target = rng.normal(size=(3, 4))

    def loss_fn():
        return (T.softmax(z, axis=-1) * Tensor(target)).sum()

    analytic = grad(loss_fn(), ps)
    numeric = fd_gradients(loss_fn, ps)
    assert max_rel_error(analytic, numeric) < 1e-6


def test_logsumexp_gradient_is_softmax():
    rng = np.random.default_rng(1)
    ps = ParamSet()
    z = ps.add("z", rng.normal(size=(2, 5)))
    analytic = grad(T.logsumexp(z, axis=-1).sum(), ps)
    expected = np.exp(z.data - z.data.max(axis=-1, keepdims=True))
    expected /= expected.sum(axis=-1, keepdims=True)
    np.testing.assert_allclose(analytic["z"], expected, atol=1e-12)


def test_minimum_and_clip_subgradients():
    ps = ParamSet()
    a = ps.add("a", np.array([1.0, 5.0]))
    b = ps.add("b", np.array([2.0, 3.0]))
    g = grad(T.minimum(a, b).sum(), ps)
    np.testing.assert_array_equal(g["a"], np.array([1.0, 0.0]))
    np.testing.assert_array_equal(g["b"], np.array([0.0, 1.0]))

    ps2 = ParamSet()
    x = ps2.add("x", np.array([-2.0, 0.5, 2.0]))
    g2 = grad(T.clip(x, -1.0, 1.0).sum(), ps2)
    np.testing.assert_array_equal(g2["x"], np.array([0.0, 1.0, 0.0]))


def test_matmul_vector_cases():
    rng = np.random.default_rng(2)
    ps = ParamSet()
    w = ps.add("w", rng.normal(size=(3, 4)))
    v = ps.add("v", rng.normal(size=4))
    x = rng.normal(size=3)

    def loss_fn():
        return ((Tensor(x) @ w) * v).sum()

    analytic = grad(loss_fn(), ps)
    numeric = fd_gradients(loss_fn, ps)
    assert max_rel_error(analytic, numeric) < 1e-6


def test_stack_and_concat_backward():
    ps = ParamSet()
    a = ps.add("a", np.array([1.0, 2.0]))
    b = ps.add("b", np.array([3.0, 4.0]))
    loss = (T.stack([a, b], axis=0) * np.array([[1.0, 2.0], [3.0, 4.0]])).sum()
    g = grad(loss, ps)
    np.testing.assert_array_equal(g["a"], np.array([1.0, 2.0]))
    np.testing.assert_array_equal(g["b"], np.array([3.0, 4.0]))

    loss2 = (T.concat([a, b], axis=0) * np.array([1.0, 1.0, 2.0, 2.0])).sum()
    g2 = grad(loss2, ps)
    np.testing.assert_array_equal(g2["a"], np.array([1.0, 1.0]))
    np.testing.assert_array_equal(g2["b"], np.array([2.0, 2.0]))


def test_forward_is_deterministic():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(8, 8))
    w = rng.normal(size=(8, 8))
    out1 = (T.tanh(Tensor(x) @ Tensor(w))).data
    out2 = (T.tanh(Tensor(x) @ Tensor(w))).data
    assert out1.tobytes() == out2.tobytes()
