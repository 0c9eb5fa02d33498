import numpy as np
import pytest

from camlab.autodiff import Adam, Graph, SGDMomentum, Tensor, ops

EPS = 1e-4


def check_gradients(op, *arrays, seed=0):
    """Compara o gradiente do grafo com diferenças centrais de sum(op(...) * R)."""
    arrays = [np.asarray(a, dtype=np.float64) for a in arrays]
    out_shape = op(*[Tensor(a) for a in arrays]).shape
    weights = np.random.default_rng(seed).uniform(-1.0, 1.0, size=out_shape)

    def scalar(values):
        return float((op(*[Tensor(v) for v in values]).numpy() * weights).sum())

    graph = Graph()
    variables = [graph.variable(a) for a in arrays]
    graph.backward(ops.sum(ops.mul(op(*variables), weights)))

    for position, (array, variable) in enumerate(zip(arrays, variables)):
        analytic = graph.grad(variable)
        numeric = np.zeros_like(array)
        for index in np.ndindex(array.shape):
            plus = [a.copy() for a in arrays]
            minus = [a.copy() for a in arrays]
            plus[position][index] += EPS
            minus[position][index] -= EPS
            numeric[index] = (scalar(plus) - scalar(minus)) / (2 * EPS)
        scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-8)
        assert np.linalg.norm(analytic - numeric) / scale < 1e-5, f"entrada {position}"


class TestForward:

    def test_relu(self):
        out = ops.relu(Tensor(np.array([[-1.0, 0.0, 2.0]])))
        assert np.array_equal(out.numpy(), [[0.0, 0.0, 2.0]])

    def test_softmax(self):
        out = ops.softmax(Tensor(np.zeros((1, 3)))).numpy()
        assert np.allclose(out, 1.0 / 3.0, atol=1e-12)
        out = ops.softmax(Tensor(np.array([[0.0, 0.0]]))).numpy()
        assert np.allclose(out, [[0.5, 0.5]], atol=1e-12)
        out = ops.softmax(Tensor(np.array([[1000.0, 0.0]]))).numpy()
        assert np.allclose(out, [[1.0, 0.0]], atol=1e-12)
        assert np.all(np.isfinite(out))

    def test_unit_kernel_convolution(self, grid):
        x = grid((1, 1, 4, 4))
        out = ops.conv2d(Tensor(x), Tensor(np.ones((1, 1, 1, 1))), Tensor(np.zeros(1)))
        assert np.array_equal(out.numpy(), x)

    def test_identity_kernel_convolution(self, grid):
        x = grid((1, 1, 5, 5))
        weight = np.zeros((1, 1, 3, 3))
        weight[0, 0, 1, 1] = 1.0
        out = ops.conv2d(Tensor(x), Tensor(weight), Tensor(np.zeros(1)))
        assert np.array_equal(out.numpy(), x)

    def test_constant_upsample(self):
        out = ops.bilinear_upsample(Tensor(np.full((2, 2), 0.7)), (5, 5)).numpy()
        assert np.allclose(out, 0.7, atol=1e-15)

    def test_single_value_upsample(self):
        out = ops.bilinear_upsample(Tensor(np.array([[0.3]])), (4, 4)).numpy()
        assert np.array_equal(out, np.full((4, 4), 0.3))

    def test_upsample_midpoint(self):
        out = ops.bilinear_upsample(Tensor(np.array([[0.0, 1.0], [0.0, 1.0]])), (2, 3)).numpy()
        assert np.allclose(out[:, 1], 0.5)
        assert np.allclose(out[:, 0], 0.0)
        assert np.allclose(out[:, 2], 1.0)

    def test_upsample_rejects_downsampling(self):
        with pytest.raises(ValueError):
            ops.bilinear_upsample(Tensor(np.zeros((4, 4))), (2, 2))

    def test_shape_mismatch_names_operation(self):
        with pytest.raises(ValueError, match='add'):
            ops.add(Tensor(np.zeros((2, 3))), Tensor(np.zeros((4, 5))))

    def test_max_pool_rejects_odd_size(self):
        with pytest.raises(ValueError, match='max_pool2d'):
            ops.max_pool2d(Tensor(np.zeros((1, 1, 3, 4))))

    def test_constant_range_normalize_is_zero(self):
        assert np.array_equal(ops.range_normalize(Tensor(np.full((3, 3), 2.0))).numpy(), np.zeros((3, 3)))


class TestBackward:

    def test_sum_of_squares(self):
        graph = Graph()
        x = graph.variable(np.array([3.0]))
        graph.backward(ops.sum(ops.mul(x, x)))
        assert np.allclose(graph.grad(x), [6.0])

    def test_softmax_pick(self):
        graph = Graph()
        x = graph.variable(np.array([[0.0, 0.0]]))
        graph.backward(ops.pick(ops.softmax(x), (0, 0)))
        assert np.allclose(graph.grad(x), [[0.25, -0.25]], atol=1e-12)

    def test_mean_of_relu(self):
        graph = Graph()
        x = graph.variable(np.array([-1.0, 1.0]))
        graph.backward(ops.mean(ops.relu(x)))
        assert np.allclose(graph.grad(x), [0.0, 0.5])

    def test_rejects_non_scalar_root(self):
        graph = Graph()
        x = graph.variable(np.ones(3))
        with pytest.raises(ValueError):
            graph.backward(ops.relu(x))

    def test_unreachable_gradient_is_zero(self):
        graph = Graph()
        x = graph.variable(np.ones(2))
        y = graph.variable(np.ones(2))
        graph.backward(ops.sum(x))
        assert np.array_equal(graph.grad(y), np.zeros(2))

    def test_mixing_graphs_is_rejected(self):
        a = Graph().variable(np.ones(2))
        b = Graph().variable(np.ones(2))
        with pytest.raises(ValueError):
            ops.add(a, b)

    def test_constants_do_not_record(self):
        out = ops.relu(Tensor(np.ones(2)))
        assert out.graph is None


class TestFiniteDifferences:

    def test_elementwise(self, grid):
        check_gradients(ops.add, grid((2, 3), 1), grid((1, 3), 2))
        check_gradients(ops.sub, grid((2, 3), 1), grid((2, 1), 2))
        check_gradients(ops.mul, grid((2, 3), 3), grid((1, 3), 4))
        check_gradients(lambda x: ops.mul_scalar(x, 2.5), grid((4,), 5))
        check_gradients(lambda x: ops.add_scalar(x, -1.5), grid((4,), 5))

    def test_matmul_and_linear(self, grid):
        check_gradients(ops.matmul, grid((2, 3), 1), grid((3, 4), 2))
        check_gradients(ops.linear, grid((3, 4), 3), grid((2, 4), 4), grid((2,), 5))

    def test_conv2d(self, grid):
        check_gradients(ops.conv2d, grid((2, 2, 5, 5), 1), grid((3, 2, 3, 3), 2), grid((3,), 3))

    def test_pooling(self, grid):
        check_gradients(ops.max_pool2d, grid((1, 2, 4, 6), 4))
        check_gradients(ops.global_average_pool, grid((2, 3, 4, 4), 5))

    def test_nonlinearities(self, grid):
        check_gradients(ops.relu, grid((3, 4), 6))
        check_gradients(ops.sigmoid, grid((3, 4), 7))
        check_gradients(ops.abs, grid((3, 4), 8))
        check_gradients(ops.softmax, grid((2, 5), 9))

    def test_losses_and_selection(self, grid):
        check_gradients(lambda x: ops.cross_entropy(x, [0, 2]), grid((2, 3), 10))
        check_gradients(lambda x: ops.pick(x, (1, 2)), grid((2, 3), 11))
        check_gradients(ops.mean, grid((3, 3), 12))
        check_gradients(lambda x: ops.reshape(x, (3, 4)), grid((2, 6), 13))
        check_gradients(lambda a, b: ops.concat([a, b], axis=1), grid((1, 2, 3), 14), grid((1, 1, 3), 15))

    def test_saliency_operations(self, grid):
        check_gradients(lambda x: ops.bilinear_upsample(x, (5, 7)), grid((3, 4), 16))
        check_gradients(ops.range_normalize, grid((4, 4), 17))
        check_gradients(ops.max_normalize, grid((4, 4), 18))


class TestOptimizers:

    def test_adam_first_step_has_learning_rate_magnitude(self):
        params = Adam(0.1, maximize=True).step(np.zeros(2), np.array([2.0, -3.0]))
        assert np.allclose(params, [0.1, -0.1], atol=1e-6)

    def test_adam_minimizes_by_default(self):
        params = Adam(0.1).step(np.zeros(1), np.array([1.0]))
        assert params[0] < 0

    def test_adam_zero_gradient_keeps_parameters(self):
        params = Adam(0.1, maximize=True).step(np.ones(3), np.zeros(3))
        assert np.array_equal(params, np.ones(3))

    def test_adam_rejects_non_positive_rate(self):
        with pytest.raises(ValueError):
            Adam(0.0)

    def test_sgd_momentum_accumulates(self):
        optimizer = SGDMomentum(0.1, momentum=0.9)
        params = {'w': np.zeros(1)}
        params = optimizer.step(params, {'w': np.ones(1)})
        params = optimizer.step(params, {'w': np.ones(1)})
        assert np.allclose(params['w'], [-0.1 - 0.19])
