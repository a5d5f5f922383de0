import numpy as np
import pytest

from risa.exceptions import ShapeMismatch
from risa.tensor import Tape, fc, leaky_relu

from ..utils import numeric_gradient, relative_error


def test_sum_of_squares():
    tape = Tape()
    value = np.array([[1.0, -2.0], [0.5, 3.0]])
    x = tape.parameter("x", value)
    grads = tape.backward(tape.sum(tape.square(x)))
    assert np.array_equal(grads["x"], 2 * value)


def test_operators():
    tape = Tape()
    x = tape.parameter("x", np.array([1.0, 2.0]))
    y = tape.parameter("y", np.array([3.0, 4.0]))
    loss = tape.sum((x * y - x / y + 2.0) @ tape.constant(np.ones((2, 1))))
    grads = tape.backward(loss)
    assert np.allclose(grads["x"], [3.0 - 1 / 3, 4.0 - 1 / 4])
    assert np.allclose(grads["y"], [1.0 + 1 / 9, 2.0 + 2 / 16])


def test_broadcast_gradient():
    tape = Tape()
    x = tape.parameter("x", np.ones((3, 2)))
    b = tape.parameter("b", np.zeros(2))
    grads = tape.backward(tape.sum(tape.add(x, b)))
    assert np.array_equal(grads["b"], [3.0, 3.0])
    assert np.array_equal(grads["x"], np.ones((3, 2)))


def test_shared_leaf_accumulates():
    tape = Tape()
    x = tape.parameter("x", np.array(3.0))
    assert tape.parameter("x", np.array(100.0)) is x
    grads = tape.backward(tape.mul(x, x) + x)
    assert grads["x"] == pytest.approx(7.0)


def test_take_accumulates_repeated_indices():
    tape = Tape()
    x = tape.parameter("x", np.array([1.0, 2.0, 3.0]))
    grads = tape.backward(tape.sum(tape.take(x, np.array([0, 0, 2]), axis=0)))
    assert np.array_equal(grads["x"], [2.0, 0.0, 1.0])


def test_index_and_stack():
    tape = Tape()
    x = tape.parameter("x", np.arange(6.0).reshape(2, 3))
    row = tape.index(x, 1, axis=0)
    assert np.array_equal(row.data, [3.0, 4.0, 5.0])
    stacked = tape.stack([row, tape.scale(row, 2.0)], axis=0)
    assert stacked.shape == (2, 3)
    grads = tape.backward(tape.sum(stacked))
    assert np.array_equal(grads["x"], [[0.0, 0.0, 0.0], [3.0, 3.0, 3.0]])


def test_concat_and_reshape():
    tape = Tape()
    a = tape.parameter("a", np.ones((2, 2)))
    b = tape.parameter("b", np.ones((2, 1)))
    joined = tape.reshape(tape.concat([a, b], axis=1), (6,))
    weights = np.arange(6.0)
    grads = tape.backward(tape.sum(tape.mul(joined, weights)))
    assert np.array_equal(grads["a"], [[0.0, 1.0], [3.0, 4.0]])
    assert np.array_equal(grads["b"], [[2.0], [5.0]])


def test_mean():
    tape = Tape()
    x = tape.parameter("x", np.arange(6.0).reshape(2, 3))
    column_means = tape.mean(x, axis=0)
    assert np.array_equal(column_means.data, [1.5, 2.5, 3.5])
    grads = tape.backward(tape.sum(column_means))
    assert np.allclose(grads["x"], 0.5)


def test_disconnected_parameter_gets_zero_gradient():
    tape = Tape()
    x = tape.parameter("x", np.array([1.0, 2.0]))
    tape.parameter("unused", np.ones((2, 3)))
    grads = tape.backward(tape.sum(x))
    assert set(grads) == {"x", "unused"}
    assert np.array_equal(grads["unused"], np.zeros((2, 3)))


def test_detach_stops_gradient():
    tape = Tape()
    x = tape.parameter("x", np.array([2.0]))
    grads = tape.backward(tape.sum(tape.mul(x, tape.detach(x))))
    assert np.array_equal(grads["x"], [2.0])


def test_non_scalar_loss():
    tape = Tape()
    x = tape.parameter("x", np.ones(3))
    with pytest.raises(ShapeMismatch):
        tape.backward(tape.square(x))


@pytest.mark.parametrize(
    "operation, shapes",
    (
        ("add", ((2, 3), (4,))),
        ("matmul", ((2, 3), (2, 3))),
        ("reshape", ((2, 3), None)),
    ),
)
def test_shape_mismatch(operation, shapes):
    tape = Tape()
    left = tape.parameter("left", np.ones(shapes[0]))
    with pytest.raises(ShapeMismatch, match=operation):
        if operation == "reshape":
            tape.reshape(left, (4,))
        else:
            getattr(tape, operation)(left, tape.constant(np.ones(shapes[1])))


def test_two_layer_gradient():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((5, 3))
    w1, b1 = rng.standard_normal((3, 4)), rng.standard_normal(4)
    w2, b2 = rng.standard_normal((4, 2)), rng.standard_normal(2)

    def forward(tape, first_weight):
        hidden = fc(tape, tape.constant(x), tape.parameter("w1", first_weight), tape.parameter("b1", b1))
        hidden = leaky_relu(tape, hidden)
        output = fc(tape, hidden, tape.parameter("w2", w2), tape.parameter("b2", b2))
        return tape.sum(tape.square(output))

    tape = Tape()
    analytic = tape.backward(forward(tape, w1))["w1"]
    numeric = numeric_gradient(lambda value: forward(Tape(), value).item(), w1)
    assert relative_error(analytic, numeric) < 1e-6
