import numpy as np
import pytest

from risa.exceptions import ShapeMismatch
from risa.tensor import ParameterSet, adam_step


@pytest.fixture
def params():
    parameters = ParameterSet()
    parameters.add("w", np.array([1.0, -2.0]))
    return parameters


def test_first_steps(params):
    gradient = np.array([0.5, -4.0])
    adam_step(params, {"w": gradient}, lr=0.1)
    # Bias correction makes the first update lr·g / (|g| + eps)
    expected = np.array([1.0, -2.0]) - 0.1 * gradient / (np.abs(gradient) + 1e-8)
    assert np.allclose(params.params["w"], expected, rtol=0, atol=1e-12)
    assert params.step == 1
    adam_step(params, {"w": gradient}, lr=0.1)
    assert np.allclose(params.params["w"], expected - 0.1 * gradient / (np.abs(gradient) + 1e-8), rtol=0, atol=1e-12)
    assert np.allclose(params.adam_m["w"], (1 - 0.9 ** 2) * gradient)
    assert np.allclose(params.adam_v["w"], (1 - 0.999 ** 2) * gradient ** 2)


def test_zero_gradient(params):
    adam_step(params, {"w": np.zeros(2)}, lr=0.1)
    assert np.array_equal(params.params["w"], [1.0, -2.0])
    assert params.step == 1


def test_unknown_gradients_are_ignored(params):
    adam_step(params, {"w": np.ones(2), "other": np.ones(3)}, lr=0.1)
    assert set(params.params) == {"w"}


def test_shape_mismatch(params):
    with pytest.raises(ShapeMismatch):
        adam_step(params, {"w": np.ones(3)}, lr=0.1)
    assert params.step == 0


def test_duplicate_parameter(params):
    with pytest.raises(ValueError, match="already defined"):
        params.add("w", np.zeros(2))


def test_copy_is_independent(params):
    copied = params.copy()
    adam_step(params, {"w": np.ones(2)}, lr=0.1)
    assert np.array_equal(copied.params["w"], [1.0, -2.0])
    assert copied.step == 0
