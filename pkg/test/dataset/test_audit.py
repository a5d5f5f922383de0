import numpy as np
import pytest

from risa.constants import STRUCT_DIM
from risa.dataset import audit_separability, class_separation
from risa.exceptions import InseparableFamily
from risa.model import ShapeInput


def make_inputs(values, labels):
    return [
        ShapeInput(base=np.full((1, 1, 1), value), structure=np.zeros((1, STRUCT_DIM)), mask=[True], label=label)
        for value, label in zip(values, labels)
    ]


def test_separation():
    intra, inter = class_separation(make_inputs([0.0, 1.0, 10.0, 11.0], "aabb"))
    assert intra == pytest.approx(1.0)
    assert inter == pytest.approx(10.0)


def test_separable():
    assert audit_separability(make_inputs([0.0, 1.0, 10.0, 11.0], "aabb")) == pytest.approx((1.0, 10.0))


def test_inseparable():
    # Within: 10 and 10, between: 1, 11, 9 and 1
    with pytest.raises(InseparableFamily, match="not closer"):
        audit_separability(make_inputs([0.0, 10.0, 1.0, 11.0], "aabb"))


@pytest.mark.parametrize("labels", ("aaa", "abc"))
def test_not_enough_shapes(labels):
    with pytest.raises(InseparableFamily, match="at least two sub-classes"):
        class_separation(make_inputs([0.0, 1.0, 2.0], labels))


def test_toy_family(toy_features):
    intra, inter = audit_separability(toy_features.inputs)
    assert 0 < intra < inter
