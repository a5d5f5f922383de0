import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from risa.utils import format_exception, get_workers_count, pairwise_sq_distances


def test_format_exception():
    try:
        raise ValueError("Oops")
    except ValueError as exc:
        assert format_exception(exc) == "ValueError: Oops\n"
        with_traceback = format_exception(exc, include_traceback=True)
    assert with_traceback.startswith("Traceback (most recent call last):")
    assert with_traceback.endswith("ValueError: Oops\n")


@pytest.mark.parametrize(
    "requested, cap, expected",
    (
        (4, None, 4),
        (4, "2", 2),
        (1, "8", 1),
        (4, "0", 1),
        (4, "many", 4),
    ),
)
def test_get_workers_count(monkeypatch, requested, cap, expected):
    if cap is None:
        monkeypatch.delenv("RISA_THREADS", raising=False)
    else:
        monkeypatch.setenv("RISA_THREADS", cap)
    assert get_workers_count(requested) == expected


def test_get_workers_count_default(monkeypatch):
    monkeypatch.delenv("RISA_THREADS", raising=False)
    assert get_workers_count() >= 1


@given(vectors=arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 4)), elements=st.floats(-100, 100)))
@settings(max_examples=50)
def test_pairwise_sq_distances(vectors):
    distances = pairwise_sq_distances(vectors)
    expected = [[float(np.sum((a - b) ** 2)) for b in vectors] for a in vectors]
    assert np.allclose(distances, expected)
    assert np.all(np.diag(distances) == 0)
