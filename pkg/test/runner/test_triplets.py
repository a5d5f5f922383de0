from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risa.runner.batching import stratified_batches
from risa.runner.triplets import Triplet, as_indices, mine_triplets


def test_mine_triplets():
    assert mine_triplets(["A", "A", "B"]) == [Triplet(0, 1, 2), Triplet(1, 0, 2)]


@pytest.mark.parametrize(
    "labels, expected",
    ((["A", "B"], 0), (["A", "A"], 0), (["A", "A", "B", "B"], 8), (["A", "A", "A", "B", "C"], 3 * 2 * 2)),
)
def test_triplet_count(labels, expected):
    assert len(mine_triplets(labels)) == expected


def test_triplets_are_valid():
    labels = ["A", "B", "A", "C", "B", "A"]
    for triplet in mine_triplets(labels):
        assert triplet.anchor != triplet.positive
        assert labels[triplet.anchor] == labels[triplet.positive]
        assert labels[triplet.anchor] != labels[triplet.negative]


def test_as_indices():
    assert as_indices([Triplet(0, 1, 2), Triplet(1, 0, 2)]).tolist() == [[0, 1, 2], [1, 0, 2]]
    assert as_indices([]).shape == (0, 3)


def test_batches_mix_subclasses():
    labels = ["A"] * 4 + ["B"] * 4
    batches = stratified_batches(labels, 4, np.random.default_rng(0))
    assert len(batches) == 2
    for batch in batches:
        assert Counter(labels[idx] for idx in batch) == {"A": 2, "B": 2}


def test_batches_are_deterministic():
    labels = ["A"] * 5 + ["B"] * 3 + ["C"] * 4
    first = stratified_batches(labels, 4, np.random.default_rng(3))
    second = stratified_batches(labels, 4, np.random.default_rng(3))
    assert [batch.tolist() for batch in first] == [batch.tolist() for batch in second]


@given(
    counts=st.lists(st.integers(1, 7), min_size=1, max_size=4),
    batch_size=st.integers(2, 9),
    seed=st.integers(0, 1000),
)
@settings(max_examples=100, deadline=None)
def test_every_index_once(counts, batch_size, seed):
    labels = [f"class{idx}" for idx, count in enumerate(counts) for _ in range(count)]
    batches = stratified_batches(labels, batch_size, np.random.default_rng(seed))
    indices = sorted(int(idx) for batch in batches for idx in batch)
    assert indices == list(range(len(labels)))
    assert all(len(batch) <= batch_size for batch in batches)
    # Only the last batch may be incomplete
    assert all(len(batch) == batch_size for batch in batches[:-1])
