import numpy as np
import pytest

from risa.exceptions import ConfigParse, EmptyIndex, FrozenIndex, ShapeMismatch
from risa.retrieval import DescriptorIndex, query, read_descriptors, write_descriptors


@pytest.fixture
def index():
    return DescriptorIndex.from_arrays(
        ["a0", "a1", "b0", "b1"], ["A", "A", "B", "B"], [[0.0, 0.0], [1.0, 0.0], [0.0, 3.0], [4.0, 4.0]]
    )


def test_query_excludes_itself(index):
    ranked = query(index, [0.0, 0.0], "a0")
    assert ranked.ids == ["a1", "b0", "b1"]
    assert ranked.labels == ["A", "B", "B"]
    assert ranked.distances == pytest.approx([1.0, 3.0, np.sqrt(32)])


def test_external_query(index):
    ranked = query(index, [0.0, 0.0])
    assert ranked.ids[0] == "a0"
    assert ranked.distances[0] == 0.0
    assert len(ranked) == 4
    assert ranked.top(2).ids == ["a0", "a1"]


def test_ties_are_broken_by_id():
    index = DescriptorIndex.from_arrays(["c", "a", "b"], ["X", "X", "Y"], [[1.0], [1.0], [-1.0]])
    assert query(index, [0.0]).ids == ["a", "b", "c"]


def test_single_item():
    index = DescriptorIndex.from_arrays(["a"], ["A"], [[1.0, 2.0]])
    assert len(query(index, [0.0, 0.0])) == 1
    with pytest.raises(EmptyIndex, match="apart from the query"):
        query(index, [1.0, 2.0], "a")


def test_empty_index():
    with pytest.raises(EmptyIndex):
        query(DescriptorIndex(), [0.0])


def test_frozen(index):
    with pytest.raises(FrozenIndex):
        index.add("c0", "C", [0.0, 0.0])


def test_incremental_index():
    index = DescriptorIndex()
    index.add("a", "A", [1.0, 2.0])
    index.add("b", "B", np.array([3.0, 4.0]))
    with pytest.raises(ShapeMismatch):
        index.add("c", "C", [1.0])
    assert index.matrix.tolist() == [[1.0, 2.0], [3.0, 4.0]]
    assert index.frozen


def test_dimension_mismatch(index):
    with pytest.raises(ShapeMismatch):
        query(index, [0.0, 0.0, 0.0])
    with pytest.raises(ShapeMismatch):
        DescriptorIndex.from_arrays(["a", "b"], ["A"], [[0.0], [1.0]])


def test_subset(index):
    subset = index.subset(["b1", "a0"])
    assert subset.ids == ["b1", "a0"]
    assert subset.label_of("a0") == "A"
    assert subset.descriptor_of("b1").tolist() == [4.0, 4.0]


def test_descriptors_file(tmp_path, index):
    path = tmp_path / "descriptors.csv"
    values = np.random.default_rng(0).standard_normal((4, 2))
    original = DescriptorIndex.from_arrays(index.ids, index.labels, values)
    write_descriptors(path, original)
    assert path.read_text().splitlines()[0] == "id,label,d_0,d_1"
    loaded = read_descriptors(path)
    assert loaded.ids == original.ids
    assert loaded.labels == original.labels
    # 17 significant digits reproduce doubles exactly
    assert np.array_equal(loaded.matrix, values)


@pytest.mark.parametrize(
    "content, message",
    (
        ("name,label,d_0\na,A,1\n", "header"),
        ("id,label,d_0\na,A,1,2\n", "expected 3 columns"),
        ("id,label,d_0\na,A,x\n", ":2:"),
    ),
)
def test_invalid_descriptors_file(tmp_path, content, message):
    path = tmp_path / "descriptors.csv"
    path.write_text(content)
    with pytest.raises(ConfigParse, match=message):
        read_descriptors(path)
