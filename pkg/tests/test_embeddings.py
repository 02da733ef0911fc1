import numpy as np
import pytest

from diarlab.embeddings import EmbeddingSet, parse_embeddings, read_embeddings, serialize_embeddings, unit_normalize
from diarlab.errors import ParseError, ValidationError

HEADER = "recording_id,onset,offset,e0,e1\n"


def test_parse_groups_and_orders_segments():
    data = HEADER + "b,0,1,1,0\na,2,3,0,1\na,0,1.5,1,1\n"
    sets = parse_embeddings(data)
    assert list(sets) == ["a", "b"]
    np.testing.assert_array_equal(sets["a"].onsets, [0.0, 2.0])
    np.testing.assert_array_equal(sets["a"].vectors, [[1.0, 1.0], [0.0, 1.0]])
    assert sets["a"].dim == 2


def test_empty_input():
    assert parse_embeddings(b"") == {}


def test_bad_header_is_line_one():
    with pytest.raises(ParseError) as excinfo:
        parse_embeddings("recording_id,start,end,e0\nr,0,1,1\n")
    assert excinfo.value.line_number == 1


@pytest.mark.parametrize("row", ["r,1,2,x,1", "r,1,2,1", "r,1,2,1,1,1"])
def test_bad_row_reports_its_line(row):
    with pytest.raises(ParseError) as excinfo:
        parse_embeddings(HEADER + "r,0,1,1,0\n" + row + "\n")
    assert excinfo.value.line_number == 3


@pytest.mark.parametrize("row", ["r,1,2,nan,1", "r,1,2,1,inf", "r,1,2,-inf,0", "r,nan,2,1,1", "r,1,Infinity,1,1"])
def test_non_finite_values_report_their_line(row):
    with pytest.raises(ParseError) as excinfo:
        parse_embeddings(HEADER + "r,0,1,1,0\n" + row + "\n")
    assert excinfo.value.line_number == 3


def test_invariants():
    with pytest.raises(ValidationError):
        parse_embeddings(HEADER + "r,0,1,0,0\n")
    with pytest.raises(ValidationError):
        parse_embeddings(HEADER + "r,1,1,1,0\n")
    with pytest.raises(ValidationError):
        EmbeddingSet("r", np.zeros(2), np.ones(2), np.ones((3, 2)))


def test_vectors_are_read_only():
    s = EmbeddingSet("r", [0.0], [1.0], [[1.0, 2.0]])
    with pytest.raises(ValueError):
        s.vectors[0, 0] = 5.0


def test_unit_normalize():
    s = unit_normalize(EmbeddingSet("r", [0.0, 1.0], [1.0, 2.0], [[3.0, 4.0], [0.0, -2.0]]))
    np.testing.assert_allclose(s.vectors, [[0.6, 0.8], [0.0, -1.0]])


def test_serialize_is_exact(tmp_path, rng):
    original = EmbeddingSet("rec", np.arange(5) * 1.5, np.arange(5) * 1.5 + 1.5, rng.standard_normal((5, 4)))
    path = tmp_path / "emb.csv"
    path.write_bytes(serialize_embeddings([original]))
    parsed = read_embeddings(path)["rec"]
    np.testing.assert_array_equal(parsed.vectors, original.vectors)
    np.testing.assert_array_equal(parsed.offsets, original.offsets)


def test_serialize_rejects_mixed_dimensions():
    a = EmbeddingSet("a", [0.0], [1.0], [[1.0, 0.0]])
    b = EmbeddingSet("b", [0.0], [1.0], [[1.0, 0.0, 0.0]])
    with pytest.raises(ValidationError):
        serialize_embeddings([a, b])
