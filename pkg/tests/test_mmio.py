import io

import numpy as np
import pytest
from hypothesis import given

from conftest import sparse_dense_pairs
from cscmat.build import from_triplets
from cscmat.core import ValueKind
from cscmat.errors import ParseError, UnsupportedFormatError
from cscmat.mmio import mm_read, mm_write, parse_header, read_triplet_text, write_triplet_text

FIXTURE_NAMES = ["complex_3x3", "general_3x4", "hermitian_3x3", "integer_2x3", "lower_6x6",
                 "pattern_4x4", "skew_3x3", "symmetric_2x2", "tridiagonal_8x8"]


def read_text(text):
    return mm_read(io.StringIO(text))


def test_example_3x4_is_exact(fixtures):
    a = mm_read(fixtures / "general_3x4.mtx")
    want = from_triplets([0, 0, 1, 2], [0, 1, 3, 3], [1.0, 2.0, 3.0, 4.0], 3, 4)
    assert a.identical(want)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_round_trip(fixtures, tmp_path, name):
    a = mm_read(fixtures / f"{name}.mtx")
    a.check()
    for detect in (False, True):
        path = tmp_path / f"{name}_{detect}.mtx"
        mm_write(a, path, symmetry_detect=detect)
        assert mm_read(path).identical(a)


def test_symmetric_expansion(fixtures):
    a = mm_read(fixtures / "symmetric_2x2.mtx")
    assert a.todense().tolist() == [[2, 1], [1, 2]]
    assert mm_write(a, io.StringIO(), symmetry_detect=True).symmetry == "symmetric"


def test_skew_and_hermitian(fixtures):
    s = mm_read(fixtures / "skew_3x3.mtx").todense()
    assert np.array_equal(s, -s.T)
    h = mm_read(fixtures / "hermitian_3x3.mtx")
    assert h.kind is ValueKind.COMPLEX
    assert np.array_equal(h.todense(), h.todense().conj().T)
    assert mm_write(h, io.StringIO(), symmetry_detect=True).symmetry == "hermitian"


def test_pattern_and_integer(fixtures):
    p = mm_read(fixtures / "pattern_4x4.mtx")
    assert p.kind is ValueKind.PATTERN and p.nnz == 6
    i = mm_read(fixtures / "integer_2x3.mtx")
    assert i.kind is ValueKind.REAL


def test_duplicates_are_summed():
    a = read_text("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.5\n1 1 2\n")
    assert a.nnz == 1 and a[0, 0] == 3.5


def test_header_parsing():
    h = parse_header("%%MatrixMarket matrix coordinate Real Symmetric")
    assert (h.field, h.symmetry) == ("real", "symmetric")
    with pytest.raises(UnsupportedFormatError):
        parse_header("%%MatrixMarket matrix array real general")
    with pytest.raises(ParseError):
        parse_header("%%NotMatrixMarket")


@pytest.mark.parametrize("text,line", [
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", 3),
    ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n", 4),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n% note\n1 1\n", 4),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n", 3),
    ("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n1 1 1.0\n", 3),
    ("%%MatrixMarket matrix coordinate real general\n2 two 1\n", 2),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(ParseError) as err:
        read_text(text)
    assert err.value.line == line


def test_empty_input():
    with pytest.raises(ParseError):
        read_text("")


@given(sparse_dense_pairs(8, 8, complex_values=True))
def test_random_round_trip(pair):
    a, _ = pair
    buf = io.StringIO()
    mm_write(a, buf, symmetry_detect=True)
    assert read_text(buf.getvalue()).identical(a.compressed())


def test_comment_is_written():
    buf = io.StringIO()
    mm_write(from_triplets([0], [0], [1.0], 1, 1), buf, comment="made here\nsecond")
    lines = buf.getvalue().splitlines()
    assert lines[1:3] == ["% made here", "% second"]


def test_triplet_text_round_trip(tmp_path):
    a = from_triplets([0, 2, 1], [0, 1, 3], [1.5, -2.0, 0.25], 3, 4)
    path = tmp_path / "a.txt"
    write_triplet_text(a, path)
    assert read_triplet_text(path).identical(a)
    c = read_triplet_text(io.StringIO("# complex\n1 1 1 2\n2 2 0 -1\n"))
    assert c.todense().tolist() == [[1 + 2j, 0], [0, -1j]]
    with pytest.raises(ParseError):
        read_triplet_text(io.StringIO("1 1 1\n2 2\n"))
