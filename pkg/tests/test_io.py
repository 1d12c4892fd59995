import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from redqmc import io as rio
from redqmc.digitalnet import random_matrices
from redqmc.errors import DimensionMismatchError, InvalidParameterError, ParseError
from redqmc.pointset import ReductionIndices, random_generating_vector


def test_weight_specs(tmp_path):
    assert rio.parse_weight_spec("geo:0.5", 3).gamma == (0.5, 0.25, 0.125)
    f = tmp_path / "g.txt"
    f.write_text("# weights\n1.0 0.5\n0.25\n")
    assert rio.parse_weight_spec(f"file:{f}", 2).gamma == (1.0, 0.5)
    with pytest.raises(DimensionMismatchError):
        rio.parse_weight_spec(f"file:{f}", 4)
    with pytest.raises(ParseError):
        rio.parse_weight_spec("poly:2", 3)
    with pytest.raises(InvalidParameterError):
        rio.parse_weight_spec("geo:-1", 3)


def test_w_specs(tmp_path):
    assert rio.parse_w_spec("log:1", 2, 4, 8).w == (0, 1, 1, 2, 2, 2, 2, 3)
    assert rio.parse_w_spec("zero", 3, 2, 3).w == (0, 0, 0)
    f = tmp_path / "w.txt"
    f.write_text("0 1 1 5\n")
    assert rio.parse_w_spec(f"file:{f}", 2, 3, 4).w == (0, 1, 1, 5)
    weights = rio.parse_weight_spec("geo:0.5", 4)
    assert rio.parse_w_spec("wchoice:2", 2, 10, 4, weights).w == (0, 0, 0, 1)
    with pytest.raises(InvalidParameterError):
        rio.parse_w_spec("wchoice:2", 2, 10, 4)
    with pytest.raises(ParseError):
        rio.parse_w_spec("log:x", 2, 4, 3)


def test_shift_specs(tmp_path):
    assert rio.parse_shift_spec("none", 3) is None
    a = rio.parse_shift_spec("seed:4", 3)
    np.testing.assert_array_equal(a, rio.parse_shift_spec("seed:4", 3))
    f = tmp_path / "d.txt"
    f.write_text("0.1 0.2 1.0\n")
    with pytest.raises(InvalidParameterError, match="index 3"):
        rio.parse_shift_spec(f"file:{f}", 3)


@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)),
              elements=st.floats(allow_nan=False, allow_infinity=False)))
def test_matrix_roundtrip(tmp_path_factory, M):
    p = tmp_path_factory.mktemp("m") / "a.txt"
    rio.write_matrix(p, M)
    np.testing.assert_array_equal(rio.read_matrix(p), M)


def test_matrix_errors_report_lines(tmp_path):
    p = tmp_path / "a.txt"
    p.write_text("2 2\n1 2\n3 x\n")
    with pytest.raises(ParseError) as info:
        rio.read_matrix(p)
    assert info.value.line == 3
    p.write_text("# header\n2 2\n1 2 3\n4 5\n")
    with pytest.raises(ParseError) as info:
        rio.read_matrix(p)
    assert info.value.line == 3
    p.write_text("3 2\n1 2\n")
    with pytest.raises(ParseError, match="expected 3 rows"):
        rio.read_matrix(p)
    with pytest.raises(ParseError, match="cannot read"):
        rio.read_matrix(tmp_path / "missing.txt")


def test_genvec_roundtrip(tmp_path):
    g = random_generating_vector(ReductionIndices(3, 4, (0, 1, 1, 2, 7)), 5)
    p = tmp_path / "g.txt"
    rio.write_genvec(p, g)
    assert rio.read_genvec(p) == g


def test_genvec_rejects_non_unit(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("2 3 2\n0 1\n1 2\n")
    with pytest.raises(InvalidParameterError, match="index 2"):
        rio.read_genvec(p)


def test_genmat_roundtrip(tmp_path):
    C = random_matrices(3, 3, 4, 2)
    p = tmp_path / "c.txt"
    rio.write_genmat(p, C)
    assert rio.read_genmat(p) == C


def test_genmat_errors(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("2 2 1\n\n1 0\n0 2\n")
    with pytest.raises(ParseError) as info:
        rio.read_genmat(p)
    assert info.value.line == 4
    p.write_text("2 2 2\n\n1 0\n0 1\n")
    with pytest.raises(ParseError, match="2 matrix blocks"):
        rio.read_genmat(p)


def test_config(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# sweep\nsweep = s\nvalues = 1, 2  # two points\nw = 'log:1'\n")
    assert rio.read_config(p) == {"sweep": "s", "values": "1, 2", "w": "log:1"}
    p.write_text("sweep s\n")
    with pytest.raises(ParseError) as info:
        rio.read_config(p)
    assert info.value.line == 1


def test_output_dir(monkeypatch, tmp_path):
    monkeypatch.delenv(rio.OUTPUT_DIR_ENV, raising=False)
    assert str(rio.output_dir()) == "."
    monkeypatch.setenv(rio.OUTPUT_DIR_ENV, str(tmp_path))
    assert rio.output_dir() == tmp_path
