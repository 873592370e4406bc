import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isoent import io
from isoent.sampling import haar_unitary

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(seeds)
def test_complex_round_trip_is_exact(seed):
    m = haar_unitary(4, seed)
    back = io.complex_from_json(json.loads(json.dumps(io.complex_to_json(m))))
    np.testing.assert_array_equal(back, m)


def test_basis_dict_round_trip(tmp_path):
    m = haar_unitary(3, 1)
    path = tmp_path / "b.json"
    io.write_json(path, io.basis_to_dict(m, note="x"))
    np.testing.assert_array_equal(io.read_basis(path), m)
    assert json.loads(path.read_text())["note"] == "x"


@pytest.mark.parametrize(
    "payload",
    [{"nobasis": 1}, {"basis": [[1, 2, 3]]}, {"basis": [[[1, 0], [0, 0]]]}, {"basis": "hello"}],
)
def test_malformed_bases_rejected(payload):
    with pytest.raises(io.InvalidInput):
        io.basis_from_dict(payload)


def test_read_errors(tmp_path):
    with pytest.raises(io.InvalidInput):
        io.read_json(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(io.InvalidInput):
        io.read_json(bad)


def test_dumps_nonfinite_as_null():
    assert json.loads(io.dumps({"a": float("nan"), "b": [np.inf, 1.5]})) == {"a": None, "b": [None, 1.5]}


def test_atomic_write_replaces_and_leaves_no_temp(tmp_path):
    p = tmp_path / "out.txt"
    p.write_text("old")
    io.write_text(p, "new\n")
    assert p.read_text() == "new\n"
    assert [f.name for f in tmp_path.iterdir()] == ["out.txt"]
