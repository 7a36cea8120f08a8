import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparsesep.errors import FormatError
from sparsesep.io import (
    decode_json,
    decode_ssep1,
    encode_json,
    encode_ssep1,
    load_matrix,
    load_vector,
    read_pgm,
    save_matrix,
    write_pgm,
)


def test_ssep1_layout_is_column_major_little_endian():
    buf = encode_ssep1(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert buf[:5] == b"SSEP1"
    assert buf[5:9] == (2).to_bytes(4, "little")
    assert buf[9:13] == (2).to_bytes(4, "little")
    assert buf[13] == 0
    np.testing.assert_array_equal(np.frombuffer(buf[14:], "<f8"), [1, 3, 2, 4])


def test_ssep1_complex_interleaved():
    buf = encode_ssep1(np.array([[1 + 2j], [3 - 4j]]))
    assert buf[13] == 1
    np.testing.assert_array_equal(np.frombuffer(buf[14:], "<f8"), [1, 2, 3, -4])


def test_ssep1_rejects_trailing_and_truncated():
    buf = encode_ssep1(np.eye(2))
    with pytest.raises(FormatError):
        decode_ssep1(buf + b"\x00")
    with pytest.raises(FormatError):
        decode_ssep1(buf[:-1])
    with pytest.raises(FormatError):
        decode_ssep1(b"SSEP2" + buf[5:])


def test_json_row_major():
    obj = json.loads(encode_json(np.array([[1.0, 2.0], [3.0, 4.0]])))
    assert obj == {"rows": 2, "cols": 2, "complex": False, "data": [1.0, 2.0, 3.0, 4.0]}


def test_json_rejects_trailing():
    text = encode_json(np.eye(2))
    with pytest.raises(FormatError):
        decode_json(text + " {}")


finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.integers(1, 5), st.integers(1, 5), st.booleans(), st.integers(0, 2**32 - 1))
def test_round_trips(r, c, cplx, seed):
    g = np.random.default_rng(seed)
    M = g.standard_normal((r, c))
    if cplx:
        M = M + 1j * g.standard_normal((r, c))
    np.testing.assert_array_equal(decode_ssep1(encode_ssep1(M)), M)
    np.testing.assert_array_equal(decode_json(encode_json(M)), M)


def test_file_helpers(tmp_path):
    v = np.array([1.0, -2.0, 3.5])
    for name in ("v.ssep", "v.json"):
        save_matrix(tmp_path / name, v)
        np.testing.assert_array_equal(load_vector(tmp_path / name), v)
        assert load_matrix(tmp_path / name).shape == (3, 1)


def test_pgm_round_trip_and_comments(tmp_path):
    img = np.arange(12, dtype=float).reshape(3, 4) / 11
    write_pgm(tmp_path / "a.pgm", img)
    back = read_pgm(tmp_path / "a.pgm")
    assert back.shape == (3, 4)
    assert np.abs(back - img).max() <= 0.5 / 255 + 1e-12
    raw = (tmp_path / "a.pgm").read_bytes()
    (tmp_path / "b.pgm").write_bytes(raw.replace(b"P5\n", b"P5\n# made by hand\n", 1))
    np.testing.assert_array_equal(read_pgm(tmp_path / "b.pgm"), back)


def test_pgm_rejects_other_formats(tmp_path):
    (tmp_path / "c.pgm").write_bytes(b"P2\n2 2\n255\n0 0 0 0\n")
    with pytest.raises(FormatError):
        read_pgm(tmp_path / "c.pgm")
