"""Matrix and image file formats.

SSEP1 binary layout (all little-endian)::

    b"SSEP1" | u32 rows | u32 cols | u8 complex flag | f64 entries

Entries are stored column-major; complex entries as interleaved (re, im).
The JSON form is ``{"rows": r, "cols": c, "complex": bool, "data": [...]}``
with ``data`` in row-major order and complex entries as ``[re, im]`` pairs.
Vectors are stored as single-column matrices.
"""

import json
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError
from .matrix_core import as_matrix

MAGIC = b"SSEP1"
_HEADER = struct.Struct("<5sIIB")


def encode_ssep1(M):
    M = as_matrix(M)
    is_complex = np.iscomplexobj(M)
    rows, cols = M.shape
    flat = M.flatten(order="F")
    if is_complex:
        payload = np.empty(2 * flat.size, dtype="<f8")
        payload[0::2] = flat.real
        payload[1::2] = flat.imag
    else:
        payload = flat.astype("<f8")
    return _HEADER.pack(MAGIC, rows, cols, int(is_complex)) + payload.tobytes()


def decode_ssep1(buf):
    buf = bytes(buf)
    if len(buf) < _HEADER.size:
        raise FormatError("truncated SSEP1 header")
    magic, rows, cols, flag = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if flag not in (0, 1):
        raise FormatError(f"bad complex flag {flag}")
    n = rows * cols * (2 if flag else 1)
    expected = _HEADER.size + 8 * n
    if len(buf) < expected:
        raise FormatError(f"truncated SSEP1 payload: {len(buf)} < {expected} bytes")
    if len(buf) > expected:
        raise FormatError(f"{len(buf) - expected} trailing bytes after SSEP1 payload")
    data = np.frombuffer(buf, dtype="<f8", count=n, offset=_HEADER.size)
    if flag:
        data = data[0::2] + 1j * data[1::2]
    else:
        data = data.astype(np.float64)
    return as_matrix(data.reshape((rows, cols), order="F"))


def encode_json(M):
    M = as_matrix(M)
    is_complex = np.iscomplexobj(M)
    flat = M.ravel(order="C")
    if is_complex:
        data = [[float(z.real), float(z.imag)] for z in flat]
    else:
        data = [float(v) for v in flat]
    return json.dumps({"rows": M.shape[0], "cols": M.shape[1],
                       "complex": bool(is_complex), "data": data})


def decode_json(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(str(exc)) from None
    try:
        rows, cols, is_complex, data = obj["rows"], obj["cols"], obj["complex"], obj["data"]
    except (KeyError, TypeError):
        raise FormatError("JSON matrix needs rows, cols, complex, data") from None
    if len(data) != rows * cols:
        raise FormatError(f"expected {rows * cols} entries, got {len(data)}")
    if is_complex:
        arr = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    else:
        arr = np.array(data, dtype=np.float64)
    return as_matrix(arr.reshape((rows, cols)))


def save_matrix(path, M):
    """Write `M` as SSEP1, or as JSON when `path` ends in ``.json``."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(encode_json(M))
    else:
        path.write_bytes(encode_ssep1(M))


def load_matrix(path):
    path = Path(path)
    raw = path.read_bytes()
    if raw[:5] == MAGIC:
        return decode_ssep1(raw)
    return decode_json(raw.decode("utf-8"))


def load_vector(path):
    M = load_matrix(path)
    if M.shape[1] != 1:
        raise FormatError(f"expected a single column, got shape {M.shape}")
    return M[:, 0]


def read_pgm(path):
    """Read an 8-bit binary (P5) PGM image, scaled to [0, 1]."""
    raw = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        tokens.append(raw[start:pos])
    pos += 1  # single whitespace before raster
    if tokens[0] != b"P5":
        raise FormatError(f"not a binary PGM (magic {tokens[0]!r})")
    w, h, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise FormatError("only 8-bit PGM is supported")
    pixels = raw[pos:]
    if len(pixels) != w * h:
        raise FormatError(f"expected {w * h} pixels, got {len(pixels)}")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w) / 255.0


def write_pgm(path, image):
    img = np.clip(np.round(np.asarray(image, dtype=float) * 255.0), 0, 255).astype(np.uint8)
    h, w = img.shape
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (w, h) + img.tobytes())
