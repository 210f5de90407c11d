import struct

import numpy as np
import pytest

from tokzip import read_tensor, write_tensor
from tokzip.errors import ParseError
from tokzip.tensorfile import MAGIC, VERSION


def test_round_trip_bitwise(tmp_path, rng):
    path = tmp_path / "t.tkzt"
    arr = rng.standard_normal((7, 5)).astype(np.float32)
    write_tensor(path, arr)
    back = read_tensor(path)
    assert back.dtype == np.float32
    assert arr.tobytes() == back.tobytes()


def test_round_trip_1d(tmp_path, rng):
    path = tmp_path / "v.tkzt"
    arr = rng.uniform(size=13).astype(np.float32)
    write_tensor(path, arr)
    np.testing.assert_array_equal(read_tensor(path), arr)


def test_many_random_round_trips(tmp_path, rng):
    for i in range(100):
        shape = tuple(int(x) for x in rng.integers(1, 9, size=int(rng.integers(1, 4))))
        arr = rng.standard_normal(shape).astype(np.float32)
        p = tmp_path / f"r{i}.tkzt"
        write_tensor(p, arr)
        back = read_tensor(p)
        assert back.shape == shape
        assert arr.tobytes() == back.tobytes()


def test_header_is_little_endian_layout(tmp_path):
    path = tmp_path / "h.tkzt"
    write_tensor(path, np.array([[1.5]], dtype=np.float32))
    data = path.read_bytes()
    assert data[:4] == MAGIC
    assert struct.unpack_from("<H", data, 4)[0] == VERSION
    assert data[6] == 1  # f32 dtype code
    assert data[7] == 2  # ndim
    assert struct.unpack_from("<2I", data, 8) == (1, 1)
    assert struct.unpack_from("<f", data, 16)[0] == 1.5


@pytest.mark.parametrize(
    "mangle,msg",
    [
        (lambda d: b"XKZT" + d[4:], "bad magic"),
        (lambda d: d[:4] + b"\x63\x00" + d[6:], "unknown version"),
        (lambda d: d[:6] + b"\x09" + d[7:], "unknown dtype"),
        (lambda d: d[:-2], "payload length"),
        (lambda d: d + b"\x00" * 8, "payload length"),
        (lambda d: d[:5], "shorter than"),
    ],
)
def test_corrupted_headers(tmp_path, mangle, msg):
    path = tmp_path / "c.tkzt"
    write_tensor(path, np.arange(6, dtype=np.float32).reshape(2, 3))
    path.write_bytes(mangle(path.read_bytes()))
    with pytest.raises(ParseError) as exc:
        read_tensor(path)
    assert msg in str(exc.value)
    assert str(path) in str(exc.value)
