from io import StringIO

import numpy as np
import pytest

from matcert import mmio


def _sample():
    rng = np.random.default_rng(42)
    return rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))


@pytest.mark.parametrize("fmt", ["array", "coordinate"])
def test_roundtrip_bit_exact(tmp_path, fmt):
    a = _sample()
    path = tmp_path / "m.mtx"
    mmio.write_matrix(path, a, fmt=fmt)
    b = mmio.read_matrix(path)
    assert np.array_equal(a, b)
    # write-read-write reproduces the file byte for byte
    path2 = tmp_path / "m2.mtx"
    mmio.write_matrix(path2, b, fmt=fmt)
    assert path.read_bytes() == path2.read_bytes()


def test_array_is_column_major():
    buf = StringIO()
    mmio.write_matrix(buf, np.array([[1, 2], [3, 4]], dtype=complex))
    lines = buf.getvalue().splitlines()
    assert lines[0] == "%%MatrixMarket matrix array complex general"
    assert lines[1] == "2 2"
    assert [ln.split()[0] for ln in lines[2:]] == ["1", "3", "2", "4"]


def test_coordinate_skips_zeros():
    a = np.array([[0, 1j], [0, 0]], dtype=complex)
    buf = StringIO()
    mmio.write_matrix(buf, a, fmt="coordinate")
    text = buf.getvalue()
    assert "2 2 1" in text
    assert mmio.read_matrix(StringIO(text)).tolist() == a.tolist()


def test_reads_real_field():
    text = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"
    a = mmio.read_matrix(StringIO(text))
    assert np.array_equal(a, np.array([[1, 3], [2, 4]], dtype=complex))


def test_comments_and_blanks_are_skipped():
    text = ("%%MatrixMarket matrix array complex general\n"
            "% a comment\n"
            "2 1\n"
            "1 0\n"
            "\n"
            "2 -1\n")
    a = mmio.read_matrix(StringIO(text))
    assert a.tolist() == [[1 + 0j], [2 - 1j]]


def test_nonsquare_roundtrip(tmp_path):
    a = np.arange(6, dtype=float).reshape(2, 3) + 0.5j
    path = tmp_path / "r.mtx"
    mmio.write_matrix(path, a)
    assert np.array_equal(mmio.read_matrix(path), a)


@pytest.mark.parametrize("header", [
    "%%MatrixMarket matrix array complex symmetric\n1 1\n1 0\n",
    "%%MatrixMarket matrix array pattern general\n1 1\n1 0\n",
    "%%MatrixMarket vector array complex general\n1 1\n1 0\n",
    "not a header\n",
])
def test_rejects_unsupported_headers(header):
    with pytest.raises(ValueError):
        mmio.read_matrix(StringIO(header))


def test_rejects_wrong_entry_count():
    text = "%%MatrixMarket matrix array complex general\n2 2\n1 0\n2 0\n"
    with pytest.raises(ValueError):
        mmio.read_matrix(StringIO(text))


def test_missing_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        mmio.read_matrix(tmp_path / "nope.mtx")
