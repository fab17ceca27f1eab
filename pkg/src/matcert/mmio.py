"""Matrix Market I/O for dense complex matrices.

Supports the ``array`` and ``coordinate`` formats with field ``complex``
and symmetry ``general``; ``real`` and ``integer`` fields are accepted on
read and widened to complex. Writing always uses 17 significant digits so
a write/read cycle reproduces every entry bit-for-bit.
"""

from __future__ import annotations

import os
from typing import IO

import numpy as np

from .linalg import as_matrix

_HEADER_PREFIX = "%%MatrixMarket"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_matrix(target: str | os.PathLike | IO[str], a, *,
                 fmt: str = "array", comment: str | None = None) -> None:
    """Write ``a`` in Matrix Market form (field complex, symmetry general)."""
    a = as_matrix(a, square=False)
    if fmt not in ("array", "coordinate"):
        raise ValueError(f"unknown Matrix Market format {fmt!r}")
    if hasattr(target, "write"):
        _write_stream(target, a, fmt, comment)
    else:
        with open(os.fspath(target), "w", encoding="ascii") as fh:
            _write_stream(fh, a, fmt, comment)


def _write_stream(fh: IO[str], a: np.ndarray, fmt: str, comment: str | None) -> None:
    rows, cols = a.shape
    fh.write(f"{_HEADER_PREFIX} matrix {fmt} complex general\n")
    if comment:
        for line in comment.splitlines():
            fh.write(f"%{line}\n")
    if fmt == "array":
        fh.write(f"{rows} {cols}\n")
        # array format is column-major
        for j in range(cols):
            for i in range(rows):
                z = a[i, j]
                fh.write(f"{_fmt(z.real)} {_fmt(z.imag)}\n")
    else:
        nz = [(i, j) for j in range(cols) for i in range(rows) if a[i, j] != 0]
        fh.write(f"{rows} {cols} {len(nz)}\n")
        for i, j in nz:
            z = a[i, j]
            fh.write(f"{i + 1} {j + 1} {_fmt(z.real)} {_fmt(z.imag)}\n")


def read_matrix(source: str | os.PathLike | IO[str]) -> np.ndarray:
    """Read a Matrix Market file into a dense complex matrix."""
    if hasattr(source, "read"):
        return _read_stream(source)
    with open(os.fspath(source), "r", encoding="ascii") as fh:
        return _read_stream(fh)


def _read_stream(fh: IO[str]) -> np.ndarray:
    header = fh.readline()
    parts = header.split()
    if len(parts) != 5 or parts[0] != _HEADER_PREFIX or parts[1].lower() != "matrix":
        raise ValueError(f"not a Matrix Market matrix header: {header.strip()!r}")
    fmt, field, symmetry = parts[2].lower(), parts[3].lower(), parts[4].lower()
    if fmt not in ("array", "coordinate"):
        raise ValueError(f"unsupported Matrix Market format {fmt!r}")
    if field not in ("complex", "real", "integer"):
        raise ValueError(f"unsupported Matrix Market field {field!r}")
    if symmetry != "general":
        raise ValueError(f"unsupported Matrix Market symmetry {symmetry!r}")
    line = fh.readline()
    while line and (line.startswith("%") or not line.strip()):
        line = fh.readline()
    size = line.split()
    per_entry = 2 if field == "complex" else 1

    def parse_entry(tokens: list[str], at: int) -> complex:
        if field == "complex":
            return complex(float(tokens[at]), float(tokens[at + 1]))
        return complex(float(tokens[at]), 0.0)

    if fmt == "array":
        if len(size) != 2:
            raise ValueError(f"bad array size line: {line.strip()!r}")
        rows, cols = int(size[0]), int(size[1])
        out = np.zeros((rows, cols), dtype=np.complex128)
        count = 0
        for raw in fh:
            raw = raw.strip()
            if not raw or raw.startswith("%"):
                continue
            toks = raw.split()
            if len(toks) != per_entry:
                raise ValueError(f"bad array entry line: {raw!r}")
            if count >= rows * cols:
                raise ValueError("too many entries in array file")
            j, i = divmod(count, rows)
            out[i, j] = parse_entry(toks, 0)
            count += 1
        if count != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {count}")
        return out
    if len(size) != 3:
        raise ValueError(f"bad coordinate size line: {line.strip()!r}")
    rows, cols, nnz = int(size[0]), int(size[1]), int(size[2])
    out = np.zeros((rows, cols), dtype=np.complex128)
    count = 0
    for raw in fh:
        raw = raw.strip()
        if not raw or raw.startswith("%"):
            continue
        toks = raw.split()
        if len(toks) != 2 + per_entry:
            raise ValueError(f"bad coordinate entry line: {raw!r}")
        i, j = int(toks[0]) - 1, int(toks[1]) - 1
        if not (0 <= i < rows and 0 <= j < cols):
            raise ValueError(f"coordinate out of range: {raw!r}")
        out[i, j] = parse_entry(toks, 2)
        count += 1
    if count != nnz:
        raise ValueError(f"expected {nnz} entries, got {count}")
    return out
