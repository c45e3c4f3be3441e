"""Plain-text matrix format.

::

    # optional comment lines
    m n
    q11 q12 ... q1n
    ...

Vectors are stored as ``n 1`` matrices. Values are written with ``repr`` so
a write/read round trip is bit-identical.
"""
from __future__ import annotations

import io
import os
from typing import TextIO

import numpy as np

from .errors import MatrixFormatError


def format_matrix(Q, comments: list[str] | None = None) -> str:
    Q = np.asarray(Q, dtype=np.float64)
    if Q.ndim == 1:
        Q = Q[:, None]
    buf = io.StringIO()
    for c in comments or []:
        buf.write(f"# {c}\n")
    buf.write(f"{Q.shape[0]} {Q.shape[1]}\n")
    for row in Q:
        buf.write(" ".join(repr(float(v)) for v in row))
        buf.write("\n")
    return buf.getvalue()


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFormatError("empty matrix file")
    header = lines[0].split()
    if len(header) != 2:
        raise MatrixFormatError(f"bad header {lines[0]!r}; expected 'm n'")
    try:
        m, n = int(header[0]), int(header[1])
    except ValueError as exc:
        raise MatrixFormatError(f"bad header {lines[0]!r}") from exc
    if m < 1 or n < 1:
        raise MatrixFormatError(f"bad dimensions {m}x{n}")
    body = lines[1:]
    if len(body) != m:
        raise MatrixFormatError(f"expected {m} rows, found {len(body)}")
    out = np.empty((m, n))
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != n:
            raise MatrixFormatError(f"row {i + 1} has {len(parts)} entries, expected {n}")
        try:
            out[i] = [float(p) for p in parts]
        except ValueError as exc:
            raise MatrixFormatError(f"row {i + 1}: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise MatrixFormatError("matrix contains NaN or Inf")
    return out


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    with open(path) as f:
        return parse_matrix(f.read())


def read_vector(path: str | os.PathLike) -> np.ndarray:
    M = read_matrix(path)
    if M.shape[1] != 1:
        raise MatrixFormatError(f"expected an n x 1 vector, got {M.shape}")
    return M[:, 0]


def write_matrix(Q, dest: str | os.PathLike | TextIO, comments: list[str] | None = None) -> None:
    text = format_matrix(Q, comments)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w") as f:
            f.write(text)
