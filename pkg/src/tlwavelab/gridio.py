"""File formats for grid functions (binary ``.tlwg``) and coefficient fields (CSV).

Binary layout, little-endian throughout::

    bytes 0-3    magic b"TLWG"
    bytes 4-11   u16 version, u16 D, u16 P, u16 G
    bytes 12-15  reserved (zero)
    then N^D complex samples as interleaved float64 (re, im), row-major
"""
from __future__ import annotations

import csv
import io
import struct
from pathlib import Path

import numpy as np

from .grid import CoefficientField, GridFunction, GridSpec

MAGIC = b"TLWG"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHHHH4x")


class GridFileError(OSError):
    """Malformed or unreadable grid/coefficient file."""


def encode_grid(f):
    spec = f.spec
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, spec.dim, spec.period_exp, spec.grid_exp)
    body = np.ascontiguousarray(f.samples, dtype="<c16").tobytes()
    return header + body


def decode_grid(data, j_lo=None, j_hi=None):
    if len(data) < _HEADER.size:
        raise GridFileError("file shorter than the 16-byte header")
    magic, version, dim, p, g = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise GridFileError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise GridFileError(f"unsupported format version {version}")
    try:
        spec = GridSpec(dim, p, g, j_lo, j_hi)
    except ValueError as exc:
        raise GridFileError(f"invalid grid header: {exc}") from exc
    expected = 16 * spec.size**dim
    if len(data) - _HEADER.size != expected:
        raise GridFileError(f"payload has {len(data) - _HEADER.size} bytes, expected {expected}")
    samples = np.frombuffer(data, dtype="<c16", offset=_HEADER.size).reshape(spec.shape)
    if not np.all(np.isfinite(samples)):
        raise GridFileError("non-finite samples")
    return GridFunction(spec, samples.astype(complex))


def write_grid(path, f):
    Path(path).write_bytes(encode_grid(f))


def read_grid(path, j_lo=None, j_hi=None):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise GridFileError(str(exc)) from exc
    return decode_grid(data, j_lo, j_hi)


def _fmt(x):
    return repr(float(x))


def coefficients_to_csv(c):
    """CSV text with columns ``lambda_bits, j, k1..kD, re, im`` (nonzero entries only)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["lambda_bits", "j"] + [f"k{i + 1}" for i in range(c.spec.dim)] + ["re", "im"])
    for index, value in c.entries():
        bits = "".join(str(b) for b in index.label)
        writer.writerow([bits, index.j, *index.k, _fmt(value.real), _fmt(value.imag)])
    return buf.getvalue()


def coefficients_from_csv(text, spec):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise GridFileError("empty coefficient file") from None
    expected = ["lambda_bits", "j"] + [f"k{i + 1}" for i in range(spec.dim)] + ["re", "im"]
    if header != expected:
        raise GridFileError(f"unexpected CSV header {header}")
    entries = {}
    for lineno, row in enumerate(reader, start=2):
        try:
            bits, j, *rest = row
            ks, (re, im) = rest[:-2], rest[-2:]
            label = tuple(int(b) for b in bits)
            if len(label) != spec.dim or len(ks) != spec.dim:
                raise ValueError("wrong arity")
            key = (label, int(j), tuple(int(k) for k in ks))
            entries[key] = entries.get(key, 0) + complex(float(re), float(im))
        except ValueError as exc:
            raise GridFileError(f"line {lineno}: {exc}") from exc
    try:
        return CoefficientField.from_entries(spec, entries)
    except ValueError as exc:
        raise GridFileError(str(exc)) from exc


def write_coefficients(path, c):
    Path(path).write_text(coefficients_to_csv(c))


def read_coefficients(path, spec):
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise GridFileError(str(exc)) from exc
    return coefficients_from_csv(text, spec)
