"""Matrix Market coordinate files and a plain triplet text format.

Real values are written with Python's shortest round-trip representation,
so reading back a written file reproduces every stored value bit for bit
(explicitly stored zeros included).
"""

from __future__ import annotations

import io
import os
from contextlib import contextmanager
from dataclasses import dataclass
from typing import TextIO, Union

import numpy as np

from .build import from_triplets, spconvert
from .core import CscMatrix, ValueKind
from .errors import ParseError, UnsupportedFormatError
from .ops import transpose

PathOrStream = Union[str, os.PathLike, TextIO]

_FIELDS = ("real", "complex", "integer", "pattern")
_SYMMETRIES = ("general", "symmetric", "skew-symmetric", "hermitian")


@dataclass(frozen=True)
class MmHeader:
    object: str = "matrix"
    format: str = "coordinate"
    field: str = "real"
    symmetry: str = "general"

    def banner(self) -> str:
        return f"%%MatrixMarket {self.object} {self.format} {self.field} {self.symmetry}"


@contextmanager
def _open(target: PathOrStream, mode: str):
    if isinstance(target, (str, os.PathLike)):
        with open(target, mode, encoding="ascii") as fh:
            yield fh
    else:
        yield target


def parse_header(line: str, lineno: int = 1) -> MmHeader:
    tokens = line.strip().split()
    if not tokens or tokens[0].lower() != "%%matrixmarket":
        raise ParseError("missing %%MatrixMarket banner", lineno)
    if len(tokens) != 5:
        raise ParseError("banner needs object, format, field and symmetry", lineno)
    obj, fmt, fld, sym = (t.lower() for t in tokens[1:])
    if obj != "matrix":
        raise UnsupportedFormatError(f"object {obj!r} is not supported", lineno)
    if fmt == "array":
        raise UnsupportedFormatError("array (dense) format is not supported", lineno)
    if fmt != "coordinate":
        raise ParseError(f"unknown format {fmt!r}", lineno)
    if fld not in _FIELDS:
        raise ParseError(f"unknown field {fld!r}", lineno)
    if sym not in _SYMMETRIES:
        raise ParseError(f"unknown symmetry {sym!r}", lineno)
    if fld == "pattern" and sym in ("hermitian", "skew-symmetric"):
        raise ParseError(f"pattern files cannot be {sym}", lineno)
    return MmHeader(obj, fmt, fld, sym)


def _int(tok: str, what: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} {tok!r} is not an integer", lineno) from None


def _float(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"value {tok!r} is not a number", lineno) from None


def mm_read(source: PathOrStream) -> CscMatrix:
    """Read a coordinate Matrix Market file.

    Symmetric, skew-symmetric and hermitian files are expanded to full
    storage, pattern files give pattern matrices, and duplicate entries are
    summed.
    """
    with _open(source, "r") as fh:
        lines = iter(enumerate(fh, start=1))
        try:
            lineno, first = next(lines)
        except StopIteration:
            raise ParseError("empty input", 1) from None
        hdr = parse_header(first, lineno)
        size = None
        for lineno, line in lines:
            s = line.strip()
            if s and not s.startswith("%"):
                size = s.split()
                break
        if size is None:
            raise ParseError("missing size line", lineno + 1)
        if len(size) != 3:
            raise ParseError("size line needs rows, columns and entry count", lineno)
        m, n, nnz = (_int(t, "size", lineno) for t in size)
        if m < 0 or n < 0 or nnz < 0:
            raise ParseError("negative size", lineno)

        ncols_expected = {"pattern": 2, "real": 3, "integer": 3, "complex": 4}[hdr.field]
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=complex if hdr.field == "complex" else float)
        k = 0
        for lineno, line in lines:
            s = line.strip()
            if not s or s.startswith("%"):
                continue
            if k == nnz:
                raise ParseError(f"more than the {nnz} declared entries", lineno)
            tok = s.split()
            if len(tok) != ncols_expected:
                raise ParseError(f"expected {ncols_expected} fields, found {len(tok)}", lineno)
            i, j = _int(tok[0], "row", lineno), _int(tok[1], "column", lineno)
            if not (1 <= i <= m and 1 <= j <= n):
                raise ParseError(f"entry ({i}, {j}) outside {m}x{n}", lineno)
            if hdr.symmetry == "skew-symmetric" and i == j:
                raise ParseError("skew-symmetric file stores a diagonal entry", lineno)
            rows[k], cols[k] = i - 1, j - 1
            if hdr.field == "complex":
                vals[k] = complex(_float(tok[2], lineno), _float(tok[3], lineno))
            elif hdr.field != "pattern":
                vals[k] = _float(tok[2], lineno)
            k += 1
        if k != nnz:
            raise ParseError(f"expected {nnz} entries, found {k}", lineno + 1)

    if hdr.symmetry != "general":
        off = rows != cols
        mirror = vals[off]
        if hdr.symmetry == "skew-symmetric":
            mirror = -mirror
        elif hdr.symmetry == "hermitian":
            mirror = np.conj(mirror)
        rows, cols = np.concatenate((rows, cols[off])), np.concatenate((cols, rows[off]))
        vals = np.concatenate((vals, mirror))
    if hdr.field == "pattern":
        return from_triplets(rows, cols, None, m, n)
    return from_triplets(rows, cols, vals, m, n)


def _symmetry_of(a: CscMatrix) -> str:
    if a.nrows != a.ncols:
        return "general"
    t = transpose(a)
    same_pattern = np.array_equal(a.cidx, t.cidx) and np.array_equal(a.rows(), t.rows())
    if not same_pattern:
        return "general"
    if a.is_pattern:
        return "symmetric"
    # the diagonal is stored as written, so only mirrored entries must match bit for bit
    off = a.rows() != a.column_of_entries()
    v, tv = a.values()[off], t.values()[off]
    if v.tobytes() == tv.tobytes():
        return "symmetric"
    if a.kind is ValueKind.COMPLEX and v.tobytes() == np.conj(tv).tobytes():
        return "hermitian"
    if off.all() and v.tobytes() == (-tv).tobytes():
        return "skew-symmetric"
    return "general"


def _num(v: float) -> str:
    return repr(float(v))


def mm_write(a: CscMatrix, target: PathOrStream, symmetry_detect: bool = False,
             comment: str | None = None) -> MmHeader:
    """Write ``a`` as a coordinate Matrix Market file.

    With ``symmetry_detect`` a matrix that is exactly symmetric, hermitian or
    skew-symmetric is stored by its lower triangle only.
    """
    field = {ValueKind.REAL: "real", ValueKind.COMPLEX: "complex",
             ValueKind.PATTERN: "pattern"}[a.kind]
    sym = _symmetry_of(a) if symmetry_detect else "general"
    hdr = MmHeader(field=field, symmetry=sym)
    rows, cols, vals = a.rows(), a.column_of_entries(), a.values()
    if sym != "general":
        keep = rows > cols if sym == "skew-symmetric" else rows >= cols
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    buf = io.StringIO()
    buf.write(hdr.banner() + "\n")
    if comment:
        for line in comment.splitlines():
            buf.write(f"% {line}\n")
    buf.write(f"{a.nrows} {a.ncols} {len(rows)}\n")
    for i, j, v in zip(rows.tolist(), cols.tolist(), vals.tolist()):
        if field == "pattern":
            buf.write(f"{i + 1} {j + 1}\n")
        elif field == "complex":
            buf.write(f"{i + 1} {j + 1} {_num(v.real)} {_num(v.imag)}\n")
        else:
            buf.write(f"{i + 1} {j + 1} {_num(v)}\n")
    with _open(target, "w") as fh:
        fh.write(buf.getvalue())
    return hdr


def read_triplet_text(source: PathOrStream) -> CscMatrix:
    """Whitespace-separated ``row col value [imag]`` lines with 1-based coordinates.

    Lines starting with ``#`` or ``%`` are comments.  Zero values only
    contribute to the size, as with ``spconvert``.
    """
    with _open(source, "r") as fh:
        table = []
        width = None
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s[0] in "#%":
                continue
            tok = s.split()
            if width is None:
                width = len(tok)
            if len(tok) != width or width not in (3, 4):
                raise ParseError("every line needs 3 or 4 fields, consistently", lineno)
            table.append([_float(t, lineno) for t in tok])
    try:
        return spconvert(np.asarray(table, dtype=float).reshape(-1, width or 3))
    except ParseError as exc:
        raise ParseError(str(exc)) from None


def write_triplet_text(a: CscMatrix, target: PathOrStream) -> None:
    with _open(target, "w") as fh:
        for i, j, v in zip(a.rows().tolist(), a.column_of_entries().tolist(),
                           a.values().tolist()):
            if a.kind is ValueKind.COMPLEX:
                fh.write(f"{i + 1} {j + 1} {_num(v.real)} {_num(v.imag)}\n")
            else:
                fh.write(f"{i + 1} {j + 1} {_num(v)}\n")
