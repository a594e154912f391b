"""Matrix Market reading, writing and streaming.

Supports ``array`` and ``coordinate`` formats with ``real``, ``double``,
``integer`` and ``pattern`` fields and ``general``, ``symmetric`` and
``skew-symmetric`` storage. Errors carry the offending line number.
"""
import math

import numpy as np

from gcur.errors import MatrixMarketError
from gcur.sketch import DEFAULT_BLOCK_SIZE, MatrixSource

_FORMATS = ("array", "coordinate")
_FIELDS = ("real", "double", "integer", "pattern")
_SYMMETRIES = ("general", "symmetric", "skew-symmetric")


class _Header:
    def __init__(self, fmt, field, symmetry, rows, cols, nnz, data_line):
        self.format = fmt
        self.field = field
        self.symmetry = symmetry
        self.rows = rows
        self.cols = cols
        self.nnz = nnz
        self.data_line = data_line


def _lines(fh):
    for lineno, raw in enumerate(fh, start=1):
        yield lineno, raw


def _parse_header(path, it):
    try:
        lineno, first = next(it)
    except StopIteration:
        raise MatrixMarketError("empty file", path, 1) from None
    tok = first.split()
    if len(tok) != 5 or tok[0].lower() != "%%matrixmarket" or tok[1].lower() != "matrix":
        raise MatrixMarketError("expected '%%MatrixMarket matrix <format> <field> <symmetry>'",
                                path, lineno)
    fmt, field, sym = (t.lower() for t in tok[2:])
    if fmt not in _FORMATS:
        raise MatrixMarketError(f"unsupported format {fmt!r}", path, lineno)
    if field not in _FIELDS:
        raise MatrixMarketError(f"unsupported field {field!r}", path, lineno)
    if sym not in _SYMMETRIES:
        raise MatrixMarketError(f"unsupported symmetry {sym!r}", path, lineno)
    if fmt == "array" and field == "pattern":
        raise MatrixMarketError("pattern field is only valid for coordinate format", path, lineno)
    for lineno, raw in it:
        s = raw.strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        want = 3 if fmt == "coordinate" else 2
        if len(parts) != want:
            raise MatrixMarketError(f"size line needs {want} integers", path, lineno)
        try:
            dims = [int(x) for x in parts]
        except ValueError:
            raise MatrixMarketError(f"non-integer size line {s!r}", path, lineno) from None
        if dims[0] <= 0 or dims[1] <= 0 or (fmt == "coordinate" and dims[2] < 0):
            raise MatrixMarketError(f"invalid dimensions {s!r}", path, lineno)
        if sym != "general" and dims[0] != dims[1]:
            raise MatrixMarketError(f"{sym} matrix must be square", path, lineno)
        nnz = dims[2] if fmt == "coordinate" else None
        return _Header(fmt, field, sym, dims[0], dims[1], nnz, lineno + 1)
    raise MatrixMarketError("missing size line", path, lineno)


def _value(tok, path, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise MatrixMarketError(f"non-numeric value {tok!r}", path, lineno) from None
    if not math.isfinite(v):
        raise MatrixMarketError(f"non-finite value {tok!r}", path, lineno)
    return v


def _entries(path, hdr, it):
    """Yield ``(lineno, i, j, v)`` with 0-based indices as stored in the file."""
    count = 0
    if hdr.format == "coordinate":
        want = 2 if hdr.field == "pattern" else 3
        for lineno, raw in it:
            s = raw.strip()
            if not s or s.startswith("%"):
                continue
            parts = s.split()
            if len(parts) != want:
                raise MatrixMarketError(f"expected {want} fields, got {len(parts)}", path, lineno)
            try:
                i, j = int(parts[0]) - 1, int(parts[1]) - 1
            except ValueError:
                raise MatrixMarketError(f"non-integer index in {s!r}", path, lineno) from None
            if not (0 <= i < hdr.rows and 0 <= j < hdr.cols):
                raise MatrixMarketError(f"index ({i + 1}, {j + 1}) out of range", path, lineno)
            v = 1.0 if hdr.field == "pattern" else _value(parts[2], path, lineno)
            count += 1
            if count > hdr.nnz:
                raise MatrixMarketError(f"more than the declared {hdr.nnz} entries", path, lineno)
            yield lineno, i, j, v
        if count != hdr.nnz:
            raise MatrixMarketError(f"expected {hdr.nnz} entries, found {count}", path)
        return

    # array: column-major, lower triangle only for symmetric storage
    positions = []
    for j in range(hdr.cols):
        start = j if hdr.symmetry == "symmetric" else j + 1 if hdr.symmetry == "skew-symmetric" else 0
        positions.append(range(start, hdr.rows))
    pos_iter = ((i, j) for j, rng in enumerate(positions) for i in rng)
    for lineno, raw in it:
        s = raw.strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        if len(parts) != 1:
            raise MatrixMarketError(f"expected one value per line, got {len(parts)}", path, lineno)
        try:
            i, j = next(pos_iter)
        except StopIteration:
            raise MatrixMarketError("more values than the declared size", path, lineno) from None
        yield lineno, i, j, _value(parts[0], path, lineno)
    if next(pos_iter, None) is not None:
        raise MatrixMarketError("fewer values than the declared size", path)


def read_header(path):
    with open(path) as fh:
        return _parse_header(path, _lines(fh))


def read_matrix_market(path):
    """Load a Matrix Market file into a dense float64 array."""
    with open(path) as fh:
        it = _lines(fh)
        hdr = _parse_header(path, it)
        out = np.zeros((hdr.rows, hdr.cols))
        _fill(out, hdr, _entries(path, hdr, it))
    return out


def _fill(out, hdr, entries):
    # coordinate duplicates accumulate; array positions are written once
    add = hdr.format == "coordinate"
    sign = -1.0 if hdr.symmetry == "skew-symmetric" else 1.0
    mirror = hdr.symmetry != "general"
    for _, i, j, v in entries:
        if add:
            out[i, j] += v
        else:
            out[i, j] = v
        if mirror and i != j:
            out[j, i] += sign * v


def write_matrix_market(path, a, fmt="array", comment=None):
    """Write ``a`` in array (column-major) or row-sorted coordinate format."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("only 2-D arrays can be written")
    if fmt not in _FORMATS:
        raise ValueError(f"unknown Matrix Market format {fmt!r}")
    m, n = a.shape
    with open(path, "w") as fh:
        fh.write(f"%%MatrixMarket matrix {fmt} real general\n")
        if comment:
            for line in str(comment).splitlines():
                fh.write(f"% {line}\n")
        if fmt == "array":
            fh.write(f"{m} {n}\n")
            for v in a.ravel(order="F"):
                fh.write(f"{float(v)!r}\n")
        else:
            rows, cols = np.nonzero(a)
            fh.write(f"{m} {n} {rows.size}\n")
            for i, j in zip(rows, cols):
                fh.write(f"{i + 1} {j + 1} {float(a[i, j])!r}\n")


class MatrixMarketSource(MatrixSource):
    """Re-reads a Matrix Market file on every pass.

    General coordinate files whose entries are sorted by row (as written by
    :func:`write_matrix_market`) are streamed one row block at a time. Array
    files are stored column-major and symmetric files mirror entries across
    the diagonal, so for those each pass assembles the whole matrix before
    handing out row blocks.
    """

    def __init__(self, path, block_size=DEFAULT_BLOCK_SIZE):
        self.path = path
        self.header = read_header(path)
        super().__init__((self.header.rows, self.header.cols), block_size)

    @property
    def streams_rows(self):
        h = self.header
        return h.format == "coordinate" and h.symmetry == "general"

    def _iter_blocks(self):
        with open(self.path) as fh:
            it = _lines(fh)
            hdr = _parse_header(self.path, it)
            entries = _entries(self.path, hdr, it)
            if not self.streams_rows:
                full = np.zeros(self.shape)
                _fill(full, hdr, entries)
                for r0 in range(0, self.shape[0], self.block_size):
                    yield r0, full[r0:r0 + self.block_size]
                return
            yield from self._stream(entries)

    def _stream(self, entries):
        m, n = self.shape
        bs = self.block_size
        r0 = 0
        blk = np.zeros((min(bs, m), n))
        for lineno, i, j, v in entries:
            if i < r0:
                raise MatrixMarketError(
                    "coordinate entries must be sorted by row for streaming", self.path, lineno)
            while i >= r0 + blk.shape[0]:
                yield r0, blk
                r0 += blk.shape[0]
                blk = np.zeros((min(bs, m - r0), n))
            blk[i - r0, j] += v
        while r0 < m:
            yield r0, blk
            r0 += blk.shape[0]
            if r0 < m:
                blk = np.zeros((min(bs, m - r0), n))
