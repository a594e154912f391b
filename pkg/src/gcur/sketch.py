"""Seeded Gaussian sketches and streamed matrix sources with pass accounting.

Gaussian test matrices come from numpy's Philox counter-based bit generator
with the Ziggurat normal transform of ``numpy.random.Generator``; a given
``(shape, seed)`` always yields the same matrix.

A :class:`MatrixSource` hands out contiguous row blocks. Every traversal of
``blocks()`` counts as one pass, so algorithms can report how often they
touched the data. :func:`single_pass` feeds one traversal of each source to
several accumulators at once, which is how the pass-efficient algorithms
build all of their sketches from a single read.
"""
from dataclasses import dataclass

import numpy as np

from gcur.errors import DimensionMismatchError, InputError
from gcur.linalg import EPS, as_matrix, pinv

DEFAULT_BLOCK_SIZE = 1024


@dataclass(frozen=True)
class SketchPlan:
    """Target rank ``k``, oversampling ``p`` and master ``seed``."""

    k: int
    p: int = 5
    seed: int = 0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise InputError(f"target rank k must be a positive integer, got {self.k}")
        if int(self.p) != self.p or self.p < 0:
            raise InputError(f"oversampling p must be a nonnegative integer, got {self.p}")
        if int(self.seed) != self.seed or self.seed < 0 or self.seed >= 2**64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @property
    def l(self):  # noqa: E743
        return self.k + self.p

    def check_fits(self, dim, what):
        if self.l > dim:
            raise InputError(
                f"sample size l={self.l} exceeds {what} ({dim})"
            )

    def stream(self, offset):
        """Seed of the independent Gaussian stream ``offset`` (seed + offset)."""
        return (self.seed + offset) % 2**64


def gaussian(shape, seed):
    """Standard normal matrix reproducible from ``seed``."""
    shape = tuple(int(s) for s in shape)
    if any(s <= 0 for s in shape):
        raise InputError(f"gaussian shape must be positive, got {shape}")
    rng = np.random.Generator(np.random.Philox(int(seed)))
    return rng.standard_normal(shape)


class MatrixSource:
    """Row-block access to a matrix that may not fit in memory.

    Subclasses implement ``_iter_blocks`` yielding ``(row_start, block)``
    pairs that tile the matrix in order.
    """

    def __init__(self, shape, block_size=DEFAULT_BLOCK_SIZE):
        if block_size < 1:
            raise InputError("block_size must be positive")
        self.shape = (int(shape[0]), int(shape[1]))
        self.block_size = int(block_size)
        self._passes = 0

    @property
    def pass_count(self):
        return self._passes

    def blocks(self):
        self._passes += 1
        yield from self._iter_blocks()

    def _iter_blocks(self):
        raise NotImplementedError

    def to_array(self):
        """Materialise the matrix (costs one pass)."""
        out = np.empty(self.shape)
        for r0, blk in self.blocks():
            out[r0:r0 + blk.shape[0]] = blk
        return out


class ArraySource(MatrixSource):
    """In-memory (or ``np.memmap``) matrix served in row blocks."""

    def __init__(self, array, block_size=DEFAULT_BLOCK_SIZE):
        if not isinstance(array, np.memmap):
            array = as_matrix(array)
        super().__init__(array.shape, block_size)
        self.array = array

    def _iter_blocks(self):
        m = self.shape[0]
        for r0 in range(0, m, self.block_size):
            yield r0, np.asarray(self.array[r0:r0 + self.block_size], dtype=np.float64)


class StackedSource(MatrixSource):
    """Virtual vertical stack ``[top; bottom]``; never materialised."""

    def __init__(self, top, bottom):
        if top.shape[1] != bottom.shape[1]:
            raise DimensionMismatchError(
                f"cannot stack {top.shape} over {bottom.shape}: column counts differ"
            )
        super().__init__((top.shape[0] + bottom.shape[0], top.shape[1]),
                         max(top.block_size, bottom.block_size))
        self.parts = (top, bottom)

    @property
    def pass_count(self):
        # a pass over the stack is a pass over each part
        return min(p.pass_count for p in self.parts)

    def blocks(self):
        top, bottom = self.parts
        yield from top.blocks()
        off = top.shape[0]
        for r0, blk in bottom.blocks():
            yield off + r0, blk


def as_source(a, block_size=DEFAULT_BLOCK_SIZE):
    if isinstance(a, MatrixSource):
        return a
    return ArraySource(a, block_size)


class RowSketch:
    """Accumulates ``omega @ [M_1; M_2; ...]`` over row blocks."""

    def __init__(self, omega, parts):
        self.omega = omega
        self.offsets = {}
        off = 0
        ncols = parts[0].shape[1]
        for src in parts:
            if src.shape[1] != ncols:
                raise DimensionMismatchError(
                    f"stacked parts have different column counts: {ncols} vs {src.shape[1]}"
                )
            self.offsets[id(src)] = off
            off += src.shape[0]
        if omega.shape[1] != off:
            raise DimensionMismatchError(
                f"sketch has {omega.shape[1]} columns but the stack has {off} rows"
            )
        self.sources = list(parts)
        self.result = np.zeros((omega.shape[0], ncols))

    def update(self, src, r0, blk):
        off = self.offsets[id(src)] + r0
        self.result += self.omega[:, off:off + blk.shape[0]] @ blk


class ColSketch:
    """Accumulates ``[M_1, M_2, ...] @ omega.T`` over row blocks."""

    def __init__(self, omega, parts):
        self.omega = omega
        self.offsets = {}
        off = 0
        nrows = parts[0].shape[0]
        for src in parts:
            if src.shape[0] != nrows:
                raise DimensionMismatchError(
                    f"side-by-side parts have different row counts: {nrows} vs {src.shape[0]}"
                )
            self.offsets[id(src)] = off
            off += src.shape[1]
        if omega.shape[1] != off:
            raise DimensionMismatchError(
                f"sketch has {omega.shape[1]} columns but the row of blocks has {off} columns"
            )
        self.sources = list(parts)
        self.result = np.zeros((nrows, omega.shape[0]))

    def update(self, src, r0, blk):
        off = self.offsets[id(src)]
        h = blk.shape[0]
        self.result[r0:r0 + h] += blk @ self.omega[:, off:off + blk.shape[1]].T


class FactorCollector:
    """Pulls ``C = M[:, col_idx]``, ``R = M[row_idx, :]`` and ``C^+ M`` in one pass.

    ``C^+ M`` is formed from a streamed QR of ``C`` whose reflections are
    applied to ``M`` on the fly, keeping only an ``l x n`` intermediate.
    """

    def __init__(self, src, row_idx, col_idx):
        self.sources = [src]
        m, n = src.shape
        self.row_idx = np.asarray(row_idx, dtype=np.intp)
        self.col_idx = np.asarray(col_idx, dtype=np.intp)
        lc = len(self.col_idx)
        self.c = np.empty((m, lc))
        self.r = np.empty((len(self.row_idx), n))
        self._where = {int(i): pos for pos, i in enumerate(self.row_idx)}
        self.tri = np.zeros((lc, lc))
        self._w = np.zeros((lc, n))

    def update(self, src, r0, blk):
        h = blk.shape[0]
        cb = blk[:, self.col_idx]
        self.c[r0:r0 + h] = cb
        for i in range(r0, r0 + h):
            pos = self._where.get(i)
            if pos is not None:
                self.r[pos] = blk[i - r0]
        lc = self.tri.shape[0]
        q, tri = np.linalg.qr(np.vstack([self.tri, cb]))
        self._w = q.T @ np.vstack([self._w, blk])
        self.tri = tri[:lc]
        self._w = self._w[:lc]

    def pinv_c_times_source(self):
        s_max = np.linalg.norm(self.tri, 2) if self.tri.size else 0.0
        tol = max(self.c.shape) * EPS * s_max
        return pinv(self.tri, tol=tol) @ self._w


def single_pass(accumulators):
    """Traverse every source referenced by ``accumulators`` exactly once."""
    order = []
    seen = set()
    for acc in accumulators:
        for src in acc.sources:
            if id(src) not in seen:
                seen.add(id(src))
                order.append(src)
    for src in order:
        users = [acc for acc in accumulators if any(s is src for s in acc.sources)]
        for r0, blk in src.blocks():
            for acc in users:
                acc.update(src, r0, blk)
    return [acc.result if hasattr(acc, "result") else acc for acc in accumulators]


def sketch_rows(plan, source, omega=None):
    """``X = omega @ M`` in one pass; ``omega`` defaults to ``gaussian((l, rows), plan.seed)``."""
    source = as_source(source)
    if omega is None:
        plan.check_fits(source.shape[0], "the number of sketched rows")
        omega = gaussian((plan.l, source.shape[0]), plan.seed)
    parts = list(source.parts) if isinstance(source, StackedSource) else [source]
    acc = RowSketch(np.asarray(omega, dtype=np.float64), parts)
    single_pass([acc])
    return acc.result


def sketch_cols(plan, source, omega=None):
    """``Y = M @ omega.T`` in one pass; ``omega`` defaults to ``gaussian((l, cols), plan.seed)``."""
    source = as_source(source)
    if omega is None:
        plan.check_fits(source.shape[1], "the number of sketched columns")
        omega = gaussian((plan.l, source.shape[1]), plan.seed)
    acc = ColSketch(np.asarray(omega, dtype=np.float64), [source])
    single_pass([acc])
    return acc.result
