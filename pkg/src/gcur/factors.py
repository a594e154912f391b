"""Result containers and helpers shared by the pair and triplet algorithms."""
from dataclasses import dataclass, field

import numpy as np

from gcur.errors import InputError, RankDeficientFactor, RankDeficientSketch, UndefinedRelativeError
from gcur.linalg import as_matrix, cpqr, norm, pinv


@dataclass
class CurFactors:
    """``source ~ c @ m @ r`` with ``c = source[:, col_idx]`` and ``r = source[row_idx, :]``.

    ``c``, ``m`` and ``r`` are ``None`` when only the indices were requested.
    """

    col_idx: np.ndarray
    row_idx: np.ndarray
    c: np.ndarray | None = None
    m: np.ndarray | None = None
    r: np.ndarray | None = None

    @property
    def has_factors(self):
        return self.c is not None

    def approximation(self):
        if not self.has_factors:
            raise InputError("factors were not retrieved (indices-only run)")
        return (self.c @ self.m) @ self.r


@dataclass(frozen=True)
class PassReport:
    """How many times each input matrix was traversed."""

    per_source: dict

    @property
    def passes(self):
        return max(self.per_source.values()) if self.per_source else 0


@dataclass
class Sketches:
    """Intermediate sketches and pivoted-QR results kept for diagnostics."""

    matrices: dict = field(default_factory=dict)
    qr: dict = field(default_factory=dict)


def pick_indices(sketch, count, k, label, factor=False):
    """Leading ``count`` pivots of the CPQR of ``sketch``.

    Raises when the pivoted diagonal shows fewer than ``k`` significant
    directions (relative threshold ``sqrt(eps)``).
    """
    res = cpqr(sketch)
    rank = res.numerical_rank()
    if rank < k:
        exc = RankDeficientFactor if factor else RankDeficientSketch
        raise exc(rank, k, label)
    return res.leading(count), res


def middle(c, source, r):
    """``pinv(c) @ source @ pinv(r)``, evaluated left to right."""
    return (pinv(c) @ source) @ pinv(r)


def factors_in_memory(source, row_idx, col_idx):
    c = source[:, col_idx]
    r = source[row_idx, :]
    return CurFactors(col_idx=col_idx, row_idx=row_idx, c=c, m=middle(c, source, r), r=r)


def check_factor_rank(tri, k, label):
    """Rank test on the triangular factor of a streamed QR of ``C``."""
    s = np.linalg.svd(tri, compute_uv=False)
    rank = int(np.count_nonzero(s > np.sqrt(np.finfo(float).eps) * s[0])) if s[0] > 0 else 0
    if rank < k:
        raise RankDeficientFactor(rank, k, label)


def relative_error(source, factors, norm_kind="frobenius"):
    """``||source - c m r|| / ||source||`` in the requested norm."""
    source = as_matrix(source, "source")
    denom = norm(source, norm_kind)
    if denom == 0.0:
        raise UndefinedRelativeError("relative error of a zero matrix is undefined")
    approx = factors.approximation()
    if approx.shape != source.shape:
        raise InputError(f"factor product has shape {approx.shape}, source {source.shape}")
    return norm(source - approx, norm_kind) / denom
