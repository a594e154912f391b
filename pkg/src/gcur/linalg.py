"""Dense kernels: pivoted QR, pseudoinverse, norms and projectors.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. The pivoted QR
kernel is compiled when ``gcur._cpqr_ext`` is importable; set
``GCUR_PURE_PYTHON=1`` to force the numpy implementation.
"""
import os
from dataclasses import dataclass

import numpy as np

from gcur import _cpqr_py
from gcur.errors import DegenerateInputError, InputError, SingularCoreError

EPS = np.finfo(np.float64).eps

if os.environ.get("GCUR_PURE_PYTHON"):
    _cpqr_ext = None
else:
    try:
        from gcur import _cpqr_ext
    except ImportError:
        _cpqr_ext = None

BACKEND = "compiled" if _cpqr_ext is not None else "python"
_KERNELS = {"python": _cpqr_py.cpqr_kernel}
if _cpqr_ext is not None:
    _KERNELS["compiled"] = _cpqr_ext.cpqr_kernel


def available_backends():
    return sorted(_KERNELS)


def as_matrix(a, name="matrix", check_finite=True):
    """Validate ``a`` as a nonempty finite 2-D float64 array."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise InputError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DegenerateInputError(f"{name} has an empty dimension: {arr.shape}")
    if check_finite and not np.isfinite(arr).all():
        raise InputError(f"{name} contains NaN or Inf")
    return arr


@dataclass(frozen=True)
class CpqrResult:
    """Economy pivoted QR ``x[:, perm] = q @ t``.

    ``q`` has ``min(rows, cols)`` orthonormal columns, ``t`` is upper
    triangular with a non-negative, non-increasing diagonal and ``perm`` is
    the full column permutation.
    """

    q: np.ndarray
    t: np.ndarray
    perm: np.ndarray

    def leading(self, count):
        """First ``count`` pivot positions (0-based)."""
        return self.perm[:count].copy()

    def numerical_rank(self, rtol=np.sqrt(EPS)):
        d = np.abs(np.diag(self.t))
        if d.size == 0 or d[0] == 0.0:
            return 0
        return int(np.count_nonzero(d > rtol * d[0]))


def cpqr(x, backend=None):
    """Householder QR with greedy column pivoting on remaining column norms.

    Ties in the remaining norms (within 1e-14 relative) go to the lower
    original column index.
    """
    x = as_matrix(x, "x")
    kernel = _KERNELS[backend or BACKEND]
    q, t, perm = kernel(x)
    # adding 0.0 turns the -0.0 entries left by the reflections into +0.0
    return CpqrResult(q=q + 0.0, t=t + 0.0, perm=np.asarray(perm, dtype=np.intp))


def singular_values(a):
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def spectral_norm(a):
    s = singular_values(a)
    return float(s[0]) if s.size else 0.0


def frobenius_norm(a):
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64), "fro"))


def norm(a, kind="spectral"):
    if kind == "spectral":
        return spectral_norm(a)
    if kind == "frobenius":
        return frobenius_norm(a)
    raise InputError(f"unknown norm {kind!r}")


def pinv_tolerance(a_shape, sigma_max):
    return max(a_shape) * EPS * sigma_max


def pinv(a, tol=None):
    """Moore-Penrose inverse via SVD.

    Singular values ``<= tol`` are treated as zero; the default is
    ``max(rows, cols) * eps * sigma_max``.
    """
    a = as_matrix(a, "a", check_finite=False)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    if tol is None:
        tol = pinv_tolerance(a.shape, s[0] if s.size else 0.0)
    elif tol < 0:
        raise InputError("tol must be nonnegative")
    keep = s > tol
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (vt.T * inv) @ u.T


def numerical_rank(a, tol=None):
    s = singular_values(a)
    if s.size == 0:
        return 0
    if tol is None:
        tol = pinv_tolerance(np.shape(a), s[0])
    return int(np.count_nonzero(s > tol))


def selection(n, idx):
    """Column-selection matrix ``I_n(:, idx)``."""
    e = np.zeros((n, len(idx)))
    e[np.asarray(idx), np.arange(len(idx))] = 1.0
    return e


def oblique_projector(range_basis, row_map):
    """``range_basis @ inv(row_map @ range_basis) @ row_map``.

    Raises SingularCoreError when the square core is numerically singular
    (condition estimate above ``1/sqrt(eps)``).
    """
    range_basis = np.asarray(range_basis, dtype=np.float64)
    row_map = np.asarray(row_map, dtype=np.float64)
    if range_basis.shape[0] != row_map.shape[1] or range_basis.shape[1] != row_map.shape[0]:
        raise InputError(
            f"incompatible projector factors {range_basis.shape} and {row_map.shape}"
        )
    core = row_map @ range_basis
    cond = np.linalg.cond(core)
    if not np.isfinite(cond) or cond > 1.0 / np.sqrt(EPS):
        raise SingularCoreError(f"projector core is singular (cond={cond:.3g})")
    return range_basis @ np.linalg.solve(core, row_map)
