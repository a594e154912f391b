"""Pure numpy Householder QR with greedy column pivoting.

Reference implementation of the kernel in ``_cpqr_ext.pyx``; the two follow
the same pivot rule, norm downdating and sign normalisation, so they agree to
rounding on any input and pick identical pivots unless two column norms are
within rounding of each other.
"""
import numpy as np

TIE_RTOL = 1e-14
_SQRT_EPS = np.sqrt(np.finfo(np.float64).eps)


def cpqr_kernel(x):
    """Return ``(q, t, perm)`` with ``x[:, perm] = q @ t`` (economy size)."""
    r = np.array(x, dtype=np.float64, order="F", copy=True)
    m, n = r.shape
    kk = min(m, n)
    perm = np.arange(n, dtype=np.intp)
    norms = _colnorms(r)
    orig = norms.copy()
    vs = np.zeros((m, kk), order="F")

    for i in range(kk):
        rem = norms[i:]
        nmax = rem.max()
        cand = np.flatnonzero(rem >= nmax * (1.0 - TIE_RTOL)) + i
        best = cand[np.argmin(perm[cand])]
        if best != i:
            r[:, [i, best]] = r[:, [best, i]]
            norms[[i, best]] = norms[[best, i]]
            orig[[i, best]] = orig[[best, i]]
            perm[[i, best]] = perm[[best, i]]

        col = r[i:, i]
        nrm = _colnorms(col[:, None])[0]
        if nrm == 0.0:
            continue
        if not col[1:].any():
            # already upper triangular in this column: no reflection needed
            if i + 1 < n:
                _downdate(r, norms, orig, i)
            continue
        alpha = -nrm if col[0] >= 0 else nrm
        v = col.copy()
        v[0] -= alpha
        # scale so that H = I - v v^T
        v /= np.abs(v).max()
        v *= np.sqrt(2.0) / np.sqrt(v @ v)
        vs[i:, i] = v
        r[i:, i] = 0.0
        r[i, i] = alpha
        if i + 1 < n:
            block = r[i:, i + 1:]
            block -= np.outer(v, v @ block)
            _downdate(r, norms, orig, i)

    q = np.eye(m, kk, order="F")
    for i in range(kk - 1, -1, -1):
        v = vs[i:, i]
        if v.any():
            q[i:, i:] -= np.outer(v, v @ q[i:, i:])

    t = np.triu(r[:kk, :])
    signs = np.where(np.diag(t) < 0, -1.0, 1.0)
    t *= signs[:, None]
    q *= signs[None, :]
    return q, t, perm


def _downdate(r, norms, orig, i):
    js = np.arange(i + 1, r.shape[1])
    live = norms[js] != 0.0
    js = js[live]
    if js.size == 0:
        return
    ratio = np.abs(r[i, js]) / norms[js]
    factor = np.maximum(0.0, 1.0 - ratio * ratio)
    new = norms[js] * np.sqrt(factor)
    stale = new <= _SQRT_EPS * orig[js]
    norms[js] = new
    if stale.any():
        sj = js[stale]
        fresh = _colnorms(r[i + 1:, sj])
        norms[sj] = fresh
        orig[sj] = fresh


def _colnorms(a):
    # scaled by the column maximum so tiny entries do not underflow when squared
    if a.shape[0] == 0:
        return np.zeros(a.shape[1])
    scale = np.abs(a).max(axis=0)
    safe = np.where(scale > 0.0, scale, 1.0)
    b = a / safe
    return scale * np.sqrt(np.einsum("ij,ij->j", b, b))
