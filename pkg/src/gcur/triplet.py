"""Randomized CUR decompositions of a matrix triplet (A, B, G).

``A`` is ``m x n``, ``B`` is ``m x t`` and ``G`` is ``d x n``. ``A`` and ``G``
share column indices ``J``; ``A`` and ``B`` share row indices ``I``. The
columns ``J_B`` of ``B`` and rows ``I_G`` of ``G`` are chosen separately.

Gaussian streams: ``omega2`` (for ``[A; G]``) uses ``seed + 2``, ``omega3``
(for ``[A, B]``) ``seed + 3``, ``omega4`` (for ``B``) ``seed + 4`` and
``omega5`` (for ``G``) ``seed + 5``. The randomized and pass-efficient
variants therefore agree on ``J`` and ``I`` for the same plan.
"""
from dataclasses import dataclass, field

from gcur.errors import DimensionMismatchError
from gcur.factors import CurFactors, PassReport, Sketches, factors_in_memory, pick_indices
from gcur.linalg import as_matrix
from gcur.pair import finish_factors
from gcur.sketch import (ArraySource, ColSketch, FactorCollector, RowSketch, as_source,
                         gaussian, single_pass)


@dataclass
class TripletCur:
    a_factors: CurFactors
    b_factors: CurFactors
    g_factors: CurFactors
    sketches: Sketches = field(default_factory=Sketches, repr=False)


def _check_triplet(a_shape, b_shape, g_shape, plan):
    m, n = a_shape
    mb, t = b_shape
    d, ng = g_shape
    if mb != m:
        raise DimensionMismatchError(f"A ({m}x{n}) and B ({mb}x{t}) must have the same number of rows")
    if ng != n:
        raise DimensionMismatchError(f"A ({m}x{n}) and G ({d}x{ng}) must have the same number of columns")
    plan.check_fits(m, "the number of rows m")
    plan.check_fits(n, "the number of columns n")
    plan.check_fits(t, "the number of columns of B")
    plan.check_fits(d, "the number of rows of G")


def _omegas(m, n, t, d, plan):
    return (gaussian((plan.l, m + d), plan.stream(2)),
            gaussian((plan.l, n + t), plan.stream(3)))


def cur_triplet(a, b, g, plan):
    """CUR of (A, B, G) by randomized selection of ``J`` and ``I`` plus exact IDs."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    g = as_matrix(g, "G")
    _check_triplet(a.shape, b.shape, g.shape, plan)
    (m, n), t, d = a.shape, b.shape[1], g.shape[0]
    a_src, b_src, g_src = ArraySource(a), ArraySource(b), ArraySource(g)
    omega2, omega3 = _omegas(m, n, t, d, plan)

    # same block arithmetic as the pass-efficient variant
    x1, y3 = single_pass([RowSketch(omega2, [a_src, g_src]), ColSketch(omega3, [a_src, b_src])])
    j, qr_x1 = pick_indices(x1, plan.l, plan.k, "[A;G]")
    i, qr_y3 = pick_indices(y3.T, plan.l, plan.k, "[A,B]")

    j_b, qr_rb = pick_indices(b[i, :], plan.l, plan.k, "B", factor=True)
    i_g, qr_cg = pick_indices(g[:, j].T, plan.l, plan.k, "G", factor=True)

    sk = Sketches(matrices={"X1": x1, "Y3": y3},
                  qr={"X1": qr_x1, "Y3^T": qr_y3, "R_B": qr_rb, "C_G^T": qr_cg})
    return TripletCur(factors_in_memory(a, i, j),
                      factors_in_memory(b, i, j_b),
                      factors_in_memory(g, i_g, j),
                      sk)


def cur_triplet_pass_efficient(a, b, g, plan, indices_only=False, block_size=None):
    """Two-pass CUR of (A, B, G); one pass when only the indices are wanted.

    Pass one builds ``X1 = omega2 @ [A; G]``, ``Y3 = [A, B] @ omega3.T``,
    ``X2 = omega4 @ B`` and ``Y4 = G @ omega5.T`` together. Returns
    ``(TripletCur, PassReport)``.
    """
    kw = {} if block_size is None else {"block_size": block_size}
    a_src, b_src, g_src = as_source(a, **kw), as_source(b, **kw), as_source(g, **kw)
    # validate before consuming any pass
    _check_triplet(a_src.shape, b_src.shape, g_src.shape, plan)
    (m, n), t, d = a_src.shape, b_src.shape[1], g_src.shape[0]
    srcs = {"A": a_src, "B": b_src, "G": g_src}
    start = {k: s.pass_count for k, s in srcs.items()}

    omega2, omega3 = _omegas(m, n, t, d, plan)
    omega4 = gaussian((plan.l, m), plan.stream(4))
    omega5 = gaussian((plan.l, n), plan.stream(5))
    x1, y3, x2, y4 = single_pass([
        RowSketch(omega2, [a_src, g_src]),
        ColSketch(omega3, [a_src, b_src]),
        RowSketch(omega4, [b_src]),
        ColSketch(omega5, [g_src]),
    ])
    j, qr_x1 = pick_indices(x1, plan.l, plan.k, "[A;G]")
    i, qr_y3 = pick_indices(y3.T, plan.l, plan.k, "[A,B]")
    j_b, qr_x2 = pick_indices(x2, plan.l, plan.k, "B")
    i_g, qr_y4 = pick_indices(y4.T, plan.l, plan.k, "G")
    sk = Sketches(matrices={"X1": x1, "Y3": y3, "X2": x2, "Y4": y4},
                  qr={"X1": qr_x1, "Y3^T": qr_y3, "X2": qr_x2, "Y4^T": qr_y4})

    if indices_only:
        fa = CurFactors(col_idx=j, row_idx=i)
        fb = CurFactors(col_idx=j_b, row_idx=i)
        fg = CurFactors(col_idx=j, row_idx=i_g)
    else:
        cols = [FactorCollector(a_src, i, j), FactorCollector(b_src, i, j_b),
                FactorCollector(g_src, i_g, j)]
        single_pass(cols)
        fa, fb, fg = (finish_factors(c, plan.k, lbl) for c, lbl in zip(cols, "ABG"))
    report = PassReport({k: s.pass_count - start[k] for k, s in srcs.items()})
    return TripletCur(fa, fb, fg, sk), report
