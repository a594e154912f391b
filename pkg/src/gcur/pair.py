"""Randomized CUR decompositions of a matrix pair (A, B) sharing column indices.

``A`` is ``m x n`` and ``B`` is ``d x n``. Both decompositions use the same
columns ``J``; the rows ``I_A`` and ``I_B`` are chosen separately.
"""
from dataclasses import dataclass, field

import numpy as np

from gcur.errors import DimensionMismatchError
from gcur.factors import (CurFactors, PassReport, Sketches, check_factor_rank,
                          factors_in_memory, pick_indices)
from gcur.linalg import as_matrix, pinv
from gcur.sketch import (ArraySource, ColSketch, FactorCollector, RowSketch, StackedSource,
                         as_source, gaussian, single_pass, sketch_rows)


@dataclass
class PairCur:
    a_factors: CurFactors
    b_factors: CurFactors
    sketches: Sketches = field(default_factory=Sketches, repr=False)

    @property
    def col_idx(self):
        return self.a_factors.col_idx


@dataclass
class ColumnSelection:
    col_idx: np.ndarray
    c_a: np.ndarray
    c_b: np.ndarray
    sketch: np.ndarray


def _check_pair(a_shape, b_shape, plan, rows_too):
    m, n = a_shape
    d, nb = b_shape
    if n != nb:
        raise DimensionMismatchError(
            f"A ({m}x{n}) and B ({d}x{nb}) must have the same number of columns"
        )
    plan.check_fits(n, "the number of columns n")
    if rows_too:
        plan.check_fits(m, "the number of rows of A")
        plan.check_fits(d, "the number of rows of B")


def _stack_omega(m, d, plan):
    return gaussian((plan.l, m + d), plan.stream(0))


def select_columns_pair(a, b, plan):
    """Shared column indices ``J`` from the pivoted QR of ``omega @ [A; B]``."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    _check_pair(a.shape, b.shape, plan, rows_too=False)
    a_src, b_src = ArraySource(a), ArraySource(b)
    omega = _stack_omega(a.shape[0], b.shape[0], plan)
    x = sketch_rows(plan, StackedSource(a_src, b_src), omega=omega)
    j, _ = pick_indices(x, plan.l, plan.k, "[A;B]")
    return ColumnSelection(col_idx=j, c_a=a[:, j], c_b=b[:, j], sketch=x)


def cur_pair(a, b, plan):
    """CUR of (A, B): randomized column selection, then exact row IDs of ``C^T``."""
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    _check_pair(a.shape, b.shape, plan, rows_too=True)
    sel = select_columns_pair(a, b, plan)
    i_a, qr_a = pick_indices(sel.c_a.T, plan.l, plan.k, "A", factor=True)
    i_b, qr_b = pick_indices(sel.c_b.T, plan.l, plan.k, "B", factor=True)
    j = sel.col_idx
    sk = Sketches(matrices={"X": sel.sketch}, qr={"C_A^T": qr_a, "C_B^T": qr_b})
    return PairCur(factors_in_memory(a, i_a, j), factors_in_memory(b, i_b, j), sk)


def cur_pair_pass_efficient(a, b, plan, indices_only=False, block_size=None):
    """Two-pass CUR of (A, B); one pass when only the indices are wanted.

    Pass one builds ``X = omega @ [A; B]``, ``Y1 = A @ omega1.T`` and
    ``Y2 = B @ omega1.T`` together. Pass two collects ``C``, ``R`` and
    ``pinv(C) @ source`` for each matrix.

    Returns ``(PairCur, PassReport)``.
    """
    a_src = as_source(a) if block_size is None else as_source(a, block_size)
    b_src = as_source(b) if block_size is None else as_source(b, block_size)
    _check_pair(a_src.shape, b_src.shape, plan, rows_too=True)
    m, n = a_src.shape
    start = {"A": a_src.pass_count, "B": b_src.pass_count}

    omega = _stack_omega(m, b_src.shape[0], plan)
    omega1 = gaussian((plan.l, n), plan.stream(1))
    accs = [RowSketch(omega, [a_src, b_src]), ColSketch(omega1, [a_src]), ColSketch(omega1, [b_src])]
    x, y1, y2 = single_pass(accs)

    j, qr_x = pick_indices(x, plan.l, plan.k, "[A;B]")
    i_a, qr_a = pick_indices(y1.T, plan.l, plan.k, "A")
    i_b, qr_b = pick_indices(y2.T, plan.l, plan.k, "B")
    sk = Sketches(matrices={"X": x, "Y1": y1, "Y2": y2},
                  qr={"X": qr_x, "Y1^T": qr_a, "Y2^T": qr_b})

    if indices_only:
        fa = CurFactors(col_idx=j, row_idx=i_a)
        fb = CurFactors(col_idx=j, row_idx=i_b)
    else:
        col_a = FactorCollector(a_src, i_a, j)
        col_b = FactorCollector(b_src, i_b, j)
        single_pass([col_a, col_b])
        fa = finish_factors(col_a, plan.k, "A")
        fb = finish_factors(col_b, plan.k, "B")
    report = PassReport({"A": a_src.pass_count - start["A"], "B": b_src.pass_count - start["B"]})
    return PairCur(fa, fb, sk), report


def finish_factors(collector, k, label):
    check_factor_rank(collector.tri, k, label)
    m = collector.pinv_c_times_source() @ pinv(collector.r)
    return CurFactors(col_idx=collector.col_idx, row_idx=collector.row_idx,
                      c=collector.c, m=m, r=collector.r)
