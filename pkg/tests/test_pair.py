import numpy as np
import pytest

from gcur import linalg
from gcur.errors import (DimensionMismatchError, InputError, RankDeficientFactor,
                         RankDeficientSketch, UndefinedRelativeError)
from gcur.factors import CurFactors, relative_error
from gcur.pair import cur_pair, cur_pair_pass_efficient, select_columns_pair
from gcur.sketch import ArraySource, SketchPlan

from conftest import lowrank
from oracles import selection_sides, pass_efficient_pair_sides


def test_single_informative_column():
    a = np.zeros((4, 5))
    a[0, 0] = 1.0
    sel = select_columns_pair(a, a.copy(), SketchPlan(k=1, p=0))
    assert list(sel.col_idx) == [0]


def test_selection_spans_range(rng):
    # B = W A shares the row space of A, so the stack has rank 8 = l
    a = lowrank(rng, 60, 40, 8)
    b = rng.standard_normal((30, 60)) @ a
    sel = select_columns_pair(a, b, SketchPlan(k=8, p=0, seed=1))
    for mat, c in ((a, sel.c_a), (b, sel.c_b)):
        resid = np.linalg.norm(mat - c @ np.linalg.pinv(c) @ mat) / np.linalg.norm(mat)
        assert resid <= 1e-8


def test_selection_errors(rng):
    with pytest.raises(InputError):
        select_columns_pair(np.ones((5, 3)), np.ones((5, 3)), SketchPlan(k=3, p=1))
    with pytest.raises(DimensionMismatchError):
        select_columns_pair(np.ones((5, 3)), np.ones((5, 4)), SketchPlan(k=1))
    with pytest.raises(RankDeficientSketch) as info:
        select_columns_pair(np.outer(np.ones(6), np.ones(8)), np.zeros((4, 8)), SketchPlan(k=3, p=0))
    assert info.value.rank == 1


def test_selection_columns_are_verbatim(rng):
    a, b = rng.standard_normal((12, 10)), rng.standard_normal((9, 10))
    sel = select_columns_pair(a, b, SketchPlan(k=3, p=2, seed=4))
    assert len(set(sel.col_idx)) == 5
    assert np.array_equal(sel.c_a, a[:, sel.col_idx])
    assert np.array_equal(sel.c_b, b[:, sel.col_idx])


def test_identity_pair_exact():
    eye = np.eye(5)
    res = cur_pair(eye, eye, SketchPlan(k=3, p=2))
    for f in (res.a_factors, res.b_factors):
        assert np.linalg.norm(eye - f.approximation()) <= 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_scaled_pair_exact_recovery(rng, seed):
    a, b = lowrank(rng, 200, 100, 50), lowrank(rng, 150, 100, 50)
    res = cur_pair(a, b, SketchPlan(k=50, p=5, seed=seed))
    for mat, f in ((a, res.a_factors), (b, res.b_factors)):
        for kind in ("frobenius", "spectral"):
            assert relative_error(mat, f, kind) <= 1e-8


def test_factor_invariants(rng):
    a, b = rng.standard_normal((15, 12)), rng.standard_normal((11, 12))
    res = cur_pair(a, b, SketchPlan(k=4, p=2, seed=8))
    assert np.array_equal(res.a_factors.col_idx, res.b_factors.col_idx)
    for mat, f in ((a, res.a_factors), (b, res.b_factors)):
        assert np.array_equal(f.c, mat[:, f.col_idx])
        assert np.array_equal(f.r, mat[f.row_idx, :])
        ref = np.linalg.pinv(f.c) @ mat @ np.linalg.pinv(f.r)
        assert np.linalg.norm(f.m - ref) <= 1e-10 * np.linalg.norm(ref)


def test_rank_deficient_factor(rng):
    # rank(A) = 2 < k while B is full rank, so the sketch is fine but C_A is not
    a = lowrank(rng, 10, 8, 2)
    b = rng.standard_normal((10, 8))
    with pytest.raises(RankDeficientFactor) as info:
        cur_pair(a, b, SketchPlan(k=4, p=1, seed=0))
    assert info.value.rank == 2 and info.value.label == "A"


def test_rows_must_fit(rng):
    with pytest.raises(InputError):
        cur_pair(np.ones((3, 10)), np.ones((8, 10)), SketchPlan(k=3, p=1))


def test_pass_counts(rng):
    a, b = lowrank(rng, 40, 30, 6), lowrank(rng, 20, 30, 6)
    _, rep = cur_pair_pass_efficient(a, b, SketchPlan(k=6, p=2), indices_only=True)
    assert rep.passes == 1 and rep.per_source == {"A": 1, "B": 1}
    res, rep = cur_pair_pass_efficient(a, b, SketchPlan(k=6, p=2))
    assert rep.passes == 2 and rep.per_source == {"A": 2, "B": 2}
    assert res.a_factors.has_factors


def test_indices_only_has_no_factors(rng):
    a, b = lowrank(rng, 20, 15, 4), lowrank(rng, 20, 15, 4)
    res, _ = cur_pair_pass_efficient(a, b, SketchPlan(k=3), indices_only=True)
    assert not res.a_factors.has_factors
    with pytest.raises(InputError):
        res.a_factors.approximation()


def test_pass_efficient_matches_randomized_selection(rng):
    a, b = lowrank(rng, 60, 40, 10), lowrank(rng, 50, 40, 10)
    plan = SketchPlan(k=10, p=5, seed=21)
    full = cur_pair(a, b, plan)
    pe, _ = cur_pair_pass_efficient(a, b, plan)
    assert np.array_equal(full.col_idx, pe.col_idx)
    for mat, f in ((a, pe.a_factors), (b, pe.b_factors)):
        assert relative_error(mat, f) <= 1e-8


def test_streamed_source_gives_identical_result(rng):
    a, b = lowrank(rng, 37, 25, 5), lowrank(rng, 23, 25, 5)
    plan = SketchPlan(k=5, p=3, seed=5)
    mem, _ = cur_pair_pass_efficient(a, b, plan)
    src_a, src_b = ArraySource(a), ArraySource(b)
    streamed, rep = cur_pair_pass_efficient(src_a, src_b, plan)
    assert rep.passes == 2 and src_a.pass_count == 2
    for x, y in ((mem.a_factors, streamed.a_factors), (mem.b_factors, streamed.b_factors)):
        for attr in ("col_idx", "row_idx", "c", "m", "r"):
            assert np.array_equal(getattr(x, attr), getattr(y, attr))


@pytest.mark.parametrize("block", [1, 4, 100])
def test_block_size_keeps_indices(rng, block):
    # pivots past the numerical rank are rounding noise, so keep rank >= l
    a, b = lowrank(rng, 30, 20, 8), lowrank(rng, 25, 20, 8)
    plan = SketchPlan(k=4, p=2, seed=2)
    ref, _ = cur_pair_pass_efficient(a, b, plan)
    got, _ = cur_pair_pass_efficient(a, b, plan, block_size=block)
    assert np.array_equal(ref.col_idx, got.col_idx)
    assert np.array_equal(ref.a_factors.row_idx, got.a_factors.row_idx)
    # the middle factor of a rank-deficient C depends on rounding, its product does not
    diff = ref.a_factors.approximation() - got.a_factors.approximation()
    assert np.linalg.norm(diff) <= 1e-10 * np.linalg.norm(a)


def test_relative_error_cases(rng):
    a = rng.standard_normal((6, 5))
    exact = CurFactors(col_idx=np.arange(5), row_idx=np.arange(5),
                       c=a, m=np.linalg.pinv(a[:5]), r=a[:5])
    assert relative_error(a, exact) <= 1e-12
    zero_m = CurFactors(col_idx=np.arange(5), row_idx=np.arange(5),
                        c=a, m=np.zeros((5, 5)), r=a[:5])
    assert relative_error(a, zero_m, "frobenius") == 1.0
    assert relative_error(a, zero_m, "spectral") == 1.0
    with pytest.raises(UndefinedRelativeError):
        relative_error(np.zeros((6, 5)), zero_m)


def test_relative_error_rank_twenty(rng):
    a = lowrank(rng, 60, 50, 20)
    res = cur_pair(a, a[:30], SketchPlan(k=20, p=5, seed=1))
    assert relative_error(a, res.a_factors) <= 1e-8


def test_column_selection_inequality(rng):
    for trial in range(10):
        a = rng.standard_normal((20, 16)) * np.logspace(0, -3, 16)
        b = rng.standard_normal((12, 16)) * np.logspace(0, -3, 16)
        sel = select_columns_pair(a, b, SketchPlan(k=4, p=2, seed=trial))
        for mat in (a, b):
            lhs, rhs = selection_sides(mat, sel.sketch, sel.col_idx)
            assert lhs <= rhs * (1 + 1e-8)


def test_pass_efficient_pair_inequality(rng):
    for trial in range(10):
        a = rng.standard_normal((20, 16)) * np.logspace(0, -3, 16)
        b = rng.standard_normal((12, 16)) * np.logspace(0, -3, 16)
        res, _ = cur_pair_pass_efficient(a, b, SketchPlan(k=4, p=2, seed=trial))
        x = res.sketches.matrices["X"]
        for mat, f, y in ((a, res.a_factors, "Y1"), (b, res.b_factors, "Y2")):
            lhs, rhs = pass_efficient_pair_sides(mat, f.approximation(), x, f.col_idx,
                                res.sketches.matrices[y], f.row_idx)
            assert lhs <= rhs * (1 + 1e-8)


def test_column_permutation_permutes_selection(rng):
    a = rng.standard_normal((14, 11)) * np.logspace(0, -2, 11)
    b = rng.standard_normal((9, 11)) * np.logspace(0, -2, 11)
    perm = rng.permutation(11)
    plan = SketchPlan(k=4, p=1, seed=6)
    base = select_columns_pair(a, b, plan).col_idx
    moved = select_columns_pair(a[:, perm], b[:, perm], plan).col_idx
    assert set(perm[moved]) == set(base)


def test_cpqr_backend_does_not_change_indices(rng, monkeypatch):
    if len(linalg.available_backends()) < 2:
        pytest.skip("compiled kernel not built")
    a, b = lowrank(rng, 30, 20, 5), lowrank(rng, 25, 20, 5)
    plan = SketchPlan(k=5, p=2, seed=3)
    out = []
    for be in linalg.available_backends():
        monkeypatch.setattr(linalg, "BACKEND", be)
        out.append(cur_pair(a, b, plan))
    assert np.array_equal(out[0].col_idx, out[1].col_idx)
    assert np.array_equal(out[0].a_factors.row_idx, out[1].a_factors.row_idx)
