"""Explicit-projector evaluation of the deterministic error inequalities.

Everything here is built from dense identity/selection matrices and numpy's
own ``pinv``/``norm`` so it stays independent of the code under test.
"""
import numpy as np


def spec(a):
    return np.linalg.norm(a, 2)


def sel(n, idx):
    e = np.zeros((n, len(idx)))
    e[np.asarray(idx), np.arange(len(idx))] = 1.0
    return e


def col_projector(x, j):
    """P = Pi_C (X Pi_C)^{-1} X on the row space of the sketch X."""
    pc = sel(x.shape[1], j)
    return pc @ np.linalg.solve(x @ pc, x)


def row_projector(y, i):
    """P = Y (Pi^T Y)^{-1} Pi^T for a column sketch Y."""
    pr = sel(y.shape[0], i)
    return y @ np.linalg.solve(pr.T @ y, pr.T)


def col_term(a, x, j):
    n = a.shape[1]
    proj = col_projector(x, j)
    return spec(np.eye(n) - proj) * spec(a @ (np.eye(n) - np.linalg.pinv(x) @ x))


def row_term(a, y, i):
    m = a.shape[0]
    proj = row_projector(y, i)
    return spec(np.eye(m) - proj) * spec((np.eye(m) - y @ np.linalg.pinv(y)) @ a)


def selection_sides(a, x, j):
    """(||A - C C^+ A||, ||I-P|| ||A(I - X^+X)||)."""
    c = a[:, j]
    lhs = spec(a - c @ np.linalg.pinv(c) @ a)
    return lhs, col_term(a, x, j)


def pass_efficient_pair_sides(a, approx, x, j, y, i):
    lhs = spec(a - approx)
    return lhs, 2 * col_term(a, x, j) + row_term(a, y, i)


def triplet_sides(a, b, g, fa, fb, fg, x1, y3):
    """Three (lhs, rhs) pairs for A, B, G."""
    j, i = fa.col_idx, fa.row_idx
    out = {
        "A": (spec(a - fa.approximation()), col_term(a, x1, j) + row_term(a, y3, i)),
        "B": (spec(b - fb.approximation()), row_term(b, y3, i)),
        "G": (spec(g - fg.approximation()), col_term(g, x1, j)),
    }
    return out
