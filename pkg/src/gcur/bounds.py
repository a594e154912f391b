"""Closed-form expectation bounds for the randomized CUR algorithms.

All bounds combine two ingredients:

* ``projector_bound(n, k, p) = sqrt(1 + (n-k-p) 4^(k+p-1))``, a bound on the
  norm of ``I - P`` for the oblique projector built from the leading ``k+p``
  pivots of a CPQR;
* ``halko_deviation``, the expected residual of projecting a matrix onto the
  row space of a Gaussian sketch with ``k+p`` rows.

The projector factor grows like ``2^(k+p)`` and overflows double precision
near ``k+p = 512``; it is evaluated exactly (Python integers) when possible
and saturates to ``inf`` otherwise, flagged by ``BoundReport.saturated``.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from gcur._parallel import ordered_map
from gcur.errors import DomainError, InputError
from gcur.linalg import norm as matrix_norm
from gcur.linalg import singular_values

NORMS = ("spectral", "frobenius")


@dataclass(frozen=True)
class SpectrumSummary:
    sigma: np.ndarray
    k: int
    p: int

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=np.float64)
        if s.ndim != 1:
            raise InputError("sigma must be a vector")
        if (s < 0).any() or (np.diff(s) > 0).any():
            raise InputError("sigma must be nonnegative and non-increasing")
        object.__setattr__(self, "sigma", s)

    @classmethod
    def of(cls, a, k, p):
        return cls(singular_values(a), k, p)

    @property
    def next_sigma(self):
        """sigma_{k+1}, zero past the end of the spectrum."""
        return float(self.sigma[self.k]) if self.k < self.sigma.size else 0.0

    @property
    def tail(self):
        """(sum_{j>k} sigma_j^2)^(1/2)."""
        return float(np.sqrt(np.sum(self.sigma[self.k:] ** 2)))


@dataclass
class BoundReport:
    bound_value: float
    components: dict
    norm: str
    formula: str
    saturated: bool = False
    extra: dict = field(default_factory=dict)

    def recombine(self):
        """Re-evaluate ``formula`` from ``components``."""
        return _FORMULAS[self.formula](self.components)

    def to_dict(self):
        return {
            "bound_value": self.bound_value,
            "components": dict(self.components),
            "norm": self.norm,
            "formula": self.formula,
            "saturated": self.saturated,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


def _prod(x, y):
    # a zero tail gives a zero bound even when the projector factor saturated
    if x == 0.0 or y == 0.0:
        return 0.0
    return x * y


_FORMULAS = {
    "projector*deviation": lambda c: _prod(c["projector"], c["deviation"]),
    "2*alpha+projector_side*deviation_side":
        lambda c: 2.0 * c["alpha"] + _prod(c["projector_side"], c["deviation_side"]),
    "projector_n*beta+projector_m*theta":
        lambda c: _prod(c["projector_n"], c["beta"]) + _prod(c["projector_m"], c["theta"]),
    "projector_m*theta": lambda c: _prod(c["projector_m"], c["theta"]),
    "projector_n*beta": lambda c: _prod(c["projector_n"], c["beta"]),
}


def _check_kp(k, p):
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    if p < 2:
        raise DomainError(f"p must be at least 2 (the bounds divide by p-1), got {p}")


def projector_bound(n, k, p):
    """sqrt(1 + (n-k-p) * 4^(k+p-1)); ``inf`` if it exceeds double range."""
    n, k, p = int(n), int(k), int(p)
    if k + p < 1:
        raise DomainError("k + p must be at least 1")
    if n <= k + p:
        raise DomainError(f"projector bound needs n > k + p, got n={n}, k+p={k + p}")
    v = 1 + (n - k - p) * 4 ** (k + p - 1)
    try:
        return math.sqrt(v)
    except OverflowError:
        half_log = 0.5 * math.log(v)
        return math.exp(half_log) if half_log < 709.78 else math.inf


def log_projector_bound(n, k, p):
    """Natural log of :func:`projector_bound`, finite for any valid input."""
    n, k, p = int(n), int(k), int(p)
    if n <= k + p:
        raise DomainError(f"projector bound needs n > k + p, got n={n}, k+p={k + p}")
    return 0.5 * math.log(1 + (n - k - p) * 4 ** (k + p - 1))


def halko_deviation(spec, norm="spectral"):
    """Expected sketch residual ``E||A (I - X^+ X)||`` for ``X = omega @ A``.

    spectral: (1 + sqrt(k/(p-1))) sigma_{k+1} + e sqrt(k+p)/p * tail
    frobenius: (1 + k/(p-1))^(1/2) * tail
    """
    k, p = spec.k, spec.p
    _check_kp(k, p)
    tail = spec.tail
    if norm == "spectral":
        return (1.0 + math.sqrt(k / (p - 1))) * spec.next_sigma + math.e * math.sqrt(k + p) / p * tail
    if norm == "frobenius":
        return math.sqrt(1.0 + k / (p - 1)) * tail
    raise InputError(f"unknown norm {norm!r}")


def _report(formula, comps, norm):
    value = _FORMULAS[formula](comps)
    sat = any(math.isinf(v) for v in comps.values())
    return BoundReport(value, comps, norm, formula, saturated=sat)


def pair_bound_alg2(sigma_stack, n, norm="spectral"):
    """Bound on max(E||A - C_A M_A R_A||, E||B - C_B M_B R_B||) for the randomized pair CUR.

    ``sigma_stack`` summarises the spectrum of ``[A; B]``.
    """
    comps = {
        "projector": projector_bound(n, sigma_stack.k, sigma_stack.p),
        "deviation": halko_deviation(sigma_stack, norm),
    }
    return _report("projector*deviation", comps, norm)


def _spectral_only(norm):
    if norm != "spectral":
        raise InputError("this bound is only available in the spectral norm")


def pair_bound_alg3(sigma_stack, sigma_a, sigma_b, m, n, d, norm="spectral"):
    """Per-matrix spectral bounds for the pass-efficient pair CUR.

    alpha = projector_bound(n) * deviation([A; B]);
    A: 2 alpha + projector_bound(m) * deviation(A);
    B: 2 alpha + projector_bound(d) * deviation(B).
    """
    _spectral_only(norm)
    k, p = sigma_stack.k, sigma_stack.p
    proj_n = projector_bound(n, k, p)
    dev_stack = halko_deviation(sigma_stack, norm)
    alpha = _prod(proj_n, dev_stack)
    out = {}
    for label, spec, rows in (("A", sigma_a, m), ("B", sigma_b, d)):
        comps = {
            "alpha": alpha,
            "projector_n": proj_n,
            "deviation_stack": dev_stack,
            "projector_side": projector_bound(rows, spec.k, spec.p),
            "deviation_side": halko_deviation(spec, norm),
        }
        out[label] = _report("2*alpha+projector_side*deviation_side", comps, norm)
    return out


def triplet_bound_alg4(sigma_ag, sigma_ab, m, n, norm="spectral"):
    """Per-matrix spectral bounds for the randomized triplet CUR.

    beta = deviation([A; G]), theta = deviation([A, B]);
    A: projector_bound(n) beta + projector_bound(m) theta;
    B: projector_bound(m) theta;  G: projector_bound(n) beta.
    """
    _spectral_only(norm)
    proj_n = projector_bound(n, sigma_ag.k, sigma_ag.p)
    proj_m = projector_bound(m, sigma_ab.k, sigma_ab.p)
    beta = halko_deviation(sigma_ag, norm)
    theta = halko_deviation(sigma_ab, norm)
    return {
        "A": _report("projector_n*beta+projector_m*theta",
                     {"projector_n": proj_n, "beta": beta, "projector_m": proj_m, "theta": theta},
                     norm),
        "B": _report("projector_m*theta", {"projector_m": proj_m, "theta": theta}, norm),
        "G": _report("projector_n*beta", {"projector_n": proj_n, "beta": beta}, norm),
    }


def pair_bounds_for(a, b, k, p, norm="spectral"):
    """Evaluate both pair bounds from the matrices themselves."""
    m, n = a.shape
    d = b.shape[0]
    stack = SpectrumSummary.of(np.vstack([a, b]), k, p)
    out = {"alg2": pair_bound_alg2(stack, n, norm)}
    if norm == "spectral":
        out["alg3"] = pair_bound_alg3(stack, SpectrumSummary.of(a, k, p),
                                      SpectrumSummary.of(b, k, p), m, n, d)
    return out


def triplet_bounds_for(a, b, g, k, p):
    m, n = a.shape
    return triplet_bound_alg4(SpectrumSummary.of(np.vstack([a, g]), k, p),
                              SpectrumSummary.of(np.hstack([a, b]), k, p), m, n)


def mean_observed_errors(run, seeds, norm="spectral"):
    """Monte-Carlo driver: mean absolute error per matrix over ``seeds``.

    ``run(seed)`` must return ``{label: (source, CurFactors)}``.
    """
    def one(seed):
        out = {}
        for label, (src, fac) in run(seed).items():
            out[label] = matrix_norm(src - fac.approximation(), norm)
        return out

    rows = ordered_map(one, seeds)
    return {label: float(np.mean([r[label] for r in rows])) for label in rows[0]}
