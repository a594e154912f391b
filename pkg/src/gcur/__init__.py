"""Randomized CPQR-based generalized CUR decompositions.

Matrix pairs ``(A, B)`` share selected columns; matrix triplets
``(A, B, G)`` share columns between ``A`` and ``G`` and rows between ``A``
and ``B``. Each comes in an in-memory randomized variant and a
pass-efficient variant that reads the data twice (once if only indices are
needed).
"""
from gcur.bounds import (BoundReport, SpectrumSummary, halko_deviation, pair_bound_alg2,
                         pair_bound_alg3, projector_bound, triplet_bound_alg4)
from gcur.errors import (DegenerateInputError, DimensionMismatchError, DomainError, GcurError,
                         InputError, MatrixMarketError, NumericalError, RankDeficientFactor,
                         RankDeficientSketch, SingularCoreError, UndefinedRelativeError)
from gcur.experiments import (ExperimentConfig, RunRecord, generate_lowrank_pair,
                              generate_lowrank_triplet, run_experiment)
from gcur.factors import CurFactors, PassReport, relative_error
from gcur.linalg import (BACKEND, CpqrResult, cpqr, frobenius_norm, oblique_projector, pinv,
                         singular_values, spectral_norm)
from gcur.mmio import MatrixMarketSource, read_matrix_market, write_matrix_market
from gcur.pair import PairCur, cur_pair, cur_pair_pass_efficient, select_columns_pair
from gcur.sketch import (ArraySource, MatrixSource, SketchPlan, StackedSource, gaussian,
                         sketch_cols, sketch_rows)
from gcur.triplet import TripletCur, cur_triplet, cur_triplet_pass_efficient

__version__ = "0.1.0"

__all__ = [
    "ArraySource", "BACKEND", "BoundReport", "CpqrResult", "CurFactors", "DegenerateInputError",
    "DimensionMismatchError", "DomainError", "ExperimentConfig", "GcurError", "InputError",
    "MatrixMarketError", "MatrixMarketSource", "MatrixSource", "NumericalError", "PairCur",
    "PassReport", "RankDeficientFactor", "RankDeficientSketch", "RunRecord", "SingularCoreError",
    "SketchPlan", "SpectrumSummary", "StackedSource", "TripletCur", "UndefinedRelativeError",
    "cpqr", "cur_pair", "cur_pair_pass_efficient", "cur_triplet", "cur_triplet_pass_efficient",
    "frobenius_norm", "gaussian", "generate_lowrank_pair", "generate_lowrank_triplet",
    "halko_deviation", "oblique_projector", "pair_bound_alg2", "pair_bound_alg3", "pinv",
    "projector_bound", "read_matrix_market", "relative_error", "run_experiment",
    "select_columns_pair", "singular_values", "sketch_cols", "sketch_rows", "spectral_norm",
    "triplet_bound_alg4", "write_matrix_market",
]
