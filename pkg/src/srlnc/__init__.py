"""Exact decoding probability of sparse random linear network coding,
with brute-force oracles and a Monte Carlo codec."""

from .analysis import (
    ProbExpr,
    RankDistribution,
    bkw_bound,
    full_rank_prob,
    full_rank_value,
    p_in,
    rank_dist_nested,
    rank_dist_partial_fraction,
    rlnc_closed_form,
    weight_measure,
)
from .field import FieldElement, FieldSpec, SparseDist, gf
from .linalg import FqMatrix
from .poly import RationalFn, RationalPoly

__all__ = [
    "FieldElement", "FieldSpec", "FqMatrix", "ProbExpr", "RankDistribution",
    "RationalFn", "RationalPoly", "SparseDist", "bkw_bound", "full_rank_prob",
    "full_rank_value", "gf", "p_in", "rank_dist_nested", "rank_dist_partial_fraction",
    "rlnc_closed_form", "weight_measure",
]
