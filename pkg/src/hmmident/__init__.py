"""Identifiability of hidden Markov models via Kruskal rank of row tensor products."""

from .hmm import (
    ConvergenceError,
    EquivalenceResult,
    HmmParams,
    MultiHmmParams,
    QuasiHmm,
    build_W,
    build_W_multi,
    equivalent,
    quasi_sequence_prob,
    sequence_prob,
    sequence_prob_multi,
    stationary_distribution,
    validate,
)
from .identifiability import (
    ConstructionError,
    Verdict,
    check_minimality_necessary,
    construct_rank1_recombination,
    construct_state_inflation,
    verdict_heterogeneous,
    verdict_homogeneous,
    verdict_multi,
    verdict_nonstationary,
    verdict_single,
)
from .krank import KrankBound, KrankResult, krank, krank_bound_multi, krank_bound_row_tensor, krank_lower_coherence
from .matrix import DEFAULT_TOL, InputError, Tolerance, rank, rows_dependent, solve_left_factor
from .nstar import NStarBound, n_star, vandermonde_witness
from .tensor import LetterCodec, find_perm_scale, kron, row_tensor, row_tensor_multi

__all__ = [name for name in dir() if not name.startswith("_")]
