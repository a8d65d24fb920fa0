"""Sparse SYK moments: Pauli-string algebra, pairing oracles, q-Fock operators, Monte Carlo."""
from .majorana import MajoranaRep, MultiIndex, PauliString, index_set, majorana, psi_R, trace_word
from .partitions import PairPartition, SetPartition, crossings, pair_partitions
from .qfock import cauchy_continued_fraction, vacuum_moment
from .qmoments import (
    BudgetExceeded,
    FiniteModel,
    FluctuationSpec,
    exact_finite_n_moment,
    exact_finite_n_process_moment,
    fluctuation_limit,
    q_brownian_moment,
    q_from_model,
    q_wick_moment,
    s_pi,
    s_pi_restricted,
)
from .sykmc import EstimatorConfig, mc_fluctuation, mc_moment, mc_process_moment

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "EstimatorConfig", "FiniteModel", "FluctuationSpec", "MajoranaRep",
    "MultiIndex", "PairPartition", "PauliString", "SetPartition", "cauchy_continued_fraction",
    "crossings", "exact_finite_n_moment", "exact_finite_n_process_moment", "fluctuation_limit",
    "index_set", "majorana", "mc_fluctuation", "mc_moment", "mc_process_moment",
    "pair_partitions", "psi_R", "q_brownian_moment", "q_from_model", "q_wick_moment", "s_pi",
    "s_pi_restricted", "trace_word", "vacuum_moment",
]
