from .analytic import (
    N_ASYMPTOTIC,
    N_MAX_DEFAULT,
    IterationStats,
    effective_noise,
    efficiency_ratio,
    i_ab_first_closed_form,
    i_ab_n,
    i_ab_tail_bound,
    i_ab_total,
    i_key,
    iteration_probabilities,
    iteration_table,
    noise_recursion,
    p_err_closed_form,
    pair_success,
)
from .protocol import IterationReport, eve_view, run_protocol, run_sifting
from .sifting import (
    PARTITIONS,
    AnnouncementTranscript,
    FirstRoundOdds,
    LetterSequence,
    RoundAccounting,
    SiftResult,
    enumerate_first_round,
    key_bits,
    sift_round,
)

__all__ = [
    "N_ASYMPTOTIC",
    "N_MAX_DEFAULT",
    "PARTITIONS",
    "AnnouncementTranscript",
    "FirstRoundOdds",
    "IterationReport",
    "IterationStats",
    "LetterSequence",
    "RoundAccounting",
    "SiftResult",
    "effective_noise",
    "efficiency_ratio",
    "enumerate_first_round",
    "eve_view",
    "i_ab_first_closed_form",
    "i_ab_n",
    "i_ab_tail_bound",
    "i_ab_total",
    "i_key",
    "iteration_probabilities",
    "iteration_table",
    "key_bits",
    "noise_recursion",
    "p_err_closed_form",
    "pair_success",
    "run_protocol",
    "run_sifting",
    "sift_round",
]
