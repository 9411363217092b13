from .eavesdropper import (
    DEFAULT_GROUPING,
    MAX_EXACT_ITERATION,
    CountVector,
    EnumerationTooLarge,
    SequenceProbabilities,
    alice_eve_key_table,
    bit_information,
    compositions,
    eve_sequence_probs,
    i_ae_1,
    i_ae_n,
    i_ae_per_iteration,
    i_ae_total,
    key_table_classes,
    log_multinomial,
)
from .yields import (
    SIX_STATE_REFERENCE_THRESHOLD,
    ThresholdNotBracketed,
    YieldReport,
    ck_yield,
    six_state_iab,
    six_state_threshold,
    threshold,
    yield_curves,
)

__all__ = [
    "DEFAULT_GROUPING",
    "MAX_EXACT_ITERATION",
    "SIX_STATE_REFERENCE_THRESHOLD",
    "CountVector",
    "EnumerationTooLarge",
    "SequenceProbabilities",
    "ThresholdNotBracketed",
    "YieldReport",
    "alice_eve_key_table",
    "bit_information",
    "ck_yield",
    "compositions",
    "eve_sequence_probs",
    "i_ae_1",
    "i_ae_n",
    "i_ae_per_iteration",
    "i_ae_total",
    "key_table_classes",
    "log_multinomial",
    "six_state_iab",
    "six_state_threshold",
    "threshold",
    "yield_curves",
]
