from .measurement import (
    FIFTH_LABEL,
    MuOptimum,
    alice_eve_born_table,
    alice_eve_joint,
    alice_eve_mutual_information,
    alice_eve_table_from_ancillas,
    eta,
    eve_povm4,
    eve_povm5,
    five_member_boundary,
    optimize_mu,
)
from .purification import (
    EveAncillaSet,
    PurificationParams,
    bob_conditional_ancilla,
    conditional_ancilla,
    conditional_ancilla_closed_form,
    conditional_ancillas,
    eve_components,
    gram_law,
    permuted_ancilla,
    purification,
)

__all__ = [
    "FIFTH_LABEL",
    "EveAncillaSet",
    "MuOptimum",
    "PurificationParams",
    "alice_eve_born_table",
    "alice_eve_joint",
    "alice_eve_mutual_information",
    "alice_eve_table_from_ancillas",
    "bob_conditional_ancilla",
    "conditional_ancilla",
    "conditional_ancilla_closed_form",
    "conditional_ancillas",
    "eta",
    "eve_components",
    "eve_povm4",
    "eve_povm5",
    "five_member_boundary",
    "gram_law",
    "optimize_mu",
    "permuted_ancilla",
    "purification",
]
