from tetraqkd.qmath.tables import JointTable

from .information import MIEstimate, binary_entropy, empirical_mi, mutual_information
from .source import (
    NoiseParameter,
    ReconstructionReport,
    accessible_info_ab,
    accessible_info_gain_over_six_state,
    bob_pair_table,
    born_table_ab,
    is_entangled,
    joint_probs_ab,
    reconstruct_state,
    reconstruction_report,
    rho_ab,
)

__all__ = [
    "JointTable",
    "MIEstimate",
    "NoiseParameter",
    "ReconstructionReport",
    "accessible_info_ab",
    "accessible_info_gain_over_six_state",
    "binary_entropy",
    "bob_pair_table",
    "born_table_ab",
    "empirical_mi",
    "is_entangled",
    "joint_probs_ab",
    "mutual_information",
    "reconstruct_state",
    "reconstruction_report",
    "rho_ab",
]
