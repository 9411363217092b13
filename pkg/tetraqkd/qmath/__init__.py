from .checks import EIGEN_FLOOR, OPERATOR_TOL, SCALAR_TOL, InvariantViolation
from .operators import (
    DensityOperator,
    Povm,
    PureState,
    born_joint,
    min_eigenvalue,
    normalized,
    partial_trace,
    pauli_dot,
)
from .tables import LETTERS, JointTable, tetrahedron_table
from .tetrahedron import (
    SINGLET,
    BlochVector,
    TetraStates,
    expand_identity,
    label_permutation_unitary,
    povm_from_vectors,
    singlet_from_tetra,
    spin_flip,
    tetra_states,
    tetrahedron_vectors,
    werner_identity_check,
)

__all__ = [
    "EIGEN_FLOOR",
    "LETTERS",
    "OPERATOR_TOL",
    "SCALAR_TOL",
    "SINGLET",
    "BlochVector",
    "DensityOperator",
    "InvariantViolation",
    "JointTable",
    "Povm",
    "PureState",
    "TetraStates",
    "born_joint",
    "expand_identity",
    "label_permutation_unitary",
    "min_eigenvalue",
    "normalized",
    "partial_trace",
    "pauli_dot",
    "povm_from_vectors",
    "singlet_from_tetra",
    "spin_flip",
    "tetra_states",
    "tetrahedron_table",
    "tetrahedron_vectors",
    "werner_identity_check",
]
