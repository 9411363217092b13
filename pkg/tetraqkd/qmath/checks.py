from __future__ import annotations

import numpy as np

# Operator identities (completeness, reconstruction, purification consistency).
OPERATOR_TOL = 1e-10
# Scalar identities (norms, traces, closed-form vs recursive probabilities).
SCALAR_TOL = 1e-12
# Smallest eigenvalue still accepted as positive semidefinite.
EIGEN_FLOOR = -1e-10


class InvariantViolation(ArithmeticError):
    """A numerical contract was breached. Always an implementation bug."""


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def require_close(actual, expected, tol: float, what: str) -> None:
    gap = max_abs(np.asarray(actual) - np.asarray(expected))
    if not gap <= tol:
        raise InvariantViolation(f"{what}: deviation {gap:.3e} exceeds {tol:.0e}")


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0
