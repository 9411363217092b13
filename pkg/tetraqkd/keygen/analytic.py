from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import expit, xlogy

from tetraqkd.channel.information import LN2, binary_entropy
from tetraqkd.channel.source import NoiseParameter, accessible_info_ab, noise_value
from tetraqkd.qmath.checks import SCALAR_TOL, InvariantViolation

N_MAX_DEFAULT = 5
# Stand-in for the infinite series; terms beyond it are below 1e-4 bit.
N_ASYMPTOTIC = 12


def _require_iteration(n: int) -> None:
    if n < 1:
        raise ValueError(f"iteration index must be >= 1, got {n}")


def noise_recursion(eps: float | NoiseParameter) -> float:
    """ε′ with 3ε′/(4 − ε′) = (3ε/(4 − ε))²."""
    e = noise_value(eps)
    x = 3.0 * e / (4.0 - e)
    return 4.0 * x * x / (3.0 + x * x)


def effective_noise(eps: float | NoiseParameter, n: int) -> float:
    _require_iteration(n)
    e = noise_value(eps)
    for _ in range(n - 1):
        e = noise_recursion(e)
    return e


def pair_success(eps_n: float) -> float:
    """q = (4 − ε)(2 + ε)/12, chance that Bob's two letters differ."""
    return (4.0 - eps_n) * (2.0 + eps_n) / 12.0


def p_err_closed_form(eps: float | NoiseParameter, n: int) -> float:
    """[1 + ((4 − ε)/(3ε))^(2^(n−1))]^(−1), evaluated in log space."""
    _require_iteration(n)
    e = noise_value(eps)
    if e == 0.0:
        return 0.0
    return float(expit(-(2.0 ** (n - 1)) * np.log((4.0 - e) / (3.0 * e))))


def i_key(p_err: float) -> float:
    """1 − H(p_err) in bits."""
    if not 0.0 <= p_err <= 1.0:
        raise ValueError(f"error rate {p_err} outside [0, 1]")
    return 1.0 - binary_entropy(p_err)


@dataclass(frozen=True)
class IterationStats:
    n: int
    eps_n: float
    q_n: float
    p_succ_n: float
    p_err_n: float
    i_ab_n: float

    def to_row(self) -> dict[str, float]:
        return asdict(self)


def iteration_table(eps: float | NoiseParameter, n_max: int) -> list[IterationStats]:
    """Stats for iterations 1..n_max in one pass of the recursion."""
    _require_iteration(n_max)
    e0 = noise_value(eps)
    rows = []
    eps_n, survival = e0, 1.0
    for n in range(1, n_max + 1):
        q = pair_success(eps_n)
        p_err = 3.0 * eps_n / (4.0 + 2.0 * eps_n)
        closed = p_err_closed_form(e0, n)
        if abs(p_err - closed) > SCALAR_TOL:
            raise InvariantViolation(
                f"p_err recursion {p_err!r} and closed form {closed!r} disagree at n = {n}"
            )
        p_succ = q * survival
        rows.append(IterationStats(n, eps_n, q, p_succ, p_err, 2.0**-n * p_succ * i_key(p_err)))
        survival *= 1.0 - q
        eps_n = noise_recursion(eps_n)
    return rows


def iteration_probabilities(eps: float | NoiseParameter, n: int) -> IterationStats:
    _require_iteration(n)
    return iteration_table(eps, n)[-1]


def i_ab_n(eps: float | NoiseParameter, n: int) -> float:
    """2^(−n)·p_succ^(n)·I_key(p_err^(n)) bits per transmitted pair."""
    return iteration_probabilities(eps, n).i_ab_n


def i_ab_total(eps: float | NoiseParameter, n_max: int = N_MAX_DEFAULT) -> float:
    return float(sum(row.i_ab_n for row in iteration_table(eps, n_max)))


def i_ab_tail_bound(eps: float | NoiseParameter, n_max: int) -> float:
    """Upper bound 2^(−n_max)·Π_{m≤n_max}(1 − q^(m)) on Σ_{n>n_max} i_ab_n."""
    rows = iteration_table(eps, n_max)
    return 2.0**-n_max * float(np.prod([1.0 - r.q_n for r in rows]))


def i_ab_first_closed_form(eps: float | NoiseParameter) -> float:
    """Expanded first-iteration information, independent of the factored route."""
    e = noise_value(eps)
    wrong = xlogy(e * (4.0 - e) / 16.0, 3.0 * e / (4.0 + 2.0 * e))
    right = (4.0 - e) ** 2 / 48.0 * np.log((4.0 - e) / (4.0 + 2.0 * e))
    return float((4.0 - e) * (2.0 + e) / 24.0 + (wrong + right) / LN2)


def efficiency_ratio(n_max: int = N_ASYMPTOTIC) -> float:
    """Noiseless key bits per pair relative to the accessible information log₂(4/3)."""
    return i_ab_total(0.0, n_max) / accessible_info_ab(0.0)
