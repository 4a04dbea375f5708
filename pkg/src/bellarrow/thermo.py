"""Entropy bookkeeping: Clausius heat sums, Boltzmann counts, radiative throughput."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from scipy.constants import Boltzmann as K_B

from .errors import ValidationError

EXACT_BINOMIAL_MAX_N = 60


@dataclass(frozen=True)
class HeatStep:
    """Heat ``Q`` (J, positive when entering the system) exchanged at temperature ``T`` (K)."""

    Q: float
    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise ValidationError(f"temperature must be positive, got {self.T!r} K")


def clausius_delta_s(steps: Iterable[HeatStep | tuple[float, float]]) -> float:
    """Sum of ``Q_k / T_k`` in J/K."""
    total = 0.0
    for s in steps:
        if not isinstance(s, HeatStep):
            s = HeatStep(*s)
        total += s.Q / s.T
    return total


def contact_delta_s(q: float, t_hot: float, t_cold: float) -> float:
    """Entropy produced when heat ``q`` flows from a hot body to a cold one."""
    if q < 0:
        raise ValidationError("transferred heat must be nonnegative")
    if not t_hot >= t_cold > 0:
        raise ValidationError(f"need T_hot >= T_cold > 0, got T_hot={t_hot!r}, T_cold={t_cold!r}")
    return q / t_cold - q / t_hot


def boltzmann_entropy(n_microstates: int, k_b: float = 1.0) -> float:
    """``k_b * ln N``; pass ``k_b=K_B`` for SI units."""
    if n_microstates < 1:
        raise ValidationError("microstate count must be >= 1")
    return k_b * math.log(n_microstates)


def box_entropy(n: int, j: int) -> float:
    """``ln C(n, j)``: entropy over ``k_B`` with ``j`` of ``n`` molecules on the left."""
    if not 0 <= j <= n:
        raise ValidationError(f"need 0 <= j <= n, got j={j}, n={n}")
    if n <= EXACT_BINOMIAL_MAX_N:
        return math.log(math.comb(n, j))
    return math.lgamma(n + 1) - math.lgamma(j + 1) - math.lgamma(n - j + 1)


def max_box_entropy(n: int) -> float:
    return box_entropy(n, n // 2)


def earth_entropy_rate(power: float, t_in: float, t_out: float) -> float:
    """Entropy production (W/K) of absorbing ``power`` at ``t_in`` and re-emitting it at ``t_out``."""
    if not (power > 0 and t_in > 0 and t_out > 0):
        raise ValidationError("power and temperatures must be positive")
    return power / t_out - power / t_in
