"""Explicit lower and upper bounds on the strong errors, as closed formulas.

Every lower bound contains an integral ``int_0^U C (x + a)^{-3/2} dx`` which is
evaluated analytically as ``2 C (a^{-1/2} - (U + a)^{-1/2})``; ``U = inf`` drops
the second term.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError
from .spectral import UNBOUNDED, HeatModel, Modes, one_minus_exp

__all__ = [
    "BoundKind",
    "BoundPair",
    "smoothing_constant",
    "smoothing_bounds",
    "temporal_bounds",
    "spatial_bounds",
    "full_bounds",
]

PI = math.pi


class BoundKind(enum.Enum):
    SMOOTHING = "smoothing"
    TEMPORAL = "temporal"
    SPATIAL = "spatial"
    FULL = "full"


@dataclass(frozen=True)
class BoundPair:
    lower: float
    upper: float
    kind: BoundKind

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise AssertionError(f"invalid {self.kind.value} bounds {self.lower!r} > {self.upper!r}")

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def smoothing_constant(nu: float) -> float:
    """``1/(pi sqrt(nu)) + 1/(nu pi^2) + 4 pi sqrt(nu)``."""
    return 1 / (PI * math.sqrt(nu)) + 1 / (nu * PI**2) + 4 * PI * math.sqrt(nu)


def _inverse_sqrt_gap(a: float, U: float) -> float:
    """``a^{-1/2} - (U + a)^{-1/2}`` without cancellation for small ``U``."""
    if math.isinf(U):
        return 1 / math.sqrt(a)
    if U <= 0:
        return 0.0
    ra, rb = math.sqrt(a), math.sqrt(U + a)
    return U / (ra * rb * (ra + rb))


def _check_modes(N: Modes) -> None:
    if not (N == UNBOUNDED or (int(N) == N and N >= 1)):
        raise DomainError(f"N must be a positive integer or UNBOUNDED, got {N!r}")


def _check_steps(M: int) -> None:
    if int(M) != M or M < 1:
        raise DomainError(f"M must be a positive integer, got {M!r}")


def smoothing_bounds(model: HeatModel, N: Modes, t: float) -> BoundPair:
    """Bounds on ``|| P_N (-sqrt(t) A)^{-1/2} (I - e^{tA}) ||_HS`` for ``0 < t <= T``."""
    _check_modes(N)
    if t <= 0:
        raise DomainError(f"t must be positive, got {t!r}")
    nu, T = model.nu, model.horizon
    a = (1 + math.sqrt(T)) ** 2
    if N == UNBOUNDED:
        U, cap = math.inf, 1.0
    else:
        U = max(0.0, t * (N + 1) ** 2 - (1 + math.sqrt(t)) ** 2)
        cap = min(1.0, t * N * N)
    C = one_minus_exp(nu * PI**2 * cap) ** 2 / (2 * nu * PI**2)
    lower = math.sqrt(2 * C * _inverse_sqrt_gap(a, U))
    upper = math.sqrt(smoothing_constant(nu))
    return BoundPair(lower, upper, BoundKind.SMOOTHING)


def _temporal_lower_sq(model: HeatModel, M: int, N: Modes, denominator: float) -> float:
    nu, T = model.nu, model.horizon
    a = (1 + math.sqrt(T)) ** 2
    if N == UNBOUNDED:
        U, cap = math.inf, 1.0
    else:
        U = max(0.0, T * (N + 1) ** 2 / (2 * M) - (1 + math.sqrt(T) / math.sqrt(2 * M)) ** 2)
        cap = min(1.0, T * N * N / (2 * M))
    D = (
        math.sqrt(T)
        * one_minus_exp(nu * PI**2 * T)
        * one_minus_exp(nu * PI**2 * cap) ** 2
        / (denominator * nu * PI**2 * math.sqrt(2))
    )
    return 2 * D * _inverse_sqrt_gap(a, U)


def _temporal_upper(model: HeatModel, M: int) -> float:
    return M**-0.25 * math.sqrt(math.sqrt(model.horizon) / 2 * smoothing_constant(model.nu))


def temporal_bounds(model: HeatModel, M: int, N: Modes = UNBOUNDED) -> BoundPair:
    """Bounds on ``||P_N O_T - O^{M,N}_T||`` (lower) and its sup over ``[0, T]`` (upper)."""
    _check_steps(M)
    _check_modes(N)
    lower = M**-0.25 * math.sqrt(_temporal_lower_sq(model, M, N, 8.0))
    return BoundPair(lower, _temporal_upper(model, M), BoundKind.TEMPORAL)


def spatial_bounds(model: HeatModel, N: int) -> BoundPair:
    """Bounds on ``||O_T - P_N O_T||``, scaling exactly as ``N^{-1/2}``."""
    if N == UNBOUNDED:
        raise DomainError("spatial bounds need a finite number of modes")
    _check_modes(N)
    nu, T = model.nu, model.horizon
    lower = math.sqrt(one_minus_exp(2 * nu * PI**2 * T)) / (2 * PI * math.sqrt(nu)) / math.sqrt(N)
    upper = 1 / (PI * math.sqrt(2 * nu)) / math.sqrt(N)
    return BoundPair(lower, upper, BoundKind.SPATIAL)


def full_bounds(model: HeatModel, M: int, N: int) -> BoundPair:
    """Bounds on the full error ``||O_T - O^{M,N}_T||`` and its sup over time."""
    _check_steps(M)
    if N == UNBOUNDED:
        raise DomainError("full bounds need a finite number of modes")
    _check_modes(N)
    nu, T = model.nu, model.horizon
    temporal_lower = M**-0.25 * math.sqrt(_temporal_lower_sq(model, M, N, 32.0))
    spatial_lower = math.sqrt(one_minus_exp(nu * T)) / (4 * PI * math.sqrt(nu)) / math.sqrt(N)
    upper = _temporal_upper(model, M) + spatial_bounds(model, N).upper
    return BoundPair(temporal_lower + spatial_lower, upper, BoundKind.FULL)
