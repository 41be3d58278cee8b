"""Closed-form mean-square errors of the spectral Galerkin / exponential Euler scheme.

By Ito's isometry every error below is a deterministic mode series.  For the
temporal error the per-step integrals over one mode form a geometric series in
the step index, so each mode costs O(1) regardless of ``M``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .spectral import (
    DEFAULT_TOL,
    UNBOUNDED,
    GridSpec,
    HeatModel,
    Modes,
    grid_index,
    mode_sum,
    one_minus_exp,
    step_error_factor,
)

__all__ = [
    "Provenance",
    "ErrorKind",
    "Discretization",
    "ErrorValue",
    "mode_interval_integral",
    "temporal_mode_error",
    "projected_temporal_error_sq",
    "spatial_error_sq",
    "spatial_band_error_sq",
    "total_error_sq",
    "smoothing_hs_exact",
    "sup_error",
]

# |per-mode temporal error - 1/(2 mu)| <= _TEMPORAL_CONST * exp(-mu m) / mu,
# m = min(h, r) (r > 0) or h (r = 0); the constant bounds 1/2 + 2(2 + 1/e) + 2 + 1/e.
_TEMPORAL_CONST = 8.0


class Provenance(enum.Enum):
    EXACT = "exact"
    MONTE_CARLO = "mc"


class ErrorKind(enum.Enum):
    PROJECTED_TEMPORAL = "temporal"
    SPATIAL = "spatial"
    TOTAL = "total"


@dataclass(frozen=True)
class Discretization:
    """``M`` time steps, ``N`` Galerkin modes (or :data:`UNBOUNDED`)."""

    temporal_steps: int
    spatial_modes: Modes = UNBOUNDED
    truncation_tol: float = DEFAULT_TOL

    def __post_init__(self):
        M, N = self.temporal_steps, self.spatial_modes
        if int(M) != M or M < 1:
            raise DomainError(f"temporal_steps must be a positive integer, got {M!r}")
        if not (N == UNBOUNDED or (int(N) == N and N >= 1)):
            raise DomainError(f"spatial_modes must be >= 1 or UNBOUNDED, got {N!r}")
        if not self.truncation_tol > 0:
            raise DomainError("truncation_tol must be positive")
        object.__setattr__(self, "temporal_steps", int(M))
        if N != UNBOUNDED:
            object.__setattr__(self, "spatial_modes", int(N))

    @property
    def bounded(self) -> bool:
        return self.spatial_modes != UNBOUNDED


@dataclass(frozen=True)
class ErrorValue:
    """A mean-square error, in squared and root form."""

    squared: float
    root: float
    provenance: Provenance = Provenance.EXACT
    ci_halfwidth: float = 0.0

    @classmethod
    def exact(cls, squared: float) -> "ErrorValue":
        squared = max(float(squared), 0.0)
        return cls(squared, math.sqrt(squared))

    @classmethod
    def monte_carlo(cls, mean: float, ci_halfwidth: float) -> "ErrorValue":
        return cls(float(mean), math.sqrt(max(mean, 0.0)), Provenance.MONTE_CARLO, ci_halfwidth)


def mode_interval_integral(mu: float, tau: float, h: float) -> float:
    """``int_0^h exp(-2 mu (tau - u)) (1 - exp(-mu u))^2 du`` for ``0 <= h <= tau``.

    Evaluated as ``h G(mu h) exp(-2 mu (tau - h))`` (see
    :func:`~stochheat.spectral.step_error_factor`), so all exponents are
    nonpositive and small ``mu h`` does not cancel.
    """
    if mu < 0 or tau < 0 or h < 0:
        raise DomainError("mu, tau and h must be nonnegative")
    if h > tau:
        raise DomainError(f"interval length h={h!r} exceeds tau={tau!r}")
    if h == 0 or mu == 0:
        return 0.0
    return h * step_error_factor(mu * h) * math.exp(-2 * mu * (tau - h))


def temporal_mode_error(mu, h: float, full_steps: int, remainder: float):
    """Per-mode ``E|<e_k, P_N O_t - O^{M,N}_t>|^2`` at ``t = full_steps h + remainder``.

    Vectorized over ``mu``.  The full-step contributions sum the geometric
    series ``sum_j exp(-2 mu (t - t_{j+1}))`` in closed form.
    """
    mu = np.asarray(mu, dtype=np.float64)
    out = np.zeros_like(mu)
    if full_steps > 0:
        ratio = np.expm1(-2 * mu * full_steps * h) / np.expm1(-2 * mu * h)
        out += h * step_error_factor(mu * h) * np.exp(-2 * mu * remainder) * ratio
    if remainder > 0:
        out += remainder * step_error_factor(mu * remainder)
    return out


def _check_time(model: HeatModel, t: float) -> float:
    T = model.horizon
    if t < 0 or t > T * (1 + 4 * np.finfo(float).eps):
        raise DomainError(f"t={t!r} outside [0, {T!r}]")
    return min(t, T)


def _split_time(model: HeatModel, M: int, t: float) -> tuple[float, int, float]:
    grid = GridSpec.from_model(model, M)
    k, on_grid = grid_index(grid, t)
    k = min(k, M)
    r = 0.0 if on_grid else max(t - k * grid.step_size, 0.0)
    return grid.step_size, k, r


def projected_temporal_error_sq(
    model: HeatModel, disc: Discretization, t: float
) -> ErrorValue:
    """``E ||P_N O_t - O^{M,N}_t||^2`` (Galerkin-projected temporal error)."""
    t = _check_time(model, t)
    if t == 0:
        return ErrorValue.exact(0.0)
    h, J, r = _split_time(model, disc.temporal_steps, t)
    if r == 0:
        rate = h
    elif J == 0:
        rate = r
    else:
        rate = min(h, r)
    value = mode_sum(
        model,
        1,
        disc.spatial_modes,
        lambda mu: temporal_mode_error(mu, h, J, r),
        rate=rate,
        const=_TEMPORAL_CONST,
        tol=disc.truncation_tol,
    )
    return ErrorValue.exact(value)


def spatial_band_error_sq(
    model: HeatModel, N: int, K: Modes, t: float, tol: float = DEFAULT_TOL
) -> float:
    """``E ||P_K O_t - P_N O_t||^2 = sum_{N < k <= K} (1 - exp(-2 mu_k t)) / (2 mu_k)``."""
    t = _check_time(model, t)
    if t == 0:
        return 0.0

    def terms(mu):
        return one_minus_exp(2 * mu * t) / (2 * mu)

    return mode_sum(model, N + 1, K, terms, rate=2 * t, const=0.5, tol=tol)


def spatial_error_sq(
    model: HeatModel, N: int, t: float, tol: float = DEFAULT_TOL
) -> ErrorValue:
    """``E ||O_t - P_N O_t||^2``, the Galerkin truncation error."""
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    return ErrorValue.exact(spatial_band_error_sq(model, int(N), UNBOUNDED, t, tol))


def total_error_sq(model: HeatModel, disc: Discretization, t: float) -> ErrorValue:
    """``E ||O_t - O^{M,N}_t||^2``; spatial and temporal parts are orthogonal."""
    if not disc.bounded:
        raise DomainError("total error requires a finite number of spatial modes")
    spatial = spatial_error_sq(model, disc.spatial_modes, t, disc.truncation_tol)
    temporal = projected_temporal_error_sq(model, disc, t)
    return ErrorValue.exact(spatial.squared + temporal.squared)


def smoothing_hs_exact(
    model: HeatModel, N: Modes, t: float, tol: float = DEFAULT_TOL
) -> float:
    """``|| P_N (-sqrt(t) A)^{-1/2} (I - e^{tA}) ||_HS`` for ``t > 0``."""
    if t <= 0:
        raise DomainError(f"t must be positive, got {t!r}")
    scale = 2.0 / math.sqrt(t)

    def terms(mu):
        return one_minus_exp(mu * t) ** 2 / (2 * mu)

    total = mode_sum(model, 1, N, terms, rate=t, const=1.5, tol=tol / scale)
    return math.sqrt(scale * total)


def _evaluate(model: HeatModel, disc: Discretization, kind: ErrorKind, t: float) -> float:
    if kind is ErrorKind.PROJECTED_TEMPORAL:
        return projected_temporal_error_sq(model, disc, t).squared
    if kind is ErrorKind.SPATIAL:
        if not disc.bounded:
            raise DomainError("spatial error requires a finite number of spatial modes")
        return spatial_error_sq(model, disc.spatial_modes, t, disc.truncation_tol).squared
    return total_error_sq(model, disc, t).squared


def sup_error(
    model: HeatModel,
    disc: Discretization,
    kind: ErrorKind = ErrorKind.PROJECTED_TEMPORAL,
    refine: int = 16,
) -> tuple[ErrorValue, float]:
    """Maximum squared error over the times ``j T / (M refine)``, with its argmax.

    For a fixed offset inside a step, every error kind is nondecreasing in the
    step index (temporal: the geometric factor grows; spatial: monotone in t),
    so the maximum over the whole candidate grid is attained on the last step
    and only the ``refine + 1`` candidates there are evaluated.  Ties resolve
    to the latest time.
    """
    if int(refine) != refine or refine < 1:
        raise DomainError(f"refine must be a positive integer, got {refine!r}")
    M, T = disc.temporal_steps, model.horizon
    total = M * refine
    best, argmax = -1.0, 0.0
    for j in range((M - 1) * refine, total + 1):
        t = T if j == total else j * T / total
        value = _evaluate(model, disc, kind, t)
        if value >= best:
            best, argmax = value, t
    if kind is ErrorKind.SPATIAL and argmax != T:
        raise AssertionError(f"spatial error sup found at t={argmax!r}, expected T")
    return ErrorValue.exact(best), argmax
