"""Scalar toolbox for the Dirichlet heat operator on the unit interval.

Everything lives in the sine eigenbasis ``e_n = sqrt(2) sin(n pi x)``, on which
the operator ``A = nu * Laplacian`` acts diagonally with eigenvalue
``-mu_n = -nu pi^2 n^2``.  Functions in this module are pure and thread-safe.

Mode sums over an unbounded index range are evaluated by explicit summation up
to a cutoff ``K`` found by doubling, followed by an analytic closure of the
tail.  Most quantities in this package have per-mode terms of the shape
``1/(2 mu) + eps(mu)`` with ``|eps(mu)| <= c exp(-rate * mu) / mu``; the
``1/(2 mu)`` part of the tail is summed exactly through the trigamma function
and only the exponentially small remainder is truncated.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.special import polygamma

from .errors import DomainError, NonSummableError, TruncationError

__all__ = [
    "UNBOUNDED",
    "DEFAULT_TOL",
    "HeatModel",
    "GridSpec",
    "one_minus_exp",
    "eigenvalue",
    "eigenvalues",
    "semigroup_factor",
    "grid_floor",
    "grid_ceil",
    "grid_index",
    "step_error_factor",
    "conditional_variance_factor",
    "mode_sum",
    "hs_diff_sq",
]

#: Distinguished value for "no spatial truncation" (N = infinity).
UNBOUNDED = math.inf

#: Default absolute tolerance on squared-error quantities.
DEFAULT_TOL = 1e-12

K_START = 64
K_MAX = 2**26
_CHUNK = 2**20

Modes = Union[int, float]


@dataclass(frozen=True)
class HeatModel:
    """Viscosity ``nu`` and time horizon ``T`` of ``dX = nu X_xx dt + dW``."""

    nu: float = 1.0
    horizon: float = 1.0

    def __post_init__(self):
        for name in ("nu", "horizon"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")
        object.__setattr__(self, "nu", float(self.nu))
        object.__setattr__(self, "horizon", float(self.horizon))

    @property
    def mu1(self) -> float:
        """Smallest eigenvalue ``nu pi^2``."""
        return self.nu * math.pi**2


@dataclass(frozen=True)
class GridSpec:
    """Uniform time grid with ``steps`` intervals of length ``step_size``."""

    steps: int
    step_size: float

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise DomainError(f"steps must be a positive integer, got {self.steps!r}")
        if not (math.isfinite(self.step_size) and self.step_size > 0):
            raise DomainError(f"step_size must be positive, got {self.step_size!r}")

    @classmethod
    def from_model(cls, model: HeatModel, steps: int) -> "GridSpec":
        if int(steps) != steps or steps < 1:
            raise DomainError(f"steps must be a positive integer, got {steps!r}")
        return cls(int(steps), model.horizon / steps)

    def time(self, j: int) -> float:
        return j * self.step_size


def one_minus_exp(x):
    """``1 - exp(-x)`` without cancellation for small ``x``."""
    return -np.expm1(np.negative(x)) if isinstance(x, np.ndarray) else -math.expm1(-x)


def eigenvalue(model: HeatModel, n: int) -> float:
    """Return ``mu_n = nu pi^2 n^2`` (modes are indexed from 1)."""
    if int(n) != n or n < 1:
        raise DomainError(f"mode index must be a positive integer, got {n!r}")
    return model.nu * math.pi**2 * float(n) ** 2


def eigenvalues(model: HeatModel, first: int, last: int) -> np.ndarray:
    """Eigenvalues ``mu_k`` for ``first <= k <= last`` as a float array."""
    k = np.arange(first, last + 1, dtype=np.float64)
    return model.nu * math.pi**2 * k * k


def semigroup_factor(model: HeatModel, n: int, t: float) -> float:
    """Mode action ``exp(-mu_n t)`` of the semigroup; underflows to 0 for huge ``t``."""
    if t < 0:
        raise DomainError(f"t must be nonnegative, got {t!r}")
    return math.exp(-eigenvalue(model, n) * t)


def grid_index(grid: GridSpec, t: float) -> tuple[int, bool]:
    """Return ``(k, on_grid)`` with ``k h`` the grid floor of ``t``.

    Times within 4 ulp of a grid point are treated as lying on it, because
    ``T / M`` is generally not representable.
    """
    h = grid.step_size
    k = math.floor(t / h)
    slack = 4 * math.ulp(max(abs(t), h))
    if abs(t - (k + 1) * h) <= slack:
        return k + 1, True
    if abs(t - k * h) <= slack:
        return k, True
    return k, False


def grid_floor(grid: GridSpec, t: float) -> float:
    """Largest multiple of the step size not exceeding ``t`` (defined on all of R)."""
    k, _ = grid_index(grid, t)
    return k * grid.step_size


def grid_ceil(grid: GridSpec, t: float) -> float:
    """Smallest multiple of the step size not below ``t``."""
    k, on_grid = grid_index(grid, t)
    return (k if on_grid else k + 1) * grid.step_size


# Power series of the two shape functions below share the numerator
# (-1)^n (2 + 2^n (n - 2)); they differ only in the factorial shift.
_SERIES_TERMS = 40
_SERIES_SWITCH = 1.0


def _series_coefficients(shift: int) -> np.ndarray:
    coeffs = [
        (-1) ** n * (2 + 2**n * (n - 2)) / math.factorial(n + 1 + shift)
        for n in range(_SERIES_TERMS)
    ]
    return np.array(coeffs[::-1])


_G_COEFFS = _series_coefficients(0)
_Q_COEFFS = _series_coefficients(1)


def _shape(x, coeffs, closed_form):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x < _SERIES_SWITCH
    if np.any(small):
        out[small] = np.polyval(coeffs, x[small])
    big = ~small
    if np.any(big):
        out[big] = closed_form(x[big])
    return out if out.ndim else float(out)


def _g_closed(x):
    return (
        -np.expm1(-2 * x) / (2 * x)
        - 2 * np.exp(-x) * -np.expm1(-x) / x
        + np.exp(-2 * x)
    )


def _q_closed(x):
    return -np.expm1(-2 * x) / (2 * x) - (np.expm1(-x) / x) ** 2


def step_error_factor(x):
    """``G(x) = int_0^1 exp(-2 x w) (1 - exp(-x (1 - w)))^2 dw`` for ``x >= 0``.

    One exponential Euler step of length ``h`` on a mode with eigenvalue ``mu``
    contributes the mean-square error ``h * G(mu h)``.  ``G(x) ~ x^2 / 3`` near
    zero and ``~ 1 / (2 x)`` at infinity.
    """
    return _shape(x, _G_COEFFS, _g_closed)


def conditional_variance_factor(x):
    """``Q(x) = (1 - e^{-2x}) / (2x) - ((1 - e^{-x}) / x)^2``, computed stably.

    ``h * Q(mu h)`` is the variance of the exact one-step convolution increment
    conditional on the Wiener increment of the same step.
    """
    return _shape(x, _Q_COEFFS, _q_closed)


def _gaussian_tail(a: float, k: int) -> float:
    """Upper bound for ``sum_{j > k} exp(-a j^2)`` by integral comparison."""
    j = k + 1
    return math.exp(-a * j * j) * (1.0 + 1.0 / (2.0 * a * j))


def _tail_bound(nu: float, k: int, rate: float, const: float, asymptotic: bool) -> float:
    if rate <= 0:
        return math.inf
    a = nu * math.pi**2 * rate
    bound = const * _gaussian_tail(a, k)
    if asymptotic:
        bound /= nu * math.pi**2 * (k + 1) ** 2
    return bound


def _trigamma(x: float) -> float:
    return float(polygamma(1, x))


def mode_sum(
    model: HeatModel,
    first: int,
    last: Modes,
    terms: Callable[[np.ndarray], np.ndarray],
    rate: float,
    const: float,
    tol: float = DEFAULT_TOL,
    asymptotic: bool = True,
) -> float:
    """Sum ``terms(mu_k)`` for ``first <= k <= last`` (``last`` may be infinite).

    ``terms`` must satisfy ``|terms(mu) - s(mu)| <= const exp(-rate mu) w(mu)``
    where ``s(mu) = 1/(2 mu)`` and ``w(mu) = 1/mu`` if ``asymptotic``, else
    ``s = 0`` and ``w = 1``.  The explicit part is summed in ascending ``k`` with
    :func:`math.fsum`; the tail is closed analytically with error below ``tol``.

    Raises
    ------
    NonSummableError
        ``last`` is infinite but the series does not converge.
    TruncationError
        No cutoff below ``K_MAX`` certifies the tail.
    """
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    if last < first:
        return 0.0
    if math.isinf(last) and rate <= 0 and not asymptotic:
        raise NonSummableError("mode series without smoothing diverges for unbounded modes")
    cut = max(K_START, first)
    while cut < last and _tail_bound(model.nu, cut, rate, const, asymptotic) >= tol:
        cut *= 2
        if cut > K_MAX and cut < last:
            raise TruncationError(
                f"mode tail not below tol={tol:g} within K_max={K_MAX} modes"
            )
    stop = int(min(cut, last))
    chunks = (
        terms(eigenvalues(model, lo, min(lo + _CHUNK - 1, stop)))
        for lo in range(first, stop + 1, _CHUNK)
    )
    parts = list(itertools.chain.from_iterable(chunks))
    if stop < last and asymptotic:
        tail = _trigamma(stop + 1)
        if not math.isinf(last):
            tail -= _trigamma(last + 1)
        parts.append(tail / (2 * model.mu1))
    return math.fsum(parts)


def hs_diff_sq(
    model: HeatModel, N: Modes, s: float, t: float, tol: float = DEFAULT_TOL
) -> float:
    """``sum_{n <= N} exp(-2 mu_n s) (1 - exp(-mu_n t))^2``.

    This is the squared Hilbert-Schmidt norm of ``P_N e^{sA} (I - e^{tA})``.
    It is nonincreasing in ``s`` and nondecreasing in ``t`` and ``N``.
    """
    if s < 0 or t < 0:
        raise DomainError("s and t must be nonnegative")
    if not (N == UNBOUNDED or (int(N) == N and N >= 1)):
        raise DomainError(f"N must be a positive integer or UNBOUNDED, got {N!r}")
    if t == 0:
        return 0.0
    if s == 0 and N == UNBOUNDED:
        raise NonSummableError("hs_diff_sq diverges for s = 0, t > 0 and N unbounded")

    def terms(mu):
        return np.exp(-2 * mu * s) * one_minus_exp(mu * t) ** 2

    return mode_sum(model, 1, N, terms, rate=2 * s, const=1.0, tol=tol, asymptotic=False)
