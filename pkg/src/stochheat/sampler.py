"""Exact coupled sampling of the mild solution and the scheme at grid times.

On one step of length ``h`` the mode-``k`` coefficients evolve as::

    exact'  = exp(-mu h) * exact + I,      I  = int exp(-mu (t_{j+1} - s)) dW_s
    scheme' = exp(-mu h) * (scheme + dW),  dW = W_{t_{j+1}} - W_{t_j}

with ``(dW, I)`` jointly Gaussian.  Both components are driven by the same
Wiener increments, so their difference is an exact draw of the strong error.

Normals come from a Philox4x32-10 counter-based generator keyed on
``(seed, sample_index, mode, step)``: any sample can be regenerated in
isolation and evaluation order never changes the result.

The compiled kernel (``_kernels``) is used when available; set
``STOCHHEAT_PURE_PYTHON=1`` to force the numpy fallback.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _kernels_py
from .errors import DomainError, NumericalInconsistencyError
from .spectral import (
    GridSpec,
    HeatModel,
    conditional_variance_factor,
    eigenvalues,
    one_minus_exp,
)

if os.environ.get("STOCHHEAT_PURE_PYTHON"):
    _backend = _kernels_py
else:
    try:
        from . import _kernels as _backend
    except ImportError:  # extension not built
        _backend = _kernels_py

BACKEND = _backend.BACKEND

__all__ = [
    "BACKEND",
    "StepCovariance",
    "CoupledModeState",
    "step_covariance",
    "advance_mode",
    "gaussian_pair",
    "sample_coupled_batch",
    "sample_coupled_terminal",
]

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class StepCovariance:
    """Covariance of ``(dW, I)`` over one step, plus the conditional variance of ``I``."""

    var_increment: float
    var_convolution: float
    cov: float
    conditional_variance: float


@dataclass(frozen=True)
class CoupledModeState:
    exact: float
    scheme: float
    mode_index: int = 1


def step_covariance(mu: float, h: float) -> StepCovariance:
    """Joint law of ``(dW, I)`` for eigenvalue ``mu`` and step ``h``."""
    if not (mu > 0 and h > 0):
        raise DomainError(f"mu and h must be positive, got mu={mu!r}, h={h!r}")
    x = mu * h
    return StepCovariance(
        var_increment=h,
        var_convolution=one_minus_exp(2 * x) / (2 * mu),
        cov=one_minus_exp(x) / mu,
        conditional_variance=h * conditional_variance_factor(x),
    )


def advance_mode(
    state: CoupledModeState,
    cov: StepCovariance,
    mu: float,
    h: float,
    gauss_pair: tuple[float, float],
    in_scheme: bool = True,
) -> CoupledModeState:
    """One coupled step of a single mode driven by two standard normals.

    ``dW = sqrt(h) xi1`` and ``I = (cov / h) dW + sqrt(var_I|dW) xi2``.  With
    ``in_scheme=False`` (modes beyond the Galerkin space) the scheme stays 0.
    """
    cond = cov.conditional_variance
    if cond < 0:
        if cond < -4 * math.ulp(cov.var_convolution):
            raise NumericalInconsistencyError(f"negative conditional variance {cond!r}")
        cond = 0.0
    xi1, xi2 = gauss_pair
    decay = math.exp(-mu * h)
    dw = math.sqrt(h) * xi1
    inc = (cov.cov / h) * dw + math.sqrt(cond) * xi2
    exact = decay * state.exact + inc
    scheme = decay * (state.scheme + dw) if in_scheme else state.scheme
    return CoupledModeState(exact, scheme, state.mode_index)


def gaussian_pair(seed: int, sample_index: int, mode: int, step: int) -> tuple[float, float]:
    """The two normals used for ``(sample_index, mode, step)`` under ``seed``."""
    xi1, xi2 = _kernels_py.gaussian_pair(seed, sample_index, mode, step)
    return float(xi1), float(xi2)


def _mode_coefficients(model: HeatModel, M: int, K: int):
    h = GridSpec.from_model(model, M).step_size
    mu = eigenvalues(model, 1, K)
    x = mu * h
    decay = np.exp(-x)
    cov_over_h = one_minus_exp(x) / mu / h
    cond_sd = np.sqrt(h * conditional_variance_factor(x))
    return decay, cov_over_h, cond_sd, math.sqrt(h)


def _check_counts(M: int, N: int, K: int, seed: int) -> None:
    for name, value in (("M", M), ("N", N), ("K", K)):
        if int(value) != value or value < 1:
            raise DomainError(f"{name} must be a positive integer, got {value!r}")
    if K < N:
        raise DomainError(f"K={K} must be >= N={N}")
    if K >= 2**32 or M >= 2**32:
        raise DomainError("mode and step counters are limited to 32 bits")
    if not 0 <= seed <= _UINT64_MAX:
        raise DomainError("seed must be an unsigned 64-bit integer")


def sample_coupled_batch(
    model: HeatModel,
    M: int,
    N: int,
    K: int,
    seed: int,
    start: int,
    count: int,
    backend=None,
) -> np.ndarray:
    """``||P_K O_T - O^{M,N}_T||^2`` for sample indices ``start .. start + count - 1``."""
    _check_counts(M, N, K, seed)
    if start < 0 or count < 0 or start + count - 1 > _UINT64_MAX:
        raise DomainError("sample indices must be unsigned 64-bit integers")
    decay, cov_over_h, cond_sd, sqrt_h = _mode_coefficients(model, M, K)
    kernel = backend or _backend
    return kernel.coupled_terminal_batch(
        int(seed), int(start), int(count), decay, cov_over_h, cond_sd, sqrt_h, int(N), int(M)
    )


def sample_coupled_terminal(
    model: HeatModel, M: int, N: int, K: int, seed: int, sample_index: int
) -> float:
    """One draw of ``||P_K O_T - O^{M,N}_T||_H^2``; a pure function of its arguments."""
    return float(sample_coupled_batch(model, M, N, K, seed, sample_index, 1)[0])
