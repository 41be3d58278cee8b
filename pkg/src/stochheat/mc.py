"""Monte Carlo estimation of terminal mean-square errors with confidence intervals."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .exact import (
    Discretization,
    ErrorValue,
    Provenance,
    projected_temporal_error_sq,
    spatial_band_error_sq,
)
from .sampler import sample_coupled_batch
from .spectral import DEFAULT_TOL, HeatModel

__all__ = ["McConfig", "estimate_error_sq", "truncated_exact_sq", "compare_to_exact"]

SHARD_SIZE = 2**14


@dataclass(frozen=True)
class McConfig:
    samples: int
    seed: int = 0
    confidence_z: float = 3.0
    workers: int = 1

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 2:
            raise DomainError(f"samples must be an integer >= 2, got {self.samples!r}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if not self.confidence_z > 0:
            raise DomainError("confidence_z must be positive")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")


def _shard_moments(values: np.ndarray) -> tuple[int, float, float]:
    n = len(values)
    mean = math.fsum(values) / n
    dev = values - mean
    return n, mean, math.fsum(dev * dev)


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, sum of squared deviations).
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def estimate_error_sq(model: HeatModel, M: int, N: int, K: int, cfg: McConfig) -> ErrorValue:
    """Sample mean of ``||P_K O_T - O^{M,N}_T||^2`` over indices ``0 .. samples-1``.

    Samples are processed in fixed-size shards whose moments are merged in
    shard order, so the result does not depend on ``cfg.workers``.
    """
    starts = range(0, cfg.samples, SHARD_SIZE)

    def shard(start):
        count = min(SHARD_SIZE, cfg.samples - start)
        return _shard_moments(sample_coupled_batch(model, M, N, K, cfg.seed, start, count))

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            moments = list(pool.map(shard, starts))
    else:
        moments = [shard(s) for s in starts]
    n, mean, m2 = moments[0]
    for m in moments[1:]:
        n, mean, m2 = _merge((n, mean, m2), m)
    sd = math.sqrt(m2 / (n - 1))
    return ErrorValue.monte_carlo(mean, cfg.confidence_z * sd / math.sqrt(n))


def truncated_exact_sq(
    model: HeatModel, M: int, N: int, K: int, tol: float = DEFAULT_TOL
) -> ErrorValue:
    """Exact ``E ||P_K O_T - O^{M,N}_T||^2``, the target of :func:`estimate_error_sq`."""
    if K < N:
        raise DomainError(f"K={K} must be >= N={N}")
    T = model.horizon
    temporal = projected_temporal_error_sq(model, Discretization(M, N, tol), T).squared
    return ErrorValue.exact(temporal + spatial_band_error_sq(model, N, K, T, tol))


def compare_to_exact(mc: ErrorValue, exact: ErrorValue, confidence_z: float = 3.0) -> float:
    """z-statistic ``(mc - exact) / standard error``."""
    if mc.provenance is not Provenance.MONTE_CARLO or exact.provenance is not Provenance.EXACT:
        raise DomainError("compare_to_exact expects a Monte Carlo and an exact value")
    if mc.ci_halfwidth <= 0:
        raise DomainError("Monte Carlo value has zero confidence half-width")
    return (mc.squared - exact.squared) / (mc.ci_halfwidth / confidence_z)
