"""Empirical convergence orders from log-log least squares."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError

__all__ = ["RateFit", "NonPositiveDataError", "DuplicateParameterError", "fit_loglog"]


class NonPositiveDataError(DomainError):
    """A parameter or error value is not strictly positive."""


class DuplicateParameterError(DomainError):
    """The same parameter value occurs more than once."""


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    points_used: int


def fit_loglog(points: Iterable[tuple[float, float]]) -> RateFit:
    """Ordinary least squares of ``log(error)`` on ``log(parameter)`` (natural logs).

    The slope is the empirical order: ``error ~ exp(intercept) * parameter**slope``.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise DomainError("need at least two points")
    if any(not (x > 0 and y > 0) or math.isinf(x) or math.isinf(y) for x, y in pts):
        raise NonPositiveDataError("parameters and errors must be positive and finite")
    if len({x for x, _ in pts}) != len(pts):
        raise DuplicateParameterError("parameter values must be distinct")
    # Logs of ratios to the first point: rescaling errors by a power of two
    # leaves every ratio, and therefore the slope, bit-identical.
    x0, y0 = pts[0]
    lx = np.log([x / x0 for x, _ in pts])
    ly = np.log([y / y0 for _, y in pts])
    dx = lx - lx.mean()
    dy = ly - ly.mean()
    slope = float(dx @ dy / (dx @ dx))
    intercept = float(math.log(y0) + ly.mean() - slope * (math.log(x0) + lx.mean()))
    resid = dy - slope * dx
    ss_tot = float(dy @ dy)
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - float(resid @ resid) / ss_tot)
    return RateFit(slope, intercept, r2, len(pts))
