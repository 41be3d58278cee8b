"""Exact strong errors, explicit bounds and Monte Carlo checks for the
spectral Galerkin / exponential Euler discretization of the stochastic heat
equation on (0, 1) with Dirichlet boundary and space-time white noise."""
from .bounds import (
    BoundKind,
    BoundPair,
    full_bounds,
    smoothing_bounds,
    smoothing_constant,
    spatial_bounds,
    temporal_bounds,
)
from .errors import (
    DomainError,
    NonSummableError,
    NumericalInconsistencyError,
    StochHeatError,
    TruncationError,
)
from .exact import (
    Discretization,
    ErrorKind,
    ErrorValue,
    Provenance,
    projected_temporal_error_sq,
    smoothing_hs_exact,
    spatial_error_sq,
    sup_error,
    total_error_sq,
)
from .mc import McConfig, compare_to_exact, estimate_error_sq, truncated_exact_sq
from .rates import RateFit, fit_loglog
from .sampler import BACKEND, sample_coupled_terminal
from .spectral import UNBOUNDED, GridSpec, HeatModel

__version__ = "0.1.0"
