import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochheat import _kernels_py, sampler
from stochheat.errors import DomainError, NumericalInconsistencyError
from stochheat.exact import mode_interval_integral
from stochheat.sampler import (
    CoupledModeState,
    StepCovariance,
    advance_mode,
    gaussian_pair,
    sample_coupled_batch,
    sample_coupled_terminal,
    step_covariance,
)
from stochheat.spectral import HeatModel, eigenvalue

try:
    from stochheat import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

BACKENDS = [_kernels_py] + ([compiled] if compiled is not None else [])

# Random123 known-answer vectors for philox4x32 with 10 rounds
PHILOX_KAT = [
    ((0, 0, 0, 0), (0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    (
        (0xFFFFFFFF,) * 4,
        (0xFFFFFFFF,) * 2,
        (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD),
    ),
    (
        (0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344),
        (0xA4093822, 0x299F31D0),
        (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1),
    ),
]


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
@pytest.mark.parametrize("counter, key, expected", PHILOX_KAT)
def test_philox_known_answers(backend, counter, key, expected):
    out = backend.philox4x32(*counter, *key)
    assert tuple(int(w) for w in out) == expected


def test_backend_reported():
    assert sampler.BACKEND in ("cython", "python")
    if compiled is not None and sampler.BACKEND == "cython":
        assert sampler._backend is compiled


@pytest.mark.skipif(compiled is None, reason="compiled extension not built")
@pytest.mark.parametrize("M, N, K", [(1, 1, 1), (4, 8, 8), (3, 2, 9), (16, 5, 5)])
def test_backends_bit_identical(M, N, K):
    model = HeatModel(0.7, 1.3)
    seed, start = 2**40 + 17, 2**33 - 5
    a = sample_coupled_batch(model, M, N, K, seed, start, 300, backend=_kernels_py)
    b = sample_coupled_batch(model, M, N, K, seed, start, 300, backend=compiled)
    assert np.array_equal(a, b)


def test_single_mode_chain_matches_kernel():
    model = HeatModel(1.2, 0.8)
    M, N, K, seed = 5, 2, 4, 99
    h = model.horizon / M
    batch = sample_coupled_batch(model, M, N, K, seed, 10, 3)
    for offset, value in enumerate(batch):
        total = 0.0
        for k in range(1, K + 1):
            mu = eigenvalue(model, k)
            cov = step_covariance(mu, h)
            state = CoupledModeState(0.0, 0.0, k)
            for j in range(M):
                state = advance_mode(state, cov, mu, h, gaussian_pair(seed, 10 + offset, k, j), k <= N)
            total += (state.exact - state.scheme) ** 2
        assert value == pytest.approx(total, rel=1e-12)


def test_terminal_is_order_independent():
    model = HeatModel(1.0, 1.0)
    batch = sample_coupled_batch(model, 3, 4, 6, 7, 0, 50)
    for i in (0, 17, 49):
        assert sample_coupled_terminal(model, 3, 4, 6, 7, i) == batch[i]
    again = sample_coupled_batch(model, 3, 4, 6, 7, 0, 50)
    assert np.array_equal(batch, again)


def test_zero_noise_is_pure_decay():
    mu, h = 3.0, 0.2
    cov = step_covariance(mu, h)
    state = advance_mode(CoupledModeState(0.0, 0.0), cov, mu, h, (0.0, 0.0))
    assert (state.exact, state.scheme) == (0.0, 0.0)
    state = advance_mode(CoupledModeState(1.0, 2.0), cov, mu, h, (0.0, 0.0))
    assert state.exact == pytest.approx(math.exp(-mu * h))
    assert state.scheme == pytest.approx(2 * math.exp(-mu * h))
    frozen = advance_mode(CoupledModeState(0.5, 0.0), cov, mu, h, (1.0, 1.0), in_scheme=False)
    assert frozen.scheme == 0.0


def test_step_covariance_values():
    cov = step_covariance(math.pi**2, 1.0)
    assert cov.var_increment == 1.0
    # mpmath: (1 - exp(-2 pi^2)) / (2 pi^2)
    assert cov.var_convolution == pytest.approx(0.0506605916856372128, rel=1e-14)
    assert cov.cov == pytest.approx(-math.expm1(-math.pi**2) / math.pi**2, rel=1e-14)
    with pytest.raises(DomainError):
        step_covariance(0.0, 1.0)


@settings(max_examples=200, deadline=None)
@given(mu=st.floats(1e-3, 1e8), h=st.floats(1e-8, 10))
def test_step_covariance_is_positive_definite(mu, h):
    cov = step_covariance(mu, h)
    assert cov.conditional_variance > 0
    if mu * h > 1e-5:
        # the relative gap is about (mu h)^2 / 12 and must exceed rounding
        assert cov.cov**2 < cov.var_increment * cov.var_convolution
    assert cov.conditional_variance == pytest.approx(
        cov.var_convolution - cov.cov**2 / h, rel=1e-6, abs=1e-12 * cov.var_convolution
    )


def test_step_covariance_small_step_limit():
    cov = step_covariance(1.0, 1e-9)
    assert cov.cov == pytest.approx(1e-9, rel=1e-8)
    assert cov.var_convolution == pytest.approx(1e-9, rel=1e-8)
    assert cov.conditional_variance == pytest.approx(1e-27 / 12, rel=1e-6)


def test_negative_conditional_variance_handling():
    state = CoupledModeState(0.0, 0.0)
    tiny = StepCovariance(1.0, 1.0, 1.0, -1e-17)
    assert advance_mode(state, tiny, 1.0, 1.0, (0.0, 5.0)).exact == 0.0
    broken = StepCovariance(1.0, 1.0, 1.0, -1e-3)
    with pytest.raises(NumericalInconsistencyError):
        advance_mode(state, broken, 1.0, 1.0, (0.0, 0.0))


def test_normals_moments():
    idx = np.arange(10**6, dtype=np.uint64)
    xi1, xi2 = _kernels_py.gaussian_pair(5, idx, 1, 0)
    for xi in (xi1, xi2):
        assert np.all(np.isfinite(xi))
        assert abs(xi.mean()) < 5 / 1000
        assert abs(xi.var() - 1) < 0.01
    assert abs(np.mean(xi1 * xi2)) < 5 / 1000


def test_one_step_joint_law():
    mu, h = 2.5, 0.3
    cov = step_covariance(mu, h)
    xi1, xi2 = _kernels_py.gaussian_pair(11, np.arange(10**6, dtype=np.uint64), 1, 0)
    dw = math.sqrt(h) * xi1
    inc = cov.cov / h * dw + math.sqrt(cov.conditional_variance) * xi2
    assert np.var(dw) == pytest.approx(cov.var_increment, rel=0.01)
    assert np.var(inc) == pytest.approx(cov.var_convolution, rel=0.01)
    assert np.mean(dw * inc) == pytest.approx(cov.cov, rel=0.01)


def test_one_step_coupling_error():
    # one mode, one step: E |I - e^{-mu h} dW|^2 is the interval integral
    model = HeatModel(1.0, 0.5)
    n = 10**5
    draws = sample_coupled_batch(model, 1, 1, 1, 3, 0, n)
    exact = mode_interval_integral(eigenvalue(model, 1), 0.5, 0.5)
    z = (draws.mean() - exact) / (draws.std(ddof=1) / math.sqrt(n))
    assert abs(z) < 4


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(M=2, N=5, K=4),
        dict(M=0, N=1, K=1),
        dict(M=2, N=1.5, K=2),
        dict(M=2, N=1, K=2**32),
        dict(M=2, N=1, K=1, seed=-1),
        dict(M=2, N=1, K=1, seed=2**64),
    ],
)
def test_rejects_bad_counts(kwargs):
    args = dict(seed=0, start=0, count=1) | kwargs
    with pytest.raises(DomainError):
        sample_coupled_batch(HeatModel(), **args)
