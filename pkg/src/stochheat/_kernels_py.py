"""Pure-Python (numpy) implementation of the sampling kernels.

Mirrors ``_kernels.pyx`` operation for operation, so both backends return
bit-identical samples: the integer Philox stream is exact, and the Gaussian
transform is scipy's ``ndtri`` in both cases.
"""
import numpy as np
from scipy.special import ndtri

MASK32 = np.uint64(0xFFFFFFFF)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_SHIFT32 = np.uint64(32)
_SHIFT12 = np.uint64(12)
_TWO_M53 = 2.0**-53

BACKEND = "python"


def philox4x32(c0, c1, c2, c3, k0, k1, rounds=10):
    """Philox4x32 block function on uint64 arrays holding 32-bit words."""
    c0, c1, c2, c3 = (np.asarray(c, dtype=np.uint64) & MASK32 for c in (c0, c1, c2, c3))
    k0 = np.asarray(k0, dtype=np.uint64) & MASK32
    k1 = np.asarray(k1, dtype=np.uint64) & MASK32
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & MASK32
            k1 = (k1 + _W1) & MASK32
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (
            (p1 >> _SHIFT32) ^ c1 ^ k0,
            p1 & MASK32,
            (p0 >> _SHIFT32) ^ c3 ^ k1,
            p0 & MASK32,
        )
    return c0, c1, c2, c3


def _open_uniform(hi, lo):
    bits = ((hi << _SHIFT32) | lo) >> _SHIFT12
    return (2.0 * bits.astype(np.float64) + 1.0) * _TWO_M53


def gaussian_pair(seed, sample, mode, step):
    """Two independent standard normals keyed on ``(seed, sample, mode, step)``."""
    seed = np.uint64(seed)
    sample = np.asarray(sample, dtype=np.uint64)
    x0, x1, x2, x3 = philox4x32(
        np.uint64(step), np.uint64(mode), sample & MASK32, sample >> _SHIFT32,
        seed & MASK32, seed >> _SHIFT32,
    )
    return ndtri(_open_uniform(x0, x1)), ndtri(_open_uniform(x2, x3))


def coupled_terminal_batch(seed, start, count, decay, cov_over_h, cond_sd, sqrt_h, n_scheme, steps):
    """Squared H-distance at ``T`` for samples ``start .. start + count - 1``.

    Mode ``k`` (1-based) uses ``decay[k-1] = exp(-mu_k h)`` and the one-step
    regression coefficients; modes ``k > n_scheme`` carry a zero scheme value.
    """
    samples = np.arange(count, dtype=np.uint64) + np.uint64(start)
    total = np.zeros(count)
    for k in range(len(decay)):
        exact = np.zeros(count)
        scheme = np.zeros(count)
        d, c, sd = decay[k], cov_over_h[k], cond_sd[k]
        for j in range(steps):
            xi1, xi2 = gaussian_pair(seed, samples, k + 1, j)
            dw = sqrt_h * xi1
            inc = c * dw + sd * xi2
            exact = d * exact + inc
            if k < n_scheme:
                scheme = d * (scheme + dw)
        diff = exact - scheme
        total += diff * diff
    return total
