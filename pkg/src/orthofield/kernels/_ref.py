"""Reference numpy implementation of the hot kernels.

Bit-compatible with the compiled extension in ``_fast``: the integer
mixing is exact 64-bit wrapping arithmetic, the float transforms apply
the same operations in the same order, and the convolution accumulates
taps in the order supplied.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_INV53 = 2.0 ** -53


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def fill_u64(state: int, idx: np.ndarray) -> np.ndarray:
    """Hash each row of the int64 key matrix ``idx`` into one uint64 word.

    ``state`` folds in the seed and stream identifiers; every output word
    is a pure function of (state, row contents), independent of the order
    or grouping of rows.
    """
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    with np.errstate(over="ignore"):
        h = np.full(idx.shape[0], np.uint64(state), dtype=np.uint64)
        for j in range(idx.shape[1]):
            w = idx[:, j].astype(np.uint64) + np.uint64((GAMMA * (j + 1)) & _MASK)
            h = _mix64(h ^ w)
        return _mix64(h)


def u64_to_uniform(u: np.ndarray) -> np.ndarray:
    """Map words to doubles in the open interval (0, 1)."""
    return ((u >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53


def u64_to_rademacher(u: np.ndarray, sigma: float) -> np.ndarray:
    """Map words to +-sigma from the top bit."""
    return np.where((u >> np.uint64(63)).astype(np.bool_), sigma, -sigma)


def u64_to_gaussian(u: np.ndarray, sigma: float) -> np.ndarray:
    """Map words to centered Gaussians via the inverse normal CDF."""
    return sigma * ndtri(u64_to_uniform(u))


def convolve_batch(
    eps: np.ndarray,
    base: tuple,
    offsets: np.ndarray,
    coeffs: np.ndarray,
    out_shape: tuple,
) -> np.ndarray:
    """Moving-average transform of a batch of innovation blocks.

    ``eps`` has shape (replicas, *block); output value at grid position
    ``i`` (0-based) is ``sum_t coeffs[t] * eps[..., i + base - offsets[t]]``.
    Taps accumulate in the supplied order, one full tap at a time.
    """
    d = len(out_shape)
    reps = eps.shape[0]
    out = np.zeros((reps,) + tuple(out_shape), dtype=np.float64)
    for t in range(len(coeffs)):
        sl = tuple(
            slice(base[s] - int(offsets[t, s]), base[s] - int(offsets[t, s]) + out_shape[s])
            for s in range(d)
        )
        out += coeffs[t] * eps[(slice(None),) + sl]
    return out
