"""Kernel backend selection.

The hot kernels (counter-based hashing, law transforms, moving-average
convolution) exist twice: a compiled Cython extension and a pure-numpy
reference. Both produce bit-identical output (asserted in the test
suite), so the choice only affects speed. Selection happens at import:
the compiled extension if it built, otherwise the reference. Override
with ``ORTHOFIELD_KERNELS=compiled|fallback``.

Every random draw is a pure function of ``(seed, domain, stream, key)``:
``stream_state`` folds the first three into one 64-bit state and
``fill_u64`` hashes integer key rows against it. There is no sequential
generator state, so any partition of the work over workers yields the
same values.
"""

from __future__ import annotations

import importlib
import os

import numpy as np

from . import _ref

_MASK = (1 << 64) - 1

# Domain tags keep independent uses of the generator on disjoint streams.
DOMAIN_LATTICE = 1  # innovation fields indexed by absolute lattice position
DOMAIN_NORM_MC = 2  # Monte Carlo p-norm estimation replicas
DOMAIN_AXIS_SEQ = 3  # per-axis sequences of the product field

_requested = os.environ.get("ORTHOFIELD_KERNELS", "auto")
_fast = None
if _requested in ("auto", "compiled"):
    try:
        _fast = importlib.import_module("._fast", __name__)
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "ORTHOFIELD_KERNELS=compiled but the extension is not built; "
                "run `pip install -e . --no-build-isolation` or unset the variable"
            ) from None
elif _requested != "fallback":
    raise ValueError(f"ORTHOFIELD_KERNELS must be auto|compiled|fallback, got {_requested!r}")

BACKEND = "compiled" if _fast is not None else "fallback"


def _mix64_int(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def stream_state(seed: int, domain: int, stream: int = 0) -> int:
    """Fold (seed, domain, stream) into the 64-bit hashing state."""
    u = _mix64_int((seed & _MASK) ^ 0x243F6A8885A308D3)
    u = _mix64_int(u ^ ((domain + 0x452821E638D01377) & _MASK))
    u = _mix64_int(u ^ ((stream + 0x13198A2E03707344) & _MASK))
    return u


def fill_u64(state: int, idx: np.ndarray) -> np.ndarray:
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    if _fast is not None:
        return _fast.fill_u64(state, idx)
    return _ref.fill_u64(state, idx)


def u64_to_uniform(u: np.ndarray) -> np.ndarray:
    if _fast is not None:
        return _fast.u64_to_uniform(np.ascontiguousarray(u))
    return _ref.u64_to_uniform(u)


def u64_to_rademacher(u: np.ndarray, sigma: float) -> np.ndarray:
    if _fast is not None:
        return _fast.u64_to_rademacher(np.ascontiguousarray(u), float(sigma))
    return _ref.u64_to_rademacher(u, float(sigma))


def u64_to_gaussian(u: np.ndarray, sigma: float) -> np.ndarray:
    if _fast is not None:
        return _fast.u64_to_gaussian(np.ascontiguousarray(u), float(sigma))
    return _ref.u64_to_gaussian(u, float(sigma))


def convolve_batch(
    eps: np.ndarray,
    base: tuple,
    offsets: np.ndarray,
    coeffs: np.ndarray,
    out_shape: tuple,
) -> np.ndarray:
    """Batched moving average; see ``_ref.convolve_batch`` for the contract."""
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    d = len(out_shape)
    if _fast is not None and 1 <= d <= 3:
        eps = np.ascontiguousarray(eps, dtype=np.float64)
        if d == 1:
            return _fast.convolve_batch_1d(eps, base[0], offsets, coeffs, out_shape[0])
        if d == 2:
            return _fast.convolve_batch_2d(
                eps, base[0], base[1], offsets, coeffs, out_shape[0], out_shape[1]
            )
        return _fast.convolve_batch_3d(
            eps, base[0], base[1], base[2], offsets, coeffs,
            out_shape[0], out_shape[1], out_shape[2],
        )
    return _ref.convolve_batch(eps, base, offsets, coeffs, out_shape)
