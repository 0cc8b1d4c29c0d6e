"""Shared fixtures and random-element factories."""

from __future__ import annotations

import numpy as np
import pytest

from orthofield import ChaosElement


def make_measurable_element(rng, d, span=5, max_terms=8):
    """Random element with support inside {0, ..., span-1}^d."""
    k = int(rng.integers(1, max_terms + 1))
    coeffs = {}
    for _ in range(k):
        idx = tuple(int(x) for x in rng.integers(0, span, size=d))
        coeffs[idx] = float(rng.uniform(-1.0, 1.0))
    return ChaosElement(d, coeffs)


def make_any_element(rng, d, lo=-3, hi=5, max_terms=8):
    """Random element whose support may have negative coordinates."""
    k = int(rng.integers(1, max_terms + 1))
    coeffs = {}
    for _ in range(k):
        idx = tuple(int(x) for x in rng.integers(lo, hi, size=d))
        coeffs[idx] = float(rng.uniform(-1.0, 1.0))
    return ChaosElement(d, coeffs)


def make_dyadic_element(rng, d, span=5, max_terms=8):
    """Measurable element with coefficients k/64, so sums stay float-exact."""
    k = int(rng.integers(1, max_terms + 1))
    coeffs = {}
    for _ in range(k):
        idx = tuple(int(x) for x in rng.integers(0, span, size=d))
        coeffs[idx] = int(rng.integers(-64, 65)) / 64.0
    return ChaosElement(d, coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
