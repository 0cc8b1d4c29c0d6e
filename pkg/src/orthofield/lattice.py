"""Lattice geometry on Z^d.

Multi-index partial orders, half-space index regions, axis-aligned
rectangles in [0,1]^d, and the exact Lebesgue overlap of a scaled
rectangle with the unit grid cubes ``(i_1-1, i_1] x ... x (i_d-1, i_d]``.

Grid indices are 1-based: the box of side n is ``{1, ..., n}^d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

MultiIndex = Tuple[int, ...]

__all__ = [
    "MultiIndex",
    "HalfSpaceRegion",
    "Rect",
    "leq",
    "lt",
    "geq",
    "gt",
    "meet",
    "region_contains",
    "cube_overlap_weight",
    "axis_overlap_weights",
]


def _as_index(i: Sequence[int]) -> MultiIndex:
    t = tuple(int(c) for c in i)
    if len(t) == 0:
        raise ValueError("multi-index must have dimension >= 1")
    return t


def _check_same_dim(a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")


def leq(a: Sequence[int], b: Sequence[int]) -> bool:
    """Componentwise order: a_k <= b_k for every axis k."""
    _check_same_dim(a, b)
    return all(x <= y for x, y in zip(a, b))


def lt(a: Sequence[int], b: Sequence[int]) -> bool:
    """Strict order: a <= b componentwise and a != b."""
    return leq(a, b) and tuple(a) != tuple(b)


def geq(a: Sequence[int], b: Sequence[int]) -> bool:
    return leq(b, a)


def gt(a: Sequence[int], b: Sequence[int]) -> bool:
    return lt(b, a)


def meet(a: Sequence[int], b: Sequence[int]) -> MultiIndex:
    """Componentwise minimum (the greatest lower bound for ``leq``)."""
    _check_same_dim(a, b)
    return tuple(min(x, y) for x, y in zip(a, b))


@dataclass(frozen=True)
class HalfSpaceRegion:
    """The index region ``{i in Z^d : i_axis >= level}``.

    ``axis`` is 1-based (in 1..d); membership ignores all other coordinates.
    """

    axis: int
    level: int

    def __post_init__(self) -> None:
        if self.axis < 1:
            raise ValueError(f"axis must be >= 1, got {self.axis}")

    def contains(self, i: Sequence[int]) -> bool:
        return region_contains(self, i)


def region_contains(r: HalfSpaceRegion, i: Sequence[int]) -> bool:
    if r.axis > len(i):
        raise ValueError(f"axis {r.axis} out of range for dimension {len(i)}")
    return i[r.axis - 1] >= r.level


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle ``[lower, upper]`` inside the unit cube."""

    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self) -> None:
        lo = tuple(float(x) for x in self.lower)
        up = tuple(float(x) for x in self.upper)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)
        if len(lo) != len(up) or len(lo) == 0:
            raise ValueError("lower/upper must share a dimension >= 1")
        for a, b in zip(lo, up):
            if not (0.0 <= a <= b <= 1.0):
                raise ValueError(f"need 0 <= lower <= upper <= 1, got [{a}, {b}]")

    @classmethod
    def corner(cls, t: Sequence[float]) -> "Rect":
        """The anchored rectangle ``[0, t]``."""
        return cls(tuple(0.0 for _ in t), tuple(t))

    @classmethod
    def unit(cls, d: int) -> "Rect":
        return cls((0.0,) * d, (1.0,) * d)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def volume(self) -> float:
        v = 1.0
        for a, b in zip(self.lower, self.upper):
            v *= b - a
        return v

    def intersection_volume(self, other: "Rect") -> float:
        """Lebesgue measure of the intersection, in closed form."""
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        v = 1.0
        for s in range(self.dim):
            side = min(self.upper[s], other.upper[s]) - max(self.lower[s], other.lower[s])
            if side <= 0.0:
                return 0.0
            v *= side
        return v


def cube_overlap_weight(n: int, A: Rect, i: Sequence[int]) -> float:
    """Measure of ``nA`` intersected with the grid cube at index ``i``.

    The cube at i is ``(i_1-1, i_1] x ... x (i_d-1, i_d]``; the result is
    ``prod_s max(0, min(n*upper_s, i_s) - max(n*lower_s, i_s - 1))``,
    exact for rectangles up to floating rounding.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if len(i) != A.dim:
        raise ValueError("index/rectangle dimension mismatch")
    if any(not (1 <= c <= n) for c in i):
        raise ValueError(f"index {tuple(i)} outside the 1..{n} box")
    w = 1.0
    for s in range(A.dim):
        side = min(n * A.upper[s], i[s]) - max(n * A.lower[s], i[s] - 1)
        if side <= 0.0:
            return 0.0
        w *= side
    return w


def axis_overlap_weights(n: int, lo: float, up: float) -> np.ndarray:
    """Per-axis factors of :func:`cube_overlap_weight` as a length-n vector.

    Entry i-1 holds ``max(0, min(n*up, i) - max(n*lo, i-1))`` for i=1..n,
    so the full weight of a rectangle is the product of its axis vectors.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    i = np.arange(1, n + 1, dtype=np.float64)
    w = np.minimum(n * up, i) - np.maximum(n * lo, i - 1.0)
    return np.maximum(w, 0.0)
