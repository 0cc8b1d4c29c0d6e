"""Partial order, rectangles, and grid-cube overlap weights."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from orthofield.lattice import (
    HalfSpaceRegion,
    Rect,
    axis_overlap_weights,
    cube_overlap_weight,
    geq,
    gt,
    leq,
    lt,
    meet,
)

index_2d = st.tuples(st.integers(-5, 5), st.integers(-5, 5))


def test_order_basics():
    assert leq((0, 0), (1, 2))
    assert not leq((2, 0), (1, 2))
    assert lt((0, 0), (0, 1))
    assert not lt((1, 1), (1, 1))
    assert geq((3, 4), (3, 4))
    assert gt((4, 4), (3, 4))


def test_order_dimension_mismatch():
    with pytest.raises(ValueError):
        leq((1,), (1, 2))


@given(index_2d, index_2d)
def test_meet_is_greatest_lower_bound(a, b):
    m = meet(a, b)
    assert leq(m, a) and leq(m, b)
    # nothing strictly above the meet is below both
    for bump in ((1, 0), (0, 1)):
        above = (m[0] + bump[0], m[1] + bump[1])
        assert not (leq(above, a) and leq(above, b))


@given(index_2d, index_2d)
def test_meet_commutes(a, b):
    assert meet(a, b) == meet(b, a)


def test_half_space_membership():
    r = HalfSpaceRegion(axis=2, level=3)
    assert r.contains((100, 3))
    assert r.contains((-7, 4))
    assert not r.contains((0, 2))
    with pytest.raises(ValueError):
        r.contains((1,))
    with pytest.raises(ValueError):
        HalfSpaceRegion(axis=0, level=0)


def test_rect_validation_and_volume():
    A = Rect((0.0, 0.25), (0.5, 1.0))
    assert A.dim == 2
    assert A.volume() == pytest.approx(0.5 * 0.75)
    assert Rect.unit(3).volume() == 1.0
    assert Rect.corner((0.5, 0.75)).lower == (0.0, 0.0)
    with pytest.raises(ValueError):
        Rect((0.5,), (0.25,))
    with pytest.raises(ValueError):
        Rect((0.0,), (1.5,))


def test_intersection_volume():
    A = Rect((0.0, 0.0), (0.5, 0.5))
    B = Rect((0.25, 0.25), (1.0, 1.0))
    assert A.intersection_volume(B) == pytest.approx(0.0625)
    C = Rect((0.5, 0.0), (1.0, 0.5))
    assert A.intersection_volume(C) == 0.0
    assert A.intersection_volume(A) == pytest.approx(A.volume())


def test_cube_overlap_weight_full_and_partial():
    A = Rect.unit(2)
    assert cube_overlap_weight(4, A, (1, 1)) == 1.0
    half = Rect.corner((0.5, 1.0))
    # n=4: cubes 1..2 on axis 1 are inside [0, 2], cube 3+ outside
    assert cube_overlap_weight(4, half, (2, 1)) == 1.0
    assert cube_overlap_weight(4, half, (3, 1)) == 0.0
    # fractional boundary: n*t = 4*0.6 = 2.4 cuts cube 3
    frac = Rect.corner((0.6, 1.0))
    assert cube_overlap_weight(4, frac, (3, 2)) == pytest.approx(0.4)


def test_cube_overlap_weight_validation():
    A = Rect.unit(1)
    with pytest.raises(ValueError):
        cube_overlap_weight(4, A, (0,))
    with pytest.raises(ValueError):
        cube_overlap_weight(4, A, (5,))
    with pytest.raises(ValueError):
        cube_overlap_weight(0, A, (1,))


def test_axis_overlap_weights_match_scalar():
    n = 7
    lo, up = 0.21, 0.83
    w = axis_overlap_weights(n, lo, up)
    A = Rect((lo,), (up,))
    for i in range(1, n + 1):
        assert w[i - 1] == pytest.approx(cube_overlap_weight(n, A, (i,)), abs=1e-15)
    # total weight is the measure of [n*lo, n*up]
    assert w.sum() == pytest.approx(n * (up - lo))


def test_axis_overlap_weights_are_clipped():
    w = axis_overlap_weights(5, 0.5, 0.5)
    assert np.all(w == 0.0)
    w = axis_overlap_weights(5, 0.0, 1.0)
    assert np.all(w == 1.0)
