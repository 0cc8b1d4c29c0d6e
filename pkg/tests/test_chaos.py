"""Sparse chaos-element algebra: shifts, projections, norms, laws."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_any_element
from orthofield import (
    ChaosElement,
    InnovationLaw,
    SigmaAlgebraSpec,
    combine,
    l2_norm,
    lp_norm_estimate,
    project,
    shift,
)

small_index = st.tuples(st.integers(-4, 4), st.integers(-4, 4))
small_coeffs = st.dictionaries(
    small_index,
    st.floats(-10, 10, allow_nan=False, allow_infinity=False).filter(lambda x: x != 0.0),
    min_size=1,
    max_size=6,
)


def elem(coeffs):
    return ChaosElement(2, coeffs)


def test_construction_drops_zeros_and_validates():
    f = ChaosElement(2, {(0, 0): 1.0, (1, 1): 0.0})
    assert f.support() == ((0, 0),)
    assert f.coeff((1, 1)) == 0.0
    with pytest.raises(ValueError):
        ChaosElement(2, {(0,): 1.0})
    with pytest.raises(ValueError):
        ChaosElement(0, {})
    with pytest.raises(ValueError):
        ChaosElement(1, {(0,): math.inf})


def test_algebra_operations():
    f = elem({(0, 0): 1.0, (1, 0): 2.0})
    g = elem({(1, 0): -2.0, (0, 1): 4.0})
    s = f + g
    assert s.coeff((1, 0)) == 0.0 and (1, 0) not in s.coeffs
    assert (f - f).is_zero()
    assert (2.0 * f).coeff((1, 0)) == 4.0
    assert (-f).coeff((0, 0)) == -1.0
    assert combine(1.0, f, 3.0, g) == f + 3.0 * g
    with pytest.raises(ValueError):
        f + ChaosElement(1, {(0,): 1.0})


def test_equality_and_hash_ban():
    f = elem({(0, 0): 1.0})
    assert f == elem({(0, 0): 1.0})
    assert f != elem({(0, 0): 1.0 + 1e-9})
    with pytest.raises(TypeError):
        hash(f)


def test_measurability():
    assert elem({(0, 0): 1.0, (3, 2): 1.0}).is_measurable()
    assert not elem({(-1, 0): 1.0}).is_measurable()
    assert elem({(2, 3): 1.0}).is_measurable(base=(2, 2))
    assert not elem({(2, 3): 1.0}).is_measurable(base=(3, 0))


def test_shift_moves_coefficients_down():
    f = elem({(2, 1): 5.0})
    g = shift(f, (1, 1))
    assert g.support() == ((1, 0),)
    assert shift(g, (-1, -1)) == f


@settings(max_examples=50)
@given(small_coeffs, small_index, small_index)
def test_shift_composes_additively(coeffs, u, v):
    f = elem(coeffs)
    w = (u[0] + v[0], u[1] + v[1])
    assert shift(shift(f, u), v) == shift(f, w)


def test_project_restricts_support():
    f = elem({(0, 0): 1.0, (2, 1): 2.0, (-1, 3): 3.0})
    past = SigmaAlgebraSpec.shifted_past((0, 0))
    pf = project(f, past)
    assert set(pf.support()) == {(0, 0), (2, 1)}
    hs = SigmaAlgebraSpec.half_space(2, 2)
    assert set(project(f, hs).support()) == {(-1, 3)}


@settings(max_examples=50)
@given(small_coeffs)
def test_project_is_idempotent(coeffs):
    f = elem(coeffs)
    for G in (SigmaAlgebraSpec.shifted_past((1, -1)), SigmaAlgebraSpec.half_space(1, 0)):
        assert project(project(f, G), G) == project(f, G)


@settings(max_examples=50)
@given(small_coeffs, small_coeffs)
def test_project_is_linear(c1, c2):
    f, g = elem(c1), elem(c2)
    G = SigmaAlgebraSpec.half_space(2, 1)
    assert project(f + g, G) == project(f, G) + project(g, G)


def test_projection_tower_property(rng):
    """Projecting on nested shifted pasts collapses to the larger shift."""
    for _ in range(50):
        f = make_any_element(rng, 2)
        a = tuple(int(x) for x in rng.integers(-2, 3, size=2))
        b = tuple(a[s] + int(rng.integers(0, 3)) for s in range(2))
        inner = project(project(f, SigmaAlgebraSpec.shifted_past(a)), SigmaAlgebraSpec.shifted_past(b))
        assert inner == project(f, SigmaAlgebraSpec.shifted_past(b))


def test_l2_norm_is_exact_and_scales_with_sigma():
    f = elem({(0, 0): 3.0, (1, 2): 4.0})
    assert l2_norm(f, InnovationLaw.rademacher()) == 5.0
    assert l2_norm(f, InnovationLaw.gaussian(4.0)) == 10.0
    assert l2_norm(ChaosElement.zero(2), InnovationLaw.rademacher()) == 0.0


def test_shift_is_an_l2_isometry(rng):
    law = InnovationLaw.gaussian(2.25)
    for _ in range(50):
        f = make_any_element(rng, 3)
        j = tuple(int(x) for x in rng.integers(-3, 4, size=3))
        assert l2_norm(shift(f, j), law) == l2_norm(f, law)


def test_json_round_trip():
    f = elem({(0, 0): 1.5, (-2, 3): -0.25})
    assert ChaosElement.from_json_dict(f.to_json_dict()) == f
    data = f.to_json_dict()
    data["entries"].append({"index": [0, 0], "coeff": 2.0})
    with pytest.raises(ValueError):
        ChaosElement.from_json_dict(data)


def test_basis_and_zero():
    e = ChaosElement.basis((1, 0, 2))
    assert e.dim == 3 and e.coeff((1, 0, 2)) == 1.0
    assert ChaosElement.zero(4).is_zero()


def test_law_moments():
    r = InnovationLaw.rademacher(4.0)
    assert r.sigma == 2.0
    assert r.abs_moment(7.0) == 2.0**7
    g = InnovationLaw.gaussian(1.0)
    assert g.abs_moment(2.0) == pytest.approx(1.0)
    assert g.abs_moment(4.0) == pytest.approx(3.0)  # E eps^4 = 3 sigma^4
    c = InnovationLaw.custom(1.0, {4.0: 2.5})
    assert c.abs_moment(4.0) == 2.5
    with pytest.raises(ValueError):
        c.abs_moment(3.0)
    with pytest.raises(ValueError):
        InnovationLaw("rademacher", -1.0)


def test_lp_norm_p2_matches_exact_formula():
    f = elem({(0, 0): 1.0, (2, 2): -2.0})
    law = InnovationLaw.gaussian(2.0)
    est = lp_norm_estimate(f, law, 2.0)
    assert est.exact
    assert est.value == l2_norm(f, law)


def test_lp_norm_monte_carlo_brackets():
    f = elem({(0, 0): 1.0, (1, 0): 1.0, (0, 1): 1.0})
    law = InnovationLaw.rademacher()
    est = lp_norm_estimate(f, law, 4.0, replicas=20_000, seed=5)
    assert not est.exact
    assert est.ci_low <= est.value <= est.ci_high
    # the bracket terms live on the moment scale E|S|^p
    moment = est.value**4.0
    assert moment <= 4.0 * (est.rosenthal_l2 + est.rosenthal_lp)
    assert moment >= 0.9 * est.rosenthal_l2  # Jensen: E S^4 >= (E S^2)^2
    # sum of three signs: E S^4 = 3 + 3*6 = 21, so ||S||_4 = 21^(1/4)
    assert est.value == pytest.approx(21.0 ** 0.25, rel=0.05)


def test_lp_norm_is_seed_deterministic():
    f = elem({(0, 0): 1.0, (1, 1): 0.5})
    law = InnovationLaw.gaussian(1.0)
    a = lp_norm_estimate(f, law, 3.0, replicas=2000, seed=9)
    b = lp_norm_estimate(f, law, 3.0, replicas=2000, seed=9)
    assert a.value == b.value
    with pytest.raises(ValueError):
        lp_norm_estimate(f, law, 0.5)
    with pytest.raises(ValueError):
        lp_norm_estimate(f, law, 4.0, replicas=10)
