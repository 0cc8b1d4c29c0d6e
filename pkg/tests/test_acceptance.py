"""Acceptance checks: one test per release criterion.

Each test is self-contained and prints as a single pass/fail line under
``pytest -v``. Monte Carlo criteria pin their seeds so the suite is
byte-reproducible; the determinism criterion re-runs them across worker
counts and compares raw bytes.
"""

from __future__ import annotations

import math
import time
from itertools import product

import numpy as np
import pytest

from orthofield import (
    ChaosElement,
    ExperimentSpec,
    FieldSpec,
    InnovationLaw,
    Rect,
    SetClass,
    SigmaAlgebraSpec,
    StatisticSpec,
    YoungFunctionSpec,
    as_path_sample,
    covariance_structure_test,
    covering_exponent,
    decompose,
    decompose_generic,
    entropy_integral,
    gaussian_limit_test,
    holder_check,
    holder_threshold,
    l2_norm,
    limit_variance,
    linear_condition,
    luxemburg_norm,
    moment_ratio,
    omd_verify,
    project,
    reconstruct,
    run_experiment,
    series_condition,
    shift,
    symbolic_partial_sum,
    tail_bound_check,
    vc_index,
)

from conftest import make_dyadic_element, make_measurable_element

RAD = InnovationLaw.rademacher()
GAUSS = InnovationLaw.gaussian()

ONES_2D = {(0, 0): 1.0, (0, 1): 1.0, (1, 0): 1.0, (1, 1): 1.0}


def _unit(d: int, axis: int) -> tuple:
    return tuple(1 if s == axis else 0 for s in range(1, d + 1))


def _grid_points(d: int, level: int) -> tuple:
    side = [(k + 1) / (1 << level) for k in range(1 << level)]
    return tuple(product(*([side] * d)))


# ------------------------------------------------------------------ fixtures
# Shared Monte Carlo runs (several criteria reuse the same experiments).


@pytest.fixture(scope="module")
def clt_experiment():
    spec = ExperimentSpec(
        field=FieldSpec("linear", 2, RAD, ONES_2D),
        n=64,
        replicas=5000,
        seed=20260814,
        statistic=StatisticSpec("points", points=((1.0, 1.0), (0.5, 0.75))),
    )
    start = time.monotonic()
    sample = run_experiment(spec, workers=2)
    return spec, sample, time.monotonic() - start


COV_RECTS = (
    Rect((0.0, 0.0), (0.5, 0.5)),      # nested inside the unit square
    Rect((0.0, 0.0), (1.0, 1.0)),
    Rect((0.0, 0.0), (0.75, 0.75)),    # overlapping pair
    Rect((0.25, 0.25), (1.0, 1.0)),
    Rect((0.0, 0.0), (0.25, 0.25)),    # disjoint pair
    Rect((0.5, 0.5), (1.0, 1.0)),
)


@pytest.fixture(scope="module")
def covariance_experiment():
    spec = ExperimentSpec(
        field=FieldSpec("linear", 2, RAD, ONES_2D),
        n=64,
        replicas=5000,
        seed=20260815,
        statistic=StatisticSpec("rect_sums", rects=COV_RECTS),
    )
    return spec, run_experiment(spec, workers=2)


def _tail_spec(n: int) -> ExperimentSpec:
    return ExperimentSpec(
        field=FieldSpec("product_omd", 2),
        n=n,
        replicas=1500,
        seed=20260816,
        statistic=StatisticSpec("points", points=_grid_points(2, 3)),
    )


@pytest.fixture(scope="module")
def tail_experiments():
    return {n: run_experiment(_tail_spec(n), workers=2) for n in (16, 32, 64)}


@pytest.fixture(scope="module")
def holder_experiment():
    spec = ExperimentSpec(
        field=FieldSpec("linear", 2, GAUSS, ONES_2D),
        n=64,
        replicas=1000,
        seed=20260817,
        statistic=StatisticSpec("points", points=_grid_points(2, 3)),
    )
    return spec, run_experiment(spec, workers=2)


# ------------------------------------------------------------------ criteria


def test_criterion_01_decomposition_exactness():
    rng = np.random.default_rng(101)
    start = time.monotonic()
    for d in (1, 2, 3):
        for _ in range(200):
            f = make_measurable_element(rng, d, span=5)
            D = decompose(f)
            assert reconstruct(D).max_abs_diff(f) < 1e-10
            report = omd_verify(D)
            assert report.passed
            assert all(v == 0.0 for v in report.m_residuals.values())
            assert all(v == 0.0 for v in report.boundary_residuals.values())
    assert time.monotonic() - start < 60.0


def test_criterion_02_martingale_coboundary_identity_and_telescoping():
    rng = np.random.default_rng(102)
    for _ in range(50):
        f = make_dyadic_element(rng, 1)
        D = decompose(f)
        m, g = D.m, D.corner  # d=1: the whole coboundary is the corner term
        residual = f - (m + g - shift(g, (1,)))
        assert residual.is_zero()
        for n in (1, 2, 5):
            lhs = symbolic_partial_sum(f, n)
            rhs = symbolic_partial_sum(m, n) + g - shift(g, (n,))
            assert (lhs - rhs).is_zero()


def test_criterion_03_generic_recursion_matches_explicit_chains():
    rng = np.random.default_rng(103)
    for d in (2, 3):
        for _ in range(100):
            f = make_measurable_element(rng, d)
            explicit = decompose(f)
            generic = decompose_generic(f)
            assert generic.m.max_abs_diff(explicit.m) <= 1e-12


def test_criterion_04_projection_calculus_identities():
    rng = np.random.default_rng(104)
    for d in (1, 2, 3):
        for _ in range(1000):
            f = make_measurable_element(rng, d)
            a = tuple(int(x) for x in rng.integers(0, 3, size=d))
            b = tuple(int(x) for x in rng.integers(0, 3, size=d))
            past_a = SigmaAlgebraSpec.shifted_past(a)
            past_b = SigmaAlgebraSpec.shifted_past(b)
            meet = SigmaAlgebraSpec.shifted_past(
                tuple(max(x, y) for x, y in zip(a, b))
            )
            # commutation: both orders land on the meet algebra, exactly
            assert project(project(f, past_a), past_b) == project(f, meet)
            assert project(project(f, past_b), past_a) == project(f, meet)
            # tower: the coarser algebra wins
            nested = SigmaAlgebraSpec.shifted_past(tuple(x + 1 for x in a))
            assert project(project(f, past_a), nested) == project(f, nested)
            # contraction of the norm
            assert l2_norm(project(f, past_a), RAD) <= l2_norm(f, RAD)
            # shift isometry and shift/projection interchange
            j = tuple(int(x) for x in rng.integers(-2, 3, size=d))
            assert l2_norm(shift(f, j), RAD) == l2_norm(f, RAD)
            shifted_spec = SigmaAlgebraSpec.shifted_past(
                tuple(x + y for x, y in zip(a, j))
            )
            assert project(shift(f, j), past_a) == shift(project(f, shifted_spec), j)


def test_criterion_05_gaussian_limit_at_desk_scale(clt_experiment):
    spec, sample, elapsed = clt_experiment
    core = limit_variance(spec.field.element(), RAD)
    assert core == 16.0  # symbolic: the collapsed part is 4 eps_0
    for col, t in ((0, (1.0, 1.0)), (1, (0.5, 0.75))):
        target = core * t[0] * t[1]
        report = gaussian_limit_test(sample.values[:, col], target, threshold=0.03)
        assert report.passed, f"KS {report.statistic:.4f} at t={t}"
    assert elapsed < 300.0


def test_criterion_06_covariance_tracks_intersection_volume(covariance_experiment):
    spec, sample = covariance_experiment
    paths = as_path_sample(sample)
    core = limit_variance(spec.field.element(), RAD)
    nested = covariance_structure_test(paths, core, pair=(0, 1), rel_tol=0.10)
    assert nested.mode == "relative" and nested.passed
    overlap = covariance_structure_test(paths, core, pair=(2, 3), rel_tol=0.10)
    assert overlap.mode == "relative" and overlap.passed
    disjoint = covariance_structure_test(paths, core, pair=(4, 5), disjoint_sigmas=5.0)
    assert disjoint.mode == "disjoint" and disjoint.passed


def test_criterion_07_moment_ratio_envelope():
    field = FieldSpec("product_omd", 2)
    start = time.monotonic()
    ratios = {}
    for p in (2.0, 4.0, 8.0, 16.0):
        report = moment_ratio(field, 64, p, method="exact_factorized")
        assert report.method == "exact_factorized"
        ratios[p] = report.ratio
    kappa = max(r / p for p, r in ratios.items())
    assert all(r <= 3.0 * p for p, r in ratios.items())
    assert kappa <= 3.0
    assert all(r / p >= 0.1 for p, r in ratios.items())
    assert time.monotonic() - start < 10.0


def test_criterion_08_tail_envelope_stability(tail_experiments):
    kappas = []
    for n, sample in sorted(tail_experiments.items()):
        sup_abs = np.max(np.abs(sample.values), axis=1)
        ref = luxemburg_norm(sup_abs, YoungFunctionSpec(1.0))
        x_grid = np.quantile(sup_abs, np.linspace(0.5, 0.99, 10))
        report = tail_bound_check(
            sup_abs, 1.0, 2, ref, x_grid, field_bounded=True
        )
        assert report.bounded_regime
        assert report.monotone  # fitted envelope decreases in x, exactly
        assert report.kappa is not None
        kappas.append(report.kappa)
    assert max(kappas) <= 2.0 * min(kappas)


def test_criterion_09_vc_indices_certified():
    start = time.monotonic()
    for C, expected in (
        (SetClass("quadrants", 1), 2),
        (SetClass("quadrants", 2), 3),
        (SetClass("boxes", 1), 3),
    ):
        report = vc_index(C)
        assert report.value == expected
        assert report.exact
        assert report.value == C.known_vc_index()
    assert time.monotonic() - start < 30.0


def test_criterion_10_entropy_growth_and_envelope():
    slope = covering_exponent(
        SetClass("quadrants", 1, resolution=4096), np.linspace(0.05, 0.3, 8)
    )
    assert 1.8 <= slope <= 2.2
    report = entropy_integral(SetClass("quadrants", 2, resolution=256))
    assert report.dudley_finite
    assert math.isfinite(report.dudley_integral)
    assert report.below_envelope


def test_criterion_11_holder_modulus(holder_experiment):
    assert holder_threshold(1) == 2.0
    assert abs(holder_threshold(2) - 5.8995) < 1e-3
    spec, sample = holder_experiment
    paths = as_path_sample(sample)
    report = holder_check(paths, p=8.0, gamma=0.2)
    assert report.admissible  # gamma = 0.2 < 1/2 - 2/8
    assert report.fitted_k is not None
    # the single fitted constant is valid on every (s, t, eps) row
    for dist, eps, freq, bound in report.rows:
        if bound is not None:
            assert freq <= bound * (1 + 1e-12)


def test_criterion_12_projective_series_conditions():
    geometric = ChaosElement(1, {(k,): 2.0**-k for k in range(40)})
    target = 4.0 / math.sqrt(3.0)
    series = series_condition(geometric, 1, 2.0, RAD)
    linear = linear_condition(dict(geometric.coeffs), 1, 1, 2.0, RAD)
    assert series.converged and linear.converged
    assert abs(series.total - target) < 1e-9
    assert abs(linear.total - target) < 1e-9

    rng = np.random.default_rng(112)
    for _ in range(100):
        d = int(rng.integers(1, 3))
        f = make_measurable_element(rng, d)
        sp = series_condition(f, 1, 2.0, RAD, kind="shifted_past")
        hs = series_condition(f, 1, 2.0, RAD, kind="half_space")
        for (k1, w1, n1), (k2, w2, n2) in zip(sp.terms, hs.terms):
            assert (k1, w1) == (k2, w2)
            assert n1 <= n2  # exact: smaller support, monotone rounding
        assert sp.total <= hs.total


def test_criterion_13_worker_count_invariance(
    clt_experiment, covariance_experiment, tail_experiments, holder_experiment
):
    specs_and_bytes = [
        (clt_experiment[0], clt_experiment[1].values.tobytes()),
        (covariance_experiment[0], covariance_experiment[1].values.tobytes()),
        (holder_experiment[0], holder_experiment[1].values.tobytes()),
    ] + [
        (_tail_spec(n), sample.values.tobytes())
        for n, sample in tail_experiments.items()
    ]
    for spec, reference in specs_and_bytes:
        for workers in (1, 3):
            rerun = run_experiment(spec, workers=workers)
            assert rerun.values.tobytes() == reference
