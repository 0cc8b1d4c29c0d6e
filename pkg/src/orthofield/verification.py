"""Quantitative checks of the moment, tail, limit and tightness claims.

Everything here reports fitted constants rather than asserting
unspecified universal ones: the moment-ratio envelope, the
sub-exponential tail prefactor, the Kolmogorov-Smirnov distance to the
Gaussian limit, and the Hoelder-modulus exceedance table each produce a
number plus a pass/fail flag at an explicit, configurable threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp, ndtr

from . import fields as _fields
from .chaos import lp_norm_estimate
from .fields import FieldSpec, PathSample

__all__ = [
    "YoungFunctionSpec",
    "young_eval",
    "beta_exponent",
    "luxemburg_norm",
    "MomentRatioReport",
    "moment_ratio",
    "rademacher_sum_pnorm",
    "KSReport",
    "ks_statistic",
    "gaussian_limit_test",
    "CovarianceReport",
    "covariance_structure_test",
    "TailBoundReport",
    "tail_bound_check",
    "HolderReport",
    "holder_threshold",
    "holder_check",
]


def _h_shift(alpha: float) -> float:
    """Shift making exp((x+h)^alpha) convex at 0: ((1-a)/a)^(1/a) on (0,1)."""
    if 0.0 < alpha < 1.0:
        return ((1.0 - alpha) / alpha) ** (1.0 / alpha)
    return 0.0


@dataclass(frozen=True)
class YoungFunctionSpec:
    """Sub-exponential Young function psi_a(x)=exp((x+h)^a)-exp(h^a), or x^a."""

    alpha: float
    kind: str = "subexp"

    def __post_init__(self) -> None:
        if self.kind not in ("subexp", "power"):
            raise ValueError(f"unknown Young function kind {self.kind!r}")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")
        if self.kind == "power" and self.alpha < 1:
            raise ValueError("power Young function needs alpha >= 1 for convexity")

    @property
    def h(self) -> float:
        return _h_shift(self.alpha)

    def __call__(self, x: float) -> float:
        if x < 0:
            raise ValueError("Young functions are evaluated on [0, inf)")
        if self.kind == "power":
            return x**self.alpha
        return math.exp((x + self.h) ** self.alpha) - math.exp(self.h**self.alpha)


def young_eval(q: float, x: float) -> float:
    """psi_q(x) = exp((x+h_q)^q) - exp(h_q^q) with the convexifying shift."""
    if q <= 0:
        raise ValueError(f"q must be positive, got {q}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    h = _h_shift(q)
    return math.exp((x + h) ** q) - math.exp(h**q)


def beta_exponent(q: float, d: int) -> float:
    """2q/(2-dq) on (0, 2/d); +inf at q = 2/d (bounded-field regime)."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    limit = 2.0 / d
    if q <= 0 or q > limit * (1 + 1e-12):
        raise ValueError(f"q must lie in (0, {limit}], got {q}")
    if q >= limit * (1 - 1e-12):
        return math.inf
    return 2.0 * q / (2.0 - d * q)


def luxemburg_norm(sample: Sequence[float], psi: YoungFunctionSpec) -> float:
    """inf{c > 0 : empirical mean of psi(|Z|/c) <= 1}.

    Solved by log-space bisection to relative tolerance 1e-8 so that
    huge exponentials never overflow; 0 for the all-zero sample.
    """
    z = np.abs(np.asarray(sample, dtype=np.float64).ravel())
    if z.size == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(z)):
        raise ValueError("sample values must be finite")
    zmax = float(z.max())
    if zmax == 0.0:
        return 0.0
    if psi.kind == "power":
        return float(np.mean(z**psi.alpha) ** (1.0 / psi.alpha))
    alpha, h = psi.alpha, psi.h
    log_n = math.log(z.size)
    # mean psi(z/c) <= 1  <=>  logsumexp((z/c+h)^a) - log N <= log(1+e^{h^a})
    target = math.log1p(math.exp(h**alpha))

    def excess(c: float) -> float:
        return float(logsumexp((z / c + h) ** alpha)) - log_n - target

    hi = zmax
    for _ in range(2000):
        if excess(hi) <= 0:
            break
        hi *= 2.0
    else:  # pragma: no cover - excess(c) -> h^a - target < 0 as c grows
        raise RuntimeError("failed to bracket the Luxemburg norm from above")
    lo = hi
    while lo > 1e-300 and excess(lo * 0.5) <= 0:
        lo *= 0.5
    lo *= 0.5
    while hi - lo > 1e-8 * hi:
        mid = math.sqrt(lo * hi)
        if excess(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return hi


def rademacher_sum_pnorm(m: int, p: float) -> float:
    """Exact ||sum of m independent signs||_p via the binomial distribution."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    total = math.fsum(
        math.comb(m, j) * float(abs(m - 2 * j)) ** p for j in range(m + 1)
    )
    return (total / 2.0**m) ** (1.0 / p)


@dataclass(frozen=True)
class MomentRatioReport:
    dim: int
    p: float
    n: Tuple[int, ...]
    measured: float
    reference: float
    ratio: float
    method: str

    def to_json_dict(self) -> dict:
        return {
            "d": self.dim,
            "p": self.p,
            "n": list(self.n),
            "measured": self.measured,
            "reference": self.reference,
            "ratio": self.ratio,
            "method": self.method,
        }


def moment_ratio(
    field: FieldSpec,
    n: Sequence[int] | int,
    p: float,
    replicas: int = 0,
    seed: int = 0,
    method: str = "auto",
) -> MomentRatioReport:
    """||sum_{0<=k<=n} X_k||_p against (sum_k ||X_k||_p^2)^(1/2).

    The product field factorizes the sum across axes, so its p-norm is
    an exact product of one-dimensional sign-sum norms; other fields are
    estimated by Monte Carlo.
    """
    if p <= 1:
        raise ValueError(f"p must be > 1, got {p}")
    if method not in ("auto", "exact_factorized", "monte_carlo"):
        raise ValueError(f"unknown method {method!r}")
    d = field.dim
    extents = (n,) * d if isinstance(n, int) else tuple(int(x) for x in n)
    if len(extents) != d or any(x < 0 for x in extents):
        raise ValueError(f"bad extents {extents} for d={d}")
    sites = tuple(x + 1 for x in extents)  # k runs over 0..n inclusive
    n_sites = math.prod(sites)
    if field.kind == "product_omd" and method in ("auto", "exact_factorized"):
        measured = math.prod(rademacher_sum_pnorm(m, p) for m in sites)
        reference = math.sqrt(n_sites)  # each |Z_k| = 1, so ||Z_k||_p = 1
        return MomentRatioReport(
            d, p, extents, measured, reference, measured / reference, "exact_factorized"
        )
    if method == "exact_factorized":
        raise ValueError("exact factorization only applies to the product field")
    if replicas < 100:
        raise ValueError(f"Monte Carlo needs at least 100 replicas, got {replicas}")
    reps = np.arange(replicas, dtype=np.int64)
    if field.kind == "product_omd":
        sums = np.ones(replicas, dtype=np.float64)
        for s in range(d):
            seq = _fields._axis_sequences(seed, reps, s + 1, 0, sites[s])
            sums = sums * seq.sum(axis=1)
        one_site_p = 1.0
    elif field.kind == "iid":
        box = tuple((0, m) for m in sites)
        vals = _fields._innovation_block(field.law, box, seed, reps)
        sums = vals.reshape(replicas, -1).sum(axis=1)
        one_site_p = field.law.abs_moment(p) ** (1.0 / p)
    else:
        offsets, coeffs = _fields._support_arrays(field.coeffs, d)
        jmin = offsets.min(axis=0)
        jmax = offsets.max(axis=0)
        box = tuple(
            (0 - int(mx), ex - int(mn) + 1) for ex, mn, mx in zip(extents, jmin, jmax)
        )
        eps = _fields._innovation_block(field.law, box, seed, reps)
        base = tuple(0 - lo for lo, _ in box)
        vals = _fields.kernels.convolve_batch(eps, base, offsets, coeffs, sites)
        sums = vals.reshape(replicas, -1).sum(axis=1)
        est = lp_norm_estimate(
            field.element(), field.law, p, replicas=max(10_000, replicas), seed=seed + 1
        )
        one_site_p = est.value
    measured = float(np.mean(np.abs(sums) ** p) ** (1.0 / p))
    reference = one_site_p * math.sqrt(n_sites)
    return MomentRatioReport(
        d, p, extents, measured, reference, measured / reference, "monte_carlo"
    )


def ks_statistic(values: np.ndarray, sigma: float) -> float:
    """Kolmogorov-Smirnov distance to the centered normal with sd sigma."""
    x = np.sort(np.asarray(values, dtype=np.float64).ravel())
    n = x.size
    u = ndtr(x / sigma)
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(max((i / n - u).max(), (u - (i - 1) / n).max()))


@dataclass(frozen=True)
class KSReport:
    sample_size: int
    target_variance: float
    statistic: float
    threshold: float
    passed: bool
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {
            "sample_size": self.sample_size,
            "target_variance": self.target_variance,
            "ks": self.statistic,
            "threshold": self.threshold,
            "passed": self.passed,
            "degenerate": self.degenerate,
        }


def gaussian_limit_test(
    sample, target_variance: float, threshold: Optional[float] = None
) -> KSReport:
    """KS test of scalar statistics against N(0, target_variance).

    Default threshold is twice the asymptotic 95% critical value
    1.36/sqrt(N), the slack absorbing finite-n bias. A constant sample
    is reported as a degenerate failure rather than an error.
    """
    values = np.asarray(getattr(sample, "values", sample), dtype=np.float64).ravel()
    if values.size < 2:
        raise ValueError("need at least two sample values")
    if not (target_variance > 0 and math.isfinite(target_variance)):
        raise ValueError(f"target variance must be positive, got {target_variance}")
    n = values.size
    if threshold is None:
        threshold = 2.0 * 1.36 / math.sqrt(n)
    sigma = math.sqrt(target_variance)
    stat = ks_statistic(values, sigma)
    degenerate = bool(values.max() == values.min())
    passed = (not degenerate) and stat <= threshold
    return KSReport(n, target_variance, stat, threshold, passed, degenerate)


@dataclass(frozen=True)
class CovarianceReport:
    rect_a: Tuple[Tuple[float, ...], Tuple[float, ...]]
    rect_b: Tuple[Tuple[float, ...], Tuple[float, ...]]
    overlap_volume: float
    target: float
    empirical: float
    stderr: float
    mode: str
    tolerance: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "rect_a": [list(self.rect_a[0]), list(self.rect_a[1])],
            "rect_b": [list(self.rect_b[0]), list(self.rect_b[1])],
            "overlap_volume": self.overlap_volume,
            "target": self.target,
            "empirical": self.empirical,
            "stderr": self.stderr,
            "mode": self.mode,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def covariance_structure_test(
    paths: PathSample,
    target_variance: float,
    pair: Tuple[int, int] = (0, 1),
    rel_tol: float = 0.10,
    disjoint_sigmas: float = 5.0,
) -> CovarianceReport:
    """Empirical Cov(S_n(A), S_n(B)) against target * vol(A intersect B).

    Overlapping rectangles are held to a relative tolerance; disjoint
    ones to a multiple of the covariance standard error around zero.
    Sums use math.fsum so the result is independent of replica order.
    """
    if paths.rects is None:
        raise ValueError("covariance test needs a rectangle-sum path sample")
    i, j = pair
    A, B = paths.rects[i], paths.rects[j]
    a = [float(v) for v in paths.values[:, i]]
    b = [float(v) for v in paths.values[:, j]]
    n = len(a)
    if n < 1000:
        raise ValueError(f"need at least 1000 replicas, got {n}")
    mean_a = math.fsum(a) / n
    mean_b = math.fsum(b) / n
    prods = [(x - mean_a) * (y - mean_b) for x, y in zip(a, b)]
    cov = math.fsum(prods) / (n - 1)
    mean_p = math.fsum(prods) / n
    var_p = math.fsum((p - mean_p) ** 2 for p in prods) / (n - 1)
    se = math.sqrt(var_p / n)
    lam = A.intersection_volume(B)
    target = target_variance * lam
    if lam == 0.0:
        passed = abs(cov) <= disjoint_sigmas * se
        mode, tolerance = "disjoint", disjoint_sigmas
    else:
        passed = abs(cov - target) <= rel_tol * abs(target)
        mode, tolerance = "relative", rel_tol
    return CovarianceReport(
        (A.lower, A.upper), (B.lower, B.upper), lam, target, cov, se, mode, tolerance, passed
    )


@dataclass(frozen=True)
class TailBoundReport:
    q: float
    dim: int
    reference: float
    h: float
    kappa: Optional[float]
    rows: Tuple[Tuple[float, float, Optional[float]], ...]
    monotone: bool
    bounded_regime: bool

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "d": self.dim,
            "reference": self.reference,
            "h": self.h,
            "kappa": self.kappa,
            "rows": [list(r) for r in self.rows],
            "monotone": self.monotone,
            "bounded_regime": self.bounded_regime,
        }

    def to_csv_text(self) -> str:
        lines = ["x,frequency,bound"]
        for x, f, bd in self.rows:
            lines.append(f"{x!r},{f!r},{'' if bd is None else repr(bd)}")
        return "\n".join(lines) + "\n"


def tail_bound_check(
    sample,
    q: float,
    d: int,
    orlicz_reference: float,
    x_grid: Sequence[float],
    field_bounded: bool = False,
) -> TailBoundReport:
    """Empirical tails of |S| against (1+e^{h^q}) exp(-(x/(kappa R)+h)^q).

    The prefactor constant is unspecified upstream, so the report fits
    the smallest kappa making the bound hold at every grid point and
    records it; stability of the fit across n is the actual check.
    """
    values = np.abs(
        np.asarray(getattr(sample, "values", sample), dtype=np.float64).ravel()
    )
    if values.size == 0:
        raise ValueError("empty sample")
    limit = 2.0 / d
    if q <= 0 or q > limit * (1 + 1e-12):
        raise ValueError(f"q must lie in (0, {limit}], got {q}")
    bounded_regime = q >= limit * (1 - 1e-12)
    if bounded_regime and not field_bounded:
        raise ValueError(f"q = 2/d = {limit} requires a uniformly bounded field")
    if not (orlicz_reference > 0 and math.isfinite(orlicz_reference)):
        raise ValueError(f"Orlicz reference must be positive, got {orlicz_reference}")
    R = orlicz_reference
    h = _h_shift(q)
    pref = 1.0 + math.exp(h**q)
    xs = [float(x) for x in x_grid]
    if any(x < 0 for x in xs):
        raise ValueError("x grid must be nonnegative")
    freqs = [float(np.mean(values >= x)) for x in xs]
    fits = []
    for x, f in zip(xs, freqs):
        if x > 0 and f > 0:
            y = math.log(pref / f) ** (1.0 / q) - h
            fits.append(x / (R * y))
    kappa = max(fits) if fits else None
    rows: List[Tuple[float, float, Optional[float]]] = []
    for x, f in zip(xs, freqs):
        if kappa is None:
            bd = pref if x == 0 else None
        else:
            bd = pref * math.exp(-((x / (kappa * R) + h) ** q))
        rows.append((x, f, bd))
    bds = [bd for _, _, bd in rows if bd is not None]
    monotone = all(b2 <= b1 for b1, b2 in zip(bds, bds[1:]))
    return TailBoundReport(
        q, d, R, h, kappa, tuple(rows), monotone, bounded_regime
    )


def holder_threshold(d: int) -> float:
    """Integrability order above which the Hoelder-space limit holds."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return 4.0 / math.log2(4.0 * d / (4.0 * d - 3.0))


@dataclass(frozen=True)
class HolderReport:
    dim: int
    p: float
    threshold: float
    gamma: float
    admissible: bool
    fitted_k: Optional[float]
    rows: Tuple[Tuple[float, float, float, Optional[float]], ...]
    modulus_stats: Dict[str, float]

    def to_json_dict(self) -> dict:
        return {
            "d": self.dim,
            "p": self.p,
            "threshold": self.threshold,
            "gamma": self.gamma,
            "admissible": self.admissible,
            "fitted_k": self.fitted_k,
            "rows": [list(r) for r in self.rows],
            "modulus_stats": dict(self.modulus_stats),
        }

    def to_csv_text(self) -> str:
        lines = ["distance,epsilon,frequency,bound"]
        for dist, eps, f, bd in self.rows:
            lines.append(f"{dist!r},{eps!r},{f!r},{'' if bd is None else repr(bd)}")
        return "\n".join(lines) + "\n"


def holder_check(
    paths: PathSample,
    p: float,
    gamma: float,
    eps_grid: Sequence[float] = (0.1, 0.2, 0.4, 0.8, 1.6),
) -> HolderReport:
    """Increment-exceedance table P(|Y(t)-Y(s)| >= eps) vs K eps^-p |s-t|^{p/2}.

    K is fitted as the smallest constant valid for every (s, t, eps)
    triple simultaneously; the report also carries the empirical
    Hoelder modulus sup |Y(t)-Y(s)|/|t-s|^gamma per replica.
    """
    if paths.points is None:
        raise ValueError("holder_check needs a point-evaluated path sample")
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    d = paths.dim
    admissible = gamma < 0.5 - d / p
    pts = np.asarray(paths.points, dtype=np.float64)
    vals = np.asarray(paths.values, dtype=np.float64)
    ii, jj = np.triu_indices(pts.shape[0], k=1)
    dist = np.sqrt(((pts[ii] - pts[jj]) ** 2).sum(axis=1))
    keep = dist > 0
    ii, jj, dist = ii[keep], jj[keep], dist[keep]
    diffs = np.abs(vals[:, ii] - vals[:, jj])
    modulus = (diffs / dist**gamma).max(axis=1)
    k_fit: Optional[float] = None
    for eps in eps_grid:
        freq = (diffs >= eps).mean(axis=0)
        pos = freq > 0
        if np.any(pos):
            cand = float(np.max(freq[pos] * eps**p / dist[pos] ** (p / 2.0)))
            k_fit = cand if k_fit is None else max(k_fit, cand)
    rows: List[Tuple[float, float, float, Optional[float]]] = []
    uniq, inverse = np.unique(np.round(dist, 12), return_inverse=True)
    for gi, dval in enumerate(uniq):
        cols = inverse == gi
        for eps in eps_grid:
            freq = float((diffs[:, cols] >= eps).mean())
            bd = None if k_fit is None else k_fit * eps**-p * float(dval) ** (p / 2.0)
            rows.append((float(dval), float(eps), freq, bd))
    stats = {
        "mean": float(modulus.mean()),
        "max": float(modulus.max()),
        "p95": float(np.percentile(modulus, 95)),
    }
    return HolderReport(
        d, p, holder_threshold(d), gamma, admissible, k_fit, tuple(rows), stats
    )
