"""VC indices, the symmetric-difference pseudo-metric, covering numbers
and entropy integrals for rectangle classes on [0,1]^d.

Shattering is decided exactly for quadrant and box classes by rank
reduction: which subsets a member picks out of a finite point set
depends only on the per-axis coordinate orderings, so enumerating
rank configurations is exhaustive. Covering numbers are bracketed —
greedy net from above, separated packing from below — on a dyadic
discretization whose error is accounted for before any claim is made.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .lattice import Rect

__all__ = [
    "SetClass",
    "VcReport",
    "CoveringReport",
    "picked_count",
    "vc_index",
    "rho",
    "covering_number",
    "entropy_integral",
    "covering_exponent",
]


@dataclass(frozen=True)
class SetClass:
    """A class of sub-rectangles of [0,1]^d.

    kind="quadrants" is {[0,t]}; kind="boxes" is {[s,t], s <= t};
    kind="explicit" is a finite member list. ``resolution`` is the
    dyadic denominator used when the class must be discretized.
    """

    kind: str
    dim: int
    resolution: int = 256
    members: Tuple[Rect, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("quadrants", "boxes", "explicit"):
            raise ValueError(f"unknown class kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.resolution < 1:
            raise ValueError(f"resolution must be >= 1, got {self.resolution}")
        if self.kind == "explicit":
            if not self.members:
                raise ValueError("explicit class needs at least one member")
            for r in self.members:
                if r.dim != self.dim:
                    raise ValueError("member dimension mismatch")
        elif self.members:
            raise ValueError(f"{self.kind} class does not take explicit members")

    def known_vc_index(self) -> Optional[int]:
        if self.kind == "quadrants":
            return self.dim + 1
        if self.kind == "boxes":
            return 2 * self.dim + 1
        return None


def _validate_points(points: Sequence[Sequence[float]], dim: int) -> List[Tuple[float, ...]]:
    pts = [tuple(float(x) for x in p) for p in points]
    for p in pts:
        if len(p) != dim:
            raise ValueError(f"point {p} does not have dimension {dim}")
        if any(not 0.0 <= x <= 1.0 for x in p):
            raise ValueError(f"point {p} outside [0,1]^{dim}")
    if len(set(pts)) != len(pts):
        raise ValueError("duplicate points")
    return pts


def picked_count(C: SetClass, points: Sequence[Sequence[float]]) -> int:
    """Number of distinct subsets of the points picked out by the class."""
    pts = _validate_points(points, C.dim)
    if not pts:
        return 1
    n = len(pts)
    if C.kind == "explicit":
        picked = {
            frozenset(
                i
                for i, x in enumerate(pts)
                if all(lo <= xi <= hi for xi, lo, hi in zip(x, r.lower, r.upper))
            )
            for r in C.members
        }
        return len(picked)
    # rank reduction: only the per-axis orderings of the coordinates matter
    ranks = []
    sizes = []
    axis_min = []
    for s in range(C.dim):
        uniq = sorted({p[s] for p in pts})
        pos = {v: r + 1 for r, v in enumerate(uniq)}
        ranks.append([pos[p[s]] for p in pts])
        sizes.append(len(uniq))
        axis_min.append(uniq[0])
    picked = set()
    if C.kind == "quadrants":
        # Cut level 0 stands for t_s below every coordinate, which needs
        # t_s >= 0; it is unreachable on an axis whose smallest value is 0.
        axis_cuts = [
            range(0 if axis_min[s] > 0.0 else 1, sizes[s] + 1)
            for s in range(C.dim)
        ]
        for cut in product(*axis_cuts):
            picked.add(
                frozenset(
                    i for i in range(n) if all(ranks[s][i] <= cut[s] for s in range(C.dim))
                )
            )
    else:  # boxes: closed rank intervals per axis, plus the empty box
        per_axis = [
            [(lo, hi) for lo in range(1, m + 1) for hi in range(lo, m + 1)]
            for m in sizes
        ]
        picked.add(frozenset())
        for choice in product(*per_axis):
            picked.add(
                frozenset(
                    i
                    for i in range(n)
                    if all(
                        choice[s][0] <= ranks[s][i] <= choice[s][1]
                        for s in range(C.dim)
                    )
                )
            )
    return len(picked)


@dataclass(frozen=True)
class VcReport:
    """VC index result: exact value, or a certified lower bound."""

    value: int
    exact: bool
    witness: Optional[Tuple[Tuple[float, ...], ...]]
    configs_examined: int

    def to_json_dict(self) -> dict:
        return {
            "value": self.value,
            "exact": self.exact,
            "witness": [list(p) for p in self.witness] if self.witness else None,
            "configs_examined": self.configs_examined,
        }


def _rank_configs(n: int, d: int):
    """Canonical point sets covering every per-axis ordering pattern.

    Axis 1 is fixed to the identity ordering; the other axes take all
    permutations. Coordinates sit strictly inside (0,1) at k/(n+1).
    """
    base = [(i + 1) / (n + 1) for i in range(n)]
    if d == 1:
        yield tuple((b,) for b in base)
        return
    for perms in product(permutations(range(n)), repeat=d - 1):
        yield tuple(
            (base[i],) + tuple(base[perm[i]] for perm in perms) for i in range(n)
        )


def _explicit_candidates(C: SetClass) -> List[Tuple[float, ...]]:
    """One representative point per arrangement cell of the member bounds."""
    per_axis: List[List[float]] = []
    for s in range(C.dim):
        cuts = sorted({0.0, 1.0} | {r.lower[s] for r in C.members} | {r.upper[s] for r in C.members})
        vals = set(cuts)
        for a, b in zip(cuts, cuts[1:]):
            if b > a:
                vals.add((a + b) / 2.0)
        per_axis.append(sorted(vals))
    return [tuple(p) for p in product(*per_axis)]


def vc_index(C: SetClass, max_n: int = 8, budget: int = 200_000) -> VcReport:
    """Smallest n such that no n-point set is shattered.

    Quadrant/box classes are decided exactly through rank configurations;
    explicit classes search arrangement-cell representatives. If the
    budget runs out the result degrades to a certified lower bound
    (never a wrong exact claim).
    """
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    examined = 0
    witness: Optional[Tuple[Tuple[float, ...], ...]] = None
    if C.kind == "explicit":
        candidates = _explicit_candidates(C)
    for n in range(1, max_n + 1):
        if C.kind == "explicit":
            configs = combinations(candidates, n)
        else:
            configs = _rank_configs(n, C.dim)
        found = None
        for pts in configs:
            examined += 1
            if examined > budget:
                return VcReport(n, False, witness, examined - 1)
            if picked_count(C, pts) == (1 << n):
                found = tuple(pts)
                break
        if found is None:
            return VcReport(n, True, witness, examined)
        witness = found
    return VcReport(max_n + 1, False, witness, examined)


def rho(A: Rect, B: Rect) -> float:
    """sqrt of the volume of the symmetric difference of two rectangles."""
    if A.dim != B.dim:
        raise ValueError("rectangle dimension mismatch")
    return math.sqrt(
        max(A.volume() + B.volume() - 2.0 * A.intersection_volume(B), 0.0)
    )


def _discretize(C: SetClass, resolution: int) -> Tuple[np.ndarray, np.ndarray]:
    """Member corners (lower, upper) in deterministic lexicographic order."""
    d = C.dim
    if C.kind == "explicit":
        L = np.array([r.lower for r in C.members], dtype=np.float64)
        U = np.array([r.upper for r in C.members], dtype=np.float64)
        return L, U
    grid = np.arange(resolution + 1, dtype=np.float64) / resolution
    if C.kind == "quadrants":
        mesh = np.meshgrid(*([grid] * d), indexing="ij")
        U = np.stack([m.ravel() for m in mesh], axis=1)
        return np.zeros_like(U), U
    pairs = [(a, b) for a in range(resolution + 1) for b in range(a, resolution + 1)]
    arr = np.array(pairs, dtype=np.float64) / resolution
    idx = [np.arange(len(pairs))] * d
    mesh = np.meshgrid(*idx, indexing="ij")
    flat = [m.ravel() for m in mesh]
    L = np.stack([arr[f, 0] for f in flat], axis=1)
    U = np.stack([arr[f, 1] for f in flat], axis=1)
    return L, U


def _grid_error(C: SetClass, resolution: int) -> float:
    """Worst-case rho-distance from any member to the discretized family."""
    h = 1.0 / resolution
    if C.kind == "explicit":
        return 0.0
    if C.kind == "quadrants":
        return math.sqrt(C.dim * h / 2.0)
    return math.sqrt(C.dim * h)


def _check_adequacy(C: SetClass, eps: float, resolution: int) -> None:
    delta = _grid_error(C, resolution)
    if delta > eps / 4.0:
        factor = 2.0 if C.kind == "quadrants" else 1.0
        need = math.ceil(factor * C.dim / (eps / 4.0) ** 2)
        raise ValueError(
            f"resolution 1/{resolution} too coarse for eps={eps}: grid error "
            f"{delta:.4g} > eps/4; need resolution at least 1/{need}"
        )


def _dist2_to(L: np.ndarray, U: np.ndarray, vol: np.ndarray, k: int) -> np.ndarray:
    inter = np.prod(
        np.clip(np.minimum(U, U[k]) - np.maximum(L, L[k]), 0.0, None), axis=1
    )
    return vol + vol[k] - 2.0 * inter


def _greedy_cover(L: np.ndarray, U: np.ndarray, eps: float) -> int:
    vol = np.prod(U - L, axis=1)
    m = len(vol)
    uncovered = np.ones(m, dtype=bool)
    count = 0
    e2 = eps * eps
    while uncovered.any():
        k = int(np.argmax(uncovered))
        count += 1
        uncovered &= _dist2_to(L, U, vol, k) > e2
    return count


def _greedy_packing(L: np.ndarray, U: np.ndarray, eps: float) -> int:
    vol = np.prod(U - L, axis=1)
    m = len(vol)
    min_d2 = np.full(m, np.inf)
    sep2 = 4.0 * eps * eps
    count = 0
    for k in range(m):
        if min_d2[k] > sep2:
            count += 1
            min_d2 = np.minimum(min_d2, _dist2_to(L, U, vol, k))
    return count


def covering_number(C: SetClass, eps: float, resolution: Optional[int] = None) -> int:
    """Greedy upper bound on the closed-ball covering number N(C, rho, eps)."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    res = resolution if resolution is not None else C.resolution
    _check_adequacy(C, eps, res)
    L, U = _discretize(C, res)
    return _greedy_cover(L, U, eps)


@dataclass(frozen=True)
class CoveringReport:
    kind: str
    dim: int
    resolution: int
    eps_grid: Tuple[float, ...]
    n_upper: Tuple[int, ...]
    n_lower: Tuple[int, ...]
    entropy: Tuple[float, ...]
    vc: int
    vw_constant: float
    vw_envelope: Tuple[float, ...]
    below_envelope: bool
    dudley_integral: float
    dudley_finite: bool
    lp_exponent: Optional[float] = None
    lp_integral: Optional[float] = None
    lp_finite: Optional[bool] = None

    def to_json_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "d": self.dim,
            "resolution": self.resolution,
            "eps_grid": list(self.eps_grid),
            "n_upper": list(self.n_upper),
            "n_lower": list(self.n_lower),
            "entropy": list(self.entropy),
            "vc": self.vc,
            "vw_constant": self.vw_constant,
            "vw_envelope": list(self.vw_envelope),
            "below_envelope": self.below_envelope,
            "dudley_integral": self.dudley_integral,
            "dudley_finite": self.dudley_finite,
        }
        if self.lp_exponent is not None:
            out["lp_exponent"] = self.lp_exponent
            out["lp_integral"] = self.lp_integral
            out["lp_finite"] = self.lp_finite
        return out

    def to_csv_text(self) -> str:
        lines = ["eps,n_upper,n_lower,entropy,vw_envelope"]
        for row in zip(
            self.eps_grid, self.n_upper, self.n_lower, self.entropy, self.vw_envelope
        ):
            lines.append(",".join(repr(v) for v in row))
        return "\n".join(lines) + "\n"


def _vw_env(eps: np.ndarray, K: float, V: int) -> np.ndarray:
    return K * V * (4.0 * math.e) ** V * eps ** (-2.0 * (V - 1))


def entropy_integral(
    C: SetClass,
    p: Optional[float] = None,
    eps_grid: Optional[Sequence[float]] = None,
    resolution: Optional[int] = None,
) -> CoveringReport:
    """Covering-number bracket plus Dudley and N^(1/p) entropy integrals.

    Integrates sqrt(log N) by trapezoid on the epsilon grid; below the
    smallest grid-adequate epsilon the tail uses the fitted polynomial
    envelope K V (4e)^V eps^(-2(V-1)), whose square-root-log integral
    always converges, while the N^(1/p) tail converges iff p > 2(V-1).
    """
    res = resolution if resolution is not None else C.resolution
    if eps_grid is None:
        eps_min = 4.0 * _grid_error(C, res)
        eps_min = max(eps_min, 1.0 / res if C.kind != "explicit" else 0.05)
        eps_grid = tuple(np.linspace(eps_min, 1.0, 13))
    eps = np.array(sorted(float(e) for e in eps_grid), dtype=np.float64)
    if eps[0] <= 0 or eps[-1] > 1:
        raise ValueError("eps grid must lie in (0, 1]")
    _check_adequacy(C, float(eps[0]), res)
    L, U = _discretize(C, res)
    n_up = np.array([_greedy_cover(L, U, float(e)) for e in eps])
    n_lo = np.array([_greedy_packing(L, U, float(e)) for e in eps])
    H = np.log(n_up.astype(np.float64))
    V = C.known_vc_index()
    if V is None:
        V = vc_index(C).value
    base = V * (4.0 * math.e) ** V * eps ** (-2.0 * (V - 1))
    K = float(np.max(n_up / base))
    env = _vw_env(eps, K, V)
    below = bool(np.all(n_up <= env * (1 + 1e-12)))
    # Dudley integral: trapezoid on the grid + envelope-extrapolated tail
    dudley = float(np.trapezoid(np.sqrt(H), eps))
    e0 = float(eps[0])
    tail_eps = np.geomspace(1e-9, e0, 4001)
    tail_h = np.maximum(np.log(_vw_env(tail_eps, K, V)), 0.0)
    dudley += float(np.trapezoid(np.sqrt(tail_h), tail_eps))
    dudley += 1e-9 * math.sqrt(max(math.log(float(_vw_env(np.array([1e-9]), K, V)[0])), 0.0))
    lp_int = lp_fin = None
    if p is not None:
        if p <= 0:
            raise ValueError(f"p must be positive, got {p}")
        a = 2.0 * (V - 1) / p
        lp_fin = a < 1.0
        grid_part = float(np.trapezoid(n_up.astype(np.float64) ** (1.0 / p), eps))
        if lp_fin:
            c0 = (K * V * (4.0 * math.e) ** V) ** (1.0 / p)
            lp_int = grid_part + c0 * e0 ** (1.0 - a) / (1.0 - a)
        else:
            lp_int = math.inf
    return CoveringReport(
        kind=C.kind,
        dim=C.dim,
        resolution=res,
        eps_grid=tuple(float(e) for e in eps),
        n_upper=tuple(int(v) for v in n_up),
        n_lower=tuple(int(v) for v in n_lo),
        entropy=tuple(float(h) for h in H),
        vc=V,
        vw_constant=K,
        vw_envelope=tuple(float(v) for v in env),
        below_envelope=below,
        dudley_integral=dudley,
        dudley_finite=True,
        lp_exponent=p,
        lp_integral=lp_int,
        lp_finite=lp_fin,
    )


def covering_exponent(
    C: SetClass, eps_grid: Sequence[float], resolution: Optional[int] = None
) -> float:
    """Fitted slope of log N against log(1/eps) over the given grid."""
    eps = np.array(sorted(float(e) for e in eps_grid), dtype=np.float64)
    ns = np.array([covering_number(C, float(e), resolution) for e in eps], dtype=np.float64)
    slope, _ = np.polyfit(np.log(1.0 / eps), np.log(ns), 1)
    return float(slope)
