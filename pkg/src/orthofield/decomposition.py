"""Orthomartingale/coboundary decomposition of linear-chaos elements.

The single-axis building block :func:`axis_split` splits an adapted
element ``F`` into a martingale-difference generator and a coboundary
transfer function along one axis, via the series of conditional
expectations of the shifted element. Nesting the step over all axes and
applying inclusion-exclusion corrections yields the full decomposition

    f = m + sum_J prod_{s in J}(I - U_s) m_J + prod_s (I - U_s) g

where J runs over nonempty proper subsets of the axes, m generates an
orthomartingale-difference field and each m_J does so in the directions
outside J. Everything here is exact sparse-coefficient arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .chaos import (
    ChaosElement,
    InnovationLaw,
    SigmaAlgebraSpec,
    combine,
    l2_norm,
    lp_norm_estimate,
    project,
    shift,
)
from .lattice import MultiIndex

__all__ = [
    "Decomposition",
    "SeriesReport",
    "OmdReport",
    "axis_split",
    "decompose",
    "decompose_generic",
    "reconstruct",
    "omd_verify",
    "series_condition",
    "linear_condition",
    "symbolic_partial_sum",
    "limit_variance",
]


def _unit(dim: int, axis: int) -> MultiIndex:
    return tuple(1 if s == axis else 0 for s in range(1, dim + 1))


def _vadd(a: Sequence[int], b: Sequence[int]) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def _check_measurable(F: ChaosElement, base: MultiIndex, what: str) -> None:
    bad = [j for j in F.support() if any(x < y for x, y in zip(j, base))]
    if bad:
        raise ValueError(
            f"{what} must be measurable w.r.t. the past shifted by {base}; "
            f"offending indices: {bad[:10]}"
            + ("..." if len(bad) > 10 else "")
        )


def axis_split(
    F: ChaosElement, axis: int, base: Optional[Sequence[int]] = None
) -> Tuple[ChaosElement, ChaosElement]:
    """One-axis martingale/coboundary split of an adapted element.

    Returns ``(M, G)`` with ``F = M + G - shift(G, e_axis)`` exactly,
    where ``M = sum_k (E[U^k F | past(base)] - E[U^k F | past(base+e)])``
    and ``G = sum_k E[U^k F | past(base+e)]``. The series terminates at
    the support extent along the axis (each shift strictly lowers it).
    """
    if not 1 <= axis <= F.dim:
        raise ValueError(f"axis {axis} out of range for dimension {F.dim}")
    b = tuple(int(x) for x in base) if base is not None else (0,) * F.dim
    if len(b) != F.dim:
        raise ValueError("base dimension mismatch")
    _check_measurable(F, b, "axis_split input")
    e = _unit(F.dim, axis)
    past0 = SigmaAlgebraSpec.shifted_past(b)
    past1 = SigmaAlgebraSpec.shifted_past(_vadd(b, e))
    M = ChaosElement.zero(F.dim)
    G = ChaosElement.zero(F.dim)
    cur = F
    while True:
        p0 = project(cur, past0)
        if p0.is_zero():
            break
        p1 = project(cur, past1)
        M = M + combine(1.0, p0, -1.0, p1)
        G = G + p1
        cur = shift(cur, e)
    return M, G


def _ie_correct(
    X: ChaosElement, axes: Sequence[int], base: MultiIndex
) -> ChaosElement:
    """Signed sum of projections onto pasts shifted along subsets of axes.

    ``sum_{T subseteq axes} (-1)^|T| E[X | past(base + sum_{s in T} e_s)]``.
    The T=empty term is E[X|past(base)] = X for adapted X; each correction
    removes the part still visible after one more unit shift.
    """
    out = ChaosElement.zero(X.dim)
    for r in range(len(axes) + 1):
        for T in combinations(axes, r):
            shifted = base
            for s in T:
                shifted = _vadd(shifted, _unit(X.dim, s))
            term = project(X, SigmaAlgebraSpec.shifted_past(shifted))
            out = combine(1.0, out, float((-1) ** r), term)
    return out


@dataclass
class Decomposition:
    dim: int
    m: ChaosElement
    boundary_terms: Dict[FrozenSet[int], ChaosElement]
    corner: ChaosElement
    source: Optional[ChaosElement] = None

    def __post_init__(self) -> None:
        full = frozenset(range(1, self.dim + 1))
        for J in self.boundary_terms:
            if not J or not J < full:
                raise ValueError(f"boundary key {set(J)} is not a proper nonempty subset")

    def term(self, J: Sequence[int]) -> ChaosElement:
        return self.boundary_terms.get(frozenset(J), ChaosElement.zero(self.dim))

    def to_json_dict(self) -> dict:
        mj = {
            str(sum(1 << (s - 1) for s in J)): X.to_json_dict()
            for J, X in sorted(
                self.boundary_terms.items(),
                key=lambda kv: sum(1 << (s - 1) for s in kv[0]),
            )
        }
        return {
            "d": self.dim,
            "m": self.m.to_json_dict(),
            "mJ": mj,
            "g": self.corner.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Decomposition":
        d = int(data["d"])
        terms: Dict[FrozenSet[int], ChaosElement] = {}
        for mask_str, elem in data["mJ"].items():
            mask = int(mask_str)
            J = frozenset(s for s in range(1, d + 1) if mask & (1 << (s - 1)))
            terms[J] = ChaosElement.from_json_dict(elem)
        return cls(
            dim=d,
            m=ChaosElement.from_json_dict(data["m"]),
            boundary_terms=terms,
            corner=ChaosElement.from_json_dict(data["g"]),
        )


def _all_proper_subsets(d: int) -> List[FrozenSet[int]]:
    axes = range(1, d + 1)
    out = []
    for r in range(1, d):
        out.extend(frozenset(T) for T in combinations(axes, r))
    return out


def _fill_missing(d: int, terms: Dict[FrozenSet[int], ChaosElement]) -> Dict[FrozenSet[int], ChaosElement]:
    for J in _all_proper_subsets(d):
        terms.setdefault(J, ChaosElement.zero(d))
    return terms


def _decompose_d2(f: ChaosElement) -> Decomposition:
    z = (0, 0)
    e2 = (0, 1)
    m2, g2 = axis_split(f, 2, z)
    m1, g1 = axis_split(m2, 1, z)
    m = _ie_correct(m1, (2,), z)
    mJ1 = _ie_correct(g1, (2,), z)
    mJ2, g = axis_split(g2, 1, e2)
    terms = {frozenset({1}): mJ1, frozenset({2}): mJ2}
    return Decomposition(2, m, terms, g, source=f)


def _decompose_d3(f: ChaosElement) -> Decomposition:
    z = (0, 0, 0)
    e1, e2, e3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    m3, g3 = axis_split(f, 3, z)
    m2, g2 = axis_split(m3, 2, z)
    m1, g1 = axis_split(m2, 1, z)
    m = _ie_correct(m1, (2, 3), z)
    mJ1 = _ie_correct(g1, (2, 3), z)
    # transfer along axis 2: split along axis 1 at the raised base
    a1, b1 = axis_split(g2, 1, e2)
    mJ2 = _ie_correct(a1, (3,), e2)
    mJ12 = _ie_correct(b1, (3,), e2)
    # transfer along axis 3: split along axes 1 then 2
    c1, d1 = axis_split(g3, 1, e3)
    c2, e2t = axis_split(c1, 2, e3)
    mJ3 = _ie_correct(c2, (1,), e3)
    mJ23 = _ie_correct(e2t, (1,), e3)
    mJ13, g = axis_split(d1, 2, _vadd(e1, e3))
    terms = {
        frozenset({1}): mJ1,
        frozenset({2}): mJ2,
        frozenset({3}): mJ3,
        frozenset({1, 2}): mJ12,
        frozenset({1, 3}): mJ13,
        frozenset({2, 3}): mJ23,
    }
    return Decomposition(3, m, terms, g, source=f)


def _decompose_rec(
    F: ChaosElement, axes: Tuple[int, ...], base: MultiIndex
) -> Tuple[ChaosElement, Dict[FrozenSet[int], ChaosElement], ChaosElement]:
    """Recursive decomposition of F over the given (ascending) axes.

    Steps down the axes from highest to lowest collecting one transfer
    function per axis, corrects the fully-collapsed part by
    inclusion-exclusion over the non-minimal axes, and recurses on each
    transfer over the axes below it at the raised base. Pieces coming
    out of a sub-decomposition inherit the processed axis in their key;
    the key covering every axis is the corner.
    """
    if len(axes) == 1:
        M, G = axis_split(F, axes[0], base)
        return M, {}, G
    cur = F
    transfers: Dict[int, ChaosElement] = {}
    for s in reversed(axes):
        cur, transfers[s] = axis_split(cur, s, base)
    rest = axes[1:]
    m = _ie_correct(cur, rest, base)
    pieces: Dict[FrozenSet[int], ChaosElement] = {
        frozenset({axes[0]}): _ie_correct(transfers[axes[0]], rest, base)
    }
    for t in rest:
        below = tuple(s for s in axes if s < t)
        above = tuple(s for s in axes if s > t)
        raised = _vadd(base, _unit(F.dim, t))
        sm, sterms, sg = _decompose_rec(transfers[t], below, raised)
        pieces[frozenset({t})] = _ie_correct(sm, above, base)
        for K, X in sterms.items():
            pieces[frozenset({t}) | K] = _ie_correct(X, above, base)
        pieces[frozenset({t}) | frozenset(below)] = _ie_correct(sg, above, base)
    corner = pieces.pop(frozenset(axes))
    return m, pieces, corner


def decompose(f: ChaosElement) -> Decomposition:
    """Full orthomartingale/coboundary decomposition of an adapted element.

    d <= 3 uses the hard-coded explicit chains; higher dimensions use
    the generic recursion (same pattern, validated through the type
    invariants). Zero input yields the all-zero decomposition.
    """
    zero_base = (0,) * f.dim
    _check_measurable(f, zero_base, "decompose input")
    d = f.dim
    if f.is_zero():
        z = ChaosElement.zero(d)
        return Decomposition(d, z, _fill_missing(d, {}), z, source=f)
    if d == 1:
        m, g = axis_split(f, 1, zero_base)
        return Decomposition(1, m, {}, g, source=f)
    if d == 2:
        out = _decompose_d2(f)
    elif d == 3:
        out = _decompose_d3(f)
    else:
        m, terms, g = _decompose_rec(f, tuple(range(1, d + 1)), zero_base)
        out = Decomposition(d, m, terms, g, source=f)
    _fill_missing(d, out.boundary_terms)
    return out


def decompose_generic(f: ChaosElement) -> Decomposition:
    """The generic recursion for every d (cross-check against decompose)."""
    zero_base = (0,) * f.dim
    _check_measurable(f, zero_base, "decompose input")
    d = f.dim
    if f.is_zero():
        z = ChaosElement.zero(d)
        return Decomposition(d, z, _fill_missing(d, {}), z, source=f)
    m, terms, g = _decompose_rec(f, tuple(range(1, d + 1)), zero_base)
    return Decomposition(d, m, _fill_missing(d, terms), g, source=f)


def _difference_product(X: ChaosElement, axes: Sequence[int]) -> ChaosElement:
    """Expand ``prod_{s in axes}(I - U_s) X`` as signed shifts over subsets."""
    out = ChaosElement.zero(X.dim)
    axes = tuple(sorted(axes))
    for r in range(len(axes) + 1):
        for T in combinations(axes, r):
            j = (0,) * X.dim
            for s in T:
                j = _vadd(j, _unit(X.dim, s))
            out = combine(1.0, out, float((-1) ** r), shift(X, j))
    return out


def reconstruct(D: Decomposition) -> ChaosElement:
    """Evaluate m + sum_J prod_{s in J}(I-U_s) m_J + prod_s (I-U_s) g."""
    total = D.m
    for J in sorted(D.boundary_terms, key=lambda J: (len(J), sorted(J))):
        X = D.boundary_terms[J]
        if not X.is_zero():
            total = total + _difference_product(X, sorted(J))
    total = total + _difference_product(D.corner, range(1, D.dim + 1))
    return total


@dataclass(frozen=True)
class OmdReport:
    """Residual norms of the martingale-direction projections.

    ``m_residuals[s]`` is the unit-variance l2 norm of the projection of
    m onto the past shifted by e_s; ``boundary_residuals[(J, s)]`` the
    same for m_J along each axis s outside J. All must be exactly zero.
    """

    m_residuals: Dict[int, float]
    boundary_residuals: Dict[Tuple[FrozenSet[int], int], float]
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "m_residuals": {str(s): v for s, v in sorted(self.m_residuals.items())},
            "boundary_residuals": [
                {
                    "J": sorted(J),
                    "axis": s,
                    "residual": v,
                }
                for (J, s), v in sorted(
                    self.boundary_residuals.items(),
                    key=lambda kv: (sorted(kv[0][0]), kv[0][1]),
                )
            ],
            "passed": self.passed,
        }


def omd_verify(D: Decomposition) -> OmdReport:
    unit_law = InnovationLaw.rademacher(1.0)
    d = D.dim
    m_res: Dict[int, float] = {}
    for s in range(1, d + 1):
        past = SigmaAlgebraSpec.shifted_past(_unit(d, s))
        m_res[s] = l2_norm(project(D.m, past), unit_law)
    b_res: Dict[Tuple[FrozenSet[int], int], float] = {}
    for J, X in D.boundary_terms.items():
        for s in sorted(set(range(1, d + 1)) - J):
            past = SigmaAlgebraSpec.shifted_past(_unit(d, s))
            b_res[(J, s)] = l2_norm(project(X, past), unit_law)
    passed = all(v == 0.0 for v in m_res.values()) and all(
        v == 0.0 for v in b_res.values()
    )
    return OmdReport(m_res, b_res, passed)


@dataclass(frozen=True)
class SeriesReport:
    """One projective series: terms (k, weight, norm), running totals."""

    axis: int
    p: float
    kind: str
    terms: Tuple[Tuple[int, float, float], ...]
    partial_sums: Tuple[float, ...]
    truncated_at: int
    converged: bool
    total: float
    rosenthal_terms: Optional[Tuple[Tuple[int, float, float], ...]] = None
    rosenthal_total: Optional[float] = None

    def to_json_dict(self) -> dict:
        out = {
            "axis": self.axis,
            "p": self.p,
            "kind": self.kind,
            "terms": [list(t) for t in self.terms],
            "partial_sums": list(self.partial_sums),
            "truncated_at": self.truncated_at,
            "converged": self.converged,
            "total": self.total,
        }
        if self.rosenthal_total is not None:
            out["rosenthal_terms"] = [list(t) for t in self.rosenthal_terms or ()]
            out["rosenthal_total"] = self.rosenthal_total
        return out


# series over k starts at 0 in one dimension (flat weight, k^0 with 0^0=1)
# and at 1 otherwise, where the weight k^{d-1} kills the k=0 term anyway.
def _series_start(d: int) -> int:
    return 0 if d == 1 else 1


def series_condition(
    f: ChaosElement,
    axis: int,
    p: float,
    law: InnovationLaw,
    kind: str = "half_space",
    cap: int = 10_000,
    tail_tol: float = 1e-12,
    lp_replicas: int = 2000,
    seed: int = 0,
) -> SeriesReport:
    """Weighted projective series sum_k k^{d-1} ||E[f | algebra(k)]||_p.

    kind="shifted_past" conditions on the past shifted by k*e_axis;
    kind="half_space" on the half-space {l_axis >= k}. Terminates when
    the projection is exactly empty (finite support) or at the cap.
    """
    if kind not in ("shifted_past", "half_space"):
        raise ValueError(f"unknown series kind {kind!r}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not 1 <= axis <= f.dim:
        raise ValueError(f"axis {axis} out of range for dimension {f.dim}")
    _check_measurable(f, (0,) * f.dim, "series_condition input")
    d = f.dim
    terms: List[Tuple[int, float, float]] = []
    partial: List[float] = []
    total = 0.0
    converged = False
    k = _series_start(d)
    truncated_at = k
    while k <= cap:
        if kind == "shifted_past":
            spec = SigmaAlgebraSpec.shifted_past(tuple(k if s == axis else 0 for s in range(1, d + 1)))
        else:
            spec = SigmaAlgebraSpec.half_space(axis, k)
        pk = project(f, spec)
        if pk.is_zero():
            converged = True
            truncated_at = k
            break
        if p == 2:
            norm = l2_norm(pk, law)
        else:
            norm = lp_norm_estimate(pk, law, p, replicas=lp_replicas, seed=seed + k).value
        w = float(k ** (d - 1))
        terms.append((k, w, norm))
        total += w * norm
        partial.append(total)
        truncated_at = k
        k += 1
    else:
        converged = bool(terms) and terms[-1][1] * terms[-1][2] <= tail_tol
    return SeriesReport(
        axis=axis,
        p=p,
        kind=kind,
        terms=tuple(terms),
        partial_sums=tuple(partial),
        truncated_at=truncated_at,
        converged=converged,
        total=total,
    )


def linear_condition(
    a: Mapping[Sequence[int], float],
    axis: int,
    d: int,
    p: float,
    law: InnovationLaw,
    cap: int = 10_000,
) -> SeriesReport:
    """Coefficient-level series sum_k k^{d-1} sqrt(sum_{i: i_axis >= k} a_i^2).

    For p > 2 also reports the Rosenthal-augmented series whose terms add
    the tail lp sum (sum |a_i|^p)^{1/p}. Cross-checks term by term that
    sigma times the l2 series coincides with the p=2 half-space series of
    the same coefficients.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not 1 <= axis <= d:
        raise ValueError(f"axis {axis} out of range for dimension {d}")
    coeffs: Dict[MultiIndex, float] = {}
    for j, c in a.items():
        j = tuple(int(x) for x in j)
        if len(j) != d:
            raise ValueError(f"coefficient index {j} does not have dimension {d}")
        c = float(c)
        if not math.isfinite(c):
            raise ValueError(f"non-finite coefficient at {j}")
        if c != 0.0:
            coeffs[j] = c
    terms: List[Tuple[int, float, float]] = []
    ros_terms: List[Tuple[int, float, float]] = []
    partial: List[float] = []
    total = 0.0
    ros_total = 0.0
    converged = False
    k = _series_start(d)
    truncated_at = k
    while k <= cap:
        lam = [c for j, c in coeffs.items() if j[axis - 1] >= k]
        if not lam:
            converged = True
            truncated_at = k
            break
        l2_term = math.sqrt(math.fsum(c * c for c in lam))
        w = float(k ** (d - 1))
        terms.append((k, w, l2_term))
        total += w * l2_term
        partial.append(total)
        if p > 2:
            lp_term = l2_term + math.fsum(abs(c) ** p for c in lam) ** (1.0 / p)
            ros_terms.append((k, w, lp_term))
            ros_total += w * lp_term
        truncated_at = k
        k += 1
    # exact coincidence with the p=2 half-space series of the same element
    element = ChaosElement(d, coeffs)
    if all(x >= 0 for j in coeffs for x in j):
        hs = series_condition(element, axis, 2, law, kind="half_space", cap=cap)
        for (k1, w1, n1), (k2, _, n2) in zip(terms, hs.terms):
            if k1 != k2 or law.sigma * n1 != n2:
                raise RuntimeError(
                    f"half-space cross-check failed at k={k1}: "
                    f"sigma*{n1} != {n2}"
                )
    return SeriesReport(
        axis=axis,
        p=p,
        kind="linear_l2",
        terms=tuple(terms),
        partial_sums=tuple(partial),
        truncated_at=truncated_at,
        converged=converged,
        total=total,
        rosenthal_terms=tuple(ros_terms) if p > 2 else None,
        rosenthal_total=ros_total if p > 2 else None,
    )


def symbolic_partial_sum(X: ChaosElement, n: int, axis: int = 1) -> ChaosElement:
    """``sum_{i=0}^{n-1} U_axis^i X`` as an exact element."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    e = _unit(X.dim, axis)
    out = ChaosElement.zero(X.dim)
    j = (0,) * X.dim
    for _ in range(n):
        out = out + shift(X, j)
        j = _vadd(j, e)
    return out


def limit_variance(f: ChaosElement, law: InnovationLaw, mode: str = "martingale") -> float:
    """Variance of the scaling limit of normalized partial sums.

    mode="martingale": the second moment of the fully-collapsed
    decomposition part m (the variance actually governing the limit);
    mode="field": the second moment of f itself — the two agree exactly
    when f already generates an orthomartingale-difference field.
    """
    if mode == "martingale":
        return l2_norm(decompose(f).m, law) ** 2
    if mode == "field":
        return l2_norm(f, law) ** 2
    raise ValueError(f"unknown variance mode {mode!r}")
