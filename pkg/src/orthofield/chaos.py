"""Exact algebra on the linear span of iid innovations.

A :class:`ChaosElement` is a finite sparse map ``j -> c_j`` representing
the random variable ``F = sum_j c_j eps_{-j}`` built from mean-zero iid
innovations ``(eps_i)`` on ``Z^d``. On this span the three operators the
decomposition needs are exact coefficient manipulations:

* ``shift(F, j)`` composes with the shift of the underlying field, so the
  coefficient at index ``l`` of the output is the input coefficient at
  ``l + j``;
* ``project(F, G)`` is the conditional expectation onto a sigma-algebra
  generated by a sub-family of innovations — it zeroes the coefficients
  of innovations outside the family (independence + mean zero);
* ``l2_norm`` is exact by orthogonality of distinct innovations.

Zero coefficients are never stored, so identity checks can demand exact
emptiness rather than small norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .lattice import MultiIndex, leq

__all__ = [
    "ChaosElement",
    "InnovationLaw",
    "SigmaAlgebraSpec",
    "LpNormEstimate",
    "shift",
    "project",
    "combine",
    "l2_norm",
    "lp_norm_estimate",
]

_Z975 = 1.959963984540054  # two-sided 95% normal quantile


class ChaosElement:
    """Finite linear combination ``sum_j c_j eps_{-j}`` of innovations.

    Immutable value type; arithmetic returns new elements and drops
    exact-zero coefficients.
    """

    __slots__ = ("dim", "_coeffs")

    def __init__(self, dim: int, coeffs: Optional[Mapping[Sequence[int], float]] = None):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        clean: Dict[MultiIndex, float] = {}
        if coeffs:
            for j, c in coeffs.items():
                j = tuple(int(x) for x in j)
                if len(j) != dim:
                    raise ValueError(f"index {j} does not have dimension {dim}")
                c = float(c)
                if not math.isfinite(c):
                    raise ValueError(f"coefficient at {j} must be finite, got {c}")
                if c != 0.0:
                    clean[j] = c
        self.dim = dim
        self._coeffs = clean

    # -- accessors ---------------------------------------------------------

    @property
    def coeffs(self) -> Mapping[MultiIndex, float]:
        return MappingProxyType(self._coeffs)

    def coeff(self, j: Sequence[int]) -> float:
        return self._coeffs.get(tuple(int(x) for x in j), 0.0)

    def support(self) -> Tuple[MultiIndex, ...]:
        return tuple(sorted(self._coeffs))

    def is_zero(self) -> bool:
        return not self._coeffs

    def is_measurable(self, base: Optional[Sequence[int]] = None) -> bool:
        """True iff every stored index dominates ``base`` (default 0)."""
        b = tuple(base) if base is not None else (0,) * self.dim
        return all(leq(b, j) for j in self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ChaosElement)
            and self.dim == other.dim
            and self._coeffs == other._coeffs
        )

    def __hash__(self):  # pragma: no cover - mapping field, not hashable
        raise TypeError("ChaosElement is not hashable")

    def __repr__(self) -> str:
        terms = ", ".join(f"{j}: {c:g}" for j, c in sorted(self._coeffs.items()))
        return f"ChaosElement(d={self.dim}, {{{terms}}})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "ChaosElement") -> "ChaosElement":
        return combine(1.0, self, 1.0, other)

    def __sub__(self, other: "ChaosElement") -> "ChaosElement":
        return combine(1.0, self, -1.0, other)

    def __mul__(self, a: float) -> "ChaosElement":
        return ChaosElement(self.dim, {j: a * c for j, c in self._coeffs.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "ChaosElement":
        return self * -1.0

    def max_abs_diff(self, other: "ChaosElement") -> float:
        """Largest coefficient difference; 0.0 iff equal as sparse maps."""
        keys = set(self._coeffs) | set(other._coeffs)
        return max((abs(self.coeff(j) - other.coeff(j)) for j in keys), default=0.0)

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        entries = [
            {"index": list(j), "coeff": c} for j, c in sorted(self._coeffs.items())
        ]
        return {"d": self.dim, "entries": entries}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "ChaosElement":
        d = int(data["d"])
        coeffs: Dict[MultiIndex, float] = {}
        for e in data["entries"]:
            j = tuple(int(x) for x in e["index"])
            if j in coeffs:
                raise ValueError(f"duplicate index {j} in serialized element")
            coeffs[j] = float(e["coeff"])
        return cls(d, coeffs)

    @classmethod
    def zero(cls, dim: int) -> "ChaosElement":
        return cls(dim, {})

    @classmethod
    def basis(cls, j: Sequence[int]) -> "ChaosElement":
        """The single innovation ``eps_{-j}``."""
        return cls(len(tuple(j)), {tuple(j): 1.0})


@dataclass(frozen=True)
class InnovationLaw:
    """Distribution of one innovation: mean zero, variance sigma^2.

    ``abs_moments`` maps p to E|eps|^p for custom laws; rademacher and
    gaussian moments are closed-form.
    """

    kind: str
    variance: float = 1.0
    abs_moments: Optional[Mapping[float, float]] = None
    sampler_id: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ("rademacher", "gaussian", "custom"):
            raise ValueError(f"unknown innovation law kind {self.kind!r}")
        if not (self.variance > 0 and math.isfinite(self.variance)):
            raise ValueError(f"variance must be positive and finite, got {self.variance}")
        if not self.sampler_id:
            object.__setattr__(self, "sampler_id", self.kind)

    @classmethod
    def rademacher(cls, variance: float = 1.0) -> "InnovationLaw":
        return cls("rademacher", variance)

    @classmethod
    def gaussian(cls, variance: float = 1.0) -> "InnovationLaw":
        return cls("gaussian", variance)

    @classmethod
    def custom(cls, variance: float, abs_moments: Mapping[float, float]) -> "InnovationLaw":
        return cls("custom", variance, dict(abs_moments))

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def abs_moment(self, p: float) -> float:
        """E|eps|^p."""
        if p < 0:
            raise ValueError("moment order must be nonnegative")
        if self.kind == "rademacher":
            return self.sigma**p
        if self.kind == "gaussian":
            return self.sigma**p * 2.0 ** (p / 2.0) * math.gamma((p + 1.0) / 2.0) / math.sqrt(math.pi)
        table = self.abs_moments or {}
        if float(p) in table:
            return float(table[float(p)])
        raise ValueError(f"custom law does not provide E|eps|^{p}")

    def transform(self, words: np.ndarray) -> np.ndarray:
        """Turn hashed 64-bit words into draws from this law."""
        if self.kind == "rademacher":
            return kernels.u64_to_rademacher(words, self.sigma)
        if self.kind == "gaussian":
            return kernels.u64_to_gaussian(words, self.sigma)
        raise ValueError(f"sampling is not supported for law kind {self.kind!r}")


@dataclass(frozen=True)
class SigmaAlgebraSpec:
    """Conditioning sigma-algebra for :func:`project`.

    ``shifted_past(j)`` is the algebra generated by the innovations
    ``eps_{-l}`` with ``l >= j`` componentwise (the past shifted by j);
    ``half_space(s, k)`` is generated by ``eps_{-l}`` with ``l_s >= k``.
    """

    kind: str
    shift: Optional[MultiIndex] = None
    axis: Optional[int] = None
    level: Optional[int] = None

    @classmethod
    def shifted_past(cls, shift: Sequence[int]) -> "SigmaAlgebraSpec":
        return cls("shifted_past", shift=tuple(int(x) for x in shift))

    @classmethod
    def half_space(cls, axis: int, level: int) -> "SigmaAlgebraSpec":
        if axis < 1:
            raise ValueError(f"axis must be >= 1, got {axis}")
        return cls("half_space", axis=int(axis), level=int(level))

    def keeps(self, j: Sequence[int]) -> bool:
        if self.kind == "shifted_past":
            assert self.shift is not None
            return leq(self.shift, j)
        if self.kind == "half_space":
            assert self.axis is not None and self.level is not None
            if self.axis > len(j):
                raise ValueError(f"axis {self.axis} out of range for dimension {len(j)}")
            return j[self.axis - 1] >= self.level
        raise ValueError(f"unknown sigma-algebra kind {self.kind!r}")


def shift(F: ChaosElement, j: Sequence[int]) -> ChaosElement:
    """Apply the lattice shift: output coefficient at l is input at l + j."""
    j = tuple(int(x) for x in j)
    if len(j) != F.dim:
        raise ValueError("shift dimension mismatch")
    return ChaosElement(
        F.dim, {tuple(a - b for a, b in zip(l, j)): c for l, c in F.coeffs.items()}
    )


def project(F: ChaosElement, G: SigmaAlgebraSpec) -> ChaosElement:
    """Conditional expectation E[F | G] as a coefficient restriction."""
    if G.kind == "shifted_past" and len(G.shift or ()) != F.dim:
        raise ValueError("sigma-algebra shift dimension mismatch")
    return ChaosElement(F.dim, {j: c for j, c in F.coeffs.items() if G.keeps(j)})


def combine(a: float, F: ChaosElement, b: float, G: ChaosElement) -> ChaosElement:
    """Exact linear combination a*F + b*G with zero cleanup."""
    if F.dim != G.dim:
        raise ValueError("dimension mismatch")
    out: Dict[MultiIndex, float] = {}
    for j, c in F.coeffs.items():
        out[j] = a * c
    for j, c in G.coeffs.items():
        out[j] = out.get(j, 0.0) + b * c
    return ChaosElement(F.dim, out)


def l2_norm(F: ChaosElement, law: InnovationLaw) -> float:
    """``sigma * sqrt(sum c_j^2)``, exact by orthogonality."""
    return law.sigma * math.sqrt(math.fsum(c * c for c in F.coeffs.values()))


@dataclass(frozen=True)
class LpNormEstimate:
    p: float
    value: float
    ci_low: float
    ci_high: float
    stderr: float
    replicas: int
    exact: bool
    rosenthal_l2: float
    rosenthal_lp: float

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "value": self.value,
            "ci": [self.ci_low, self.ci_high],
            "stderr": self.stderr,
            "replicas": self.replicas,
            "exact": self.exact,
            "rosenthal": {"l2_part": self.rosenthal_l2, "lp_part": self.rosenthal_lp},
        }


def _rosenthal_brackets(F: ChaosElement, law: InnovationLaw, p: float) -> Tuple[float, float]:
    l2 = math.fsum(c * c for c in F.coeffs.values()) * law.variance
    lp = math.fsum(abs(c) ** p for c in F.coeffs.values()) * law.abs_moment(p)
    return l2 ** (p / 2.0), lp


def lp_norm_estimate(
    F: ChaosElement,
    law: InnovationLaw,
    p: float,
    replicas: int = 10_000,
    seed: int = 0,
) -> LpNormEstimate:
    """Monte Carlo estimate of ||F||_p with CI and Rosenthal brackets.

    p=2 is returned exactly (orthogonality). Replica r draws one
    innovation per support slot from the substream keyed by (seed, r),
    so the estimate is independent of evaluation order or worker count.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    ros_l2, ros_lp = _rosenthal_brackets(F, law, p)
    if p == 2:
        v = l2_norm(F, law)
        return LpNormEstimate(p, v, v, v, 0.0, 0, True, ros_l2, ros_lp)
    if replicas < 100:
        raise ValueError(f"need at least 100 replicas, got {replicas}")
    support = F.support()
    if not support:
        return LpNormEstimate(p, 0.0, 0.0, 0.0, 0.0, replicas, True, 0.0, 0.0)
    coeff_vec = np.array([F.coeff(j) for j in support], dtype=np.float64)
    n_slots = len(support)
    reps = np.repeat(np.arange(replicas, dtype=np.int64), n_slots)
    slots = np.tile(np.arange(n_slots, dtype=np.int64), replicas)
    idx = np.stack([reps, slots], axis=1)
    state = kernels.stream_state(seed, kernels.DOMAIN_NORM_MC)
    draws = law.transform(kernels.fill_u64(state, idx)).reshape(replicas, n_slots)
    x = (draws * coeff_vec).sum(axis=1)
    powers = np.abs(x) ** p
    m_p = float(powers.mean())
    se = float(powers.std(ddof=1) / math.sqrt(replicas))
    value = m_p ** (1.0 / p)
    lo = max(m_p - _Z975 * se, 0.0) ** (1.0 / p)
    hi = (m_p + _Z975 * se) ** (1.0 / p)
    return LpNormEstimate(p, value, lo, hi, se, replicas, False, ros_l2, ros_lp)
