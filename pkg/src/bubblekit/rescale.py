"""Weighted rescaling of polynomial families and cusp-angle classification.

Substituting x_j -> t**(c*w_j) * x_j sends every monomial's t-exponent
along an affine line in c; after dividing by the minimal power the t = 0
part is the rescaled limit.  The finitely many c where the minimizing
monomial set changes are the breakpoints, and chaining stages at the
smallest breakpoint reproduces the bubble cascades of unstable
singularities.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import EmptyBreakpoints
from .exact import PolyFamily, _to_rat


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        ws = tuple(_to_rat(w) for w in self.weights)
        if not ws or any(w <= 0 for w in ws):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "weights", ws)

    def __len__(self) -> int:
        return len(self.weights)

    def pairing(self, degrees) -> Fraction:
        return sum((w * d for w, d in zip(self.weights, degrees)), Fraction(0))


@dataclass(frozen=True)
class RescaleResult:
    rescaled: PolyFamily        # substituted family, minimal t-exponent 0
    limit: PolyFamily           # t = 0 part, leading-normalized
    c_used: Fraction
    dropped: PolyFamily         # positive-exponent part (vanishes as t -> 0)


def rescale(family: PolyFamily, weights: WeightVector, c) -> RescaleResult:
    """Substitute x_j = t**(c*w_j) x_j, divide by the minimal t-power, split
    the limit from the terms that vanish as t -> 0."""
    c = _to_rat(c)
    if family.is_zero():
        raise ValueError("cannot rescale the zero family")
    if len(weights) != len(family.variables):
        raise ValueError("one weight per variable required")
    shifted = {}
    for (te, degs), v in family.terms.items():
        shifted[(te + c * weights.pairing(degs), degs)] = v
    moved = PolyFamily(family.variables, shifted)
    e_min = moved.min_t_exponent()
    normalized = moved.shift_t(-e_min)
    limit = normalized.at_t_zero()
    dropped = normalized - limit
    return RescaleResult(normalized, limit.leading_normalized(), c, dropped)


def breakpoints(family: PolyFamily, weights: WeightVector) -> list[Fraction]:
    """All c > 0 where the rescaled limit changes.

    Each monomial's post-substitution exponent is the line
    e(c) = e0 + c * <w, deg>; the limit changes exactly where the
    minimizing set of lines changes.
    """
    if family.is_zero():
        raise ValueError("zero family has no breakpoints")
    if len(weights) != len(family.variables):
        raise ValueError("one weight per variable required")
    lines = {(weights.pairing(degs), te) for (te, degs) in family.terms}
    lines = sorted(lines)
    candidates: set[Fraction] = set()
    for i, (s1, e1) in enumerate(lines):
        for s2, e2 in lines[i + 1:]:
            if s1 == s2:
                continue
            c = (e1 - e2) / (s2 - s1)
            if c > 0:
                candidates.add(c)

    def min_set(c: Fraction) -> frozenset:
        vals = [(e + c * s, (s, e)) for s, e in lines]
        m = min(v for v, _ in vals)
        return frozenset(line for v, line in vals if v == m)

    out = []
    ordered = sorted(candidates)
    for i, c in enumerate(ordered):
        lo = ordered[i - 1] if i > 0 else Fraction(0)
        hi = ordered[i + 1] if i + 1 < len(ordered) else c + 1
        if min_set((lo + c) / 2) != min_set((c + hi) / 2):
            out.append(c)
    return out


def iterate_cascade(family: PolyFamily, schedule, policy: str = "smallest") -> list[RescaleResult]:
    """Chain rescaling stages; each stage feeds the previous stage's
    rescaled family (not its limit) into the next weight vector.

    The default policy picks the smallest positive breakpoint, the first
    scale at which the limit changes.  A stage without breakpoints raises
    EmptyBreakpoints.
    """
    if policy not in ("smallest", "largest"):
        raise ValueError(f"unknown cascade policy {policy!r}")
    current = family
    results: list[RescaleResult] = []
    for stage, weights in enumerate(schedule):
        w = weights if isinstance(weights, WeightVector) else WeightVector(tuple(weights))
        bps = breakpoints(current, w)
        if not bps:
            raise EmptyBreakpoints(stage)
        c = bps[0] if policy == "smallest" else bps[-1]
        result = rescale(current, w, c)
        results.append(result)
        current = result.rescaled
    return results


class CuspStability(Enum):
    NOT_KLT = "not_klt"
    STABLE = "stable"
    STRICTLY_SEMISTABLE = "strictly_semistable"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class CuspClassification:
    stability: CuspStability
    euler_weights: tuple[Fraction, Fraction] | None  # dilation weights on (z, w)


def cusp_classify(beta) -> CuspClassification:
    """Stability of the cusp pair (C^2, (1-beta) {w^2 = z^3}).

    The pair is klt iff beta > 1/6; stable dilations use weights
    (2/a, 3/a) with a = 3*beta - 1/2, unstable ones (1, 1/g) with
    g = 2*beta - 1, and the two coincide at beta = 5/6.
    """
    b = _to_rat(beta)
    if not (0 < b < 1):
        raise ValueError(f"cone angle parameter {b} outside (0,1)")
    if b <= Fraction(1, 6):
        return CuspClassification(CuspStability.NOT_KLT, None)
    if b < Fraction(5, 6):
        a = 3 * b - Fraction(1, 2)
        return CuspClassification(CuspStability.STABLE, (2 / a, 3 / a))
    if b == Fraction(5, 6):
        a = 3 * b - Fraction(1, 2)
        return CuspClassification(CuspStability.STRICTLY_SEMISTABLE, (2 / a, 3 / a))
    g = 2 * b - 1
    return CuspClassification(CuspStability.UNSTABLE, (Fraction(1), 1 / g))


def ak_unstable_check(n: int, k: int) -> bool:
    """Strict instability of the n-dimensional A_k singularity:
    k + 1 > 2(n-1)/(n-2)."""
    if n < 3:
        raise ValueError("n must be at least 3")
    return Fraction(k + 1) > Fraction(2 * (n - 1), n - 2)
