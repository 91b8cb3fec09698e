"""Exact arithmetic core: Gaussian rationals, truncated t-series, polynomial families.

All combinatorial decisions downstream (tree splits, stability walls,
rescaling limits) compare these values exactly; floats appear only in the
numeric verification layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

Rat = Fraction

#: Returned by :func:`ord_of` / :func:`agree_order` when no nonzero
#: coefficient is stored.  The true order is then only known to be at
#: least the truncation order.
INFINITE_ORDER = math.inf


def _to_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to a rational")


def rat_str(q: Fraction) -> str:
    """Canonical text form of a rational: lowest terms, '/' only if needed."""
    return str(q)


@dataclass(frozen=True)
class GaussRat:
    """A Gaussian rational re + im*i with exact field arithmetic."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _to_rat(self.re))
        object.__setattr__(self, "im", _to_rat(self.im))

    @staticmethod
    def of(x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, complex):
            raise TypeError("GaussRat is exact; convert floats explicitly")
        return GaussRat(_to_rat(x))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __add__(self, other) -> "GaussRat":
        o = GaussRat.of(other)
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussRat":
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other) -> "GaussRat":
        return self + (-GaussRat.of(other))

    def __rsub__(self, other) -> "GaussRat":
        return GaussRat.of(other) + (-self)

    def __mul__(self, other) -> "GaussRat":
        o = GaussRat.of(other)
        return GaussRat(self.re * o.re - self.im * o.im,
                        self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "GaussRat":
        o = GaussRat.of(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("division by zero GaussRat")
        return GaussRat((self.re * o.re + self.im * o.im) / n,
                        (self.im * o.re - self.re * o.im) / n)

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def sort_key(self):
        return (self.re, self.im)

    def to_json(self) -> list:
        return [[self.re.numerator, self.re.denominator],
                [self.im.numerator, self.im.denominator]]

    @staticmethod
    def from_json(data) -> "GaussRat":
        (rn, rd), (im_n, im_d) = data
        return GaussRat(Fraction(rn, rd), Fraction(im_n, im_d))

    def __str__(self) -> str:
        if self.im == 0:
            return rat_str(self.re)
        return f"({rat_str(self.re)}{'+' if self.im >= 0 else '-'}{rat_str(abs(self.im))}i)"


GAUSS_ZERO = GaussRat()
GAUSS_ONE = GaussRat(Fraction(1))


class Germ:
    """A power series in t truncated at ``trunc``: only exponents < trunc are stored.

    Immutable; arithmetic shrinks the truncation window to the smaller
    operand.  Zero coefficients are never stored.
    """

    __slots__ = ("_coeffs", "_trunc", "_items")

    def __init__(self, coeffs: Mapping[int, GaussRat] | Iterable, trunc: int):
        if trunc < 1:
            raise ValueError("truncation order must be positive")
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        clean: dict[int, GaussRat] = {}
        for k, v in items:
            if not isinstance(k, int) or k < 0:
                raise ValueError(f"exponent {k!r} must be a non-negative integer")
            if k >= trunc:
                raise ValueError(f"exponent {k} not below truncation order {trunc}")
            g = GaussRat.of(v)
            if not g.is_zero():
                clean[k] = g
        self._coeffs = clean
        self._trunc = trunc
        self._items = tuple(sorted(clean.items()))

    @property
    def coeffs(self) -> dict[int, GaussRat]:
        return dict(self._coeffs)

    @property
    def trunc(self) -> int:
        return self._trunc

    @property
    def items(self) -> tuple:
        return self._items

    @staticmethod
    def zero(trunc: int = 1) -> "Germ":
        return Germ({}, trunc)

    @staticmethod
    def constant(value, trunc: int) -> "Germ":
        return Germ({0: GaussRat.of(value)}, trunc)

    @staticmethod
    def monomial(coeff, exp: int, trunc: int | None = None) -> "Germ":
        return Germ({exp: GaussRat.of(coeff)}, trunc if trunc is not None else exp + 1)

    def coefficient(self, k: int) -> GaussRat:
        if k >= self._trunc:
            raise ValueError(f"coefficient {k} beyond truncation order {self._trunc}")
        return self._coeffs.get(k, GAUSS_ZERO)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, Germ):
            return NotImplemented
        return self._items == other._items and self._trunc == other._trunc

    def __hash__(self) -> int:
        return hash((self._items, self._trunc))

    def same_coefficients(self, other: "Germ") -> bool:
        """Structural equality of the stored coefficients, ignoring truncation."""
        return self._items == other._items

    def __add__(self, other: "Germ") -> "Germ":
        t = min(self._trunc, other._trunc)
        out = dict(self._coeffs)
        for k, v in other._coeffs.items():
            out[k] = out.get(k, GAUSS_ZERO) + v
        return Germ({k: v for k, v in out.items() if k < t}, t)

    def __neg__(self) -> "Germ":
        return Germ({k: -v for k, v in self._coeffs.items()}, self._trunc)

    def __sub__(self, other: "Germ") -> "Germ":
        return self + (-other)

    def __mul__(self, scalar) -> "Germ":
        s = GaussRat.of(scalar)
        if s.is_zero():
            return Germ.zero(self._trunc)
        return Germ({k: v * s for k, v in self._coeffs.items()}, self._trunc)

    __rmul__ = __mul__

    def evaluate(self, t: complex) -> complex:
        """Horner evaluation of the truncated polynomial in double precision."""
        t = complex(t)
        acc = 0j
        prev = None
        for k, v in reversed(self._items):
            if prev is not None:
                acc *= t ** (prev - k)
            acc += v.to_complex()
            prev = k
        if prev is not None:
            acc *= t ** prev
        return acc

    def to_json(self) -> dict:
        return {"coeffs": {str(k): v.to_json() for k, v in self._items},
                "trunc": self._trunc}

    @staticmethod
    def from_json(data) -> "Germ":
        return Germ({int(k): GaussRat.from_json(v) for k, v in data["coeffs"].items()},
                    data["trunc"])

    def render(self) -> str:
        """Canonical text form: ascending exponents, O-term only when needed."""
        parts: list[str] = []
        for k, v in self._items:
            if v.im == 0:
                mag = abs(v.re)
                sign = "-" if v.re < 0 else "+"
                if k == 0:
                    body = rat_str(mag)
                else:
                    tpart = "t" if k == 1 else f"t^{k}"
                    body = tpart if mag == 1 else f"{rat_str(mag)}*{tpart}"
            else:
                sign = "+"
                if k == 0:
                    body = str(v)
                else:
                    tpart = "t" if k == 1 else f"t^{k}"
                    body = f"{v}*{tpart}"
            if not parts:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f" {sign} {body}")
        text = "".join(parts) if parts else "0"
        max_exp = self._items[-1][0] if self._items else None
        if max_exp is None or self._trunc != max_exp + 1:
            text += f" + O(t^{self._trunc})"
        return text

    def __repr__(self) -> str:
        return f"Germ({self.render()!r})"


def ord_of(f: Germ) -> int | float:
    """Order of vanishing: smallest exponent with a nonzero coefficient.

    Returns INFINITE_ORDER for the (stored-)zero germ; the caller only
    knows the order is >= f.trunc in that case.
    """
    return f.items[0][0] if f.items else INFINITE_ORDER


def agree_order(f: Germ, g: Germ) -> int | float:
    """Order of vanishing of f - g on the common truncation window.

    INFINITE_ORDER means the two germs are indistinguishable at the
    current precision, not that they are equal.
    """
    return ord_of(f - g)


# ---------------------------------------------------------------------------
# Polynomial families F(x_0, ..., x_n; t) with rational t-exponents
# ---------------------------------------------------------------------------

TermKey = tuple[Fraction, tuple[int, ...]]  # (t-exponent, variable multidegree)


class PolyFamily:
    """A polynomial in named variables and t, with rational t-exponents.

    Rational t-exponents support fractional rescaling weights.  Zero
    coefficients are never stored; instances are immutable.
    """

    __slots__ = ("_vars", "_terms", "_items")

    def __init__(self, variables: Iterable[str], terms: Mapping[TermKey, GaussRat] | Iterable):
        vs = tuple(variables)
        if len(set(vs)) != len(vs):
            raise ValueError("duplicate variable names")
        if "t" in vs:
            raise ValueError("'t' is reserved for the family parameter")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[TermKey, GaussRat] = {}
        for (te, degs), v in items:
            te = _to_rat(te)
            degs = tuple(int(d) for d in degs)
            if len(degs) != len(vs):
                raise ValueError("multidegree length does not match variables")
            if any(d < 0 for d in degs):
                raise ValueError("variable exponents must be non-negative")
            g = GaussRat.of(v)
            if g.is_zero():
                continue
            key = (te, degs)
            if key in clean:
                g = clean[key] + g
                if g.is_zero():
                    del clean[key]
                    continue
            clean[key] = g
        self._vars = vs
        self._terms = clean
        self._items = tuple(sorted(clean.items(), key=lambda kv: kv[0]))

    @property
    def variables(self) -> tuple[str, ...]:
        return self._vars

    @property
    def terms(self) -> dict[TermKey, GaussRat]:
        return dict(self._terms)

    @property
    def items(self) -> tuple:
        return self._items

    def is_zero(self) -> bool:
        return not self._terms

    @staticmethod
    def zero(variables: Iterable[str]) -> "PolyFamily":
        return PolyFamily(variables, {})

    @staticmethod
    def constant(variables: Iterable[str], value) -> "PolyFamily":
        vs = tuple(variables)
        return PolyFamily(vs, {(Fraction(0), (0,) * len(vs)): GaussRat.of(value)})

    @staticmethod
    def variable(variables: Iterable[str], name: str) -> "PolyFamily":
        vs = tuple(variables)
        degs = [0] * len(vs)
        degs[vs.index(name)] = 1
        return PolyFamily(vs, {(Fraction(0), tuple(degs)): GAUSS_ONE})

    @staticmethod
    def t_power(variables: Iterable[str], exponent) -> "PolyFamily":
        vs = tuple(variables)
        return PolyFamily(vs, {(_to_rat(exponent), (0,) * len(vs)): GAUSS_ONE})

    def _check_vars(self, other: "PolyFamily"):
        if self._vars != other._vars:
            raise ValueError("variable lists differ")

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyFamily):
            return NotImplemented
        return self._vars == other._vars and self._items == other._items

    def __hash__(self) -> int:
        return hash((self._vars, self._items))

    def __add__(self, other: "PolyFamily") -> "PolyFamily":
        self._check_vars(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, GAUSS_ZERO) + v
        return PolyFamily(self._vars, out)

    def __neg__(self) -> "PolyFamily":
        return PolyFamily(self._vars, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "PolyFamily") -> "PolyFamily":
        return self + (-other)

    def __mul__(self, other) -> "PolyFamily":
        if not isinstance(other, PolyFamily):
            s = GaussRat.of(other)
            return PolyFamily(self._vars, {k: v * s for k, v in self._terms.items()})
        self._check_vars(other)
        out: dict[TermKey, GaussRat] = {}
        for (te1, d1), v1 in self._terms.items():
            for (te2, d2), v2 in other._terms.items():
                key = (te1 + te2, tuple(a + b for a, b in zip(d1, d2)))
                out[key] = out.get(key, GAUSS_ZERO) + v1 * v2
        return PolyFamily(self._vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PolyFamily":
        if n < 0:
            raise ValueError("negative powers are not supported")
        acc = PolyFamily.constant(self._vars, 1)
        for _ in range(n):
            acc = acc * self
        return acc

    def min_t_exponent(self) -> Fraction:
        if not self._terms:
            raise ValueError("zero family has no minimal t-exponent")
        return min(te for te, _ in self._terms)

    def shift_t(self, delta) -> "PolyFamily":
        """Multiply by t**delta (delta rational, possibly negative)."""
        d = _to_rat(delta)
        return PolyFamily(self._vars, {(te + d, degs): v for (te, degs), v in self._terms.items()})

    def at_t_zero(self) -> "PolyFamily":
        """Terms of t-exponent exactly 0 (the t -> 0 limit of a normalized family)."""
        return PolyFamily(self._vars, {k: v for k, v in self._terms.items() if k[0] == 0})

    def leading_normalized(self) -> "PolyFamily":
        """Scale so the first monomial in (t-exp, degree) order has coefficient 1."""
        if not self._items:
            return self
        lead = self._items[0][1]
        return PolyFamily(self._vars, {k: v / lead for k, v in self._terms.items()})

    def render(self) -> str:
        if not self._items:
            return "0"
        parts: list[str] = []
        for (te, degs), v in self._items:
            factors: list[str] = []
            if te != 0:
                if te.denominator == 1:
                    factors.append("t" if te == 1 else f"t^{te}")
                else:
                    factors.append(f"t^({te})")
            for name, d in zip(self._vars, degs):
                if d == 1:
                    factors.append(name)
                elif d > 1:
                    factors.append(f"{name}^{d}")
            if v.im == 0:
                sign = "-" if v.re < 0 else "+"
                mag = abs(v.re)
                if not factors:
                    body = rat_str(mag)
                elif mag == 1:
                    body = "*".join(factors)
                else:
                    body = "*".join([rat_str(mag)] + factors)
            else:
                sign = "+"
                body = "*".join([str(v)] + factors) if factors else str(v)
            if not parts:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"PolyFamily({self.render()!r}, vars={self._vars})"
