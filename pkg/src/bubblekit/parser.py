"""Text grammars for germs and polynomial families.

Germ grammar::

    germ  := term (('+'|'-') term)* ['+' 'O(t^' INT ')']
    term  := coeff ['*'] ['t' ['^' INT]]        (coeff optional if t present)
    coeff := rational | '(' rational ('+'|'-') rational 'i' ')'

When the O-term is absent the truncation order defaults to the largest
exponent plus one.  Polynomial expressions share the same lexer and add
parenthesized sums, products and integer powers; fractional exponents are
allowed on t only, written ``t^(3/2)``.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError
from .exact import GaussRat, Germ, PolyFamily


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind = kind
        self.text = text
        self.pos = pos

    def __repr__(self):
        return f"_Token({self.kind}, {self.text!r}, {self.pos})"


_OPS = set("+-*/^()")


def _tokenize(text: str) -> list[_Token]:
    toks: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            toks.append(_Token(c, c, i))
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Token("INT", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("NAME", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    toks.append(_Token("EOF", "", n))
    return toks


class _Cursor:
    def __init__(self, tokens: list[_Token]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.toks[self.i]

    def next(self) -> _Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> _Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(f"expected {kind!r}, found {t.text or 'end of input'!r}", t.pos)
        return self.next()

    def accept(self, kind: str) -> _Token | None:
        if self.peek().kind == kind:
            return self.next()
        return None


def _parse_unsigned_rational(cur: _Cursor) -> Fraction:
    num = int(cur.expect("INT").text)
    if cur.accept("/"):
        den = int(cur.expect("INT").text)
        if den == 0:
            raise ParseError("zero denominator", cur.toks[cur.i - 1].pos)
        return Fraction(num, den)
    return Fraction(num)


def _parse_signed_rational(cur: _Cursor) -> Fraction:
    sign = -1 if cur.accept("-") else (cur.accept("+"), 1)[1]
    return sign * _parse_unsigned_rational(cur)


def _parse_gauss_coeff(cur: _Cursor) -> GaussRat:
    """coeff := rational | '(' rational ('+'|'-') rational 'i' ')'"""
    if cur.accept("("):
        re = _parse_signed_rational(cur)
        t = cur.peek()
        if t.kind not in ("+", "-"):
            raise ParseError("expected '+' or '-' in complex coefficient", t.pos)
        sgn = -1 if cur.next().kind == "-" else 1
        im = sgn * _parse_unsigned_rational(cur)
        name = cur.expect("NAME")
        if name.text != "i":
            raise ParseError("expected 'i' in complex coefficient", name.pos)
        cur.expect(")")
        return GaussRat(re, im)
    return GaussRat(_parse_unsigned_rational(cur))


def parse_germ(text: str) -> Germ:
    """Parse the germ grammar; parse(render(g)) is the identity."""
    cur = _Cursor(_tokenize(text))
    coeffs: dict[int, GaussRat] = {}
    trunc: int | None = None
    max_exp = -1
    first = True
    while True:
        tok = cur.peek()
        if tok.kind == "EOF":
            if first:
                raise ParseError("empty expression", tok.pos)
            break
        if first:
            sign = -1 if cur.accept("-") else 1
            first = False
        else:
            t = cur.next()
            if t.kind not in ("+", "-"):
                raise ParseError(f"expected '+' or '-', found {t.text!r}", t.pos)
            sign = -1 if t.kind == "-" else 1

        tok = cur.peek()
        if tok.kind == "NAME" and tok.text == "O":
            if sign < 0:
                raise ParseError("O-term must follow '+'", tok.pos)
            if trunc is not None:
                raise ParseError("duplicate O-term", tok.pos)
            cur.next()
            cur.expect("(")
            name = cur.expect("NAME")
            if name.text != "t":
                raise ParseError("expected 't' in O-term", name.pos)
            cur.expect("^")
            trunc = int(cur.expect("INT").text)
            cur.expect(")")
            continue

        coeff = GaussRat(Fraction(1))
        have_coeff = False
        if tok.kind in ("INT", "("):
            coeff = _parse_gauss_coeff(cur)
            have_coeff = True
            cur.accept("*")
        exp = 0
        tok = cur.peek()
        if tok.kind == "NAME" and tok.text == "t":
            cur.next()
            exp = 1
            if cur.accept("^"):
                exp = int(cur.expect("INT").text)
        elif not have_coeff:
            raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.pos)
        c = coeff * sign
        coeffs[exp] = coeffs.get(exp, GaussRat()) + c
        max_exp = max(max_exp, exp)

    if trunc is None:
        trunc = max_exp + 1 if max_exp >= 0 else 1
    for k in coeffs:
        if k >= trunc and not coeffs[k].is_zero():
            raise ParseError(f"exponent {k} at or beyond truncation order {trunc}", 0)
    return Germ({k: v for k, v in coeffs.items() if k < trunc}, trunc)


# ---------------------------------------------------------------------------
# Polynomial expressions
# ---------------------------------------------------------------------------


def _parse_exponent(cur: _Cursor) -> Fraction:
    if cur.accept("("):
        q = _parse_signed_rational(cur)
        cur.expect(")")
        return q
    return Fraction(int(cur.expect("INT").text))


def _poly_atom(cur: _Cursor, variables: tuple[str, ...]) -> PolyFamily:
    tok = cur.peek()
    if tok.kind == "(":
        mark = cur.i
        try:  # complex coefficient "(a+bi)" takes priority over a sub-expression
            return PolyFamily.constant(variables, _parse_gauss_coeff(cur))
        except ParseError:
            cur.i = mark
        cur.next()
        inner = _poly_expr(cur, variables)
        cur.expect(")")
        return inner
    if tok.kind == "INT":
        return PolyFamily.constant(variables, _parse_unsigned_rational(cur))
    if tok.kind == "NAME":
        cur.next()
        if tok.text == "t":
            if cur.accept("^"):
                return PolyFamily.t_power(variables, _parse_exponent(cur))
            return PolyFamily.t_power(variables, 1)
        if tok.text not in variables:
            raise ParseError(f"unknown variable {tok.text!r}", tok.pos)
        base = PolyFamily.variable(variables, tok.text)
        if cur.accept("^"):
            e = _parse_exponent(cur)
            if e.denominator != 1 or e < 0:
                raise ParseError("variable exponents must be non-negative integers", tok.pos)
            return base ** int(e)
        return base
    raise ParseError(f"expected a factor, found {tok.text or 'end of input'!r}", tok.pos)


def _poly_factor(cur: _Cursor, variables: tuple[str, ...]) -> PolyFamily:
    tok = cur.peek()
    atom = _poly_atom(cur, variables)
    if tok.kind == "(" and cur.accept("^"):
        e = _parse_exponent(cur)
        if e.denominator != 1 or e < 0:
            raise ParseError("parenthesized powers must be non-negative integers", tok.pos)
        return atom ** int(e)
    return atom


def _poly_term(cur: _Cursor, variables: tuple[str, ...]) -> PolyFamily:
    acc = _poly_factor(cur, variables)
    while True:
        if cur.accept("*"):
            acc = acc * _poly_factor(cur, variables)
            continue
        tok = cur.peek()
        # implicit product before '(' or a name, as in "2(x+1)" or "2x"
        if tok.kind == "(" or tok.kind == "NAME":
            acc = acc * _poly_factor(cur, variables)
            continue
        return acc


def _poly_expr(cur: _Cursor, variables: tuple[str, ...]) -> PolyFamily:
    sign = -1 if cur.accept("-") else 1
    acc = _poly_term(cur, variables) * sign
    while True:
        tok = cur.peek()
        if tok.kind in ("+", "-"):
            cur.next()
            nxt = _poly_term(cur, variables)
            acc = acc + (nxt if tok.kind == "+" else -nxt)
        else:
            return acc


def parse_poly(text: str, variables) -> PolyFamily:
    """Parse a polynomial expression over the given ordered variables and t."""
    vs = tuple(variables)
    cur = _Cursor(_tokenize(text))
    out = _poly_expr(cur, vs)
    tok = cur.peek()
    if tok.kind != "EOF":
        raise ParseError(f"unexpected trailing {tok.text!r}", tok.pos)
    return out
