"""Text grammar for polynomials and vector fields.

Polynomials: identifiers, nonnegative integer literals, the operators
``+ - * ^`` and parentheses.  Integer literals reduce mod p.  There is no
implicit multiplication; ``^`` takes a literal nonnegative exponent.

Vector fields extend the grammar with the reserved token ``d/d<var>``; a
field is a sum of addends ``coefficient*d/dx``, where the coefficient is a
polynomial expression optionally followed by ``/ denominator``.  Examples::

    x*d/dx + 2*y^2*d/dy
    d/dz
    (x+y)/(x^2)*d/ds

Parse errors carry the offending position and render a caret marker.
"""

from __future__ import annotations

from dataclasses import dataclass
from .algebra import Poly, PolyRing, RationalFn

__all__ = ["ParseError", "parse_poly", "parse_rational", "parse_vector_field",
           "identifiers_in"]


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        marker = " " * pos + "^"
        super().__init__(f"{message} at position {pos}\n  {text}\n  {marker}")
        self.pos = pos
        self.text = text


@dataclass
class _Token:
    kind: str  # INT | IDENT | DDVAR | one of + - * / ^ ( ) | END
    value: str
    pos: int


def _tokenize(text: str):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("INT", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            # the reserved token d/d<ident> wins over an identifier "d"
            if c == "d" and text.startswith("d/d", i) and i + 3 < n and (
                text[i + 3].isalpha() or text[i + 3] == "_"
            ):
                j = i + 3
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                tokens.append(_Token("DDVAR", text[i + 3 : j], i))
                i = j
                continue
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("IDENT", text[i:j], i))
            i = j
            continue
        if c in "+-*/^()":
            tokens.append(_Token(c, c, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", text, i)
    tokens.append(_Token("END", "", n))
    return tokens


def identifiers_in(text: str):
    """Identifiers (including d/d targets) in order of first appearance."""
    seen = []
    for tok in _tokenize(text):
        if tok.kind in ("IDENT", "DDVAR") and tok.value not in seen:
            seen.append(tok.value)
    return seen


class _Parser:
    def __init__(self, ring: PolyRing, text: str):
        self.ring = ring
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.value!r}", self.text, tok.pos)
        return tok

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, self.text, tok.pos)

    # polynomial grammar -------------------------------------------------

    def poly_expr(self) -> Poly:
        sign = 1
        if self.peek().kind in ("+", "-"):
            sign = -1 if self.next().kind == "-" else 1
        acc = self.poly_term()
        if sign < 0:
            acc = -acc
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            term = self.poly_term()
            acc = acc + term if op == "+" else acc - term
        return acc

    def poly_term(self) -> Poly:
        acc = self.poly_power()
        while self.peek().kind == "*":
            self.next()
            acc = acc * self.poly_power()
        return acc

    def poly_power(self) -> Poly:
        base = self.poly_atom()
        if self.peek().kind == "^":
            self.next()
            tok = self.expect("INT")
            return base ** int(tok.value)
        return base

    def poly_atom(self) -> Poly:
        tok = self.next()
        if tok.kind == "INT":
            return self.ring.const(int(tok.value))
        if tok.kind == "IDENT":
            if tok.value not in self.ring.variables:
                raise ParseError(
                    f"unknown variable {tok.value!r} (ring has {', '.join(self.ring.variables)})",
                    self.text,
                    tok.pos,
                )
            return self.ring.var(tok.value)
        if tok.kind == "(":
            inner = self.poly_expr()
            self.expect(")")
            return inner
        if tok.kind == "-":
            return -self.poly_atom()
        raise ParseError(f"unexpected token {tok.value!r}", self.text, tok.pos)

    # vector-field grammar -------------------------------------------------

    def field_expr(self):
        coeffs = {v: RationalFn(self.ring.zero()) for v in self.ring.variables}
        sign = 1
        if self.peek().kind in ("+", "-"):
            sign = -1 if self.next().kind == "-" else 1
        self.field_addend(coeffs, sign)
        while self.peek().kind in ("+", "-"):
            sign = -1 if self.next().kind == "-" else 1
            self.field_addend(coeffs, sign)
        return coeffs

    def field_addend(self, coeffs, sign):
        # an addend is    [coef ('*' coef)* '*'] d/dx    or a bare 0
        tok = self.peek()
        if tok.kind == "DDVAR":
            self.next()
            self._record(coeffs, tok, RationalFn(self.ring.const(sign)))
            return
        coef = RationalFn(self.poly_power())
        while self.peek().kind in ("*", "/"):
            op = self.next().kind
            nxt = self.peek()
            if nxt.kind == "DDVAR" and op == "*":
                self.next()
                self._record(coeffs, nxt, coef * sign)
                return
            factor = RationalFn(self.poly_power())
            coef = coef * factor if op == "*" else coef / factor
        # no d/d target: only the literal 0 is a valid field on its own
        if coef.is_zero():
            return
        self.fail("expected '*d/d<var>' to finish the addend")

    def _record(self, coeffs, tok, value):
        if tok.value not in self.ring.variables:
            raise ParseError(
                f"unknown variable {tok.value!r} in d/d{tok.value}", self.text, tok.pos
            )
        coeffs[tok.value] = coeffs[tok.value] + value


def parse_poly(ring: PolyRing, text: str) -> Poly:
    parser = _Parser(ring, text)
    out = parser.poly_expr()
    end = parser.peek()
    if end.kind != "END":
        raise ParseError(f"unexpected trailing input {end.value!r}", text, end.pos)
    return out


def parse_rational(ring: PolyRing, text: str) -> RationalFn:
    """A polynomial expression optionally followed by '/ denominator'."""
    parser = _Parser(ring, text)
    num = parser.poly_expr()
    if parser.peek().kind == "/":
        parser.next()
        den = parser.poly_expr()
        out = RationalFn(num, den)
    else:
        out = RationalFn(num)
    end = parser.peek()
    if end.kind != "END":
        raise ParseError(f"unexpected trailing input {end.value!r}", text, end.pos)
    return out


def parse_vector_field(ring: PolyRing, text: str) -> dict:
    """Coefficient map {variable: RationalFn} of a vector-field expression."""
    parser = _Parser(ring, text)
    coeffs = parser.field_expr()
    end = parser.peek()
    if end.kind != "END":
        raise ParseError(f"unexpected trailing input {end.value!r}", text, end.pos)
    return coeffs
