"""Derivations (vector fields) on polynomial and hypersurface rings.

A derivation is determined by its values on the coordinates and extends to
everything else through the Leibniz rule.  In characteristic p the p-fold
composite D^[p] is again a derivation, and the calculus here revolves around
that fact: p-closedness (D^[p] proportional to D), invariant divisors,
saturation to a primitive generator, and the regular-pairing certificate for
canonical singularities.

A derivation may be attached to a hypersurface ring w^d = f, in which case
it must preserve the relation ideal and all results are reduced to normal
form; this models a vector field on the hypersurface through its ambient
extension.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra import (
    HypersurfaceRing,
    Membership,
    Poly,
    PolyRing,
    RationalFn,
    principal_membership,
)

__all__ = [
    "Derivation",
    "FoliationChart",
    "PClosedResult",
    "is_p_closed",
    "is_invariant",
    "saturate",
    "canonical_certificate",
]


def _to_fn(ring: PolyRing, value) -> RationalFn:
    if isinstance(value, RationalFn):
        if value.ring != ring:
            raise ValueError("coefficient ring mismatch")
        return value
    if isinstance(value, Poly):
        if value.ring != ring:
            raise ValueError("coefficient ring mismatch")
        return RationalFn(value)
    if isinstance(value, int):
        return RationalFn(ring.const(value))
    raise TypeError(f"cannot use {value!r} as a derivation coefficient")


class Derivation:
    """Vector field sum(coeffs[i] * d/d x_i) with rational-function values."""

    __slots__ = ("ring", "coeffs", "hypersurface")

    def __init__(self, ring: PolyRing, coeffs, hypersurface: Optional[HypersurfaceRing] = None):
        if isinstance(coeffs, dict):
            unknown = set(coeffs) - set(ring.variables)
            if unknown:
                raise ValueError(f"unknown variables {sorted(unknown)}")
            seq = [coeffs.get(v, 0) for v in ring.variables]
        else:
            seq = list(coeffs)
            if len(seq) != ring.nvars:
                raise ValueError(
                    f"expected {ring.nvars} coefficients, got {len(seq)}"
                )
        self.ring = ring
        self.coeffs = tuple(_to_fn(ring, c) for c in seq)
        if hypersurface is not None:
            if hypersurface.ambient != ring:
                raise ValueError("hypersurface ambient ring mismatch")
            self._check_preserves(hypersurface)
        self.hypersurface = hypersurface

    def _check_preserves(self, hypersurface: HypersurfaceRing):
        value = self._apply_fn_ambient(RationalFn(hypersurface.relation))
        if not value.is_polynomial():
            raise ValueError(
                "cannot certify ideal preservation for a non-polynomial value "
                "of the relation"
            )
        mem = principal_membership(hypersurface.relation, value.as_poly())
        if mem.member is None:
            raise ValueError("ideal preservation test was inconclusive")
        if not mem.member:
            raise ValueError(
                f"derivation does not preserve the relation ideal: "
                f"D({hypersurface.relation}) = {value}"
            )

    # -- constructors ------------------------------------------------------

    @classmethod
    def partial(cls, ring: PolyRing, var: str,
                hypersurface: Optional[HypersurfaceRing] = None) -> "Derivation":
        return cls(ring, {var: 1}, hypersurface)

    @classmethod
    def zero(cls, ring: PolyRing) -> "Derivation":
        return cls(ring, {})

    @classmethod
    def parse(cls, ring: PolyRing, text: str,
              hypersurface: Optional[HypersurfaceRing] = None) -> "Derivation":
        from . import parsing

        return cls(ring, parsing.parse_vector_field(ring, text), hypersurface)

    # -- basic structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    @property
    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.coeffs)

    def poly_coeffs(self) -> tuple:
        return tuple(c.as_poly() for c in self.coeffs)

    def coefficient(self, var: str) -> RationalFn:
        return self.coeffs[self.ring.index(var)]

    def detach(self) -> "Derivation":
        """Same coordinate values, no hypersurface attached."""
        if self.hypersurface is None:
            return self
        return Derivation(self.ring, self.coeffs, None)

    def _same_space(self, other: "Derivation"):
        if self.ring != other.ring:
            raise ValueError("ring mismatch between derivations")
        if self.hypersurface != other.hypersurface:
            raise ValueError("derivations attached to different hypersurface rings")

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        if self.ring != other.ring or self.hypersurface != other.hypersurface:
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.ring, self.coeffs, self.hypersurface))

    def __add__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        self._same_space(other)
        return Derivation(
            self.ring,
            [a + b for a, b in zip(self.coeffs, other.coeffs)],
            self.hypersurface,
        )

    def __sub__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        self._same_space(other)
        return Derivation(
            self.ring,
            [a - b for a, b in zip(self.coeffs, other.coeffs)],
            self.hypersurface,
        )

    def __neg__(self):
        return Derivation(self.ring, [-c for c in self.coeffs], self.hypersurface)

    def scale(self, f) -> "Derivation":
        """The derivation f*D."""
        fn = _to_fn(self.ring, f)
        return Derivation(self.ring, [fn * c for c in self.coeffs], self.hypersurface)

    __rmul__ = scale

    # -- action on functions -------------------------------------------------

    def _apply_poly_ambient(self, a: Poly) -> Poly:
        out = self.ring.zero()
        for v, c in zip(self.ring.variables, self.coeffs):
            if c.is_zero():
                continue
            da = a.partial(v)
            if da.is_zero():
                continue
            out = out + c.as_poly() * da  # raises if c is not polynomial
        return out

    def _apply_fn_ambient(self, a: RationalFn) -> RationalFn:
        num, den = a.num, a.den
        if den.is_constant() and self.is_polynomial:
            inv = self.ring.field.inv(den.constant_value())
            return RationalFn(self._apply_poly_ambient(num) * inv)
        d_num = RationalFn(self.ring.zero())
        d_den = RationalFn(self.ring.zero())
        for v, c in zip(self.ring.variables, self.coeffs):
            if c.is_zero():
                continue
            d_num = d_num + c * num.partial(v)
            d_den = d_den + c * den.partial(v)
        # quotient rule: D(num/den) = (D(num) den - num D(den)) / den^2
        return (d_num * den - d_den * num) / RationalFn(den * den)

    def apply(self, a) -> RationalFn:
        """Leibniz-linear action; reduced to normal form on hypersurface rings."""
        if isinstance(a, int):
            return RationalFn(self.ring.zero())
        if isinstance(a, Poly):
            a = RationalFn(a)
        if not isinstance(a, RationalFn):
            raise TypeError(f"cannot apply a derivation to {a!r}")
        if a.ring != self.ring:
            raise ValueError("ring mismatch in derivation application")
        out = self._apply_fn_ambient(a)
        if self.hypersurface is not None:
            out = self.hypersurface.reduce_fn(out)
        return out

    def apply_poly(self, a: Poly) -> Poly:
        """Fast path for polynomial coefficients and polynomial input."""
        out = self._apply_poly_ambient(a)
        if self.hypersurface is not None:
            out = self.hypersurface.reduce(out)
        return out

    # -- the characteristic-p operations --------------------------------------

    def lie_bracket(self, other: "Derivation") -> "Derivation":
        """[D1, D2], the commutator; values D1(D2(x_i)) - D2(D1(x_i))."""
        self._same_space(other)
        vals = [
            self.apply(b) - other.apply(a)
            for a, b in zip(self.coeffs, other.coeffs)
        ]
        return Derivation(self.ring, vals, self.hypersurface)

    def p_power(self) -> "Derivation":
        """D^[p], the p-fold composite; a derivation again since p = 0."""
        p = self.ring.p
        if self.is_polynomial:
            vals = []
            for v in self.ring.variables:
                cur = self.ring.var(v)
                for _ in range(p):
                    cur = self.apply_poly(cur)
                vals.append(cur)
            return Derivation(self.ring, vals, self.hypersurface)
        vals = []
        for v in self.ring.variables:
            cur = RationalFn(self.ring.var(v))
            for _ in range(p):
                cur = self.apply(cur)
            vals.append(cur)
        return Derivation(self.ring, vals, self.hypersurface)

    def __str__(self):
        parts = []
        for v, c in zip(self.ring.variables, self.coeffs):
            if c.is_zero():
                continue
            if c.is_polynomial():
                poly = c.as_poly()
                if poly.is_constant() and poly.constant_value() == 1:
                    parts.append(f"d/d{v}")
                elif poly.is_monomial():
                    parts.append(f"{poly}*d/d{v}")
                else:
                    parts.append(f"({poly})*d/d{v}")
            else:
                parts.append(f"{c}*d/d{v}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"Derivation({self})"


@dataclass(frozen=True)
class FoliationChart:
    """Chart-local rank-1 foliation: a generating vector field.

    ``primitive`` is True when the coefficients are certified to have unit
    gcd, and None when the bounded factor search could not decide.
    """

    generator: Derivation
    primitive: Optional[bool]


@dataclass(frozen=True)
class PClosedResult:
    """Verdict of the p-closedness test D^[p] /\\ D = 0.

    ``witness`` is a rational function g with D^[p] = g*D whenever some
    coordinate value of D is nonzero.
    """

    closed: bool
    power: Derivation
    witness: Optional[RationalFn] = None

    def __bool__(self):
        return self.closed


def _fn_is_zero(fn: RationalFn, hypersurface: Optional[HypersurfaceRing]) -> bool:
    if hypersurface is None:
        return fn.is_zero()
    return hypersurface.reduce(fn.num).is_zero()


def _proportional(
    a: Sequence[RationalFn], b: Sequence[RationalFn],
    hypersurface: Optional[HypersurfaceRing],
) -> bool:
    """All 2x2 minors of the two coefficient vectors vanish."""
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            minor = a[i] * b[j] - a[j] * b[i]
            if not _fn_is_zero(minor, hypersurface):
                return False
    return True


def is_p_closed(d: Derivation) -> PClosedResult:
    """Whether D^[p] lies on the line spanned by D.

    Checked by the vanishing of every 2x2 minor D^[p](x_i) D(x_j) -
    D^[p](x_j) D(x_i); this is proportionality over the function field, which
    is exactly the rank-1 p-closedness condition.
    """
    if d.is_zero():
        raise ValueError("the zero derivation generates no foliation")
    power = d.p_power()
    closed = _proportional(power.coeffs, d.coeffs, d.hypersurface)
    witness = None
    if closed:
        for ci, pi in zip(d.coeffs, power.coeffs):
            # the divisor must stay nonzero in the quotient ring
            if not _fn_is_zero(ci, d.hypersurface):
                witness = pi / ci
                break
    return PClosedResult(closed, power, witness)


def is_invariant(d: Derivation, g: Poly) -> Optional[bool]:
    """Whether the divisor (g = 0) is invariant: D(g) in (g).

    Returns None when the ideal-membership fallback is inconclusive.
    """
    if g.is_zero():
        raise ValueError("the zero polynomial defines no divisor")
    value = d.detach().apply(g)
    if not value.is_polynomial():
        raise ValueError(
            "invariance test needs a polynomial value D(g); "
            f"got {value}"
        )
    mem = principal_membership(g, value.as_poly())
    return mem.member


# ---------------------------------------------------------------------------
# saturation


def _univariate_in(polys, variables):
    """The single variable all polynomials use, or None."""
    used = set()
    for c in polys:
        for e in c.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(i)
    if len(used) != 1:
        return None
    return variables[next(iter(used))]


def _univariate_gcd(polys, ring, var):
    """Monic Euclidean gcd of univariate polynomials over F_p."""
    p = ring.p
    i = ring.index(var)

    def to_list(poly):
        d = poly.deg_in(var)
        out = [0] * (d + 1)
        for e, c in poly.terms.items():
            out[e[i]] = c
        return out

    def trim(c):
        while c and c[-1] == 0:
            c.pop()
        return c

    def mod(a, b):
        a = a[:]
        inv = pow(b[-1], p - 2, p)
        while len(a) >= len(b):
            f = (a[-1] * inv) % p
            shift = len(a) - len(b)
            for k, bc in enumerate(b):
                a[shift + k] = (a[shift + k] - f * bc) % p
            a = trim(a)
        return a

    def gcd2(a, b):
        while b:
            a, b = b, mod(a, b)
        return a

    g: list = []
    for poly in polys:
        if poly.is_zero():
            continue
        g = gcd2(g, trim(to_list(poly))) if g else trim(to_list(poly))
    inv = pow(g[-1], p - 2, p)
    g = [(c * inv) % p for c in g]
    v = ring.var(var)
    out = ring.zero()
    for k, c in enumerate(g):
        if c:
            out = out + ring.const(c) * v**k
    return out


def _divides_all(h: Poly, polys):
    """Quotients when h divides every polynomial, else None."""
    h_lead, _ = h.leading_term()
    for c in polys:
        c_lead, _ = c.leading_term()
        if any(a > b for a, b in zip(h_lead, c_lead)):
            return None  # leading monomials already obstruct divisibility
    quotients = []
    for c in polys:
        mem = principal_membership(h, c)
        if mem.member is not True:
            return None
        quotients.append(mem.quotient)
    return quotients


def _candidate_divisors(ring, variables_used, max_degree, budget):
    """Candidates for a common factor, normalised to leading coefficient 1.

    Every polynomial in the given variables whose total degree is at most the
    returned exhaustive degree appears exactly once (up to scaling); beyond
    that degree nothing is enumerated.  The exhaustive degree is the largest
    one whose full enumeration fits in the budget.
    """
    from .algebra import _grlex_key, monomials_up_to_degree

    p = ring.p
    sub_idx = [ring.index(v) for v in variables_used]
    monos = sorted(monomials_up_to_degree(len(variables_used), max_degree),
                   key=_grlex_key)

    def count_for(d):
        # a candidate is a leading monomial plus free coefficients on every
        # strictly smaller monomial
        return sum(p**k for k, m in enumerate(monos) if 1 <= sum(m) <= d)

    exhaustive = 0
    for d in range(1, max_degree + 1):
        if count_for(d) <= budget:
            exhaustive = d
        else:
            break

    def embed(m):
        e = [0] * ring.nvars
        for j, k in zip(sub_idx, m):
            e[j] = k
        return tuple(e)

    def gen():
        for k, lead in enumerate(monos):
            if not 1 <= sum(lead) <= exhaustive:
                continue
            smaller = monos[:k]
            for tail in itertools.product(range(p), repeat=len(smaller)):
                terms = {embed(lead): 1}
                for m, c in zip(smaller, tail):
                    if c:
                        terms[embed(m)] = c
                yield Poly(ring, terms)

    return gen(), exhaustive


def saturate(d: Derivation, *, factor_budget: int = 100_000) -> FoliationChart:
    """Divide out the certified common factors of the coefficients.

    Monomial content always comes out.  Primitivity is then certified when a
    coefficient is a unit or a single monomial, when all coefficients are
    univariate (Euclidean gcd), or when the bounded search over monic factors
    of degree <= 4 is exhaustive for the minimal coefficient degree.  If the
    budget cuts the search short, the primitive flag is left undecided.
    """
    if not d.is_polynomial:
        raise ValueError("saturation expects polynomial coefficients")
    coeffs = list(d.poly_coeffs())
    if all(c.is_zero() for c in coeffs):
        raise ValueError("cannot saturate the zero derivation")
    ring = d.ring

    def strip_content(cs):
        nonzero = [c for c in cs if not c.is_zero()]
        mins = None
        for c in nonzero:
            mc = c.monomial_content()
            mins = mc if mins is None else tuple(min(a, b) for a, b in zip(mins, mc))
        if any(mins):
            cs = [c if c.is_zero() else c.divide_monomial(mins) for c in cs]
        return cs

    coeffs = strip_content(coeffs)
    primitive: Optional[bool] = None

    while True:
        nonzero = [c for c in coeffs if not c.is_zero()]
        if any(c.is_constant() for c in nonzero):
            primitive = True
            break
        if any(c.is_monomial() for c in nonzero):
            # content is trivial, so a monomial coefficient rules out any
            # common non-unit factor
            primitive = True
            break
        uni = _univariate_in(nonzero, ring.variables)
        if uni is not None:
            g = _univariate_gcd(nonzero, ring, uni)
            if g.total_degree() > 0:
                coeffs = [
                    c if c.is_zero() else principal_membership(g, c).quotient
                    for c in coeffs
                ]
                coeffs = strip_content(coeffs)
                continue
            primitive = True
            break
        min_degree = min(c.total_degree() for c in nonzero)
        used = sorted({ring.variables[i]
                       for c in nonzero for e in c.terms
                       for i, k in enumerate(e) if k})
        search_degree = min(4, min_degree)
        candidates, exhaustive = _candidate_divisors(
            ring, used, search_degree, factor_budget
        )
        quotients = None
        for h in candidates:
            quotients = _divides_all(h, nonzero)
            if quotients is not None:
                break
        if quotients is not None:
            it = iter(quotients)
            coeffs = [c if c.is_zero() else next(it) for c in coeffs]
            coeffs = strip_content(coeffs)
            continue
        if exhaustive >= search_degree and min_degree <= 4:
            # any common factor would divide the minimal-degree coefficient,
            # hence have degree <= 4; the exhaustive search saw them all
            primitive = True
        else:
            primitive = None
        break

    out = Derivation(ring, coeffs, d.hypersurface)
    return FoliationChart(out, primitive)


def canonical_certificate(d: Derivation, one_form: Sequence[Poly]) -> bool:
    """Whether the regular 1-form pairs with D to the constant 1.

    A primitive generator pairing to 1 against a regular form cannot vanish
    along any exceptional divisor of any birational pullback (the pairing
    pulls back to 1), so the generated foliation has canonical singularities.
    """
    if len(one_form) != d.ring.nvars:
        raise ValueError("the 1-form needs one coefficient per variable")
    for w in one_form:
        if not isinstance(w, Poly) or w.ring != d.ring:
            raise ValueError("1-form coefficients must be polynomials in the same ring")
    total = RationalFn(d.ring.zero())
    for w, c in zip(one_form, d.coeffs):
        total = total + c * w
    if d.hypersurface is not None:
        total = d.hypersurface.reduce_fn(total)
    return total == RationalFn(d.ring.one())
