"""Exact arithmetic over prime fields.

Sparse multivariate polynomials over F_p, rational functions, and quotient
rings by a single relation ``w^d - f``.  This is the coefficient layer that
every other module builds on.

Polynomials are immutable and canonical: a term map from exponent vectors to
residues in 1..p-1, zero coefficients never stored, so two equal polynomials
always carry identical term maps.  Rational functions are pairs of
polynomials normalised by their common monomial content and a monic (in the
graded-lex sense) denominator; equality is decided exactly by cross
multiplication, never by gcd reduction.

Elements are created through a :class:`PolyRing`, which fixes the
characteristic and the ordered variable list::

    >>> R = PolyRing(5, ("x", "y"))
    >>> x, y = R.gens()
    >>> print((x + y) ** 5)
    x^5 + y^5

The linear-algebra helpers at the bottom (reduced row echelon form, solving,
null spaces over F_p) are shared by the ideal-membership fallback here and by
the ring-of-constants computation elsewhere.  They use numpy int64 arrays, so
they require p < 2^31; the pure polynomial arithmetic works for any prime.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import gmpy2
import numpy as np

__all__ = [
    "FieldSpec",
    "PolyRing",
    "Poly",
    "RationalFn",
    "HypersurfaceRing",
    "Membership",
    "principal_membership",
    "rref_mod_p",
    "solve_mod_p",
    "nullspace_mod_p",
    "monomials_up_to_degree",
]


class FieldSpec:
    """The prime field F_p.  Primality is checked once, at construction."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        p = int(p)
        if p < 2 or not gmpy2.is_prime(p):
            raise ValueError(f"characteristic must be a prime number, got {p}")
        self.p = p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return pow(a, self.p - 2, self.p)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.p == other.p

    def __hash__(self):
        return hash(("FieldSpec", self.p))

    def __repr__(self):
        return f"FieldSpec({self.p})"


def _is_identifier(name: str) -> bool:
    if not name or not (name[0].isalpha()):
        return False
    return all(c.isalnum() or c == "_" for c in name[1:])


class PolyRing:
    """F_p[x_1, ..., x_n] with a fixed, ordered variable list."""

    __slots__ = ("field", "variables", "_index")

    def __init__(self, p: Union[int, FieldSpec], variables: Sequence[str]):
        self.field = p if isinstance(p, FieldSpec) else FieldSpec(p)
        variables = tuple(variables)
        if not variables:
            raise ValueError("a polynomial ring needs at least one variable")
        if len(set(variables)) != len(variables):
            raise ValueError(f"duplicate variable names in {variables}")
        for v in variables:
            if not _is_identifier(v):
                raise ValueError(f"invalid variable name {v!r}")
        self.variables = variables
        self._index = {v: i for i, v in enumerate(variables)}

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, var: str) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise ValueError(f"{var!r} is not a variable of {self!r}") from None

    def zero(self) -> "Poly":
        return Poly._raw(self, {})

    def one(self) -> "Poly":
        return self.const(1)

    def const(self, c: int) -> "Poly":
        c %= self.p
        if c == 0:
            return self.zero()
        return Poly._raw(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> "Poly":
        i = self.index(name)
        e = [0] * self.nvars
        e[i] = 1
        return Poly._raw(self, {tuple(e): 1})

    def gens(self) -> tuple:
        return tuple(self.var(v) for v in self.variables)

    def monomial(self, exponents: Sequence[int], coeff: int = 1) -> "Poly":
        return Poly(self, {tuple(exponents): coeff})

    def parse(self, text: str) -> "Poly":
        from . import parsing

        return parsing.parse_poly(self, text)

    def extend(self, *new_vars: str) -> "PolyRing":
        """Same field, extra variables appended at the end."""
        return PolyRing(self.field, self.variables + tuple(new_vars))

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.field == other.field
            and self.variables == other.variables
        )

    def __hash__(self):
        return hash((self.field, self.variables))

    def __repr__(self):
        return f"PolyRing(p={self.p}, vars={','.join(self.variables)})"


def _grlex_key(exps):
    return (sum(exps), exps)


class Poly:
    """Immutable sparse polynomial over F_p.

    ``terms`` maps exponent tuples (one entry per ring variable) to nonzero
    residues.  All arithmetic is exact.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Mapping[tuple, int]):
        p = ring.p
        n = ring.nvars
        clean = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise ValueError(
                    f"exponent vector {exps} has length {len(exps)}, ring has {n} variables"
                )
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = int(c) % p
            if c:
                clean[exps] = (clean.get(exps, 0) + c) % p
        self.ring = ring
        self.terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms):
        # trusted constructor: terms already canonical
        self = object.__new__(cls)
        self.ring = ring
        self.terms = terms
        self._hash = None
        return self

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0,) * self.ring.nvars, 0)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    # -- degrees ---------------------------------------------------------

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def deg_in(self, var: str) -> int:
        i = self.ring.index(var)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def leading_term(self):
        """(exponents, coefficient) of the graded-lex leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    # -- arithmetic ------------------------------------------------------

    def _check_ring(self, other: "Poly"):
        if self.ring != other.ring:
            raise ValueError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")

    def _coerce(self, other):
        if isinstance(other, Poly):
            self._check_ring(other)
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.ring.p
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = (terms.get(e, 0) + c) % p
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Poly._raw(self.ring, terms)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Poly._raw(self.ring, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.ring.p
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        acc: dict = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = (acc.get(e, 0) + c1 * c2) % p
                if s:
                    acc[e] = s
                else:
                    acc.pop(e, None)
        return Poly._raw(self.ring, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_constant() and self.constant_value() == other % self.ring.p
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- calculus and structure ------------------------------------------

    def partial(self, var: str) -> "Poly":
        """Formal partial derivative; in characteristic p, d(x^p)/dx = 0."""
        i = self.ring.index(var)
        p = self.ring.p
        terms = {}
        for e, c in self.terms.items():
            k = e[i]
            cc = (c * k) % p
            if k == 0 or cc == 0:
                continue
            e2 = e[:i] + (k - 1,) + e[i + 1 :]
            s = (terms.get(e2, 0) + cc) % p
            if s:
                terms[e2] = s
            else:
                terms.pop(e2, None)
        return Poly._raw(self.ring, terms)

    def coeff_of_power(self, var: str, k: int) -> "Poly":
        """Coefficient of var^k when the polynomial is read in R[var]."""
        i = self.ring.index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[i] == k:
                terms[e[:i] + (0,) + e[i + 1 :]] = c
        return Poly._raw(self.ring, terms)

    def monomial_content(self) -> tuple:
        """Exponent vector of the largest monomial dividing every term."""
        if not self.terms:
            raise ValueError("zero polynomial has no monomial content")
        its = iter(self.terms)
        mins = list(next(its))
        for e in its:
            for i, v in enumerate(e):
                if v < mins[i]:
                    mins[i] = v
        return tuple(mins)

    def divide_monomial(self, exponents: Sequence[int]) -> "Poly":
        exponents = tuple(exponents)
        terms = {}
        for e, c in self.terms.items():
            e2 = tuple(a - b for a, b in zip(e, exponents))
            if any(x < 0 for x in e2):
                raise ValueError(f"{self} is not divisible by the monomial {exponents}")
            terms[e2] = c
        return Poly._raw(self.ring, terms)

    def substitute(self, images: Mapping[str, "Poly"]) -> "Poly":
        """Ring map sending every variable to its image polynomial.

        The mapping must cover all variables; the images must share a ring,
        which becomes the ring of the result.
        """
        missing = [v for v in self.ring.variables if v not in images]
        if missing:
            raise ValueError(f"substitution misses variables {missing}")
        target = None
        for v in self.ring.variables:
            r = images[v].ring
            if target is None:
                target = r
            elif target != r:
                raise ValueError("substitution images live in different rings")
        if target.p != self.ring.p:
            raise ValueError("substitution must preserve the characteristic")
        pow_cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in pow_cache:
                pow_cache[key] = images[self.ring.variables[i]] ** k
            return pow_cache[key]

        out = target.zero()
        for e, c in self.terms.items():
            t = target.const(c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            out = out + t
        return out

    def cast(self, target: PolyRing) -> "Poly":
        """Reinterpret in a ring containing the same-named variables."""
        if target.p != self.ring.p:
            raise ValueError("cannot cast between different characteristics")
        pos = [target.index(v) for v in self.ring.variables]
        terms = {}
        for e, c in self.terms.items():
            e2 = [0] * target.nvars
            for i, k in enumerate(e):
                e2[pos[i]] = k
            terms[tuple(e2)] = c
        return Poly._raw(target, terms)

    def evaluate(self, values: Sequence[int]) -> int:
        """Value at a point with coordinates in F_p."""
        if len(values) != self.ring.nvars:
            raise ValueError("wrong number of coordinates")
        p = self.ring.p
        vals = [v % p for v in values]
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t = (t * pow(v, k, p)) % p
            total = (total + t) % p
        return total

    # -- display ---------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = []
            for v, k in zip(self.ring.variables, e):
                if k == 1:
                    factors.append(v)
                elif k > 1:
                    factors.append(f"{v}^{k}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly({self})"


class RationalFn:
    """Quotient of two polynomials, denominator nonzero.

    The representation strips the common monomial content of numerator and
    denominator and scales so the denominator's graded-lex leading coefficient
    is 1.  Full gcd reduction is deliberately not attempted; equality is
    exact via cross multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Optional[Poly] = None):
        if den is None:
            den = num.ring.one()
        if not isinstance(num, Poly) or not isinstance(den, Poly):
            raise TypeError("RationalFn needs Poly numerator and denominator")
        num._check_ring(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num = num
            self.den = num.ring.one()
            return
        mc_n = num.monomial_content()
        mc_d = den.monomial_content()
        common = tuple(min(a, b) for a, b in zip(mc_n, mc_d))
        if any(common):
            num = num.divide_monomial(common)
            den = den.divide_monomial(common)
        _, lc = den.leading_term()
        if lc != 1:
            inv = num.ring.field.inv(lc)
            num = num * inv
            den = den * inv
        self.num = num
        self.den = den

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> Poly:
        if not self.den.is_constant():
            raise ValueError(f"{self} is not polynomial")
        c = self.den.constant_value()
        if c == 1:
            return self.num
        return self.num * self.ring.field.inv(c)

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    @staticmethod
    def _coerce(other, ring: PolyRing):
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, Poly):
            return RationalFn(other)
        if isinstance(other, int):
            return RationalFn(ring.const(other))
        return None

    def __add__(self, other):
        o = self._coerce(other, self.ring)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RationalFn(self.num + o.num, self.den)
        return RationalFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other, self.ring)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other, self.ring)
        if o is None:
            return NotImplemented
        return RationalFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other, self.ring)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFn(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other, self.ring)
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ValueError("integer exponents only")
        if n < 0:
            if self.num.is_zero():
                raise ZeroDivisionError("negative power of 0")
            return RationalFn(self.den ** (-n), self.num ** (-n))
        return RationalFn(self.num**n, self.den**n)

    def __eq__(self, other):
        o = self._coerce(other, self.ring)
        if o is None:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        # equality is cross-multiplicative, so equal values may carry
        # different representations; hash only the ring to stay consistent
        # (rational functions are never hot dict keys)
        return hash((self.ring, "RationalFn"))

    def __str__(self):
        if self.den.is_constant() and self.den.constant_value() == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalFn({self})"


class HypersurfaceRing:
    """F_p[x_1..x_n, w] / (w^d - f) with f free of the last variable w.

    Every residue class has a unique normal form of w-degree < d, reached by
    the substitution w^d -> f.
    """

    __slots__ = ("ambient", "cover_var", "degree", "section", "relation", "_powers")

    def __init__(self, ambient: PolyRing, degree: int, section: Poly):
        if degree < 1:
            raise ValueError("cover degree must be >= 1")
        if ambient.nvars < 2:
            raise ValueError("ambient ring needs a base variable and the cover variable")
        if section.ring != ambient:
            raise ValueError("section must be given in the ambient ring")
        w = ambient.variables[-1]
        if section.deg_in(w) > 0:
            raise ValueError(f"section must not involve the cover variable {w!r}")
        self.ambient = ambient
        self.cover_var = w
        self.degree = degree
        self.section = section
        self.relation = ambient.var(w) ** degree - section
        self._powers = {0: ambient.one(), 1: section}

    @property
    def p(self) -> int:
        return self.ambient.p

    @classmethod
    def from_relation(cls, p: int, relation: Union[str, Poly]) -> "HypersurfaceRing":
        """Recognise a relation of the form w^d - f and build the ring.

        The cover variable is detected as the unique variable occurring in a
        single term, which is a pure power with coefficient 1, the remaining
        terms being free of it.  Variables are ordered by first appearance in
        the relation, the cover variable last.
        """
        from . import parsing

        if isinstance(relation, str):
            names = parsing.identifiers_in(relation)
            scratch = PolyRing(p, names)
            rel = parsing.parse_poly(scratch, relation)
        else:
            rel = relation
            names = list(rel.ring.variables)
        candidates = []
        for v in names:
            i = rel.ring.index(v)
            d = rel.deg_in(v)
            if d < 1:
                continue
            top = {e: c for e, c in rel.terms.items() if e[i] == d}
            if len(top) != 1:
                continue
            (e, c), = top.items()
            if c != 1 or any(k for j, k in enumerate(e) if j != i):
                continue
            rest_ok = all(e2[i] in (0, d) for e2 in rel.terms)
            if rest_ok:
                candidates.append((v, d))
        if not candidates:
            raise ValueError(
                f"relation {rel} is not of the form w^d - f with f free of w"
            )
        v, d = candidates[0]
        base = [x for x in names if x != v]
        ambient = PolyRing(p, tuple(base) + (v,))
        rel2 = rel.cast(ambient)
        section = ambient.var(v) ** d - rel2
        if section.deg_in(v) > 0:
            raise ValueError(f"relation {rel} is not of the form w^d - f")
        return cls(ambient, d, section)

    def _section_power(self, k: int) -> Poly:
        if k not in self._powers:
            self._powers[k] = self._section_power(k - 1) * self.section
        return self._powers[k]

    def reduce(self, a: Poly) -> Poly:
        """Normal form with w-degree < d, by substituting w^d -> f."""
        if a.ring != self.ambient:
            raise ValueError("ring mismatch in hypersurface reduction")
        i = self.ambient.nvars - 1
        d = self.degree
        if all(e[i] < d for e in a.terms):
            return a
        out = self.ambient.zero()
        for e, c in a.terms.items():
            q, r = divmod(e[i], d)
            mono = Poly._raw(self.ambient, {e[:i] + (r,): c})
            if q:
                mono = mono * self._section_power(q)
            out = out + mono
        return out

    def reduce_fn(self, fn: RationalFn) -> RationalFn:
        num = self.reduce(fn.num)
        den = self.reduce(fn.den)
        if den.is_zero():
            raise ZeroDivisionError("denominator lies in the relation ideal")
        return RationalFn(num, den)

    def __eq__(self, other):
        return (
            isinstance(other, HypersurfaceRing)
            and self.ambient == other.ambient
            and self.degree == other.degree
            and self.section == other.section
        )

    def __hash__(self):
        return hash((self.ambient, self.degree, self.section))

    def __repr__(self):
        return f"HypersurfaceRing({self.ambient!r}, {self.cover_var}^{self.degree} = {self.section})"


# ---------------------------------------------------------------------------
# principal-ideal membership


@dataclass(frozen=True)
class Membership:
    """Outcome of an ideal-membership test.

    ``member`` is True / False, or None when the bounded cofactor search was
    exhausted without a decision.  ``quotient`` certifies membership when
    available: quotient * g == a.
    """

    member: Optional[bool]
    quotient: Optional[Poly] = None

    def __bool__(self):
        if self.member is None:
            raise ValueError("membership test was inconclusive")
        return self.member


def _monic_variable(g: Poly) -> Optional[str]:
    """A variable in which g has constant leading coefficient, if any."""
    for v in g.ring.variables:
        d = g.deg_in(v)
        if d < 1:
            continue
        if g.coeff_of_power(v, d).is_constant():
            return v
    return None


def _divide_by_monic(a: Poly, g: Poly, var: str):
    """Division with remainder in R[var] by g monic-in-var; returns (q, r)."""
    ring = a.ring
    field = ring.field
    k = g.deg_in(var)
    c_inv = field.inv(g.coeff_of_power(var, k).constant_value())
    v = ring.var(var)
    quot = ring.zero()
    rem = a
    while not rem.is_zero():
        dv = rem.deg_in(var)
        if dv < k:
            break
        lead = rem.coeff_of_power(var, dv)
        factor = lead * c_inv * v ** (dv - k)
        quot = quot + factor
        rem = rem - factor * g
    return quot, rem


def monomials_up_to_degree(nvars: int, bound: int):
    """All exponent tuples with total degree <= bound, graded-lex ascending."""
    out = []
    for d in range(bound + 1):
        tier = []

        def fill(prefix, remaining, slots):
            if slots == 0:
                if remaining == 0:
                    tier.append(prefix)
                return
            for k in range(remaining + 1):
                fill(prefix + (k,), remaining - k, slots - 1)

        fill((), d, nvars)
        tier.sort()
        out.extend(tier)
    return out


def principal_membership(
    g: Poly, a: Poly, *, unknown_budget: int = 4096, entry_budget: int = 4_000_000
) -> Membership:
    """Decide whether a lies in the principal ideal (g).

    When g is monic in some variable this is exact division with remainder.
    Otherwise a cofactor of total degree exactly deg(a) - deg(g) is searched
    by linear algebra over F_p (total degree is additive over a domain, so
    the bound is sharp and the search is conclusive); only when the linear
    system would exceed the budget is the result inconclusive.
    """
    if g.is_zero():
        raise ValueError("membership in the zero ideal is not supported")
    g._check_ring(a)
    if a.is_zero():
        return Membership(True, a.ring.zero())
    if g.is_constant():
        return Membership(True, a * g.ring.field.inv(g.constant_value()))

    v = _monic_variable(g)
    if v is not None:
        q, r = _divide_by_monic(a, g, v)
        if r.is_zero():
            return Membership(True, q)
        return Membership(False)

    bound = a.total_degree() - g.total_degree()
    if bound < 0:
        return Membership(False)
    n = a.ring.nvars
    cols = monomials_up_to_degree(n, bound)
    rows = monomials_up_to_degree(n, a.total_degree())
    if len(cols) > unknown_budget or len(cols) * len(rows) > entry_budget:
        return Membership(None)
    row_index = {e: i for i, e in enumerate(rows)}
    p = a.ring.p
    if p >= 1 << 31:
        return Membership(None)
    mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for j, e in enumerate(cols):
        prod = a.ring.monomial(e) * g
        for e2, c in prod.terms.items():
            mat[row_index[e2], j] = c
    rhs = np.zeros(len(rows), dtype=np.int64)
    for e, c in a.terms.items():
        rhs[row_index[e]] = c
    sol = solve_mod_p(mat, rhs, p)
    if sol is None:
        return Membership(False)
    quotient = Poly(a.ring, {e: int(sol[j]) for j, e in enumerate(cols) if sol[j]})
    return Membership(True, quotient)


# ---------------------------------------------------------------------------
# linear algebra over F_p (numpy, exact; requires p < 2^31)


def rref_mod_p(a: np.ndarray, p: int):
    """Reduced row echelon form mod p.  Returns (rref, pivot column list).

    Only rows with a nonzero entry in the pivot column are touched, so
    elimination on the sparse matrices produced by derivations stays cheap.
    """
    a = np.array(a, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        if inv != 1:
            a[r] = (a[r] * inv) % p
        col = a[:, c]
        rows = np.nonzero(col)[0]
        rows = rows[rows != r]
        if rows.size:
            a[rows] = (a[rows] - col[rows, None] * a[r]) % p
        pivots.append(c)
        r += 1
    return a, pivots


def solve_mod_p(a: np.ndarray, b: np.ndarray, p: int):
    """One solution of a x = b over F_p (free variables 0), or None."""
    a = np.array(a, dtype=np.int64) % p
    b = np.array(b, dtype=np.int64) % p
    aug = np.hstack([a, b.reshape(-1, 1)])
    rref, pivots = rref_mod_p(aug, p)
    ncols = a.shape[1]
    if ncols in pivots:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = rref[i, -1]
    return x


def nullspace_mod_p(a: np.ndarray, p: int):
    """Basis of the null space over F_p, one vector per matrix row."""
    a = np.array(a, dtype=np.int64) % p
    rref, pivots = rref_mod_p(a, p)
    ncols = a.shape[1]
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, c in enumerate(pivots):
            basis[k, c] = (-rref[i, f]) % p
    return basis
