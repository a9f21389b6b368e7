"""Chart-based blow-ups: pullbacks of forms and vector fields, discrepancies.

A chart map writes the target coordinates as polynomials in the source
coordinates (the weighted blow-up chart covering the generic point of the
exceptional divisor is (s, t) -> (s^a, s^b t), with exceptional locus s = 0).
Forms pull back by substitution and exterior algebra; a vector field pulls
back to the unique rational field solving  J * v~ = D o m  against the
Jacobian, which in characteristic p must be computed with the characteristic
in force (d(s^p t)/ds = 0).

Discrepancies are read off vanishing orders along the exceptional variable:
the canonical discrepancy is the order of the pulled-back volume form, and
the foliated discrepancy of a primitive generator is minus the minimal order
of its pulled-back coefficients.  Everything is exact integer bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .algebra import Poly, PolyRing, RationalFn
from .derivation import Derivation, FoliationChart

__all__ = [
    "ChartMap",
    "Tower",
    "OneForm",
    "TwoForm",
    "DivisorLedger",
    "weighted_blowup_chart",
    "pullback_form",
    "pullback_derivation",
    "foliation_discrepancy",
    "canonical_discrepancy",
    "tower_ledger",
]


class ChartMap:
    """Polynomial map source -> target between coordinate charts.

    ``components[i]`` expresses target variable i in the source coordinates.
    The Jacobian determinant must be nonzero as a polynomial (generic
    invertibility over the function field); maps that fail this, like
    Frobenius-style charts, cannot transport vector fields.
    """

    __slots__ = ("source_ring", "target_ring", "components", "exceptional")

    def __init__(self, source_vars, target_vars, components, exceptional, p=None):
        components = tuple(components)
        if not components:
            raise ValueError("a chart map needs at least one component")
        if isinstance(source_vars, PolyRing):
            source_ring = source_vars
        else:
            if p is None:
                p = components[0].ring.p
            source_ring = PolyRing(p, source_vars)
        target_vars = tuple(target_vars)
        if len(target_vars) != len(components):
            raise ValueError("one component per target variable required")
        if len(target_vars) != source_ring.nvars:
            raise ValueError("chart maps must preserve the number of coordinates")
        for comp in components:
            if comp.ring != source_ring:
                raise ValueError("components must live in the source ring")
        if exceptional not in source_ring.variables:
            raise ValueError(f"exceptional variable {exceptional!r} not in source")
        self.source_ring = source_ring
        self.target_ring = PolyRing(source_ring.field, target_vars)
        self.components = components
        self.exceptional = exceptional
        if self.jacobian_det().is_zero():
            raise ValueError(
                "chart map has identically singular Jacobian; "
                "vector fields do not pull back"
            )

    @property
    def source_vars(self):
        return self.source_ring.variables

    @property
    def target_vars(self):
        return self.target_ring.variables

    def jacobian(self):
        """Matrix d(components_i)/d(source_j) over the source ring."""
        return [
            [comp.partial(v) for v in self.source_ring.variables]
            for comp in self.components
        ]

    def jacobian_det(self) -> Poly:
        return _det(self.jacobian(), self.source_ring)

    def pull_poly(self, f: Poly) -> Poly:
        """f o m for f in the target ring."""
        if f.ring != self.target_ring:
            raise ValueError("polynomial is not in the target ring of the chart")
        images = dict(zip(self.target_vars, self.components))
        return f.substitute(images)

    def pull_fn(self, f: RationalFn) -> RationalFn:
        num = self.pull_poly(f.num)
        den = self.pull_poly(f.den)
        if den.is_zero():
            raise ZeroDivisionError("denominator pulls back to zero")
        return RationalFn(num, den)

    def compose(self, inner: "ChartMap") -> "ChartMap":
        """self o inner; inner maps a deeper chart into this map's source."""
        if inner.target_vars != self.source_vars:
            raise ValueError(
                "charts do not chain: inner target "
                f"{inner.target_vars} vs source {self.source_vars}"
            )
        comps = tuple(inner.pull_poly(c) for c in self.components)
        return ChartMap(
            inner.source_ring, self.target_vars, comps, inner.exceptional
        )

    def __repr__(self):
        pairs = ", ".join(
            f"{v} = {c}" for v, c in zip(self.target_vars, self.components)
        )
        return f"ChartMap({pairs}; E = {self.exceptional})"


def _det(matrix, ring: PolyRing) -> Poly:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    out = ring.zero()
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
        term = matrix[0][j] * _det(minor, ring)
        out = out + term if j % 2 == 0 else out - term
    return out


def weighted_blowup_chart(
    weights, p: int, *, source=("s", "t"), target=("x", "y"), second_chart=False
) -> ChartMap:
    """The surface weighted blow-up chart containing the generic point of E.

    For weights (a, b) the principal chart is (s, t) -> (s^a, s^b t) with
    exceptional divisor s = 0; for weight 1 in the first slot this is the
    familiar (s, t) -> (s, s^b t).  The complementary chart
    (s, t) -> (s t^a, t^b) is available as a cross-check where its Jacobian
    stays generically invertible (it does not when p divides b).
    """
    a, b = weights
    if a < 1 or b < 1:
        raise ValueError("weights must be positive")
    if math.gcd(a, b) != 1:
        raise ValueError(f"weights {weights} are not coprime")
    ring = PolyRing(p, tuple(source))
    s, t = ring.gens()
    if second_chart:
        comps = (s * t**a, t**b)
        exceptional = source[1]
    else:
        comps = (s**a, s**b * t)
        exceptional = source[0]
    return ChartMap(ring, tuple(target), comps, exceptional)


@dataclass(frozen=True)
class Tower:
    """Composable stack of chart maps; charts[k+1] maps into charts[k]."""

    charts: tuple

    def __post_init__(self):
        if not self.charts:
            raise ValueError("a tower needs at least one chart")
        for outer, inner in zip(self.charts, self.charts[1:]):
            if inner.target_vars != outer.source_vars:
                raise ValueError(
                    f"tower breaks between {outer!r} and {inner!r}"
                )

    @classmethod
    def weighted(cls, weight_list, p: int, target=("x", "y")) -> "Tower":
        """Successive weighted blow-ups at the origin of the running chart."""
        charts = []
        current_target = tuple(target)
        for i, weights in enumerate(weight_list):
            source = ("s", "t") if i == 0 else (f"s{i+1}", f"t{i+1}")
            charts.append(
                weighted_blowup_chart(weights, p, source=source, target=current_target)
            )
            current_target = source
        return cls(tuple(charts))

    def composite(self) -> ChartMap:
        out = self.charts[0]
        for chart in self.charts[1:]:
            out = out.compose(chart)
        return out

    @property
    def last(self) -> ChartMap:
        return self.charts[-1]


# ---------------------------------------------------------------------------
# differential forms


class OneForm:
    """sum(coeffs[i] d x_i) with polynomial coefficients."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: PolyRing, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != ring.nvars:
            raise ValueError("one coefficient per variable required")
        for c in coeffs:
            if c.ring != ring:
                raise ValueError("form coefficients must live in the given ring")
        self.ring = ring
        self.coeffs = coeffs

    def __eq__(self, other):
        return (
            isinstance(other, OneForm)
            and self.ring == other.ring
            and self.coeffs == other.coeffs
        )

    def __str__(self):
        parts = [
            f"({c})*d{v}"
            for v, c in zip(self.ring.variables, self.coeffs)
            if not c.is_zero()
        ]
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"OneForm({self})"


class TwoForm:
    """coeff * d x_1 /\\ d x_2 on a surface chart."""

    __slots__ = ("ring", "coeff")

    def __init__(self, ring: PolyRing, coeff: Poly):
        if ring.nvars != 2:
            raise ValueError("2-forms are only supported on surface charts")
        if coeff.ring != ring:
            raise ValueError("form coefficient must live in the given ring")
        self.ring = ring
        self.coeff = coeff

    def __eq__(self, other):
        return (
            isinstance(other, TwoForm)
            and self.ring == other.ring
            and self.coeff == other.coeff
        )

    def __str__(self):
        v = self.ring.variables
        return f"({self.coeff})*d{v[0]}^d{v[1]}"

    def __repr__(self):
        return f"TwoForm({self})"


def _poly_order(f: Poly, var: str) -> Optional[int]:
    """Order of vanishing along var = 0; None for the zero polynomial."""
    if f.is_zero():
        return None
    i = f.ring.index(var)
    return min(e[i] for e in f.terms)


def _fn_order(fn: RationalFn, var: str) -> Optional[int]:
    if fn.is_zero():
        return None
    return _poly_order(fn.num, var) - _poly_order(fn.den, var)


def pullback_form(m: ChartMap, form):
    """Pull a form back along the chart; returns (form', order along E).

    The order is the exceptional-variable valuation of the result (the
    minimum over nonzero coefficients for a 1-form).  A 2-form whose pullback
    vanishes identically (inseparable-style chart) raises.
    """
    if isinstance(form, OneForm):
        if form.ring != m.target_ring:
            raise ValueError("form is not on the target chart")
        jac = m.jacobian()
        pulled = [m.pull_poly(c) for c in form.coeffs]
        coeffs = []
        for j in range(m.source_ring.nvars):
            total = m.source_ring.zero()
            for i in range(m.source_ring.nvars):
                total = total + pulled[i] * jac[i][j]
            coeffs.append(total)
        out = OneForm(m.source_ring, coeffs)
        orders = [_poly_order(c, m.exceptional) for c in coeffs if not c.is_zero()]
        return out, (min(orders) if orders else None)
    if isinstance(form, TwoForm):
        if form.ring != m.target_ring:
            raise ValueError("form is not on the target chart")
        coeff = m.pull_poly(form.coeff) * m.jacobian_det()
        out = TwoForm(m.source_ring, coeff)
        return out, _poly_order(coeff, m.exceptional)
    raise TypeError(f"cannot pull back {form!r}")


def pullback_derivation(m: ChartMap, d: Derivation) -> Derivation:
    """The unique rational field v~ with  Jacobian(m) * v~ = D o m.

    Solved exactly over the rational function field; all derivatives inside
    the Jacobian are taken in characteristic p, which is what makes the
    weight-(1, p) chart transport d/dx to a regular field.
    """
    if d.ring != m.target_ring:
        raise ValueError("derivation is not on the target chart")
    if d.hypersurface is not None:
        raise ValueError("pull back ambient derivations, not hypersurface ones")
    n = m.source_ring.nvars
    jac = m.jacobian()
    rows = [[RationalFn(jac[i][j]) for j in range(n)] for i in range(n)]
    rhs = [m.pull_fn(c) for c in d.coeffs]
    sol = _solve_rational(rows, rhs, m.source_ring)
    return Derivation(m.source_ring, sol)


def _solve_rational(rows, rhs, ring: PolyRing):
    """Gaussian elimination over the rational function field."""
    n = len(rows)
    a = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if not a[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            raise ValueError(
                "singular Jacobian: vector fields do not pull back"
            )
        a[col], a[pivot] = a[pivot], a[col]
        inv = a[col][col]
        a[col] = [x / inv for x in a[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# discrepancies


def _pull_derivation_through(t: Tower, d: Derivation) -> Derivation:
    for chart in t.charts:
        d = pullback_derivation(chart, d)
    return d


def foliation_discrepancy(t: Tower, f: FoliationChart) -> int:
    """a(E, F) for the last exceptional divisor of the tower.

    The primitive generator pulls back to a rational field; its minimal
    coefficient order along E is m, and a(E, F) = -m.  Nonnegative a is
    exactly the statement that the pulled-back generator, saturated along E,
    does not vanish at the generic point of E.
    """
    if f.primitive is not True:
        raise ValueError("foliated discrepancies need a certified primitive generator")
    d = f.generator
    if d.hypersurface is not None:
        d = d.detach()
    pulled = _pull_derivation_through(t, d)
    exc = t.last.exceptional
    orders = [_fn_order(c, exc) for c in pulled.coeffs if not c.is_zero()]
    if not orders:
        raise ValueError("generator pulled back to zero")
    return -min(orders)


def canonical_discrepancy(t: Tower) -> int:
    """Order along E of the pulled-back volume form: K_Y = pi*K_X + a E."""
    top = t.charts[0].target_ring
    if top.nvars != 2:
        raise ValueError("canonical discrepancies are computed on surface towers")
    form = TwoForm(top, top.one())
    order = None
    for chart in t.charts:
        form, order = pullback_form(chart, form)
    if order is None:
        raise ValueError("volume form pulls back to zero (inseparable chart)")
    return order


@dataclass
class DivisorLedger:
    """Formal integer combination of labelled exceptional divisors."""

    entries: dict = field(default_factory=dict)

    def __add__(self, other):
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return DivisorLedger({k: v for k, v in out.items() if v})

    def __neg__(self):
        return DivisorLedger({k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, DivisorLedger) and self.entries == other.entries

    def __str__(self):
        if not self.entries:
            return "0"
        return " + ".join(f"{v}*{k}" for k, v in sorted(self.entries.items()))


def tower_ledger(t: Tower, f: Optional[FoliationChart] = None) -> dict:
    """Per-divisor report {E_k: {canonical: a_k, foliated: a(E_k, F)}}.

    E_k is the exceptional divisor of the k-th chart, measured in the prefix
    tower that ends at that chart.
    """
    out = {}
    for k in range(len(t.charts)):
        prefix = Tower(t.charts[: k + 1])
        entry = {"canonical": canonical_discrepancy(prefix)}
        if f is not None:
            entry["foliated"] = foliation_discrepancy(prefix, f)
        out[f"E{k+1}"] = entry
    return out
