"""Constants of a derivation and the inseparable quotient bookkeeping.

The kernel of a derivation D on polynomials of bounded degree is an exact
linear-algebra computation over F_p; its elements are the functions constant
along the foliation generated by D, i.e. the coordinate ring of the quotient
at desk scale.  Frobenius guarantees x_i^p is always constant, so for a
nonzero rank-1 p-closed derivation every coordinate is purely inseparable of
degree p over the constants, which pins the degree of the quotient morphism
at p.

The ramification formula  pi*K_quotient - K_total = (p-1) K_foliation  is
verified on a fixed library of cases where both sides reduce to exact
integer degree or order computations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import (
    Poly,
    PolyRing,
    RationalFn,
    monomials_up_to_degree,
    nullspace_mod_p,
    rref_mod_p,
)
from .derivation import Derivation, is_p_closed

__all__ = [
    "ConstantsBasis",
    "RamificationCase",
    "ring_of_constants",
    "inseparable_degree",
    "verify_ramification",
    "RAMIFICATION_CASES",
]


class _Span:
    """Incremental row space over F_p with reduction against the rref."""

    def __init__(self, dim: int, p: int):
        self.p = p
        self.dim = dim
        self.rows: list = []  # rref rows as numpy vectors
        self.pivots: list = []

    def reduce(self, vec):
        v = np.array(vec, dtype=np.int64) % self.p
        for row, piv in zip(self.rows, self.pivots):
            c = v[piv]
            if c:
                v = (v - c * row) % self.p
        return v

    def add(self, vec) -> bool:
        """Insert if independent; returns True when the span grew."""
        v = self.reduce(vec)
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return False
        piv = int(nz[0])
        inv = pow(int(v[piv]), self.p - 2, self.p)
        v = (v * inv) % self.p
        for i, row in enumerate(self.rows):
            c = row[piv]
            if c:
                self.rows[i] = (row - c * v) % self.p
        self.rows.append(v)
        self.pivots.append(piv)
        return True

    def contains(self, vec) -> bool:
        return not self.reduce(vec).any()


class ConstantsBasis:
    """Constants of a derivation on polynomials of degree <= bound.

    ``kernel_basis`` spans the kernel as an F_p vector space (dimension
    ``kernel_dimension``); ``generators`` is a greedy-by-degree minimal set
    generating the same elements as an algebra within the bound.  The scalars
    are implicit and never listed.
    """

    def __init__(self, ring, degree_bound, kernel_basis, generators,
                 monomials, kernel_span, algebra_span):
        self.ring = ring
        self.degree_bound = degree_bound
        self.kernel_basis = tuple(kernel_basis)
        self.generators = tuple(generators)
        self.kernel_dimension = len(self.kernel_basis)
        self._monomials = monomials
        self._index = {m: i for i, m in enumerate(monomials)}
        self._kernel_span = kernel_span
        self._algebra_span = algebra_span

    def _vector(self, poly: Poly):
        v = np.zeros(len(self._monomials), dtype=np.int64)
        for e, c in poly.terms.items():
            if e not in self._index:
                raise ValueError(f"{poly} exceeds the degree bound")
            v[self._index[e]] = c
        return v

    def contains_in_kernel(self, poly: Poly) -> bool:
        """Membership in the kernel as a vector space (degree <= bound)."""
        return self._kernel_span.contains(self._vector(poly))

    def contains(self, poly: Poly) -> bool:
        """Membership in the subalgebra generated by the generators."""
        return self._algebra_span.contains(self._vector(poly))

    def __repr__(self):
        gens = ", ".join(str(g) for g in self.generators)
        return (
            f"ConstantsBasis(bound={self.degree_bound}, dim={self.kernel_dimension}, "
            f"generators=[{gens}])"
        )


def _poly_from_vector(ring, monomials, vec):
    return Poly(ring, {m: int(c) for m, c in zip(monomials, vec) if c})


def ring_of_constants(d: Derivation, bound: int) -> ConstantsBasis:
    """Exact kernel of D on the span of monomials of degree <= bound.

    The kernel basis is the canonical reduced one (echelonised against the
    graded-lex monomial order); the generator list is extracted greedily by
    degree, keeping an element only when it falls outside the subalgebra
    generated so far.
    """
    ring = d.ring
    p = ring.p
    if not d.is_polynomial:
        raise ValueError("ring_of_constants expects polynomial coefficients")
    if d.hypersurface is not None:
        raise ValueError("ring_of_constants works on the ambient polynomial ring")
    if bound < p:
        raise ValueError(
            f"bound {bound} is too small to contain the Frobenius constants x^p"
        )
    coeff_deg = max((c.as_poly().total_degree() for c in d.coeffs), default=0)
    cols = monomials_up_to_degree(ring.nvars, bound)
    rows = monomials_up_to_degree(ring.nvars, bound + max(coeff_deg - 1, 0))
    row_index = {e: i for i, e in enumerate(rows)}
    mat = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for j, e in enumerate(cols):
        image = d.apply_poly(ring.monomial(e))
        for e2, c in image.terms.items():
            mat[row_index[e2], j] = c
    null = nullspace_mod_p(mat, p)

    # canonical reduced basis, echelonised on ascending (degree, lex) columns
    rref, _ = rref_mod_p(null, p)
    basis_vectors = [row for row in rref if row.any()]
    kernel_polys = [_poly_from_vector(ring, cols, v) for v in basis_vectors]
    kernel_polys.sort(key=lambda f: (f.total_degree(), f.sorted_terms()[0][0]))

    kernel_span = _Span(len(cols), p)
    for v in basis_vectors:
        kernel_span.add(v)

    # greedy minimal algebra generators
    algebra_span = _Span(len(cols), p)
    one_vec = np.zeros(len(cols), dtype=np.int64)
    one_vec[cols.index((0,) * ring.nvars)] = 1
    algebra_span.add(one_vec)
    span_polys = [ring.one()]
    generators: list = []
    index = {m: i for i, m in enumerate(cols)}

    def vec_of(poly):
        v = np.zeros(len(cols), dtype=np.int64)
        for e, c in poly.terms.items():
            v[index[e]] = c
        return v

    def close_with(gen):
        queue = list(span_polys)
        while queue:
            f = queue.pop()
            prod = f * gen
            if prod.total_degree() > bound:
                continue
            if algebra_span.add(vec_of(prod)):
                span_polys.append(prod)
                queue.append(prod)

    for cand in kernel_polys:
        if cand.is_constant():
            continue
        if algebra_span.contains(vec_of(cand)):
            continue
        generators.append(cand)
        # close under products with every generator found so far
        if algebra_span.add(vec_of(cand)):
            span_polys.append(cand)
        for g in generators:
            close_with(g)

    return ConstantsBasis(
        ring, bound, kernel_polys, generators, cols, kernel_span, algebra_span
    )


def inseparable_degree(d: Derivation, bound: int) -> Optional[int]:
    """Degree of the quotient morphism cut out by a rank-1 p-closed field.

    Returns p when every coordinate is certified purely inseparable of
    degree <= p over the computed constants (x_i^p always is; x_i itself may
    already be constant) and at least one coordinate is transcendental over
    them.  Returns None when the bound does not certify this.
    """
    if d.is_zero():
        raise ValueError("the zero derivation has no quotient")
    if not is_p_closed(d).closed:
        raise ValueError("inseparable degree is defined for p-closed derivations")
    p = d.ring.p
    constants = ring_of_constants(d, bound)
    moving = 0
    for v in d.ring.variables:
        xi = d.ring.var(v)
        if d.apply_poly(xi).is_zero():
            continue  # already a constant
        moving += 1
        if not constants.contains(xi**p):
            return None  # not certified at this bound
    if moving == 0:
        raise ValueError("derivation vanishes on all coordinates")
    return p


# ---------------------------------------------------------------------------
# ramification case library


@dataclass(frozen=True)
class RamificationCase:
    """One verified instance of pi*K_quotient - K_total = (p-1)*K_foliation."""

    name: str
    p: int
    lhs: int
    rhs: int
    details: dict = field(default_factory=dict, compare=False)

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def _case_projective_line_frobenius(p: int, **_) -> RamificationCase:
    """Full tangent foliation on the projective line; quotient = Frobenius.

    Degrees: the canonical class of the line has degree -2, the quotient map
    has degree p (pullback multiplies divisor degrees by p), and the
    foliation is the whole tangent sheaf, so K_F has degree -2 as well.  The
    tangent degree 2 is re-derived from the chart transform of d/dx, which
    picks up a double zero at infinity, and the inseparability of the
    quotient from d(x^p) = 0.
    """
    ring = PolyRing(p, ("x",))
    x = ring.var("x")
    frobenius_differential = (x**p).partial("x")
    # d/dx in the chart at infinity u = 1/x: value on u is -1/x^2 = -u^2,
    # computed by the quotient rule
    d = Derivation.partial(ring, "x")
    on_u = d.apply(RationalFn(ring.one(), x))
    pole_order = on_u.den.deg_in("x") - on_u.num.deg_in("x")
    zero_order_at_infinity = pole_order  # -1/x^2 rewrites to -u^2
    tangent_degree = 0 + zero_order_at_infinity  # no finite zeros
    k_x = -tangent_degree
    k_foliation = k_x  # the foliation is all of the tangent sheaf
    k_quotient = -2  # the quotient is again a projective line
    lhs = p * k_quotient - k_x
    rhs = (p - 1) * k_foliation
    return RamificationCase(
        "projective_line_frobenius",
        p,
        lhs,
        rhs,
        details={
            "K_X": k_x,
            "K_quotient_degree": k_quotient,
            "pullback_multiplier": p,
            "K_F": k_foliation,
            "frobenius_differential_zero": frobenius_differential.is_zero(),
            "vector_field_zero_at_infinity": zero_order_at_infinity,
        },
    )


def _case_affine_cover(p: int, section: str = "x*y", **_) -> RamificationCase:
    """Cover z^p = f over the affine plane, foliation along d/dz.

    All three canonical classes are trivial on the affine models (the cover
    is a hypersurface in affine 3-space with free dualizing module, the
    quotient is the plane, and the foliation is freely generated by d/dz),
    so both sides of the formula are 0.  The quotient really is the plane:
    the constants of d/dz are generated by x, y, z^p, and z^p equals f there.
    """
    from .cover import CoverDatum, induced_foliation

    base = PolyRing(p, ("x", "y"))
    f = base.parse(section)
    datum = CoverDatum(p, p, f, cover_var="z")
    chart = induced_foliation(datum)
    gen = chart.generator.detach()
    constants = ring_of_constants(gen, max(p, f.total_degree()))
    names = sorted(str(g) for g in constants.generators)
    lhs = p * 0 - 0
    rhs = (p - 1) * 0
    return RamificationCase(
        "affine_cover",
        p,
        lhs,
        rhs,
        details={
            "section": str(f),
            "relation_value_under_generator": str(
                chart.generator.apply(chart.generator.hypersurface.relation)
            ),
            "constants_generators": names,
            "orders": {"K_X": 0, "K_quotient": 0, "K_F": 0},
        },
    )


def _case_fano_cover_square(p: int, l_squared: int = 2, power: int = 1, **_) -> RamificationCase:
    """Self-intersection of the foliated canonical class of a Fano cover.

    The induced foliation of a degree-p cover along a section of the d-th
    power of an ample class L has K_F = -pullback(L^power); the projection
    formula gives K_F^2 = p * power^2 * L^2.  Cross-checked against the cone
    module's closed form.
    """
    from .cone import kf_square

    direct = p * power * power * l_squared
    via_cone = kf_square(l_squared, p, power)
    return RamificationCase(
        "fano_cover_square",
        p,
        direct,
        via_cone,
        details={
            "L_squared": l_squared,
            "power": power,
            "cover_degree": p,
            "identity": "K_F^2 = deg(pi) * (L^power)^2",
        },
    )


RAMIFICATION_CASES = {
    "projective_line_frobenius": _case_projective_line_frobenius,
    "affine_cover": _case_affine_cover,
    "fano_cover_square": _case_fano_cover_square,
}


def verify_ramification(case: str, p: int, **params) -> RamificationCase:
    """Run one named case of the ramification formula; exact integers."""
    try:
        builder = RAMIFICATION_CASES[case]
    except KeyError:
        raise ValueError(
            f"unknown case {case!r}; available: {sorted(RAMIFICATION_CASES)}"
        ) from None
    return builder(p, **params)
