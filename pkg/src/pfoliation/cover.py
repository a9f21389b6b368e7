"""Cyclic covers w^d = f and their singular loci.

A cover datum is a section f over the base variables together with a degree
d and the characteristic p.  When p divides d the cover carries an induced
rank-1 foliation generated by the vector field along the cover variable
(the relation differentiates to d*w^(d-1) = 0), and the singular points of
the cover hypersurface sit exactly over the critical points of the section.
Both loci are found by exhaustive enumeration over F_q, which is exact and
cheap at the scales this module budgets for; the nondegeneracy of a critical
point is read off the rank of the Hessian.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import FieldSpec, HypersurfaceRing, Poly, PolyRing
from .derivation import Derivation, FoliationChart, is_invariant, is_p_closed
from .gfq import GF, as_prime_power, gf

__all__ = [
    "CoverDatum",
    "CriticalPoint",
    "HessianClassification",
    "EnumerationBudgetError",
    "build_cover",
    "induced_foliation",
    "critical_points",
    "singular_points_of_cover",
    "hessian_normal_form_check",
    "nondegenerate_section_fraction",
]

ENUMERATION_BUDGET = 10**7

_COVER_VAR_CHOICES = ("y", "z", "w", "u", "v")


class EnumerationBudgetError(RuntimeError):
    """The requested brute-force scan exceeds the point budget."""


def _pick_cover_var(base_vars):
    for name in _COVER_VAR_CHOICES:
        if name not in base_vars:
            return name
    i = 0
    while f"w{i}" in base_vars:
        i += 1
    return f"w{i}"


@dataclass(frozen=True)
class CoverDatum:
    """Defining data of the cover {cover_var^degree = section}."""

    p: int
    degree: int
    section: Poly
    cover_var: str = ""

    def __post_init__(self):
        FieldSpec(self.p)
        if self.section.ring.p != self.p:
            raise ValueError("section characteristic differs from p")
        if self.degree < 1:
            raise ValueError("cover degree must be >= 1")
        if self.section.is_zero():
            raise ValueError("the section must be nonzero")
        name = self.cover_var or _pick_cover_var(self.section.ring.variables)
        if name in self.section.ring.variables:
            raise ValueError(
                f"cover variable {name!r} collides with a base variable"
            )
        object.__setattr__(self, "cover_var", name)

    @property
    def base_ring(self) -> PolyRing:
        return self.section.ring

    @property
    def base_vars(self) -> tuple:
        return self.section.ring.variables

    @property
    def p_divides_degree(self) -> bool:
        return self.degree % self.p == 0


def build_cover(c: CoverDatum) -> HypersurfaceRing:
    """The coordinate ring of the cover as a hypersurface ring."""
    ambient = c.base_ring.extend(c.cover_var)
    return HypersurfaceRing(ambient, c.degree, c.section.cast(ambient))


def induced_foliation(c: CoverDatum) -> FoliationChart:
    """The rank-1 foliation generated by d/d(cover variable).

    Requires p | d: only then does the relation differentiate to zero along
    the cover direction, so the vector field is tangent to the cover.  The
    construction re-verifies that the generator is p-closed and leaves the
    cover invariant before returning it.
    """
    if not c.p_divides_degree:
        raise ValueError(
            f"the induced foliation needs p | d; got p={c.p}, d={c.degree}"
        )
    ring = build_cover(c)
    gen = Derivation.partial(ring.ambient, c.cover_var, ring)
    check = is_p_closed(gen)
    if not check.closed:
        raise AssertionError("cover generator unexpectedly failed p-closedness")
    if is_invariant(gen.detach(), ring.relation) is not True:
        raise AssertionError("cover relation unexpectedly not invariant")
    return FoliationChart(gen, primitive=True)


# ---------------------------------------------------------------------------
# enumeration over F_q


@dataclass(frozen=True)
class CriticalPoint:
    """A zero of the differential of the section, with its Hessian rank."""

    location: tuple
    q: int
    hessian_rank: int
    nondegenerate: bool


def _field_for(c: CoverDatum, q: int) -> GF:
    k = as_prime_power(q, c.p)
    return gf(c.p, k)


def _eval_on_arrays(poly: Poly, field: GF, coords: Sequence[np.ndarray]) -> np.ndarray:
    shape = coords[0].shape
    acc = np.zeros(shape, dtype=np.int64)
    pow_cache: dict = {}

    def power(i, e):
        key = (i, e)
        if key not in pow_cache:
            pow_cache[key] = field.pow_arrays(coords[i], e)
        return pow_cache[key]

    for exps, coeff in poly.terms.items():
        t = np.full(shape, field.embed(coeff), dtype=np.int64)
        for i, e in enumerate(exps):
            if e:
                t = field.mul_arrays(t, power(i, e))
        acc = field.add_arrays(acc, t)
    return acc


def eval_at_point(poly: Poly, field: GF, point: Sequence[int]) -> int:
    acc = 0
    for exps, coeff in poly.terms.items():
        t = field.embed(coeff)
        for v, e in zip(point, exps):
            if e:
                t = field.mul(t, field.pow(v, e))
        acc = field.add(acc, t)
    return acc


def _matrix_rank(field: GF, rows) -> int:
    m = [list(r) for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    rank = 0
    row = 0
    for col in range(n_cols):
        pivot = None
        for r in range(row, n_rows):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        inv = field.inv(m[row][col])
        m[row] = [field.mul(inv, v) for v in m[row]]
        for r in range(n_rows):
            if r != row and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [field.sub(a, field.mul(factor, b)) for a, b in zip(m[r], m[row])]
        rank += 1
        row += 1
        if row == n_rows:
            break
    return rank


def _zero_locus(polys, field: GF, nvars: int, jobs: int = 1) -> np.ndarray:
    """Points of F_q^nvars where every polynomial vanishes, lex sorted.

    Returns an array of shape (#points, nvars).  The grid is scanned in
    chunks (optionally in parallel); chunk results concatenate back in index
    order, so the output is deterministic.
    """
    q = field.q
    total = q**nvars
    if total > ENUMERATION_BUDGET:
        raise EnumerationBudgetError(
            f"{q}^{nvars} = {total} points exceeds the budget {ENUMERATION_BUDGET}"
        )
    chunk = total if jobs <= 1 else -(-total // jobs)
    spans = [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]

    def scan(span):
        lo, hi = span
        idx = np.arange(lo, hi, dtype=np.int32)
        coords = []
        div = total
        for _ in range(nvars):
            div //= q
            coords.append(((idx // div) % q).astype(np.int32))
        mask = np.ones(hi - lo, dtype=bool)
        for poly in polys:
            if not mask.any():
                break
            vals = _eval_on_arrays(poly, field, coords)
            mask &= vals == 0
        return np.stack([c[mask] for c in coords], axis=1)

    if len(spans) == 1:
        return scan(spans[0])
    with ThreadPoolExecutor(max_workers=len(spans)) as pool:
        parts = list(pool.map(scan, spans))
    return np.concatenate(parts, axis=0)


def critical_points(c: CoverDatum, q: int, jobs: int = 1):
    """All points of F_q^n where the differential of the section vanishes."""
    field = _field_for(c, q)
    ring = c.base_ring
    partials = [c.section.partial(v) for v in ring.variables]
    pts = _zero_locus(partials, field, ring.nvars, jobs)
    n = ring.nvars
    hessian = [
        [c.section.partial(u).partial(v) for v in ring.variables]
        for u in ring.variables
    ]
    out = []
    if len(pts) > 200_000:
        raise EnumerationBudgetError(
            f"{len(pts)} critical points exceed the classification budget"
        )
    for row in pts:
        point = tuple(int(x) for x in row)
        h = [[eval_at_point(hessian[i][j], field, point) for j in range(n)]
             for i in range(n)]
        rank = _matrix_rank(field, h)
        out.append(CriticalPoint(point, q, rank, rank == n))
    return out


def singular_points_of_cover(c: CoverDatum, q: int, jobs: int = 1):
    """Jacobian-criterion singular locus of {w^d = f} over F_q, brute force.

    Scans all of F_q^(n+1): a point is singular when it lies on the
    hypersurface and every partial of the defining equation vanishes there.
    Coordinates are ordered (base variables..., cover variable).
    """
    ring = build_cover(c)
    field = _field_for(c, q)
    g = ring.relation
    polys = [g] + [g.partial(v) for v in ring.ambient.variables]
    pts = _zero_locus(polys, field, ring.ambient.nvars, jobs)
    return [tuple(int(x) for x in row) for row in pts]


# ---------------------------------------------------------------------------
# Hessian normal form


@dataclass(frozen=True)
class HessianClassification:
    """Nondegeneracy of a critical point, with a splitting witness.

    For a nondegenerate critical point of a surface section the quadratic
    part factors as a product of two independent linear forms L1 * L2; the
    witness rows are the coefficients of L1 and L2, over F_q itself when the
    discriminant is a square there and over the quadratic extension
    otherwise.
    """

    nondegenerate: bool
    rank: int
    dimension: int
    witness: Optional[tuple] = None
    witness_field_order: Optional[int] = None
    note: str = ""


def hessian_normal_form_check(f: Poly, point: Sequence[int], q: Optional[int] = None):
    """Classify a critical point and, on surfaces, split its quadratic part.

    Characteristic 2 is rejected: there the Hessian of a square vanishes and
    the rank criterion breaks down, so no classification is offered.
    """
    p = f.ring.p
    if p == 2:
        raise ValueError("Hessian classification is unsupported in characteristic 2")
    q = q or p
    field = gf(p, as_prime_power(q, p))
    n = f.ring.nvars
    point = tuple(int(x) for x in point)
    if len(point) != n:
        raise ValueError("point dimension mismatch")
    for v in f.ring.variables:
        if eval_at_point(f.partial(v), field, point) != 0:
            raise ValueError(f"{point} is not a critical point of {f}")
    h = [[eval_at_point(f.partial(u).partial(v), field, point)
          for v in f.ring.variables] for u in f.ring.variables]
    rank = _matrix_rank(field, h)
    nondeg = rank == n
    if n != 2 or not nondeg:
        return HessianClassification(nondeg, rank, n)

    # quadratic part A u^2 + B uv + C v^2 from the Hessian (p odd)
    half = field.inv(field.embed(2))
    a = field.mul(half, h[0][0])
    b = h[0][1]
    cc = field.mul(half, h[1][1])
    witness, order, note = _split_binary_form(field, a, b, cc)
    return HessianClassification(True, rank, n, witness, order, note)


def _split_binary_form(field: GF, a: int, b: int, c: int):
    """Rows (L1, L2) with (L1 . u)(L2 . u) = a u^2 + b uv + c v^2."""
    if a == 0 and c == 0:
        return ((b, 0), (0, 1)), field.q, ""
    if a == 0:
        # v * (b u + c v)
        return ((0, 1), (b, c)), field.q, ""
    if c == 0:
        return ((1, 0), (a, b)), field.q, ""
    # discriminant b^2 - 4ac; nondegeneracy makes it nonzero
    four = field.embed(4 % field.p)
    disc = field.sub(field.mul(b, b), field.mul(four, field.mul(a, c)))
    s = field.sqrt(disc)
    if s is not None:
        big, note = field, ""
    else:
        if field.k != 1:
            return None, None, (
                "splitting needs a quadratic extension of a non-prime field; "
                "witness omitted"
            )
        big = gf(field.p, 2)
        s = big.sqrt(disc)  # every element of F_p is a square in F_{p^2}
        note = "witness lives in the quadratic extension"
    inv2a = big.inv(big.mul(big.embed(2 % big.p), a))
    r1 = big.mul(big.add(b, s), inv2a)
    r2 = big.mul(big.sub(b, s), inv2a)
    # a(u + r1 v)(u + r2 v): rows (a, a r1), (1, r2)
    witness = ((a, big.mul(a, r1)), (1, r2))
    # verify the split exactly
    m00, m01 = witness[0]
    m10, m11 = witness[1]
    assert big.mul(m00, m10) == a
    assert big.add(big.mul(m00, m11), big.mul(m01, m10)) == b
    assert big.mul(m01, m11) == c
    return witness, big.q, note


def nondegenerate_section_fraction(
    p: int, q: int, nvars: int = 2, degree: int = 4, samples: int = 50, seed: int = 0
) -> float:
    """Fraction of random sections all of whose critical points are nondegenerate.

    A sampled estimate of how generic nondegeneracy is; sections are uniform
    over polynomials of the given degree with a nonzero requirement.
    """
    import random

    from .algebra import monomials_up_to_degree

    rng = random.Random(seed)
    ring = PolyRing(p, tuple(f"x{i+1}" for i in range(nvars)))
    monos = monomials_up_to_degree(nvars, degree)
    good = 0
    for _ in range(samples):
        while True:
            terms = {m: rng.randrange(p) for m in monos}
            f = Poly(ring, terms)
            if not f.is_zero():
                break
        c = CoverDatum(p, p, f)
        pts = critical_points(c, q)
        if all(pt.nondegenerate for pt in pts):
            good += 1
    return good / samples
