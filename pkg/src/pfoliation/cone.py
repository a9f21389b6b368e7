"""Intersection-lattice arithmetic for the cone of curves.

A lattice is an integer symmetric matrix of signature (1, rank-1), the
numerical intersection form of a surface.  Everything here is exact integer
or rational arithmetic: signatures come from congruence diagonalisation (and
are cross-checkable against the sign count on the characteristic
polynomial), rationality of rank-2 boundary rays from a perfect-square test
on the discriminant, and the non-polyhedrality certificate from the
smoothness of the boundary quadric plus sampled rational rays.

Purely inseparable pushforward scales curve classes by p^l, so it fixes
every ray and carries the cone onto itself; that is what transports cone
statements across inseparable quotients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .algebra import FieldSpec

__all__ = [
    "Lattice",
    "ConeReport",
    "BpfShellReport",
    "signature_of",
    "signature_by_charpoly",
    "pushforward_inseparable",
    "boundary_rays_rank2",
    "polyhedrality_check",
    "kf_square",
    "numeric_bpf_shell",
]

_SEMIAMPLE_NOTE = (
    "semi-ampleness is not decidable from numerical data: a numerically "
    "trivial class may still be non-torsion, which is invisible to the "
    "intersection form"
)

_NO_RATIONAL_CURVES_NOTE = (
    "surfaces finite over an abelian surface contain no rational curves; "
    "this is a geometric fact recorded here, not a lattice computation"
)


def _as_matrix(form) -> tuple:
    rows = tuple(tuple(int(x) for x in row) for row in form)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("intersection form must be square")
    for i in range(n):
        for j in range(n):
            if rows[i][j] != rows[j][i]:
                raise ValueError("intersection form must be symmetric")
    return rows


def signature_of(form) -> tuple:
    """(positive, negative, zero) inertia by rational congruence diagonalisation."""
    rows = _as_matrix(form)
    n = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]
    pos = neg = zero = 0
    i = 0
    while i < n:
        if a[i][i] == 0:
            # find a nonzero diagonal entry below, or manufacture one
            swap = next((k for k in range(i + 1, n) if a[k][k] != 0), None)
            if swap is not None:
                a[i], a[swap] = a[swap], a[i]
                for row in a:
                    row[i], row[swap] = row[swap], row[i]
            else:
                k = next((k for k in range(i + 1, n) if a[i][k] != 0), None)
                if k is None:
                    zero += 1
                    i += 1
                    continue
                # congruence by adding row/col k into i gives 2*a[i][k] on the diagonal
                for j in range(n):
                    a[i][j] += a[k][j]
                for j in range(n):
                    a[j][i] += a[j][k]
        d = a[i][i]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for r in range(i + 1, n):
            f = a[r][i] / d
            if f:
                for j in range(n):
                    a[r][j] -= f * a[i][j]
                for j in range(n):
                    a[j][r] -= f * a[j][i]
        i += 1
    return pos, neg, zero


def _charpoly(form) -> list:
    """Coefficients of det(x I - Q), descending, by Faddeev-LeVerrier."""
    rows = _as_matrix(form)
    n = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]

    def mat_mul(u, v):
        return [
            [sum(u[i][k] * v[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]

    def trace(u):
        return sum(u[i][i] for i in range(n))

    coeffs = [Fraction(1)]
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        m = mat_mul(a, m)
        for i in range(n):
            m[i][i] += coeffs[-1]
        prod = mat_mul(a, m)
        c = -trace(prod) / k
        coeffs.append(c)
    return coeffs


def signature_by_charpoly(form) -> tuple:
    """Inertia via Descartes' rule on the characteristic polynomial.

    Symmetric integer matrices have real spectra, so the sign-change count
    is exact; trailing zero coefficients count the kernel.
    """
    coeffs = _charpoly(form)
    zero = 0
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
        zero += 1

    def changes(seq):
        signs = [c for c in seq if c != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))

    pos = changes(coeffs)
    neg = changes([c if i % 2 == 0 else -c for i, c in enumerate(coeffs)])
    return pos, neg, zero


class Lattice:
    """Symmetric integer intersection form of hyperbolic signature (1, rank-1)."""

    __slots__ = ("rank", "form", "signature")

    def __init__(self, form):
        rows = _as_matrix(form)
        self.rank = len(rows)
        self.form = rows
        self.signature = signature_of(rows)
        if self.signature != (1, self.rank - 1, 0):
            raise ValueError(
                f"intersection form must have signature (1, {self.rank - 1}); "
                f"got inertia {self.signature}"
            )

    def pairing(self, u: Sequence[int], v: Sequence[int]) -> int:
        if len(u) != self.rank or len(v) != self.rank:
            raise ValueError("vector length must equal the lattice rank")
        return sum(
            int(u[i]) * self.form[i][j] * int(v[j])
            for i in range(self.rank)
            for j in range(self.rank)
        )

    def q(self, v: Sequence[int]) -> int:
        return self.pairing(v, v)

    def det(self) -> int:
        return _int_det(self.form)

    def __repr__(self):
        return f"Lattice({list(map(list, self.form))})"


def _int_det(rows) -> int:
    n = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for i in range(n):
        pivot = next((r for r in range(i, n) if a[r][i] != 0), None)
        if pivot is None:
            return 0
        if pivot != i:
            a[i], a[pivot] = a[pivot], a[i]
            det = -det
        det *= a[i][i]
        for r in range(i + 1, n):
            f = a[r][i] / a[i][i]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[i])]
    assert det.denominator == 1
    return int(det)


def _primitive(v) -> tuple:
    g = 0
    for x in v:
        g = math.gcd(g, abs(int(x)))
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    w = tuple(int(x) // g for x in v)
    for x in w:
        if x != 0:
            return w if x > 0 else tuple(-y for y in w)
    return w


@dataclass(frozen=True)
class ConeReport:
    """Boundary structure of the positive cone of a lattice."""

    rank: int
    boundary: str
    rational_rays: Optional[tuple] = None
    irrational_data: Optional[dict] = None
    polyhedral: Optional[bool] = None
    witnesses: tuple = ()
    notes: tuple = ()

    def to_dict(self):
        return {
            "rank": self.rank,
            "boundary": self.boundary,
            "rational_rays": (
                [list(r) for r in self.rational_rays]
                if self.rational_rays is not None
                else None
            ),
            "irrational": self.irrational_data,
            "polyhedral": self.polyhedral,
            "witnesses": [list(w) for w in self.witnesses],
            "notes": list(self.notes),
        }


def pushforward_inseparable(v: Sequence[int], p: int, l: int) -> tuple:
    """Image of a curve class under l-fold inseparable pushforward: p^l * v.

    The induced map on rays is the identity, so the cone maps onto the cone.
    """
    FieldSpec(p)
    if l < 0:
        raise ValueError("the Frobenius exponent must be nonnegative")
    scale = p**l
    return tuple(int(x) * scale for x in v)


def boundary_rays_rank2(lattice) -> ConeReport:
    """The two null rays of a rank-2 hyperbolic form, exactly.

    Rays are rational precisely when the discriminant (2*Q01)^2 - 4*Q00*Q11
    is a perfect square; irrational rays mean the nef cone has no rational
    extremal ray, hence no Mori fibre space structure can be contracted to.
    """
    if isinstance(lattice, Lattice):
        rows = lattice.form
    else:
        rows = _as_matrix(lattice)
    if len(rows) != 2:
        raise ValueError("boundary_rays_rank2 needs a rank-2 lattice")
    a, b, c = rows[0][0], rows[0][1], rows[1][1]
    det = a * c - b * b
    if det == 0:
        raise ValueError("degenerate intersection form")
    if signature_of(rows) != (1, 1, 0):
        raise ValueError("rank-2 boundary rays need signature (1, 1)")
    disc = 4 * (b * b - a * c)  # positive for signature (1,1)
    root = math.isqrt(disc)
    boundary = f"{a}*x^2 + {2*b}*x*y + {c}*y^2 = 0"
    if root * root == disc:
        if a != 0:
            rays = [(-2 * b + root, 2 * a), (-2 * b - root, 2 * a)]
        else:
            rays = [(1, 0), (-c, 2 * b)]
        rays = sorted({_primitive(r) for r in rays})
        for r in rays:
            assert a * r[0] * r[0] + 2 * b * r[0] * r[1] + c * r[1] * r[1] == 0
        return ConeReport(
            rank=2,
            boundary=boundary,
            rational_rays=tuple(rays),
            polyhedral=True,
            notes=("both extremal rays are rational",),
        )
    return ConeReport(
        rank=2,
        boundary=boundary,
        rational_rays=None,
        irrational_data={"a": a, "b": 2 * b, "c": c, "discriminant": disc},
        polyhedral=True,
        notes=(
            "extremal rays are irrational (discriminant "
            f"{disc} is not a perfect square): no Mori fibre space structure",
            _NO_RATIONAL_CURVES_NOTE,
        ),
    )


def _positive_vector(lat: Lattice) -> tuple:
    """A small integer vector with positive self-intersection."""
    n = lat.rank
    for height in range(1, 4):
        for v in product(range(-height, height + 1), repeat=n):
            if any(v) and lat.q(v) > 0:
                return _primitive(v)
    raise ValueError("no small positive vector found")  # impossible for (1, n-1)


def _rational_point_on_quadric(lat: Lattice, height: int) -> Optional[tuple]:
    n = lat.rank
    for v in product(range(-height, height + 1), repeat=n):
        if any(v) and lat.q(v) == 0:
            return _primitive(v)
    return None


def polyhedrality_check(
    lattice: Lattice,
    *,
    min_witnesses: int = 25,
    base_height: int = 10,
    sweep_limit: int = 12,
) -> ConeReport:
    """Certify that the positive cone of a rank >= 3 lattice is round.

    The boundary quadric {q(v) = 0} of a nondegenerate form is smooth away
    from the origin, so the cone {q >= 0, v.h >= 0} is round: every boundary
    ray is extremal and there are uncountably many, hence the cone is
    neither finitely generated nor locally polyhedral.  When a rational
    boundary point exists within the height bound, chords through it
    parametrise rational boundary rays, which are returned as witnesses
    (each verified to satisfy q(v) = 0 exactly).
    """
    if not isinstance(lattice, Lattice):
        lattice = Lattice(lattice)
    if lattice.rank < 3:
        raise ValueError("polyhedrality_check needs rank >= 3")
    n = lattice.rank
    det = lattice.det()
    assert det != 0  # signature (1, n-1) forces nondegeneracy
    h = _positive_vector(lattice)
    notes = [
        f"form is nondegenerate (det = {det}), so the boundary quadric is "
        "smooth away from 0 and the cone is round",
        "every boundary ray of a round cone is extremal; the cone is not "
        "finitely generated and not locally polyhedral",
        _NO_RATIONAL_CURVES_NOTE,
    ]
    base = _rational_point_on_quadric(lattice, base_height)
    if base is None:
        return ConeReport(
            rank=n,
            boundary="q(v) = 0, smooth away from 0",
            polyhedral=False,
            witnesses=(),
            notes=tuple(
                notes
                + [
                    f"no rational boundary ray of height <= {base_height}; "
                    "roundness is still certified, witness list empty"
                ]
            ),
        )

    qh = [sum(lattice.form[i][j] * h[j] for j in range(n)) for i in range(n)]

    def orient(v):
        pair = sum(x * y for x, y in zip(v, qh))
        if pair < 0:
            return tuple(-x for x in v)
        return v

    witnesses = {orient(base)}
    for height in range(1, sweep_limit + 1):
        if len(witnesses) >= min_witnesses:
            break
        for w in product(range(-height, height + 1), repeat=n):
            if not any(w):
                continue
            qw = lattice.q(w)
            bw = sum(
                base[i] * lattice.form[i][j] * w[j]
                for i in range(n)
                for j in range(n)
            )
            # second intersection of the chord through base along w
            v = tuple(qw * base[i] - 2 * bw * w[i] for i in range(n))
            if not any(v):
                continue
            assert lattice.q(v) == 0
            witnesses.add(orient(_primitive(v)))
            if len(witnesses) >= min_witnesses * 4:
                break
    return ConeReport(
        rank=n,
        boundary="q(v) = 0, smooth away from 0",
        polyhedral=False,
        witnesses=tuple(sorted(witnesses)),
        notes=tuple(notes),
    )


def kf_square(l_squared: int, p: int, m: int) -> int:
    """Foliated canonical self-intersection of the degree-p cover of L^m.

    The projection formula for the degree-p cover gives
    (pullback of L^m)^2 = p * m^2 * L^2, strictly increasing in m, which is
    what rules out any uniform bound on these Fano foliations.
    """
    FieldSpec(p)
    if l_squared <= 0:
        raise ValueError("L^2 must be positive (L ample)")
    if m < 1:
        raise ValueError("the power m must be >= 1")
    return p * m * m * l_squared


@dataclass(frozen=True)
class BpfShellReport:
    """Numeric shell of the base-point-free failure configuration."""

    nef_or_trivial: bool
    numerically_trivial: bool
    d_minus_kf_ample: bool
    holds: bool
    sampled_rays: int
    notes: tuple = ()

    def to_dict(self):
        return {
            "nef_or_trivial": self.nef_or_trivial,
            "numerically_trivial": self.numerically_trivial,
            "d_minus_kf_ample": self.d_minus_kf_ample,
            "holds": self.holds,
            "sampled_rays": self.sampled_rays,
            "notes": list(self.notes),
        }


def _sample_cone_vectors(lat: Lattice, height: int = 4):
    """Primitive classes in {q >= 0, v.Qh >= 0}, boundary rays included."""
    n = lat.rank
    h = _positive_vector(lat)
    qh = [sum(lat.form[i][j] * h[j] for j in range(n)) for i in range(n)]
    out = set()
    for v in product(range(-height, height + 1), repeat=n):
        if not any(v):
            continue
        if lat.q(v) < 0:
            continue
        pair = sum(x * y for x, y in zip(v, qh))
        if pair < 0:
            v = tuple(-x for x in v)
        out.add(_primitive(v))
    if n == 2:
        report = boundary_rays_rank2(lat)
        if report.rational_rays:
            out.update(report.rational_rays)
    else:
        report = polyhedrality_check(lat, min_witnesses=10)
        out.update(report.witnesses)
    return sorted(out)


def numeric_bpf_shell(d: Sequence[int], kf: Sequence[int], lattice: Lattice) -> BpfShellReport:
    """Check the numeric conditions of the non-semi-ample configuration.

    Verifies that D is numerically trivial or nef against the sampled cone,
    and that D - K_F is positive on every sampled nonzero class (the numeric
    shadow of ampleness).  Whether D is semi-ample is explicitly reported as
    undecidable from this data.
    """
    lat = lattice if isinstance(lattice, Lattice) else Lattice(lattice)
    n = lat.rank
    d = tuple(int(x) for x in d)
    kf = tuple(int(x) for x in kf)
    rays = _sample_cone_vectors(lat)
    qd = [sum(lat.form[i][j] * d[j] for j in range(n)) for i in range(n)]
    trivial = all(x == 0 for x in qd)
    nef = all(sum(r[i] * qd[i] for i in range(n)) >= 0 for r in rays)
    diff = tuple(a - b for a, b in zip(d, kf))
    qdiff = [sum(lat.form[i][j] * diff[j] for j in range(n)) for i in range(n)]
    ample = (
        lat.q(diff) > 0
        and all(sum(r[i] * qdiff[i] for i in range(n)) > 0 for r in rays)
    )
    return BpfShellReport(
        nef_or_trivial=trivial or nef,
        numerically_trivial=trivial,
        d_minus_kf_ample=ample,
        holds=(trivial or nef) and ample,
        sampled_rays=len(rays),
        notes=(
            _SEMIAMPLE_NOTE,
            "nefness and ampleness are tested against sampled cone classes; "
            "positivity on all of them is necessary, and exact on the "
            "rational boundary rays returned by the cone reports",
        ),
    )
