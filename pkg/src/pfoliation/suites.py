"""Self-verification suites: worked examples and algebraic property checks.

Each suite returns a certificate with a pass/fail verdict and a short
statement of what was checked; the CLI's suite command runs them all and
exits nonzero on any failure.  Random inputs are drawn from seeded
generators, so runs are reproducible.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

import numpy as np

from .algebra import Poly, PolyRing, monomials_up_to_degree
from .birational import (
    OneForm,
    Tower,
    TwoForm,
    canonical_discrepancy,
    foliation_discrepancy,
    pullback_derivation,
    pullback_form,
    weighted_blowup_chart,
)
from .cone import (
    Lattice,
    boundary_rays_rank2,
    kf_square,
    polyhedrality_check,
    pushforward_inseparable,
    signature_of,
)
from .cover import (
    CoverDatum,
    critical_points,
    hessian_normal_form_check,
    induced_foliation,
    singular_points_of_cover,
)
from .derivation import Derivation, FoliationChart, is_invariant, is_p_closed
from .quotient import inseparable_degree, ring_of_constants, verify_ramification

__all__ = ["Certificate", "SUITES", "run_suites", "PROPERTY_SUITES"]

_CHARACTERISTICS = (2, 3, 5, 7)


@dataclass
class Certificate:
    name: str
    passed: bool
    statement: str
    checks: int
    seconds: float
    failures: list = field(default_factory=list)

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "statement": self.statement,
            "checks": self.checks,
            "seconds": round(self.seconds, 3),
            "failures": self.failures[:10],
        }


# ---------------------------------------------------------------------------
# random samplers


def random_poly(rng, ring, max_degree=2, max_terms=3, nonzero=False) -> Poly:
    monos = monomials_up_to_degree(ring.nvars, max_degree)
    while True:
        picks = rng.sample(monos, k=min(rng.randint(1, max_terms), len(monos)))
        terms = {m: rng.randrange(ring.p) for m in picks}
        f = Poly(ring, terms)
        if not nonzero or not f.is_zero():
            return f


def random_derivation(rng, ring, max_degree=2, max_terms=2, nonzero=False) -> Derivation:
    while True:
        coeffs = [
            random_poly(rng, ring, max_degree, max_terms) for _ in ring.variables
        ]
        d = Derivation(ring, coeffs)
        if not nonzero or not d.is_zero():
            return d


def _ring(p, nvars=2):
    return PolyRing(p, ("x", "y", "z")[:nvars])


# ---------------------------------------------------------------------------
# worked-example suites


def suite_cover_pclosed(seed=0):
    """Induced cover foliations are p-closed with an invariant cover."""
    rng = random.Random(seed)
    failures = []
    checks = 0
    for p in _CHARACTERISTICS:
        ring = _ring(p)
        for _ in range(10):
            f = random_poly(rng, ring, max_degree=4, max_terms=4, nonzero=True)
            datum = CoverDatum(p, p, f)
            chart = induced_foliation(datum)  # re-verifies both properties
            hyp = chart.generator.hypersurface
            pc = is_p_closed(chart.generator)
            inv = is_invariant(chart.generator.detach(), hyp.relation)
            checks += 1
            if not (pc.closed and inv is True):
                failures.append(f"p={p}, f={f}")
    return checks, failures


def suite_blowup_ledger():
    """Weight-(1,p) blow-up: volume form gains order p, the foliation none."""
    failures = []
    checks = 0
    for p in (2, 3, 5):
        tower = Tower((weighted_blowup_chart((1, p), p),))
        can = canonical_discrepancy(tower)
        gen = Derivation.partial(tower.charts[0].target_ring, "x")
        fol = foliation_discrepancy(tower, FoliationChart(gen, True))
        checks += 2
        if can != p:
            failures.append(f"p={p}: canonical {can} != {p}")
        if fol != 0:
            failures.append(f"p={p}: foliated {fol} != 0")
    return checks, failures


def suite_ordinary_blowup():
    """Ordinary blow-up of the coordinate foliation has discrepancy 1."""
    failures = []
    checks = 0
    for p in (2, 3, 5):
        tower = Tower((weighted_blowup_chart((1, 1), p),))
        gen = Derivation.partial(tower.charts[0].target_ring, "x")
        a = foliation_discrepancy(tower, FoliationChart(gen, True))
        checks += 1
        if a != 1:
            failures.append(f"p={p}: a = {a} != 1")
    return checks, failures


_Q_BY_P = {2: (4, 8), 3: (9,), 5: (25,), 7: (49,)}


def suite_cover_singularities(seed=1, sections=20, jobs=1):
    """Cover singular points sit exactly over the section's critical points."""
    rng = random.Random(seed)
    failures = []
    checks = 0
    plan = []
    for p, qs in _Q_BY_P.items():
        for q in qs:
            plan.append((p, q))
    per_field = -(-sections // len(plan))
    for p, q in plan:
        ring = _ring(p)
        for _ in range(per_field):
            f = random_poly(rng, ring, max_degree=4, max_terms=4, nonzero=True)
            datum = CoverDatum(p, p, f)
            crit = critical_points(datum, q, jobs=jobs)
            sing = singular_points_of_cover(datum, q, jobs=jobs)
            # degree-p covers: projection onto the base is a bijection from
            # singular points to critical points (y^p = c has a unique root)
            base_of_sing = sorted(pt[:-1] for pt in sing)
            crit_locs = sorted(c.location for c in crit)
            checks += 1
            if base_of_sing != crit_locs:
                failures.append(f"p={p}, q={q}, f={f}")
    return checks, failures


def suite_hessian_normal_form():
    """xy splits with an exact witness; the cubic cusp section degenerates."""
    failures = []
    checks = 0
    for p in (3, 5, 7):
        ring = PolyRing(p, ("x", "y"))
        cls = hessian_normal_form_check(ring.parse("x*y"), (0, 0))
        checks += 1
        if not (cls.nondegenerate and cls.witness is not None):
            failures.append(f"p={p}: xy not split")
        else:
            (m00, m01), (m10, m11) = cls.witness
            # the witness rows must multiply back to the quadratic part
            from .gfq import gf

            fld = gf(p, 1) if cls.witness_field_order == p else gf(p, 2)
            ok = (
                fld.mul(m00, m10) == 0
                and fld.add(fld.mul(m00, m11), fld.mul(m01, m10)) == 1
                and fld.mul(m01, m11) == 0
            )
            checks += 1
            if not ok:
                failures.append(f"p={p}: witness does not multiply back")
    ring5 = PolyRing(5, ("x", "y"))
    cls = hessian_normal_form_check(ring5.parse("x^3 + y^3"), (0, 0))
    checks += 1
    if cls.nondegenerate or cls.rank != 0:
        failures.append("x^3+y^3 at p=5 not degenerate of rank 0")
    return checks, failures


def suite_ramification():
    """Frobenius on the line: -2p + 2 = (p - 1)(-2), plus the cover cases."""
    failures = []
    checks = 0
    for p in (2, 3, 5, 7, 11):
        case = verify_ramification("projective_line_frobenius", p)
        checks += 1
        if not (case.equal and case.lhs == -2 * p + 2):
            failures.append(f"p={p}: {case.lhs} vs {case.rhs}")
    for p in (2, 3, 5):
        case = verify_ramification("affine_cover", p)
        checks += 1
        if not (case.equal and case.lhs == 0):
            failures.append(f"affine p={p}")
        case = verify_ramification("fano_cover_square", p, l_squared=2, power=3)
        checks += 1
        if not case.equal:
            failures.append(f"fano p={p}")
    return checks, failures


def suite_jacobson_degree():
    """Inseparable degree p for the cover foliation; kernel dimension oracle."""
    failures = []
    checks = 0
    for p in (2, 3, 5):
        ring = PolyRing(p, ("x", "y", "z"))
        gen = Derivation.partial(ring, "z")
        deg = inseparable_degree(gen, 3 * p)
        checks += 1
        if deg != p:
            failures.append(f"p={p}: degree {deg}")
        basis = ring_of_constants(gen, 3 * p)
        bound = 3 * p
        expected = sum(
            1
            for a in range(bound + 1)
            for b in range(bound + 1)
            for c in range(bound + 1)
            if a + b + p * c <= bound
        )
        checks += 1
        if basis.kernel_dimension != expected:
            failures.append(
                f"p={p}: dim {basis.kernel_dimension} != oracle {expected}"
            )
    return checks, failures


def _oracle_rank2_has_rational_null(a, b, c, height):
    """Brute-force search for an integer null vector of a x^2 + 2b xy + c y^2."""
    if a == 0 or c == 0:
        return True  # (1,0) or (0,1) is null
    disc = b * b - a * c
    ys = np.arange(1, height + 1, dtype=np.int64)
    vals = disc * ys * ys
    roots = np.sqrt(vals.astype(np.float64)).round().astype(np.int64)
    mask = roots * roots == vals
    if not mask.any():
        return False
    for y, s in zip(ys[mask], roots[mask]):
        for sign in (s, -s):
            num = -b * int(y) + int(sign)
            if num % a == 0 and abs(num // a) <= height:
                return True
    return False


def suite_cone_arithmetic(height=10_000, bound=10):
    """Rank-2 verdicts vs the brute-force oracle; roundness; pushforward."""
    failures = []
    checks = 0
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            for c in range(-bound, bound + 1):
                form = [[2 * a, b], [b, 2 * c]]
                if signature_of(form) != (1, 1, 0):
                    continue
                report = boundary_rays_rank2(form)
                found = _oracle_rank2_has_rational_null(2 * a, b, 2 * c, height)
                checks += 1
                if (report.rational_rays is not None) != found:
                    failures.append(f"form {form}: verdict vs oracle")
    lattice = Lattice([[1, 0, 0], [0, -1, 0], [0, 0, -1]])
    report = polyhedrality_check(lattice)
    checks += 1
    if report.polyhedral or len(report.witnesses) < 25:
        failures.append("diag(1,-1,-1) roundness certificate")
    if not all(lattice.q(w) == 0 for w in report.witnesses):
        failures.append("witness fails q = 0")
    for p, l, v in ((2, 1, (3, 4)), (3, 2, (1, 0, 1)), (5, 0, (2, 7))):
        out = pushforward_inseparable(v, p, l)
        checks += 1
        if out != tuple(p**l * x for x in v):
            failures.append(f"pushforward {v}")
    return checks, failures


def suite_kf_series():
    """K_F^2 = 2 p m^2 grows strictly in m: no bound on Fano foliations."""
    failures = []
    checks = 0
    for p in (2, 3):
        values = [kf_square(2, p, m) for m in range(1, 11)]
        checks += 1
        if values != [2 * p * m * m for m in range(1, 11)]:
            failures.append(f"p={p}: values {values}")
        if any(x >= y for x, y in zip(values, values[1:])):
            failures.append(f"p={p}: not strictly increasing")
    return checks, failures


# ---------------------------------------------------------------------------
# property suites (>= `cases` random instances per characteristic)


def _prop_leibniz(rng, p, ring):
    d = random_derivation(rng, ring)
    a = random_poly(rng, ring)
    b = random_poly(rng, ring)
    return d.apply_poly(a * b) == a * d.apply_poly(b) + b * d.apply_poly(a)


def _prop_antisymmetry(rng, p, ring):
    d1 = random_derivation(rng, ring)
    d2 = random_derivation(rng, ring)
    br = d1.lie_bracket(d2)
    anti = d2.lie_bracket(d1)
    self_bracket = d1.lie_bracket(d1)
    return br == -anti and self_bracket.is_zero()


def _prop_jacobi(rng, p, ring):
    d1 = random_derivation(rng, ring, max_degree=2, max_terms=2)
    d2 = random_derivation(rng, ring, max_degree=2, max_terms=2)
    d3 = random_derivation(rng, ring, max_degree=2, max_terms=2)
    total = (
        d1.lie_bracket(d2).lie_bracket(d3)
        + d2.lie_bracket(d3).lie_bracket(d1)
        + d3.lie_bracket(d1).lie_bracket(d2)
    )
    return total.is_zero()


def _pp_degree(p):
    return 2 if p <= 3 else 1


def _prop_p_power_leibniz(rng, p, ring):
    d = random_derivation(rng, ring, max_degree=_pp_degree(p))
    e = d.p_power()
    a = random_poly(rng, ring)
    b = random_poly(rng, ring)
    return e.apply_poly(a * b) == a * e.apply_poly(b) + b * e.apply_poly(a)


def _prop_pclosed_scaling(rng, p, ring):
    d = random_derivation(rng, ring, max_degree=_pp_degree(p), nonzero=True)
    f = random_poly(rng, ring, max_degree=_pp_degree(p), nonzero=True)
    return is_p_closed(d.scale(f)).closed == is_p_closed(d).closed


def _minors_vanish(a, b):
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            if not (a[i] * b[j] - a[j] * b[i]).is_zero():
                return False
    return True


def _prop_jacobson_correction(rng, p, ring):
    d = random_derivation(rng, ring, max_degree=_pp_degree(p), nonzero=True)
    f = random_poly(rng, ring, max_degree=_pp_degree(p), nonzero=True)
    lhs = d.scale(f).p_power()
    rhs = d.p_power().scale(f**p)
    delta = lhs - rhs
    return _minors_vanish(delta.coeffs, d.coeffs)


def _random_chart(rng, p, target=("x", "y"), source=("s", "t")):
    b = rng.randint(1, p + 1)
    return weighted_blowup_chart((1, b), p, source=source, target=target)


def _prop_pullback_functorial(rng, p, ring):
    outer = _random_chart(rng, p)
    inner = _random_chart(rng, p, target=outer.source_vars, source=("u", "v"))
    composed = outer.compose(inner)
    # 1-form
    w = OneForm(ring, tuple(random_poly(rng, ring) for _ in ring.variables))
    two_step, _ = pullback_form(inner, pullback_form(outer, w)[0])
    one_step, _ = pullback_form(composed, w)
    if two_step != one_step:
        return False
    # 2-form
    vol = TwoForm(ring, random_poly(rng, ring))
    two_step2, _ = pullback_form(inner, pullback_form(outer, vol)[0])
    one_step2, _ = pullback_form(composed, vol)
    if two_step2 != one_step2:
        return False
    # derivation
    d = random_derivation(rng, ring, max_degree=1, nonzero=True)
    seq = pullback_derivation(inner, pullback_derivation(outer, d))
    direct = pullback_derivation(composed, d)
    return seq == direct


def _prop_pairing_preserved(rng, p, ring):
    from .algebra import RationalFn

    m = _random_chart(rng, p)
    w = OneForm(ring, tuple(random_poly(rng, ring) for _ in ring.variables))
    d = random_derivation(rng, ring, max_degree=1, nonzero=True)
    pulled_w, _ = pullback_form(m, w)
    pulled_d = pullback_derivation(m, d)
    lhs = RationalFn(m.source_ring.zero())
    for c, wf in zip(pulled_d.coeffs, pulled_w.coeffs):
        lhs = lhs + c * wf
    pairing = ring.zero()
    for c, wf in zip(d.coeffs, w.coeffs):
        pairing = pairing + c.as_poly() * wf
    return lhs == m.pull_poly(pairing)


PROPERTY_SUITES = {
    "property_leibniz": _prop_leibniz,
    "property_bracket_antisymmetry": _prop_antisymmetry,
    "property_jacobi": _prop_jacobi,
    "property_p_power_is_derivation": _prop_p_power_leibniz,
    "property_pclosed_scaling_invariance": _prop_pclosed_scaling,
    "property_jacobson_correction": _prop_jacobson_correction,
    "property_pullback_functoriality": _prop_pullback_functorial,
    "property_pairing_preservation": _prop_pairing_preserved,
}

_PROPERTY_STATEMENTS = {
    "property_leibniz": "D(ab) = a D(b) + b D(a) on random samples",
    "property_bracket_antisymmetry": "[D1,D2] = -[D2,D1] and [D,D] = 0",
    "property_jacobi": "[[D1,D2],D3] + cyclic = 0",
    "property_p_power_is_derivation": "D^[p] satisfies the Leibniz rule",
    "property_pclosed_scaling_invariance": "p-closedness of fD matches D",
    "property_jacobson_correction": "(fD)^[p] - f^p D^[p] is proportional to D",
    "property_pullback_functoriality": "pullback along a composite = composition",
    "property_pairing_preservation": "pairing of pulled form and field = pulled pairing",
}


def _run_property(name, prop, cases, seed):
    failures = []
    checks = 0
    for p in _CHARACTERISTICS:
        ring = _ring(p)
        rng = random.Random(f"{seed}:{name}:{p}")
        for i in range(cases):
            checks += 1
            if not prop(rng, p, ring):
                failures.append(f"p={p}, case {i}")
                if len(failures) > 5:
                    return checks, failures
    return checks, failures


# ---------------------------------------------------------------------------
# registry and runner


_WORKED = {
    "cover_pclosed": (
        suite_cover_pclosed,
        "random cover sections induce p-closed, invariant foliations",
    ),
    "blowup_ledger": (
        suite_blowup_ledger,
        "(1,p) blow-up: canonical discrepancy p, foliated discrepancy 0",
    ),
    "ordinary_blowup": (
        suite_ordinary_blowup,
        "ordinary blow-up of the coordinate foliation: a(E, F) = 1",
    ),
    "cover_singularities": (
        suite_cover_singularities,
        "singular locus of w^p = f lies exactly over the critical points",
    ),
    "hessian_normal_form": (
        suite_hessian_normal_form,
        "nondegenerate surface critical points split as x1 x2",
    ),
    "ramification": (
        suite_ramification,
        "pi*K_quotient - K_X = (p-1) K_F on the case library",
    ),
    "jacobson_degree": (
        suite_jacobson_degree,
        "constants have index p; kernel dimension matches the counting oracle",
    ),
    "cone_arithmetic": (
        suite_cone_arithmetic,
        "rank-2 ray rationality matches the null-vector oracle; round cones certified",
    ),
    "kf_series": (
        suite_kf_series,
        "K_F^2 = 2 p m^2 is strictly increasing: Fano foliations unbounded",
    ),
}


def suite_names():
    return list(_WORKED) + list(PROPERTY_SUITES)


def run_suites(names=None, *, seed=0, property_cases=500, jobs=1):
    """Run the requested suites (all by default); returns certificates."""
    chosen = names or suite_names()
    out = []
    for name in chosen:
        start = time.perf_counter()
        if name in _WORKED:
            fn, statement = _WORKED[name]
            kwargs = {}
            if name in ("cover_pclosed", "cover_singularities"):
                kwargs["seed"] = seed + 1
            if name == "cover_singularities":
                kwargs["jobs"] = jobs
            checks, failures = fn(**kwargs)
        elif name in PROPERTY_SUITES:
            statement = _PROPERTY_STATEMENTS[name]
            checks, failures = _run_property(
                name, PROPERTY_SUITES[name], property_cases, seed
            )
        else:
            raise ValueError(f"unknown suite {name!r}; available: {suite_names()}")
        elapsed = time.perf_counter() - start
        out.append(
            Certificate(
                name=name,
                passed=not failures,
                statement=statement,
                checks=checks,
                seconds=elapsed,
                failures=failures,
            )
        )
    return out
