import random

import pytest

from pfoliation.algebra import PolyRing
from pfoliation.cover import (
    CoverDatum,
    EnumerationBudgetError,
    build_cover,
    critical_points,
    eval_at_point,
    hessian_normal_form_check,
    induced_foliation,
    nondegenerate_section_fraction,
    singular_points_of_cover,
)
from pfoliation.derivation import is_invariant, is_p_closed
from pfoliation.gfq import gf
from pfoliation.suites import random_poly


def datum(p, d, text, vars=("x", "y")):
    ring = PolyRing(p, vars)
    return CoverDatum(p, d, ring.parse(text))


class TestBuildCover:
    def test_quadric_cone(self):
        c = datum(2, 2, "x*y")
        ring = build_cover(c)
        assert ring.ambient.variables == ("x", "y", "z")
        assert ring.relation == ring.ambient.parse("z^2 + x*y")  # -1 = 1 mod 2

    def test_smooth_cover(self):
        c = datum(5, 3, "x")
        ring = build_cover(c)
        assert ring.degree == 3
        assert not c.p_divides_degree

    def test_identity_cover(self):
        c = datum(3, 1, "x + y")
        ring = build_cover(c)
        assert ring.reduce(ring.ambient.var(c.cover_var)) == ring.section

    def test_cover_variable_avoids_collision(self):
        c = datum(3, 3, "x*y")
        assert c.cover_var == "z"
        c2 = CoverDatum(3, 3, PolyRing(3, ("a", "b")).parse("a*b"))
        assert c2.cover_var == "y"

    def test_zero_section_rejected(self):
        with pytest.raises(ValueError):
            datum(3, 3, "0")

    def test_explicit_cover_variable_collision_rejected(self):
        ring = PolyRing(3, ("x", "y"))
        with pytest.raises(ValueError):
            CoverDatum(3, 3, ring.parse("x*y"), cover_var="y")


class TestInducedFoliation:
    def test_generator_is_cover_partial(self):
        for p in (2, 3, 5):
            c = datum(p, p, "x*y")
            chart = induced_foliation(c)
            assert chart.primitive is True
            assert str(chart.generator) == "d/dz"
            assert is_p_closed(chart.generator).closed
            hyp = chart.generator.hypersurface
            assert is_invariant(chart.generator.detach(), hyp.relation) is True

    def test_degree_two_p(self):
        c = datum(2, 4, "x^3 + y^3")
        chart = induced_foliation(c)
        assert is_p_closed(chart.generator).closed

    def test_rejects_coprime_degree(self):
        with pytest.raises(ValueError):
            induced_foliation(datum(5, 3, "x"))


class TestCriticalPoints:
    def test_node_over_f4(self):
        pts = critical_points(datum(2, 2, "x*y"), 4)
        assert [p.location for p in pts] == [(0, 0)]
        assert pts[0].hessian_rank == 2
        assert pts[0].nondegenerate

    def test_smooth_section_no_critical_points(self):
        for q in (2, 4, 8):
            assert critical_points(datum(2, 2, "x"), q) == []

    def test_cusp_degenerate(self):
        pts = critical_points(datum(5, 5, "x^3 + y^3"), 5)
        assert [p.location for p in pts] == [(0, 0)]
        assert pts[0].hessian_rank == 0
        assert not pts[0].nondegenerate

    def test_oracle_by_scalar_enumeration(self):
        # independent oracle: evaluate the partials point by point
        rng = random.Random(31)
        for p, q in ((2, 4), (3, 9), (5, 5)):
            ring = PolyRing(p, ("x", "y"))
            field = gf(p, {4: 2, 9: 2, 5: 1}[q])
            for _ in range(5):
                f = random_poly(rng, ring, max_degree=4, max_terms=4, nonzero=True)
                c = CoverDatum(p, p, f)
                partials = [f.partial(v) for v in ring.variables]
                slow = [
                    (a, b)
                    for a in range(q)
                    for b in range(q)
                    if all(eval_at_point(g, field, (a, b)) == 0 for g in partials)
                ]
                fast = [pt.location for pt in critical_points(c, q)]
                assert fast == slow

    def test_budget_guard(self):
        ring = PolyRing(2, tuple(f"x{i}" for i in range(30)))
        big = CoverDatum(2, 2, ring.parse("x0*x1"))
        with pytest.raises(EnumerationBudgetError):
            critical_points(big, 2)


class TestSingularPoints:
    def test_quadric_cone_origin(self):
        assert singular_points_of_cover(datum(2, 2, "x*y"), 2) == [(0, 0, 0)]

    def test_smooth_cover_empty(self):
        assert singular_points_of_cover(datum(2, 2, "x"), 4) == []

    def test_line_of_singularities(self):
        # f = x^2 y at p = 3: critical set is {x = 0}, all with w = 0
        sing = singular_points_of_cover(datum(3, 3, "x^2*y"), 3)
        crit = critical_points(datum(3, 3, "x^2*y"), 3)
        assert sorted(s[:-1] for s in sing) == sorted(c.location for c in crit)
        assert all(s[-1] == 0 for s in sing)

    def test_correspondence_random(self):
        rng = random.Random(32)
        for p, q in ((2, 4), (2, 8), (3, 9), (5, 25), (7, 49)):
            ring = PolyRing(p, ("x", "y"))
            for _ in range(4):
                f = random_poly(rng, ring, max_degree=4, max_terms=4, nonzero=True)
                c = CoverDatum(p, p, f)
                sing = singular_points_of_cover(c, q)
                crit = critical_points(c, q)
                assert sorted(s[:-1] for s in sing) == sorted(
                    pt.location for pt in crit
                )

    def test_jobs_partition_deterministic(self):
        c = datum(3, 3, "x^2*y + y^2")
        assert singular_points_of_cover(c, 9, jobs=3) == singular_points_of_cover(
            c, 9, jobs=1
        )

    def test_points_listed_in_lex_order(self):
        sing = singular_points_of_cover(datum(3, 3, "x^2*y"), 9)
        assert sing == sorted(sing)
        crit = critical_points(datum(3, 3, "x^2*y"), 9)
        assert [c.location for c in crit] == sorted(c.location for c in crit)


class TestHessianNormalForm:
    def test_node_identity_witness(self):
        for p in (3, 5, 7):
            ring = PolyRing(p, ("x", "y"))
            cls = hessian_normal_form_check(ring.parse("x*y"), (0, 0))
            assert cls.nondegenerate
            assert cls.witness == ((1, 0), (0, 1))
            assert cls.witness_field_order == p

    def test_sum_of_squares_at_5(self):
        ring = PolyRing(5, ("x", "y"))
        cls = hessian_normal_form_check(ring.parse("x^2 + y^2"), (0, 0))
        assert cls.nondegenerate and cls.witness_field_order == 5
        (a, b), (c, d) = cls.witness
        # expand (a u + b v)(c u + d v) = u^2 + v^2 over F_5
        assert (a * c) % 5 == 1
        assert (a * d + b * c) % 5 == 0
        assert (b * d) % 5 == 1

    def test_sum_of_squares_at_7_needs_extension(self):
        ring = PolyRing(7, ("x", "y"))
        cls = hessian_normal_form_check(ring.parse("x^2 + y^2"), (0, 0))
        assert cls.nondegenerate
        assert cls.witness_field_order == 49
        assert "quadratic extension" in cls.note

    def test_degenerate_cubic(self):
        ring = PolyRing(5, ("x", "y"))
        cls = hessian_normal_form_check(ring.parse("x^2*y"), (0, 0))
        assert not cls.nondegenerate

    def test_characteristic_two_rejected(self):
        ring = PolyRing(2, ("x", "y"))
        with pytest.raises(ValueError):
            hessian_normal_form_check(ring.parse("x*y"), (0, 0))

    def test_non_critical_point_rejected(self):
        ring = PolyRing(5, ("x", "y"))
        with pytest.raises(ValueError):
            hessian_normal_form_check(ring.parse("x*y"), (1, 1))

    def test_rank_invariant_under_coordinate_changes(self):
        rng = random.Random(33)
        for p in (3, 5, 7):
            ring = PolyRing(p, ("x", "y"))
            x, y = ring.gens()
            for _ in range(40):
                # monomials of degree >= 2 only, so the origin is critical
                raw = random_poly(rng, ring, max_degree=4, max_terms=4, nonzero=True)
                terms = {e: c for e, c in raw.terms.items() if sum(e) >= 2}
                if not terms:
                    continue
                f = ring.parse("0") + type(raw)(ring, terms)
                # random invertible linear substitution fixing the origin
                while True:
                    a, b, c, d = (rng.randrange(p) for _ in range(4))
                    if (a * d - b * c) % p != 0:
                        break
                g = f.substitute({"x": a * x + b * y, "y": c * x + d * y})
                cls_f = hessian_normal_form_check(f, (0, 0))
                cls_g = hessian_normal_form_check(g, (0, 0))
                assert cls_f.rank == cls_g.rank


class TestGenericity:
    def test_fraction_in_unit_interval(self):
        frac = nondegenerate_section_fraction(3, 3, samples=20, seed=4)
        assert 0.0 <= frac <= 1.0
