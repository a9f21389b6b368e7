import random

import pytest

from pfoliation.algebra import PolyRing
from pfoliation.derivation import Derivation
from pfoliation.quotient import (
    RAMIFICATION_CASES,
    inseparable_degree,
    ring_of_constants,
    verify_ramification,
)
from pfoliation.suites import random_poly


def count_constant_monomials(p, bound, nvars=3):
    """Monomials in x, y, z^p of total degree <= bound (counting oracle)."""
    assert nvars == 3
    return sum(
        1
        for a in range(bound + 1)
        for b in range(bound + 1)
        for c in range(bound + 1)
        if a + b + p * c <= bound
    )


class TestRingOfConstants:
    def test_cover_direction_constants(self):
        for p in (2, 3, 5):
            R = PolyRing(p, ("x", "y", "z"))
            D = Derivation.partial(R, "z")
            basis = ring_of_constants(D, 2 * p)
            assert sorted(str(g) for g in basis.generators) == ["x", "y", f"z^{p}"]
            assert basis.kernel_dimension == count_constant_monomials(p, 2 * p)

    def test_univariate_frobenius_kernel(self):
        for p in (2, 3, 5):
            R = PolyRing(p, ("x",))
            D = Derivation.partial(R, "x")
            basis = ring_of_constants(D, p)
            assert [str(g) for g in basis.generators] == [f"x^{p}"]

    def test_euler_weight_zero_monomials(self):
        R = PolyRing(2, ("x", "y"))
        D = Derivation.parse(R, "x*d/dx + y*d/dy")
        basis = ring_of_constants(D, 4)
        x, y = R.gens()
        for g in (x**2, x * y, y**2):
            assert basis.contains_in_kernel(g)
            assert basis.contains(g)

    def test_bound_too_small_rejected(self):
        R = PolyRing(5, ("x",))
        with pytest.raises(ValueError):
            ring_of_constants(Derivation.partial(R, "x"), 4)

    def test_every_generator_is_constant(self):
        rng = random.Random(51)
        for p in (2, 3):
            R = PolyRing(p, ("x", "y"))
            for _ in range(20):
                coeffs = [random_poly(rng, R, max_degree=1) for _ in range(2)]
                D = Derivation(R, coeffs)
                if D.is_zero():
                    continue
                basis = ring_of_constants(D, 2 * p)
                for g in basis.generators:
                    assert D.apply_poly(g).is_zero()

    def test_frobenius_powers_always_constant(self):
        rng = random.Random(52)
        for p in (2, 3):
            R = PolyRing(p, ("x", "y"))
            for _ in range(10):
                D = Derivation(
                    R, [random_poly(rng, R, max_degree=1) for _ in range(2)]
                )
                basis = ring_of_constants(D, 2 * p)
                for v in R.variables:
                    assert basis.contains_in_kernel(R.var(v) ** p)

    def test_constants_form_a_subring(self):
        # products of kernel basis elements stay in the kernel span
        for p in (2, 3):
            R = PolyRing(p, ("x", "y", "z"))
            D = Derivation.partial(R, "z")
            basis = ring_of_constants(D, 2 * p)
            small = [f for f in basis.kernel_basis if f.total_degree() <= p]
            for a in small:
                for b in small:
                    if a.total_degree() + b.total_degree() <= 2 * p:
                        assert basis.contains_in_kernel(a * b)


class TestInseparableDegree:
    def test_cover_foliation_degree(self):
        from pfoliation.cover import CoverDatum, induced_foliation

        for p in (2, 3, 5):
            base = PolyRing(p, ("x", "y"))
            chart = induced_foliation(CoverDatum(p, p, base.parse("x*y")))
            degree = inseparable_degree(chart.generator.detach(), 3 * p)
            assert degree == p

    def test_frobenius_direction(self):
        R = PolyRing(3, ("x",))
        assert inseparable_degree(Derivation.partial(R, "x"), 3) == 3

    def test_euler_direction(self):
        R = PolyRing(5, ("x",))
        assert inseparable_degree(Derivation.parse(R, "x*d/dx"), 5) == 5

    def test_non_p_closed_rejected(self):
        R = PolyRing(2, ("x", "y"))
        D = Derivation.parse(R, "d/dx + x*d/dy")
        with pytest.raises(ValueError):
            inseparable_degree(D, 4)

    def test_zero_rejected(self):
        R = PolyRing(3, ("x",))
        with pytest.raises(ValueError):
            inseparable_degree(Derivation.zero(R), 3)


class TestRamification:
    def test_projective_line_frobenius_exact(self):
        for p in (2, 3, 5, 7, 11):
            case = verify_ramification("projective_line_frobenius", p)
            assert case.lhs == -2 * p + 2
            assert case.rhs == (p - 1) * (-2)
            assert case.equal
            assert case.details["frobenius_differential_zero"] is True
            assert case.details["vector_field_zero_at_infinity"] == 2

    def test_affine_cover_trivial_classes(self):
        for p in (2, 3, 5):
            case = verify_ramification("affine_cover", p)
            assert case.lhs == 0 and case.rhs == 0 and case.equal
            assert case.details["relation_value_under_generator"] == "0"
            assert case.details["constants_generators"] == ["x", "y", f"z^{p}"]

    def test_fano_square_projection_formula(self):
        for p in (2, 3):
            for m in (1, 2, 5):
                case = verify_ramification(
                    "fano_cover_square", p, l_squared=2, power=m
                )
                assert case.equal and case.lhs == 2 * p * m * m

    def test_unknown_case_rejected(self):
        with pytest.raises(ValueError):
            verify_ramification("no_such_case", 3)

    def test_registry_names(self):
        assert set(RAMIFICATION_CASES) == {
            "projective_line_frobenius",
            "affine_cover",
            "fano_cover_square",
        }
