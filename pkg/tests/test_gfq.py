import numpy as np
import pytest

from pfoliation.gfq import as_prime_power, gf


class TestPrimePowerDecomposition:
    def test_recognises_powers(self):
        assert as_prime_power(4, 2) == 2
        assert as_prime_power(8, 2) == 3
        assert as_prime_power(9, 3) == 2
        assert as_prime_power(49, 7) == 2
        assert as_prime_power(5, 5) == 1

    def test_rejects_mismatches(self):
        for q, p in ((6, 2), (12, 3), (1, 5), (10, 5)):
            with pytest.raises(ValueError):
                as_prime_power(q, p)


@pytest.mark.parametrize("p,k", [(2, 1), (2, 2), (2, 3), (3, 2), (5, 2), (7, 2)])
class TestFieldAxioms:
    def test_field_laws_exhaustive(self, p, k):
        f = gf(p, k)
        q = f.q
        elements = range(q)
        for a in elements:
            assert f.add(a, 0) == a
            assert f.mul(a, 1) == a
            assert f.add(a, f.neg(a)) == 0
            if a:
                assert f.mul(a, f.inv(a)) == 1
        # associativity and distributivity on a grid of triples
        probe = list(elements)[: min(q, 8)]
        for a in probe:
            for b in probe:
                assert f.add(a, b) == f.add(b, a)
                assert f.mul(a, b) == f.mul(b, a)
                for c in probe:
                    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))

    def test_frobenius_fixes_prime_field(self, p, k):
        f = gf(p, k)
        for a in range(p):
            assert f.pow(a, p) == a % p

    def test_multiplicative_order_divides(self, p, k):
        f = gf(p, k)
        for a in range(1, f.q):
            assert f.pow(a, f.q - 1) == 1


class TestVectorised:
    def test_array_ops_match_scalar(self):
        f = gf(3, 2)
        rng = np.random.default_rng(5)
        a = rng.integers(0, f.q, size=200)
        b = rng.integers(0, f.q, size=200)
        add = f.add_arrays(a, b)
        mul = f.mul_arrays(a, b)
        for i in range(200):
            assert add[i] == f.add(int(a[i]), int(b[i]))
            assert mul[i] == f.mul(int(a[i]), int(b[i]))

    def test_pow_arrays(self):
        f = gf(5, 1)
        a = np.arange(5)
        assert list(f.pow_arrays(a, 4)) == [f.pow(int(x), 4) for x in a]


class TestSqrt:
    def test_square_roots_verify(self):
        for p, k in ((3, 1), (5, 1), (7, 2)):
            f = gf(p, k)
            for a in range(f.q):
                s = f.sqrt(a)
                if s is not None:
                    assert f.mul(s, s) == a

    def test_half_the_units_are_squares(self):
        f = gf(7, 1)
        squares = {f.mul(a, a) for a in range(1, 7)}
        assert len(squares) == 3
