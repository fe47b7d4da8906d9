"""Unit tests for polynomials over F_q"""

import random

import pytest

from ffdensity.algebra.gf import FieldSpec
from ffdensity.algebra.polyring import (
    Poly,
    count_monic_irreducibles,
    distinct_degree_factors,
    enumerate_monic,
    factor_degrees,
    format_poly,
    format_poly_list,
    gcd,
    is_irreducible,
    monic_irreducibles,
    parse_poly,
    poly_from_index,
)
from ffdensity.exceptions import DomainError, UsageError


@pytest.fixture
def f2():
    return FieldSpec.from_q(2)


@pytest.fixture
def f3():
    return FieldSpec.from_q(3)


class TestArithmetic:
    """Tests for ring operations"""

    def test_frobenius_square(self, f2):
        """Test (x+1)^2 = x^2+1 over F_2"""
        x1 = parse_poly(f2, "x+1")
        assert x1 * x1 == parse_poly(f2, "x^2+1")

    def test_divmod(self, f2):
        """Test x^3+x = x * x^2 + x"""
        quot, rem = divmod(parse_poly(f2, "x^3+x"), parse_poly(f2, "x^2"))
        assert quot == Poly.x(f2)
        assert rem == Poly.x(f2)

    def test_division_by_zero(self, f2):
        """Test dividing by the zero polynomial"""
        with pytest.raises(DomainError):
            divmod(Poly.x(f2), Poly.zero(f2))

    def test_eval(self, f2):
        """Test x^2+x+1 at 1 over F_2"""
        assert parse_poly(f2, "x^2+x+1").eval_code(1) == 1

    def test_zero_degree_marker(self, f2):
        """Test the zero polynomial has the distinguished degree"""
        assert Poly.zero(f2).degree < 0
        assert Poly.zero(f2).is_zero()


class TestGcd:
    """Tests for gcd"""

    def test_common_factor(self, f2):
        """Test gcd(x^2+1, x+1) = x+1 over F_2"""
        assert gcd(parse_poly(f2, "x^2+1"), parse_poly(f2, "x+1")) == parse_poly(f2, "x+1")

    def test_coprime(self, f2):
        """Test gcd(x, x+1) = 1"""
        assert gcd(Poly.x(f2), parse_poly(f2, "x+1")).is_one()

    def test_with_zero(self, f3):
        """Test gcd(f, 0) = monic(f)"""
        f = parse_poly(f3, "2*x+1")
        assert gcd(f, Poly.zero(f3)) == f.monic()

    def test_both_zero(self, f2):
        """Test gcd(0, 0) is a domain error"""
        with pytest.raises(DomainError):
            gcd(Poly.zero(f2), Poly.zero(f2))

    def test_multiplicative_property(self, f3):
        """Test gcd(f h, g h) = monic(h) gcd(f, g) on random inputs"""
        rng = random.Random(7)
        for _ in range(100):
            f, g, h = (poly_from_index(f3, rng.randrange(1, 3 ** 5)) for _ in range(3))
            assert gcd(f * h, g * h) == h.monic() * gcd(f, g)


class TestIrreducibility:
    """Tests for the Rabin test and irreducible enumeration"""

    def test_examples(self, f2, f3):
        """Test a few known cases"""
        assert is_irreducible(parse_poly(f2, "x^2+x+1"))
        assert not is_irreducible(parse_poly(f2, "x^2+1"))
        assert is_irreducible(Poly.x(f3))

    def test_constant_rejected(self, f2):
        """Test constants have no irreducibility"""
        with pytest.raises(DomainError):
            is_irreducible(Poly.one(f2))

    def test_monic_irreducibles_small(self, f2):
        """Test the lists for q=2, d=1,2,3"""
        assert monic_irreducibles(f2, 1) == [Poly.x(f2), parse_poly(f2, "x+1")]
        assert monic_irreducibles(f2, 2) == [parse_poly(f2, "x^2+x+1")]
        assert len(monic_irreducibles(f2, 3)) == 2

    def test_degree_below_one(self, f2):
        """Test d < 1 is rejected"""
        with pytest.raises(DomainError):
            monic_irreducibles(f2, 0)

    @pytest.mark.parametrize("q", [2, 3])
    def test_counts_match_enumeration(self, q):
        """Test the necklace count against enumeration for d <= 5"""
        field = FieldSpec.from_q(q)
        for d in range(1, 6):
            assert count_monic_irreducibles(q, d) == len(monic_irreducibles(field, d))

    def test_count_values(self):
        """Test a few necklace counts"""
        assert count_monic_irreducibles(2, 1) == 2
        assert count_monic_irreducibles(2, 3) == 2
        assert count_monic_irreducibles(3, 2) == 3

    def test_brute_force_classification(self, f2):
        """Test irreducible count against trial division for q=2, d <= 6"""
        for d in range(1, 7):
            smaller = [p for e in range(1, d // 2 + 1) for p in monic_irreducibles(f2, e)]
            irreducible = sum(
                1 for f in enumerate_monic(f2, d)
                if not any((f % p).is_zero() for p in smaller)
            )
            assert irreducible == count_monic_irreducibles(2, d)
            assert sum(1 for _ in enumerate_monic(f2, d)) == 2 ** d


class TestDistinctDegree:
    """Tests for distinct-degree factorization"""

    def test_mixed_degrees(self, f2):
        """Test x(x+1)^2(x^2+x+1)(x^3+x+1)"""
        f = parse_poly(f2, "x") * parse_poly(f2, "x+1") ** 2 * parse_poly(f2, "x^2+x+1") * parse_poly(f2, "x^3+x+1")
        assert factor_degrees(f) == {1: 2, 2: 1, 3: 1}

    def test_irreducible_input(self, f3):
        """Test an irreducible cubic reports itself"""
        f = monic_irreducibles(f3, 3)[0]
        assert distinct_degree_factors(f) == {3: f}

    def test_zero_rejected(self, f2):
        """Test the zero polynomial cannot be factored"""
        with pytest.raises(DomainError):
            distinct_degree_factors(Poly.zero(f2))


class TestText:
    """Tests for the polynomial text formats"""

    def test_formats(self, f2):
        """Test human and list forms"""
        f = parse_poly(f2, "x^3+x+1")
        assert format_poly(f) == "x^3+x+1"
        assert format_poly_list(f) == "[1,1,0,1]"

    def test_list_form_parse(self, f2):
        """Test the list form is least-significant first"""
        assert parse_poly(f2, "[1,1,0,1]") == parse_poly(f2, "x^3+x+1")

    def test_extension_coefficients(self):
        """Test coefficients in F_4 round-trip"""
        f4 = FieldSpec.from_q(4)
        f = parse_poly(f4, "(t+1)*x^2+t")
        assert parse_poly(f4, format_poly(f)) == f

    def test_malformed(self, f2):
        """Test malformed text"""
        with pytest.raises(UsageError):
            parse_poly(f2, "x^^2")
