"""Unit tests for holomorphy rings and Riemann-Roch boxes"""

import random
from collections import Counter

import pytest

from ffdensity.algebra.gf import FieldSpec
from ffdensity.algebra.holomorphy import (
    DivisorOnT,
    HolomorphySpec,
    box_size,
    chain_divisor,
    divisors_up_to,
    ell,
    enumerate_box,
    format_divisor,
    format_spec,
    in_holomorphy_ring,
    in_riemann_roch_space,
    is_unit,
    parse_divisor,
    parse_spec,
    riemann_roch_basis,
    sample_box,
    sample_tuple,
)
from ffdensity.algebra.places import Place, parse_rational_function, places_of_degree
from ffdensity.exceptions import CapExceededError, UsageError


def rf(spec, text):
    return parse_rational_function(spec.field, text)


@pytest.fixture
def polys():
    """H = F_2[x]"""
    return parse_spec("q=2; excluded=inf")


@pytest.fixture
def laurent():
    """H = F_2[x, 1/x]"""
    return parse_spec("q=2; excluded=inf,(x)")


class TestSpecText:
    """Tests for parse_spec / format_spec"""

    def test_default_excluded(self):
        """Test excluded defaults to the infinite place"""
        spec = parse_spec("q=3")
        assert spec.infinity_excluded
        assert spec.finite_excluded == []

    def test_round_trip(self):
        """Test formatting re-parses to the same spec"""
        for text in ("q=2; excluded=inf", "q=2; excluded=inf,(x)", "q=3; excluded=(x^2+1)",
                     "q=4; excluded=inf,(x+t)"):
            spec = parse_spec(text)
            assert parse_spec(format_spec(spec)) == spec

    def test_canonical_text(self, laurent):
        """Test the excluded places print infinity first"""
        assert format_spec(parse_spec("q=2; excluded=(x), inf")) == "q=2; excluded=inf,(x)"

    @pytest.mark.parametrize("text", ["q=2; excluded=", "excluded=inf", "q=two", "q=2; colour=red",
                                      "q=2; excluded=(x^2+1)"])
    def test_malformed(self, text):
        """Test malformed specs are usage errors"""
        with pytest.raises(UsageError):
            parse_spec(text)


class TestDivisors:
    """Tests for DivisorOnT"""

    def test_text_round_trip(self, laurent):
        """Test parse/format of divisors"""
        D = parse_divisor(laurent, "2*(x) + 3*inf")
        assert format_divisor(D) == "3*inf + 2*(x)"
        assert parse_divisor(laurent, format_divisor(D)) == D
        assert format_divisor(DivisorOnT()) == "0"

    def test_support_outside_T(self, polys):
        """Test divisors must live on the excluded places"""
        with pytest.raises(UsageError):
            parse_divisor(polys, "1*(x)")

    def test_chain(self, laurent):
        """Test D_j = j * (inf + (x)) and nesting"""
        chain = [chain_divisor(laurent, j) for j in range(5)]
        assert [D.degree for D in chain] == [0, 2, 4, 6, 8]
        for a, b in zip(chain, chain[1:]):
            assert a <= b and not b <= a

    def test_negative_coefficient(self, polys):
        """Test negative coefficients are rejected"""
        with pytest.raises(UsageError):
            DivisorOnT(((polys.excluded[0], -1),))


class TestRiemannRoch:
    """Tests for bases and boxes of L(D)"""

    def test_polynomial_basis(self, polys):
        """Test L(3 inf) = span{1, x, x^2, x^3}"""
        basis = riemann_roch_basis(parse_divisor(polys, "3*inf"), polys)
        assert basis == [rf(polys, t) for t in ("1", "x", "x^2", "x^3")]

    def test_laurent_basis(self, laurent):
        """Test L((x) + inf) = span{1/x, 1, x}"""
        basis = riemann_roch_basis(parse_divisor(laurent, "1*(x) + 1*inf"), laurent)
        assert basis == [rf(laurent, t) for t in ("1/x", "1", "x")]

    def test_dimension(self):
        """Test l(D) = deg D + 1 and every box element lies in L(D)"""
        spec = parse_spec("q=2; excluded=inf,(x),(x^2+x+1)")
        for D in divisors_up_to(spec, 1):
            elements = list(enumerate_box(D, spec))
            assert len(elements) == box_size(D, spec) == 2 ** (D.degree + 1)
            assert len(set(elements)) == len(elements)
            assert all(in_riemann_roch_space(u, D) for u in elements)

    def test_random_divisor_dimension(self):
        """Test ell against the basis on random divisors over random excluded sets"""
        rng = random.Random(2)
        without_infinity = 0
        for _ in range(120):
            field = FieldSpec.from_q(rng.choice((2, 3)))
            candidates = [Place.infinity(field), *places_of_degree(field, 1), *places_of_degree(field, 2)]
            spec = HolomorphySpec(field, tuple(rng.sample(candidates, rng.randint(1, 3))))
            without_infinity += not spec.infinity_excluded
            D = DivisorOnT(tuple((P, rng.randrange(4)) for P in spec.excluded))
            basis = riemann_roch_basis(D, spec)
            assert len(basis) == len(set(basis)) == ell(D) == D.degree + 1
            assert all(in_riemann_roch_space(u, D) for u in basis)
        assert without_infinity > 0

    def test_boxes_nest(self, laurent):
        """Test L(D_j) is contained in L(D_{j+1})"""
        small = set(enumerate_box(chain_divisor(laurent, 1), laurent))
        large = set(enumerate_box(chain_divisor(laurent, 2), laurent))
        assert small < large

    def test_box_cap(self, polys):
        """Test enumeration refuses boxes above the cap"""
        with pytest.raises(CapExceededError):
            enumerate_box(chain_divisor(polys, 10), polys, cap=1000)


class TestSampling:
    """Tests for sample_box"""

    def test_deterministic(self, laurent):
        """Test samples are a pure function of (seed, stream, index)"""
        D = chain_divisor(laurent, 2)
        first = [sample_box(D, laurent, 7, i, stream=1) for i in range(50)]
        again = [sample_box(D, laurent, 7, i, stream=1) for i in range(50)]
        other = [sample_box(D, laurent, 7, i, stream=2) for i in range(50)]
        assert first == again
        assert first != other

    def test_tuple_shares_one_generator(self, laurent):
        """Test a sampled tuple is a pure function of (seed, stream, index) and starts with sample_box"""
        D = chain_divisor(laurent, 2)
        for i in range(30):
            values = sample_tuple(D, laurent, 7, i, 4, stream=3)
            assert values == sample_tuple(D, laurent, 7, i, 4, stream=3)
            assert len(values) == 4
            assert values[0] == sample_box(D, laurent, 7, i, stream=3)
            assert all(in_riemann_roch_space(u, D) for u in values)

    def test_tuple_coordinates_independent(self, polys):
        """Test the 16 pairs over L(1 inf) x L(1 inf) appear about equally often"""
        D = chain_divisor(polys, 1)
        counts = Counter(tuple(sample_tuple(D, polys, 20160901, i, 2)) for i in range(8000))
        assert len(counts) == 16
        for value in counts.values():
            assert abs(value / 8000 - 1 / 16) < 0.02

    def test_samples_in_box(self, laurent):
        """Test every sample lies in L(D)"""
        D = chain_divisor(laurent, 3)
        assert all(in_riemann_roch_space(sample_box(D, laurent, 1, i), D) for i in range(200))

    def test_uniform(self, polys):
        """Test the four elements of L(1 inf) over F_2 appear about equally often"""
        D = chain_divisor(polys, 1)
        counts = Counter(sample_box(D, polys, 20160901, i) for i in range(8000))
        assert len(counts) == 4
        for value in counts.values():
            assert abs(value / 8000 - 0.25) < 0.03


class TestMembership:
    """Tests for in_holomorphy_ring and is_unit"""

    def test_polynomial_ring(self, polys):
        """Test membership in F_2[x]"""
        assert in_holomorphy_ring(rf(polys, "x^3+1"), polys)
        assert not in_holomorphy_ring(rf(polys, "1/x"), polys)

    def test_laurent_ring(self, laurent):
        """Test membership in F_2[x, 1/x]"""
        assert in_holomorphy_ring(rf(laurent, "(x+1)/x^3"), laurent)
        assert not in_holomorphy_ring(rf(laurent, "1/(x+1)"), laurent)

    def test_finite_complement(self):
        """Test T = {(x)}: infinity is in S so degrees are bounded"""
        spec = parse_spec("q=2; excluded=(x)")
        assert in_holomorphy_ring(rf(spec, "(x+1)/x"), spec)
        assert not in_holomorphy_ring(rf(spec, "x"), spec)

    def test_units(self, laurent):
        """Test the units of F_2[x, 1/x] are the powers of x"""
        assert is_unit(rf(laurent, "x^3"), laurent)
        assert is_unit(rf(laurent, "1/x"), laurent)
        assert not is_unit(rf(laurent, "x+1"), laurent)
        assert not is_unit(rf(laurent, "0"), laurent)

    def test_units_with_infinity_in_S(self):
        """Test (x+1)/x is a unit when only (x) and (x+1) are excluded"""
        spec = parse_spec("q=2; excluded=(x),(x+1)")
        assert is_unit(rf(spec, "(x+1)/x"), spec)
        assert not is_unit(rf(spec, "x"), spec)
