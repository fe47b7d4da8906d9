"""Integration tests: closed forms against exhaustive and sampled harness runs"""

import math
from fractions import Fraction

import pytest

from ffdensity.algebra.gf import FieldSpec
from ffdensity.algebra.holomorphy import chain_divisor, parse_spec
from ffdensity.algebra.places import Place, places_of_degree
from ffdensity.algebra.polyring import enumerate_polys, gcd, monic_irreducibles
from ffdensity.config.settings import Settings
from ffdensity.constants import MODE_EXHAUSTIVE, MODE_SAMPLE, PREDICATE_RAMIFIED, PREDICATE_UNIMODULAR
from ffdensity.densities.eisenstein import local_measure_U, local_measure_U_bruteforce, ramified_density_truncated
from ffdensity.densities.unimodular import (
    local_nonunimodular_bruteforce,
    local_nonunimodular_measure,
    unimodular_density_exact,
)
from ffdensity.densities.zeta import zeta_F, zeta_H, zeta_H_euler_truncated_approx
from ffdensity.models.experiment import DensityExperiment, PredicateSpec
from ffdensity.services.density_service import DensityService


@pytest.fixture
def polys():
    return parse_spec("q=2; excluded=inf")


def first_place(q, d):
    field = FieldSpec.from_q(q)
    return places_of_degree(field, d, [Place.infinity(field)])[0]


def coprime_pairs(field, max_degree):
    """Independent oracle: pairs of polynomials of degree <= max_degree with gcd 1"""
    elements = list(enumerate_polys(field, max_degree))
    hits = 0
    for a in elements:
        for b in elements:
            if (a.is_zero() and b.is_zero()) or gcd(a, b).degree > 0:
                continue
            hits += 1
    return hits


class TestLocalMeasures:
    """Closed-form local measures against exhaustive censuses"""

    @pytest.mark.parametrize("q,d,n", [(2, 1, 2), (2, 1, 3), (2, 1, 4), (3, 1, 2), (3, 1, 3), (2, 2, 2), (2, 2, 3)])
    def test_ramified(self, q, d, n):
        """Test mu_P(U_P) equals the census over (O_P/P^2)^(n+1)"""
        P = first_place(q, d)
        assert local_measure_U(P, n).value == local_measure_U_bruteforce(P, n).value

    @pytest.mark.parametrize("q", [2, 3])
    @pytest.mark.parametrize("d", [1, 2])
    @pytest.mark.parametrize("k,m", [(1, 2), (1, 3), (2, 3)])
    def test_unimodular(self, q, d, k, m):
        """Test the non-full-rank measure equals the rank census"""
        P = first_place(q, d)
        assert local_nonunimodular_measure(P, k, m) == local_nonunimodular_bruteforce(P, k, m)

    def test_spot_values(self):
        """Test the spot values at degree-1 places over F_2"""
        P = first_place(2, 1)
        assert local_measure_U(P, 3).value == Fraction(3, 32)
        assert local_nonunimodular_measure(P, 2, 3) == Fraction(11, 32)


class TestUnimodularDensity:
    """Exact unimodular densities against the harness"""

    def test_coprime_pairs_exhaustive(self, polys):
        """Test the exhaustive chain D_j = j inf up to j = 8 closes in on 1/2"""
        exact = unimodular_density_exact(polys, 1, 2)
        assert exact == Fraction(1, 2)
        experiment = DensityExperiment(
            predicate=PredicateSpec(name=PREDICATE_UNIMODULAR, k=1, m=2),
            spec="q=2; excluded=inf", j_min=0, j_max=8, mode=MODE_EXHAUSTIVE, reference="1/2",
        )
        service = DensityService(Settings(), workers=4)
        report = service.run(experiment)
        last = report.points[-1]
        assert last.total == 2 ** 18
        assert last.hits == coprime_pairs(polys.field, 8)
        assert abs(Fraction(last.hits, last.total) - exact) <= Fraction(1, 100)
        assert service.compare(report).final_gap == last.gap

    @pytest.mark.slow
    def test_two_by_three_sampled(self, polys):
        """Test 200000 samples at D = 6 inf land within 4 sigma of 3/8"""
        exact = unimodular_density_exact(polys, 2, 3)
        assert exact == Fraction(3, 8)
        experiment = DensityExperiment(
            predicate=PredicateSpec(name=PREDICATE_UNIMODULAR, k=2, m=3),
            chain=["6*inf"], mode=MODE_SAMPLE, samples=200_000, seed=20160901,
        )
        point = DensityService(Settings(), workers=4).run(experiment).points[0]
        sigma = math.sqrt(float(exact) * (1 - float(exact)) / point.total)
        assert abs(point.ratio_float - float(exact)) <= 4 * sigma


class TestRamifiedDensity:
    """The truncated ramified product against sampling"""

    @pytest.mark.slow
    def test_sampled_bracket(self, polys):
        """Test 100000 samples at D = 8 inf with scan degree 4 land near the t = 4 truncation"""
        truncated = ramified_density_truncated(3, polys, 4)
        experiment = DensityExperiment(
            predicate=PredicateSpec(name=PREDICATE_RAMIFIED, n=3, t_scan=4),
            chain=["8*inf"], mode=MODE_SAMPLE, samples=100_000, seed=20160901,
        )
        report = DensityService(Settings(), workers=4).run(experiment)
        assert abs(report.points[0].ratio_float - float(truncated)) <= 0.02
        assert any(str(truncated.numerator) in note for note in report.notes)


class TestZeta:
    """Closed forms against Euler truncations"""

    def test_closed_forms(self, polys):
        """Test zeta_H(2) of F_2[x] and zeta_F(2) of F_2(x)"""
        assert zeta_H(2, polys) == 2
        assert zeta_F(2, 2) == Fraction(8, 3)

    @pytest.mark.parametrize("q", [2, 3])
    @pytest.mark.parametrize("s", [2, 3])
    def test_truncation_at_fifteen(self, q, s):
        """Test the Euler product over places of degree <= 15 is within 1e-4"""
        spec = parse_spec(f"q={q}; excluded=inf")
        approx = zeta_H_euler_truncated_approx(s, spec, 15)
        assert abs(float(approx) - float(zeta_H(s, spec))) < 1e-4


class TestHarness:
    """Determinism and the congruence tail"""

    @pytest.mark.parametrize("mode", [MODE_EXHAUSTIVE, MODE_SAMPLE])
    def test_worker_count_invariance(self, mode):
        """Test reports do not depend on the number of workers"""
        experiment = DensityExperiment(
            predicate=PredicateSpec(name=PREDICATE_UNIMODULAR, k=1, m=2),
            spec="q=2; excluded=inf,(x)", j_min=1, j_max=2, mode=mode, samples=2_000, seed=11,
        )
        single = DensityService(Settings(), workers=1).run(experiment)
        pooled = DensityService(Settings(), workers=4).run(experiment)
        assert single == pooled

    def test_tail_density_matches_oracle(self, polys):
        """Test tail_density at D = 3 inf against a divisibility oracle, and its decay in t"""
        service = DensityService(Settings())
        D = chain_divisor(polys, 3)
        elements = list(enumerate_polys(polys.field, 3))
        values = []
        for t in range(0, 5):
            irreducibles = [p for d in range(t + 1, 4) for p in monic_irreducibles(polys.field, d)]
            hits = sum(
                1 for a in elements for b in elements
                if (a.is_zero() and b.is_zero()) or any(p.divides(a) and p.divides(b) for p in irreducibles)
            )
            value = service.tail_density("a0", "a1", 2, t, D, polys)
            assert value == Fraction(hits, len(elements) ** 2)
            values.append(value)
        assert values == sorted(values, reverse=True)
        assert values[3] == Fraction(1, 256)
