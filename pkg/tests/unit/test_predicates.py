"""Unit tests for harness predicates and the congruence event"""

import pickle

import pytest

from ffdensity.algebra.holomorphy import parse_spec
from ffdensity.algebra.places import RationalFunction, parse_rational_function
from ffdensity.constants import PREDICATE_CONGRUENCE, PREDICATE_RAMIFIED, PREDICATE_UNIMODULAR
from ffdensity.exceptions import UsageError
from ffdensity.models.experiment import PredicateSpec
from ffdensity.services.predicates import (
    CongruencePredicate,
    RamifiedPredicate,
    UnimodularPredicate,
    build_predicate,
    congruence_event,
    parse_coordinate_expression,
)


@pytest.fixture
def polys():
    return parse_spec("q=2; excluded=inf")


def rfs(spec, *texts):
    return [parse_rational_function(spec.field, t) for t in texts]


class TestCoordinateExpression:
    """Tests for parse_coordinate_expression"""

    def test_evaluate(self, polys):
        """Test a0*a1 + (x+1)*a2 at (x, 1, x)"""
        expr = parse_coordinate_expression(polys.field, "a0*a1 + (x+1)*a2")
        assert expr.max_index == 2
        assert expr.evaluate(rfs(polys, "x", "1", "x")) == parse_rational_function(polys.field, "x^2")

    def test_signs(self):
        """Test leading and inner minus signs over F_3"""
        spec = parse_spec("q=3; excluded=inf")
        expr = parse_coordinate_expression(spec.field, "-a0 - 2*a1")
        values = rfs(spec, "x", "1")
        assert expr.evaluate(values) == parse_rational_function(spec.field, "2*x+1")

    def test_constant_term(self, polys):
        """Test a term without coordinates"""
        expr = parse_coordinate_expression(polys.field, "a0+1")
        assert expr.max_index == 0
        assert expr.evaluate(rfs(polys, "x")) == parse_rational_function(polys.field, "x+1")

    @pytest.mark.parametrize("text", ["", "a0++a1", "a0*"])
    def test_malformed(self, polys, text):
        """Test malformed expressions are usage errors"""
        with pytest.raises(UsageError):
            parse_coordinate_expression(polys.field, text)


class TestCongruenceEvent:
    """Tests for congruence_event"""

    def test_zero_pair(self, polys):
        """Test F = G = 0 is congruent modulo every place"""
        zero = RationalFunction.zero(polys.field)
        assert congruence_event(zero, zero, polys, 3)
        assert not congruence_event(zero, zero, polys, 3, t_max=3)

    def test_degree_window(self, polys):
        """Test only common places of degree in (t, t_max] count"""
        F, G = rfs(polys, "x^3+x^2+x", "x^2+x+1")
        # common factor x^2+x+1
        assert congruence_event(F, G, polys, 1)
        assert not congruence_event(F, G, polys, 2)
        assert congruence_event(F, G, polys, 0, t_max=2)
        assert not congruence_event(F, G, polys, 0, t_max=1)

    def test_single_nonzero(self, polys):
        """Test G = 0 reduces to a place of F"""
        F, G = rfs(polys, "x^3+x+1", "0")
        assert congruence_event(F, G, polys, 2)
        assert not congruence_event(F, G, polys, 3)

    def test_coprime(self, polys):
        """Test coprime values never meet"""
        F, G = rfs(polys, "x", "x+1")
        assert not congruence_event(F, G, polys, 0)

    def test_excluded_places_ignored(self):
        """Test a common factor at an excluded place does not count"""
        spec = parse_spec("q=2; excluded=inf,(x)")
        F, G = rfs(spec, "x", "x^2")
        assert not congruence_event(F, G, spec, 0)

    def test_infinity_in_S(self):
        """Test a common zero at infinity counts for t = 0 only"""
        spec = parse_spec("q=2; excluded=(x)")
        F, G = rfs(spec, "1/x", "(x+1)/x^2")
        assert congruence_event(F, G, spec, 0)
        assert not congruence_event(F, G, spec, 1)


class TestBuildPredicate:
    """Tests for build_predicate"""

    def test_ramified(self, polys):
        """Test the place list and arity"""
        predicate = build_predicate(PredicateSpec(name=PREDICATE_RAMIFIED, n=3, t_scan=2), polys)
        assert isinstance(predicate, RamifiedPredicate)
        assert predicate.arity == 4
        assert len(predicate.places) == 3
        assert predicate(rfs(polys, "x", "x", "0", "1"))
        assert not predicate(rfs(polys, "1", "0", "0", "1"))

    def test_unimodular(self, polys):
        """Test the matrix is filled row by row"""
        predicate = build_predicate(PredicateSpec(name=PREDICATE_UNIMODULAR, k=2, m=3), polys)
        assert isinstance(predicate, UnimodularPredicate)
        assert predicate.arity == 6
        assert predicate(rfs(polys, "x", "1", "0", "x^2", "x", "1"))
        assert not predicate(rfs(polys, "x", "1", "0", "x^2", "x", "0"))

    def test_congruence(self, polys):
        """Test the expressions are parsed over the ring's field"""
        spec = PredicateSpec(name=PREDICATE_CONGRUENCE, f="a0", g="a1", t=0, d=2)
        predicate = build_predicate(spec, polys)
        assert isinstance(predicate, CongruencePredicate)
        assert predicate(rfs(polys, "x", "x^2"))
        assert not predicate(rfs(polys, "x", "x+1"))

    def test_coordinate_beyond_arity(self, polys):
        """Test expressions may only use a0..a(d-1)"""
        spec = PredicateSpec(name=PREDICATE_CONGRUENCE, f="a0", g="a2", t=0, d=2)
        with pytest.raises(UsageError):
            build_predicate(spec, polys)

    def test_pickles(self, polys):
        """Test predicates survive the trip into worker processes"""
        spec = PredicateSpec(name=PREDICATE_CONGRUENCE, f="a0*a1", g="a0+x", t=0, d=2)
        predicate = build_predicate(spec, polys)
        clone = pickle.loads(pickle.dumps(predicate))
        values = rfs(polys, "x", "x+1")
        assert clone(values) == predicate(values)


class TestPredicateSpec:
    """Tests for predicate parameter validation"""

    def test_missing_parameters(self):
        """Test required parameters per predicate"""
        with pytest.raises(ValueError):
            PredicateSpec(name=PREDICATE_RAMIFIED, n=2)
        with pytest.raises(ValueError):
            PredicateSpec(name=PREDICATE_CONGRUENCE, f="a0", g="a1", d=2)

    def test_unknown_name(self):
        """Test unknown predicate names"""
        with pytest.raises(ValueError):
            PredicateSpec(name="squarefree")

    def test_unimodular_shape(self):
        """Test k < m"""
        with pytest.raises(ValueError):
            PredicateSpec(name=PREDICATE_UNIMODULAR, k=3, m=3)

    def test_arity(self):
        """Test arity per predicate"""
        assert PredicateSpec(name=PREDICATE_RAMIFIED, n=2, t_scan=1).arity == 3
        assert PredicateSpec(name=PREDICATE_UNIMODULAR, k=1, m=2).arity == 2
        assert PredicateSpec(name=PREDICATE_CONGRUENCE, f="a0", g="a0", t=0, d=1).arity == 1
