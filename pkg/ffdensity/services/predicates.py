"""Tuple predicates evaluated by the density harness

Predicates are plain frozen dataclasses so they pickle into worker processes.
"""
import logging
import re
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from ffdensity.algebra.gf import FieldSpec
from ffdensity.algebra.holomorphy import HolomorphySpec
from ffdensity.algebra.places import (
    Place,
    RationalFunction,
    parse_rational_function,
    places_of_degree,
    valuation,
)
from ffdensity.algebra.polyring import distinct_degree_factors, gcd, split_top_level, strip_factors
from ffdensity.constants import PREDICATE_CONGRUENCE, PREDICATE_RAMIFIED, PREDICATE_UNIMODULAR
from ffdensity.densities.eisenstein import PolyOverF, in_U_P
from ffdensity.densities.unimodular import PolyMatrix, is_unimodular
from ffdensity.exceptions import UsageError
from ffdensity.models.experiment import PredicateSpec

logger = logging.getLogger(__name__)

_COORDINATE_RE = re.compile(r"^a(\d+)$")


@dataclass(frozen=True)
class CoordinateExpression:
    """Sum of coefficient * product-of-coordinates terms, e.g. `a0*a1+(x+1)*a2`"""

    text: str
    terms: Tuple[Tuple[RationalFunction, Tuple[int, ...]], ...]

    @property
    def max_index(self) -> int:
        return max((i for _, idx in self.terms for i in idx), default=-1)

    def evaluate(self, values: Sequence[RationalFunction]) -> RationalFunction:
        total = RationalFunction.zero(values[0].field)
        for coefficient, indices in self.terms:
            term = coefficient
            for i in indices:
                term = term * values[i]
            total = total + term
        return total


def parse_coordinate_expression(field: FieldSpec, text: str) -> CoordinateExpression:
    cleaned = text.replace(" ", "")
    if not cleaned:
        raise UsageError("Empty coordinate expression")
    leading_minus = cleaned.startswith("-")
    if cleaned[0] in "+-":
        cleaned = cleaned[1:]
    terms = []
    for sep, term in split_top_level(cleaned, "+-"):
        if not term:
            raise UsageError(f"Malformed coordinate expression {text!r}")
        coefficient = RationalFunction.one(field)
        if sep == "-" or (leading_minus and not terms):
            coefficient = -coefficient
        indices = []
        for _, factor in split_top_level(term, "*"):
            match = _COORDINATE_RE.match(factor)
            if match:
                indices.append(int(match.group(1)))
            else:
                coefficient = coefficient * parse_rational_function(field, factor)
        terms.append((coefficient, tuple(indices)))
    return CoordinateExpression(text, tuple(terms))


def congruence_event(F: RationalFunction, G: RationalFunction, spec: HolomorphySpec,
                     t: int, t_max: Optional[int] = None) -> bool:
    """F = G = 0 mod P for some P in S with t < deg P <= t_max (t_max None: unbounded)"""
    if t_max is not None and t_max <= t:
        return False
    if F.is_zero() and G.is_zero():
        return True
    numerators = [u.num for u in (F, G) if not u.is_zero()]
    common = numerators[0].monic() if len(numerators) == 1 else gcd(*numerators)
    common = strip_factors(common, spec.finite_excluded)
    if common.degree >= 1:
        for d in distinct_degree_factors(common):
            if d > t and (t_max is None or d <= t_max):
                return True
    if not spec.infinity_excluded and t < 1:
        infinity = Place.infinity(spec.field)
        if valuation(F, infinity) >= 1 and valuation(G, infinity) >= 1:
            return True
    return False


@dataclass(frozen=True)
class RamifiedPredicate:
    """f = sum a_i T^i lies in U_P for some P in S with deg P <= t_scan"""

    n: int
    t_scan: int
    places: Tuple[Place, ...]

    @property
    def arity(self) -> int:
        return self.n + 1

    def __call__(self, values: Sequence[RationalFunction]) -> bool:
        f = PolyOverF(tuple(values))
        return any(in_U_P(f, P) for P in self.places)


@dataclass(frozen=True)
class UnimodularPredicate:
    """The k x m matrix filled row by row from the tuple is unimodular over H_S"""

    k: int
    m: int
    spec: HolomorphySpec

    @property
    def arity(self) -> int:
        return self.k * self.m

    def __call__(self, values: Sequence[RationalFunction]) -> bool:
        # box elements lie in H_S already
        return is_unimodular(PolyMatrix.from_flat(values, self.k, self.m), self.spec, validate=False)


@dataclass(frozen=True)
class CongruencePredicate:
    f: CoordinateExpression
    g: CoordinateExpression
    t: int
    t_max: Optional[int]
    d: int
    spec: HolomorphySpec

    @property
    def arity(self) -> int:
        return self.d

    def __call__(self, values: Sequence[RationalFunction]) -> bool:
        return congruence_event(self.f.evaluate(values), self.g.evaluate(values), self.spec, self.t, self.t_max)


def build_predicate(predicate: PredicateSpec, spec: HolomorphySpec):
    """Turn a validated predicate description into a callable on d-tuples"""
    if predicate.name == PREDICATE_RAMIFIED:
        places = tuple(P for d in range(1, predicate.t_scan + 1)
                       for P in places_of_degree(spec.field, d, spec.excluded))
        logger.debug(f"Ramified predicate scans {len(places)} places up to degree {predicate.t_scan}")
        return RamifiedPredicate(predicate.n, predicate.t_scan, places)
    if predicate.name == PREDICATE_UNIMODULAR:
        return UnimodularPredicate(predicate.k, predicate.m, spec)
    if predicate.name == PREDICATE_CONGRUENCE:
        f = parse_coordinate_expression(spec.field, predicate.f)
        g = parse_coordinate_expression(spec.field, predicate.g)
        for expr in (f, g):
            if expr.max_index >= predicate.d:
                raise UsageError(f"Expression {expr.text!r} uses a coordinate beyond arity {predicate.d}")
        return CongruencePredicate(f, g, predicate.t, predicate.t_max, predicate.d, spec)
    raise UsageError(f"Unknown predicate {predicate.name!r}")
