"""Holomorphy rings H_S with finite complement T and genus-0 Riemann-Roch boxes"""
import logging
import re
from dataclasses import dataclass, field as dataclass_field
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from ffdensity.algebra.gf import FieldSpec, format_modulus, parse_digits, prime_power
from ffdensity.algebra.places import (
    Place,
    RationalFunction,
    format_place,
    parse_place,
    sorted_places,
    valuation,
)
from ffdensity.algebra.polyring import Poly, poly_from_index, split_top_level, strip_factors
from ffdensity.config.settings import get_settings
from ffdensity.constants import GENERATOR_SYMBOL, INFINITY_TOKEN
from ffdensity.exceptions import CapExceededError, InvariantError, UsageError
from ffdensity.utils.rng import counter_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HolomorphySpec:
    """H_S for S = all places minus the finite nonempty set `excluded` (T)"""

    field: FieldSpec
    excluded: Tuple[Place, ...]

    def __post_init__(self):
        excluded = tuple(sorted_places(set(self.excluded)))
        if not excluded:
            raise UsageError("The excluded set T must be nonempty")
        for P in excluded:
            if P.field != self.field:
                raise UsageError(f"Excluded place {P} lives over a different field")
        object.__setattr__(self, "excluded", excluded)

    @classmethod
    def default(cls, field: FieldSpec) -> "HolomorphySpec":
        """T = {inf}, i.e. H = F_q[x]"""
        return cls(field, (Place.infinity(field),))

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def infinity_excluded(self) -> bool:
        return any(P.is_infinite for P in self.excluded)

    @property
    def finite_excluded(self) -> List[Poly]:
        return [P.poly for P in self.excluded if not P.is_infinite]

    def in_S(self, place: Place) -> bool:
        return place not in self.excluded

    def __str__(self) -> str:
        return format_spec(self)


@dataclass(frozen=True)
class DivisorOnT:
    """A positive divisor sum n_P * P, kept as sorted (place, n_P) pairs with n_P > 0"""

    coefficients: Tuple[Tuple[Place, int], ...] = dataclass_field(default=())

    def __post_init__(self):
        merged: Dict[Place, int] = {}
        for place, n in self.coefficients:
            if n < 0:
                raise UsageError(f"Divisor coefficient at {place} is negative: {n}")
            merged[place] = merged.get(place, 0) + n
        canonical = tuple((P, merged[P]) for P in sorted_places(merged) if merged[P] > 0)
        object.__setattr__(self, "coefficients", canonical)

    @classmethod
    def from_mapping(cls, mapping: Mapping[Place, int]) -> "DivisorOnT":
        return cls(tuple(mapping.items()))

    @property
    def degree(self) -> int:
        return sum(P.degree * n for P, n in self.coefficients)

    @property
    def support(self) -> List[Place]:
        return [P for P, _ in self.coefficients]

    def coefficient(self, place: Place) -> int:
        for P, n in self.coefficients:
            if P == place:
                return n
        return 0

    def __le__(self, other: "DivisorOnT") -> bool:
        return all(n <= other.coefficient(P) for P, n in self.coefficients)

    def __add__(self, other: "DivisorOnT") -> "DivisorOnT":
        return DivisorOnT(self.coefficients + other.coefficients)

    def scaled(self, j: int) -> "DivisorOnT":
        return DivisorOnT(tuple((P, n * j) for P, n in self.coefficients))

    def validate_on(self, spec: HolomorphySpec) -> None:
        for P in self.support:
            if P not in spec.excluded:
                raise UsageError(f"Divisor support place {format_place(P)} is not in the excluded set T")

    def finite_denominator(self, field: FieldSpec) -> Poly:
        """prod p_i^(n_i) over the finite support"""
        h = Poly.one(field)
        for P, n in self.coefficients:
            if not P.is_infinite:
                h = h * P.poly ** n
        return h

    def __str__(self) -> str:
        return format_divisor(self)


def chain_divisor(spec: HolomorphySpec, j: int) -> DivisorOnT:
    """D_j = j * sum_{R in T} R, the canonical cofinal chain"""
    if j < 0:
        raise UsageError(f"Chain index must be >= 0, got {j}")
    return DivisorOnT(tuple((P, j) for P in spec.excluded))


def ell(D: DivisorOnT) -> int:
    """dim L(D) = deg D + 1 for D >= 0 in genus 0"""
    return D.degree + 1


def in_riemann_roch_space(u: RationalFunction, D: DivisorOnT) -> bool:
    """div(u) + D >= 0"""
    if u.is_zero():
        return True
    field = u.field
    finite_support = [P.poly for P in D.support if not P.is_infinite]
    # poles only at the finite support
    if not strip_factors(u.den, finite_support).is_constant():
        return False
    for P in D.support:
        if valuation(u, P) < -D.coefficient(P):
            return False
    infinity = Place.infinity(field)
    return valuation(u, infinity) >= -D.coefficient(infinity)


def riemann_roch_basis(D: DivisorOnT, spec: HolomorphySpec) -> List[RationalFunction]:
    """{x^j / h : 0 <= j <= deg D} with h = prod over the finite support"""
    D.validate_on(spec)
    field = spec.field
    h = D.finite_denominator(field)
    basis = [RationalFunction(Poly.monomial(field, j), h) for j in range(D.degree + 1)]
    for u in basis:
        if not in_riemann_roch_space(u, D):
            raise InvariantError(f"Basis element {u} is not in L({format_divisor(D)})")
    return basis


def box_size(D: DivisorOnT, spec: HolomorphySpec) -> int:
    return spec.q ** ell(D)


def box_element(D: DivisorOnT, spec: HolomorphySpec, index: int,
                denominator: Optional[Poly] = None) -> RationalFunction:
    """The index-th element of L(D): the basis combination with coefficient codes = digits of index"""
    field = spec.field
    h = denominator if denominator is not None else D.finite_denominator(field)
    return RationalFunction(poly_from_index(field, index), h)


def enumerate_box(D: DivisorOnT, spec: HolomorphySpec, cap: Optional[int] = None) -> Iterator[RationalFunction]:
    """All q^l(D) elements of L(D) in index order"""
    D.validate_on(spec)
    size = box_size(D, spec)
    cap = cap if cap is not None else get_settings().max_box
    if size > cap:
        logger.warning(f"Box enumeration rejected: q^l(D) = {size} exceeds cap {cap}")
        raise CapExceededError(
            f"L({format_divisor(D)}) has {size} elements, above the cap {cap}; use sampling instead"
        )
    h = D.finite_denominator(spec.field)

    def _stream() -> Iterator[RationalFunction]:
        for index in range(size):
            yield box_element(D, spec, index, h)

    return _stream()


def sample_box(D: DivisorOnT, spec: HolomorphySpec, seed: int, index: int, stream: int = 0) -> RationalFunction:
    """Uniform element of L(D), a deterministic function of (seed, stream, index)"""
    D.validate_on(spec)
    rng = counter_rng(seed, stream, index)
    return box_element(D, spec, rng.randrange(box_size(D, spec)))


def sample_tuple(D: DivisorOnT, spec: HolomorphySpec, seed: int, index: int, arity: int,
                 stream: int = 0) -> List[RationalFunction]:
    """`arity` independent uniform elements of L(D), all drawn from the generator of (seed, stream, index)"""
    D.validate_on(spec)
    rng = counter_rng(seed, stream, index)
    size = box_size(D, spec)
    h = D.finite_denominator(spec.field)
    return [box_element(D, spec, rng.randrange(size), h) for _ in range(arity)]


def in_holomorphy_ring(u: RationalFunction, spec: HolomorphySpec) -> bool:
    """v_P(u) >= 0 for every P in S"""
    if u.is_zero():
        return True
    if not strip_factors(u.den, spec.finite_excluded).is_constant():
        return False
    if not spec.infinity_excluded and u.num.degree > u.den.degree:
        return False
    return True


def is_unit(u: RationalFunction, spec: HolomorphySpec) -> bool:
    """u is a unit of H_S: no zero or pole at any place of S"""
    if u.is_zero():
        return False
    finite = spec.finite_excluded
    if not strip_factors(u.num, finite).is_constant() or not strip_factors(u.den, finite).is_constant():
        return False
    if not spec.infinity_excluded and u.num.degree != u.den.degree:
        return False
    return True


# -- text format -------------------------------------------------------------

def _place_token(place: Place) -> str:
    return INFINITY_TOKEN if place.is_infinite else f"({format_place(place)})"


def format_spec(spec: HolomorphySpec) -> str:
    """`q=2; excluded=inf,(x)`"""
    ordered = sorted(spec.excluded, key=lambda P: (not P.is_infinite, P.sort_key()))
    parts = [f"q={spec.q}"]
    if spec.field.e > 1:
        parts.append(f"modulus={format_modulus(spec.field.modulus)}")
    parts.append("excluded=" + ",".join(_place_token(P) for P in ordered))
    return "; ".join(parts)


def parse_spec(text: str) -> HolomorphySpec:
    """Parse `q=2; excluded=inf,(x)`; excluded defaults to inf, modulus to the canonical one"""
    entries: Dict[str, str] = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise UsageError(f"Malformed spec entry {chunk!r}, expected key=value")
        key, value = chunk.split("=", 1)
        entries[key.strip().lower()] = value.strip()
    unknown = set(entries) - {"q", "modulus", "excluded"}
    if unknown:
        raise UsageError(f"Unknown spec keys: {sorted(unknown)}")
    if "q" not in entries:
        raise UsageError(f"Spec {text!r} does not name q")
    try:
        q = int(entries["q"])
    except ValueError as e:
        raise UsageError(f"q must be an integer, got {entries['q']!r}") from e
    modulus = None
    if "modulus" in entries:
        p, _ = prime_power(q)
        modulus = parse_digits(entries["modulus"], p, GENERATOR_SYMBOL)
    field = FieldSpec.from_q(q, modulus)
    excluded_text = entries.get("excluded", INFINITY_TOKEN)
    places = [parse_place(field, item) for _, item in split_top_level(excluded_text.replace(" ", ""), ",")
              if item]
    return HolomorphySpec(field, tuple(places))


def format_divisor(D: DivisorOnT) -> str:
    """`3*inf + 2*(x)`"""
    if not D.coefficients:
        return "0"
    ordered = sorted(D.coefficients, key=lambda item: (not item[0].is_infinite, item[0].sort_key()))
    return " + ".join(f"{n}*{_place_token(P)}" for P, n in ordered)


_DIVISOR_TERM_RE = re.compile(r"^(?:(\d+)\*)?(.+)$")


def parse_divisor(spec: HolomorphySpec, text: str) -> DivisorOnT:
    """Parse `3*inf + 2*(x) + 1*(x^2+x+1)`; the support must lie in T"""
    cleaned = text.replace(" ", "")
    if cleaned in ("", "0"):
        return DivisorOnT()
    pairs: List[Tuple[Place, int]] = []
    for _, term in split_top_level(cleaned, "+"):
        m = _DIVISOR_TERM_RE.match(term)
        if not m:
            raise UsageError(f"Malformed divisor term {term!r}")
        n = int(m.group(1)) if m.group(1) is not None else 1
        pairs.append((parse_place(spec.field, m.group(2)), n))
    D = DivisorOnT(tuple(pairs))
    D.validate_on(spec)
    return D


def divisors_up_to(spec: HolomorphySpec, bound: int) -> List[DivisorOnT]:
    """Every divisor on T with all coefficients <= bound"""
    out = [DivisorOnT()]
    for P in spec.excluded:
        out = [D + DivisorOnT(((P, n),)) for D in out for n in range(bound + 1)]
    return out

