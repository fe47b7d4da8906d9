"""Places of the rational function field F_q(x) and valuations at them"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from ffdensity.algebra.gf import FieldSpec
from ffdensity.algebra.polyring import (
    Poly,
    count_monic_irreducibles,
    distinct_degree_factors,
    format_poly,
    gcd,
    inverse_mod,
    is_irreducible,
    monic_irreducibles,
    parse_poly,
    poly_from_index,
    poly_index,
    split_top_level,
)
from ffdensity.constants import INFINITY_TOKEN
from ffdensity.exceptions import DomainError, UsageError

logger = logging.getLogger(__name__)

INFINITE_VALUATION = math.inf

Valuation = Union[int, float]


class RationalFunction:
    """num/den in lowest terms with den monic; zero is 0/1"""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Optional[Poly] = None):
        if den is None:
            den = Poly.one(num.field)
        num._check(den)
        if den.is_zero():
            raise DomainError("Rational function with zero denominator")
        if num.is_zero():
            den = Poly.one(num.field)
        elif not den.is_one():
            if den.degree > 0:
                g = gcd(num, den)
                if not g.is_one():
                    num, den = num // g, den // g
            if den.leading != 1:
                inv = num.field.inv(den.leading)
                num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @classmethod
    def from_poly(cls, f: Poly) -> "RationalFunction":
        return cls(f)

    @classmethod
    def constant(cls, field: FieldSpec, code: int) -> "RationalFunction":
        return cls(Poly.constant(field, code))

    @classmethod
    def zero(cls, field: FieldSpec) -> "RationalFunction":
        return cls(Poly.zero(field))

    @classmethod
    def one(cls, field: FieldSpec) -> "RationalFunction":
        return cls(Poly.one(field))

    @classmethod
    def x(cls, field: FieldSpec) -> "RationalFunction":
        return cls(Poly.x(field))

    @property
    def field(self) -> FieldSpec:
        return self.num.field

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalFunction) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFunction({format_rational_function(self)})"

    def __str__(self) -> str:
        return format_rational_function(self)

    def __reduce__(self):
        return (RationalFunction, (self.num, self.den))

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if self.den.is_one() and other.den.is_one():
            return RationalFunction(self.num + other.num)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        if self.den.is_one() and other.den.is_one():
            return RationalFunction(self.num * other.num)
        return RationalFunction(self.num * other.num, self.den * other.den)

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise DomainError("Inverse of the zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        return self * other.inverse()

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.num ** n, self.den ** n)

    def scale(self, code: int) -> "RationalFunction":
        return RationalFunction(self.num.scale(code), self.den)


@dataclass(frozen=True)
class Place:
    """A finite place (monic irreducible poly) or the infinite place (poly is None)"""

    field: FieldSpec
    poly: Optional[Poly] = None

    @classmethod
    def finite(cls, p: Poly) -> "Place":
        if p.degree < 1 or not p.is_monic():
            raise UsageError(f"A finite place needs a monic non-constant polynomial, got {p}")
        if not is_irreducible(p):
            raise UsageError(f"{p} is not irreducible, so it does not define a place")
        return cls(p.field, p)

    @classmethod
    def infinity(cls, field: FieldSpec) -> "Place":
        return cls(field, None)

    @property
    def is_infinite(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else self.poly.degree

    @property
    def uniformizer(self) -> RationalFunction:
        if self.poly is None:
            return RationalFunction(Poly.one(self.field), Poly.x(self.field))
        return RationalFunction(self.poly)

    def sort_key(self) -> Tuple[int, int, int]:
        # finite places of a degree in canonical order, then infinity
        if self.poly is None:
            return (1, 1, 0)
        return (self.degree, 0, poly_index(self.poly))

    def __str__(self) -> str:
        return format_place(self)


def sorted_places(places: Iterable[Place]) -> List[Place]:
    return sorted(places, key=Place.sort_key)


def _multiplicity(f: Poly, p: Poly) -> int:
    count = 0
    quot, rem = divmod(f, p)
    while rem.is_zero():
        count += 1
        f = quot
        quot, rem = divmod(f, p)
    return count


def valuation(u: RationalFunction, place: Place) -> Valuation:
    """v_P(u); +inf for u = 0, v_inf(f/g) = deg g - deg f"""
    if u.is_zero():
        return INFINITE_VALUATION
    if place.is_infinite:
        return u.den.degree - u.num.degree
    p = place.poly
    # num and den are coprime, so p divides at most one of them
    if not u.den.is_one() and (u.den % p).is_zero():
        return -_multiplicity(u.den, p)
    return _multiplicity(u.num, p)


def in_valuation_ring(u: RationalFunction, place: Place) -> bool:
    return valuation(u, place) >= 0


def residue_representatives(place: Place) -> List[RationalFunction]:
    """q^deg(P) pairwise incongruent representatives of O_P/P"""
    return residue_representatives_mod_power(place, 1)


def residue_representatives_mod_power(place: Place, k: int) -> List[RationalFunction]:
    """Canonical representatives of O_P/P^k in canonical order"""
    if k < 1:
        raise DomainError(f"Power must be >= 1, got {k}")
    field = place.field
    if place.is_infinite:
        if k == 1:
            return [RationalFunction.constant(field, c) for c in range(field.q)]
        denominator = Poly.monomial(field, k - 1)
        # index digits c_0..c_{k-1} give sum c_i x^-i
        return [RationalFunction(poly_from_index(field, index, k).reversed_to(k - 1), denominator)
                for index in range(field.q ** k)]
    length = k * place.degree
    return [RationalFunction(poly_from_index(field, index)) for index in range(field.q ** length)]


def reduce_mod_power(u: RationalFunction, place: Place, k: int) -> RationalFunction:
    """Canonical representative of u mod P^k for u in O_P"""
    field = u.field
    if valuation(u, place) < 0:
        raise DomainError(f"{u} is not integral at {place}")
    if u.is_zero():
        return u
    if place.is_infinite:
        # substitute x = 1/y and reduce mod y^k
        shift = u.den.degree - u.num.degree
        if shift >= k:
            return RationalFunction.zero(field)
        y_k = Poly.monomial(field, k)
        rev_num = u.num.reversed_to(u.num.degree).shift_up(shift)
        rev_den = u.den.reversed_to(u.den.degree)
        series = (rev_num * inverse_mod(rev_den, y_k)) % y_k
        padded = list(series.coeffs) + [0] * (k - len(series.coeffs))
        return RationalFunction(Poly(field, padded[::-1]), Poly.monomial(field, k - 1))
    modulus = place.poly ** k
    if u.den.is_one():
        return RationalFunction(u.num % modulus)
    return RationalFunction((u.num * inverse_mod(u.den, modulus)) % modulus)


def places_of_degree(field: FieldSpec, d: int, excluded: Iterable[Place] = ()) -> List[Place]:
    """All places of degree d minus the excluded ones, in canonical order"""
    if d < 1:
        raise DomainError(f"Degree must be >= 1, got {d}")
    excluded = set(excluded)
    out = [Place(field, p) for p in monic_irreducibles(field, d)]
    if d == 1:
        out.append(Place.infinity(field))
    return [P for P in out if P not in excluded]


def count_places_of_degree(field: FieldSpec, d: int, excluded: Iterable[Place] = ()) -> int:
    if d < 1:
        raise DomainError(f"Degree must be >= 1, got {d}")
    total = count_monic_irreducibles(field.q, d) + (1 if d == 1 else 0)
    return total - sum(1 for P in set(excluded) if P.degree == d)


def support(u: RationalFunction) -> Dict[Place, int]:
    """{P: v_P(u)} over every place with nonzero valuation, infinity included"""
    if u.is_zero():
        raise DomainError("The zero function has no divisor")
    field = u.field
    out: Dict[Place, int] = {}
    for part in (u.num, u.den):
        if part.degree < 1:
            continue
        for d in distinct_degree_factors(part):
            for p in monic_irreducibles(field, d):
                v = valuation(u, Place(field, p))
                if v != 0:
                    out[Place(field, p)] = v
    v_inf = valuation(u, Place.infinity(field))
    if v_inf != 0:
        out[Place.infinity(field)] = v_inf
    return out


class ResidueField:
    """Arithmetic in O_P/P, elements coded by their index among residue_representatives"""

    def __init__(self, place: Place):
        self.place = place
        self.field = place.field
        # the residue field at infinity is F_q = F_q[y]/(y)
        self.modulus = Poly.x(self.field) if place.is_infinite else place.poly
        self.size = self.field.q ** place.degree
        self._mul: Optional[List[List[int]]] = None
        self._add: Optional[List[List[int]]] = None
        if self.size <= 256:
            self._mul = [[self._slow_mul(a, b) for b in range(self.size)] for a in range(self.size)]
            self._add = [[poly_index(self.poly(a) + self.poly(b)) for b in range(self.size)] for a in range(self.size)]

    def poly(self, code: int) -> Poly:
        return poly_from_index(self.field, code)

    def code(self, f: Poly) -> int:
        return poly_index(f % self.modulus)

    def reduce(self, u: RationalFunction) -> int:
        r = reduce_mod_power(u, self.place, 1)
        return poly_index(r.num)

    def add(self, a: int, b: int) -> int:
        if self._add is not None:
            return self._add[a][b]
        return poly_index(self.poly(a) + self.poly(b))

    def sub(self, a: int, b: int) -> int:
        return poly_index(self.poly(a) - self.poly(b))

    def _slow_mul(self, a: int, b: int) -> int:
        return self.code(self.poly(a) * self.poly(b))

    def mul(self, a: int, b: int) -> int:
        if self._mul is not None:
            return self._mul[a][b]
        return self._slow_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DomainError("Inverse of zero in a residue field")
        return poly_index(inverse_mod(self.poly(a), self.modulus))

    def rank(self, rows: Sequence[Sequence[int]]) -> int:
        """Rank of a matrix of residue codes by Gaussian elimination"""
        matrix = [list(r) for r in rows]
        rank = 0
        cols = len(matrix[0]) if matrix else 0
        for c in range(cols):
            pivot = next((i for i in range(rank, len(matrix)) if matrix[i][c]), None)
            if pivot is None:
                continue
            matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
            inv = self.inv(matrix[rank][c])
            matrix[rank] = [self.mul(inv, v) for v in matrix[rank]]
            for i in range(len(matrix)):
                if i != rank and matrix[i][c]:
                    factor = matrix[i][c]
                    matrix[i] = [self.sub(v, self.mul(factor, w)) for v, w in zip(matrix[i], matrix[rank])]
            rank += 1
        return rank


# -- text format -------------------------------------------------------------

def format_rational_function(u: RationalFunction) -> str:
    if u.den.is_one():
        return format_poly(u.num)
    num = format_poly(u.num)
    if len(split_top_level(num, "+-")) > 1:
        num = f"({num})"
    return f"{num}/({format_poly(u.den)})"


def parse_rational_function(field: FieldSpec, text: str) -> RationalFunction:
    """Parse `x`, `1/x`, `(x^2+1)/(x+1)`"""
    cleaned = text.replace(" ", "")
    depth = 0
    for i, ch in enumerate(cleaned):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            num = parse_poly(field, cleaned[:i])
            den = parse_poly(field, cleaned[i + 1:])
            return RationalFunction(num, den)
    return RationalFunction(parse_poly(field, cleaned))


def format_place(place: Place) -> str:
    return INFINITY_TOKEN if place.is_infinite else format_poly(place.poly)


def parse_place(field: FieldSpec, text: str) -> Place:
    """Parse `inf`, `x^2+x+1` or `(x)`"""
    cleaned = text.replace(" ", "")
    if cleaned.lower() in (INFINITY_TOKEN, "infinity", "oo"):
        return Place.infinity(field)
    return Place.finite(parse_poly(field, cleaned))
