"""Eisenstein criteria, the local sets U_P and the density of nicely ramified polynomials

A polynomial f in H[T] of nominal degree n is kept as its coefficient vector
(a_0, ..., a_n); the leading coefficient may vanish. U_P is the set of f that
become Eisenstein at P after a shift T -> T + a by a residue representative a,
or after the inversion T^n f(1/T).
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath

from ffdensity.algebra.gf import FieldSpec
from ffdensity.algebra.holomorphy import HolomorphySpec
from ffdensity.algebra.places import (
    Place,
    RationalFunction,
    ResidueField,
    count_places_of_degree,
    format_place,
    format_rational_function,
    parse_rational_function,
    places_of_degree,
    reduce_mod_power,
    residue_representatives,
    residue_representatives_mod_power,
    valuation,
)
from ffdensity.algebra.polyring import Poly, split_top_level
from ffdensity.config.settings import get_settings
from ffdensity.constants import BRANCH_INVERSION, BRANCH_SHIFT, MPMATH_DIGITS
from ffdensity.densities.zeta import estimated_bits
from ffdensity.exceptions import CapExceededError, DomainError, UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PolyOverF:
    """a_0 + a_1 T + ... + a_n T^n with a_i in F_q(x)"""

    coeffs: Tuple[RationalFunction, ...]

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if len(coeffs) < 2:
            raise DomainError(f"Polynomials over F need nominal degree n >= 1, got {len(coeffs) - 1}")
        field = coeffs[0].field
        if any(a.field != field for a in coeffs[1:]):
            raise UsageError("Coefficients come from different fields")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_polys(cls, polys: Sequence[Poly]) -> "PolyOverF":
        return cls(tuple(RationalFunction(f) for f in polys))

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    @property
    def field(self) -> FieldSpec:
        return self.coeffs[0].field

    @property
    def leading(self) -> RationalFunction:
        return self.coeffs[-1]

    @property
    def constant(self) -> RationalFunction:
        return self.coeffs[0]

    def __str__(self) -> str:
        return format_poly_over_f(self)


@dataclass(frozen=True)
class LocalMeasure:
    value: Fraction
    place: Place
    n: int

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise DomainError(f"Local measure {self.value} is outside [0, 1]")


@dataclass(frozen=True)
class RamifiedPlace:
    place: Place
    branch: str
    witness: Optional[RationalFunction] = None


@dataclass(frozen=True)
class BranchCensus:
    """Exhaustive counts over (O_P/P^2)^(n+1)"""

    place: Place
    n: int
    total: int
    union: int
    eisenstein: int
    shift_hits: int
    inversion_hits: int
    overlaps: int


def is_eisenstein(f: PolyOverF, P: Place) -> bool:
    """v(a_n) = 0, v(a_i) >= 1 for 0 < i < n, v(a_0) = 1; false if a coefficient is not integral"""
    if valuation(f.leading, P) != 0:
        return False
    if valuation(f.constant, P) != 1:
        return False
    return all(valuation(a, P) >= 1 for a in f.coeffs[1:-1])


def evaluate_at(f: PolyOverF, a: RationalFunction) -> RationalFunction:
    value = RationalFunction.zero(f.field)
    for c in reversed(f.coeffs):
        value = value * a + c
    return value


def shift(f: PolyOverF, a: RationalFunction) -> PolyOverF:
    """f(T + a), by repeated synthetic division"""
    if a.is_zero():
        return f
    b = list(f.coeffs)
    n = f.n
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            b[j] = b[j] + a * b[j + 1]
    return PolyOverF(tuple(b))


def invert(f: PolyOverF) -> PolyOverF:
    """T^n f(1/T)"""
    return PolyOverF(tuple(reversed(f.coeffs)))


def _tpoly_mul(u: List[RationalFunction], v: List[RationalFunction]) -> List[RationalFunction]:
    field = u[0].field
    out = [RationalFunction.zero(field) for _ in range(len(u) + len(v) - 1)]
    for i, a in enumerate(u):
        if a.is_zero():
            continue
        for j, b in enumerate(v):
            out[i + j] = out[i + j] + a * b
    return out


def _tpoly_pow(u: List[RationalFunction], k: int) -> List[RationalFunction]:
    out = [RationalFunction.one(u[0].field)]
    for _ in range(k):
        out = _tpoly_mul(out, u)
    return out


def moebius(f: PolyOverF, h: RationalFunction, s: RationalFunction,
            l: RationalFunction, j: RationalFunction) -> PolyOverF:
    """(lT + j)^n f((hT + s)/(lT + j))"""
    if (h * j - s * l).is_zero():
        raise DomainError("Degenerate Moebius transform: hj - sl = 0")
    n = f.n
    numerator = [s, h]
    denominator = [j, l]
    result = [RationalFunction.zero(f.field) for _ in range(n + 1)]
    for i, a in enumerate(f.coeffs):
        if a.is_zero():
            continue
        term = _tpoly_mul(_tpoly_pow(numerator, i), _tpoly_pow(denominator, n - i))
        for k, c in enumerate(term[:n + 1]):
            result[k] = result[k] + a * c
    return PolyOverF(tuple(result))


def _reduce_mod_square(f: PolyOverF, P: Place) -> Optional[PolyOverF]:
    """Coefficients mod P^2, or None when some coefficient is not integral at P"""
    if any(valuation(a, P) < 0 for a in f.coeffs):
        return None
    return PolyOverF(tuple(reduce_mod_power(a, P, 2) for a in f.coeffs))


def _shift_hits(f: PolyOverF, P: Place, reps: Sequence[RationalFunction]) -> List[RationalFunction]:
    """Every representative a with f(T + a) Eisenstein at P"""
    if valuation(f.leading, P) != 0:
        return []
    hits = []
    for a in reps:
        # the constant term of f(T + a) is f(a)
        if valuation(evaluate_at(f, a), P) != 1:
            continue
        if is_eisenstein(shift(f, a), P):
            hits.append(a)
    return hits


@lru_cache(maxsize=None)
def _residue_scan(P: Place) -> Tuple[ResidueField, Tuple[Tuple[RationalFunction, int], ...]]:
    """The residue field at P and each representative paired with its residue code"""
    residue = ResidueField(P)
    return residue, tuple((a, residue.reduce(a)) for a in residue_representatives(P))


def _residue_roots(f: PolyOverF, P: Place) -> List[RationalFunction]:
    """Representatives a with f(a) = 0 mod P, in canonical order; f must be integral at P"""
    residue, reps = _residue_scan(P)
    codes = [residue.reduce(c) for c in f.coeffs]
    roots = []
    for a, r in reps:
        value = 0
        for c in reversed(codes):
            value = residue.add(residue.mul(value, r), c)
        if value == 0:
            roots.append(a)
    return roots


def _first_shift_hit(f: PolyOverF, P: Place) -> Optional[RationalFunction]:
    if valuation(f.leading, P) != 0:
        return None
    # v(f(a)) >= 1 only where a reduces to a root of f mod P
    for a in _residue_roots(f, P):
        if valuation(evaluate_at(f, a), P) == 1 and is_eisenstein(shift(f, a), P):
            return a
    return None


def shifted_eisenstein_witness(f: PolyOverF, P: Place) -> Optional[RationalFunction]:
    """A residue representative a with f(T + a) Eisenstein at P, scanning O_P/P only"""
    reduced = _reduce_mod_square(f, P)
    if reduced is None:
        return None
    return _first_shift_hit(reduced, P)


def in_U_P(f: PolyOverF, P: Place) -> bool:
    reduced = _reduce_mod_square(f, P)
    if reduced is None:
        return False
    if _first_shift_hit(reduced, P) is not None:
        return True
    return is_eisenstein(invert(reduced), P)


def ramified_branch(f: PolyOverF, P: Place) -> Optional[RamifiedPlace]:
    reduced = _reduce_mod_square(f, P)
    if reduced is None:
        return None
    witness = _first_shift_hit(reduced, P)
    if witness is not None:
        return RamifiedPlace(P, BRANCH_SHIFT, witness)
    if is_eisenstein(invert(reduced), P):
        return RamifiedPlace(P, BRANCH_INVERSION)
    return None


def nicely_ramified_places(f: PolyOverF, t: int, spec: HolomorphySpec) -> List[RamifiedPlace]:
    """Places P in S with deg P <= t at which f lies in U_P, tagged with the branch that fires"""
    if t < 1:
        raise DomainError(f"Scan degree must be >= 1, got {t}")
    found = []
    for d in range(1, t + 1):
        for P in places_of_degree(spec.field, d, spec.excluded):
            hit = ramified_branch(f, P)
            if hit is not None:
                found.append(hit)
    return found


def _check_degree(n: int) -> None:
    if n < 2:
        raise DomainError(f"The ramified measure needs n >= 2, got {n}")


def local_measure_by_size(residue_size: int, n: int) -> Fraction:
    """(Q - 1)^2 (Q + 1) / Q^(n+2) for a residue field of size Q"""
    _check_degree(n)
    Q = residue_size
    return Fraction((Q - 1) ** 2 * (Q + 1), Q ** (n + 2))


def local_measure_U(P: Place, n: int) -> LocalMeasure:
    return LocalMeasure(local_measure_by_size(P.field.q ** P.degree, n), P, n)


def local_branch_counts(P: Place, n: int, cap: Optional[int] = None) -> BranchCensus:
    """Census of every residue tuple mod P^2 by the branches of U_P it falls in"""
    _check_degree(n)
    reps2 = residue_representatives_mod_power(P, 2)
    total = len(reps2) ** (n + 1)
    cap = cap if cap is not None else get_settings().max_bruteforce
    if total > cap:
        logger.warning(f"Local census rejected at {format_place(P)}: {total} tuples exceed cap {cap}")
        raise CapExceededError(f"Census at {format_place(P)} with n={n} has {total} tuples, above the cap {cap}")
    reps1 = residue_representatives(P)
    union = eisenstein = shift_hits = inversion_hits = overlaps = 0
    for coeffs in itertools.product(reps2, repeat=n + 1):
        f = PolyOverF(coeffs)
        hits = len(_shift_hits(f, P, reps1))
        inverted = is_eisenstein(invert(f), P)
        branches = hits + (1 if inverted else 0)
        if is_eisenstein(f, P):
            eisenstein += 1
        shift_hits += hits
        inversion_hits += 1 if inverted else 0
        if branches:
            union += 1
        if branches > 1:
            overlaps += 1
    return BranchCensus(P, n, total, union, eisenstein, shift_hits, inversion_hits, overlaps)


def local_measure_U_bruteforce(P: Place, n: int, cap: Optional[int] = None) -> LocalMeasure:
    census = local_branch_counts(P, n, cap)
    return LocalMeasure(Fraction(census.union, census.total), P, n)


def _check_truncation(n: int, t: int) -> None:
    _check_degree(n)
    if t < 1:
        raise DomainError(f"Truncation degree must be >= 1, got {t}")


def _place_counts(spec: HolomorphySpec, t: int) -> List[Tuple[int, int]]:
    return [(d, count_places_of_degree(spec.field, d, spec.excluded)) for d in range(1, t + 1)]


def complement_density_truncated(n: int, spec: HolomorphySpec, t: int, max_bits: Optional[int] = None) -> Fraction:
    """prod over P in S with deg P <= t of (1 - mu_P(U_P))"""
    _check_truncation(n, t)
    counts = _place_counts(spec, t)
    max_bits = max_bits if max_bits is not None else get_settings().max_exact_bits
    bits = estimated_bits(counts, spec.q, n + 2)
    if bits > max_bits:
        logger.warning(f"Exact ramified product rejected: ~{bits:.0f} bits exceeds cap {max_bits}")
        raise CapExceededError(
            f"Exact truncation at t={t} needs ~{bits:.0f} bits (cap {max_bits}); use the approximate evaluation"
        )
    product = Fraction(1)
    for d, c in counts:
        if c:
            product *= (1 - local_measure_by_size(spec.q ** d, n)) ** c
    return product


def ramified_density_truncated(n: int, spec: HolomorphySpec, t: int, max_bits: Optional[int] = None) -> Fraction:
    """1 - prod over P in S with deg P <= t of (1 - mu_P(U_P))"""
    return 1 - complement_density_truncated(n, spec, t, max_bits)


def ramified_density_approx(n: int, spec: HolomorphySpec, t: int) -> mpmath.mpf:
    _check_truncation(n, t)
    with mpmath.workdps(MPMATH_DIGITS):
        log_sum = mpmath.mpf(0)
        for d, c in _place_counts(spec, t):
            if c:
                mu = local_measure_by_size(spec.q ** d, n)
                log_sum += c * mpmath.log1p(-mpmath.mpf(mu.numerator) / mu.denominator)
        return 1 - mpmath.exp(log_sum)


# -- text format -------------------------------------------------------------

def format_poly_over_f(f: PolyOverF) -> str:
    """`[x,x,0,1]`, constant coefficient first"""
    return "[" + ",".join(format_rational_function(a) for a in f.coeffs) + "]"


def parse_poly_over_f(field: FieldSpec, text: str) -> PolyOverF:
    cleaned = text.replace(" ", "")
    if not (cleaned.startswith("[") and cleaned.endswith("]")):
        raise UsageError(f"Polynomial over F must be a bracketed coefficient list, got {text!r}")
    items = [item for _, item in split_top_level(cleaned[1:-1], ",")]
    if any(item == "" for item in items):
        raise UsageError(f"Empty coefficient in {text!r}")
    return PolyOverF(tuple(parse_rational_function(field, item) for item in items))
