"""Rectangular unimodular matrices over H_S and the density of unimodular k x m matrices

M is unimodular iff its maximal minors generate H_S. H_S is a principal ideal
domain here, so the test reduces to: no place of S divides every minor.
"""
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ffdensity.algebra.gf import FieldSpec
from ffdensity.algebra.holomorphy import HolomorphySpec, in_holomorphy_ring
from ffdensity.algebra.places import (
    Place,
    RationalFunction,
    ResidueField,
    count_places_of_degree,
    format_place,
    format_rational_function,
    parse_rational_function,
    valuation,
)
from ffdensity.algebra.polyring import Poly, gcd, split_top_level, strip_factors
from ffdensity.config.settings import get_settings
from ffdensity.densities.zeta import LPolynomial, estimated_bits, zeta_H
from ffdensity.exceptions import CapExceededError, DomainError, UsageError

logger = logging.getLogger(__name__)

Row = Tuple[RationalFunction, ...]


def _check_shape(k: int, m: int) -> None:
    if not 1 <= k < m:
        raise DomainError(f"Need 1 <= k < m, got k={k}, m={m}")


@dataclass(frozen=True)
class PolyMatrix:
    entries: Tuple[Row, ...]

    def __post_init__(self):
        entries = tuple(tuple(row) for row in self.entries)
        if not entries or not entries[0]:
            raise UsageError("Matrix must have at least one row and one column")
        if any(len(row) != len(entries[0]) for row in entries):
            raise UsageError("Matrix rows have different lengths")
        _check_shape(len(entries), len(entries[0]))
        field = entries[0][0].field
        if any(u.field != field for row in entries for u in row):
            raise UsageError("Matrix entries come from different fields")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_flat(cls, values: Sequence[RationalFunction], k: int, m: int) -> "PolyMatrix":
        if len(values) != k * m:
            raise UsageError(f"Expected {k * m} entries for a {k}x{m} matrix, got {len(values)}")
        return cls(tuple(tuple(values[i * m:(i + 1) * m]) for i in range(k)))

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def m(self) -> int:
        return len(self.entries[0])

    @property
    def field(self) -> FieldSpec:
        return self.entries[0][0].field

    def validate_in(self, spec: HolomorphySpec) -> None:
        for row in self.entries:
            for u in row:
                if not in_holomorphy_ring(u, spec):
                    raise UsageError(f"Entry {format_rational_function(u)} is not in H_S")

    def column_permuted(self, permutation: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(tuple(tuple(row[c] for c in permutation) for row in self.entries))

    def row_scaled(self, i: int, u: RationalFunction) -> "PolyMatrix":
        rows = list(self.entries)
        rows[i] = tuple(u * v for v in rows[i])
        return PolyMatrix(tuple(rows))

    def __str__(self) -> str:
        return format_matrix(self)


def _cofactor_det(rows: List[List[RationalFunction]]) -> RationalFunction:
    if len(rows) == 1:
        return rows[0][0]
    det = RationalFunction.zero(rows[0][0].field)
    for c, pivot in enumerate(rows[0]):
        if pivot.is_zero():
            continue
        minor = [row[:c] + row[c + 1:] for row in rows[1:]]
        term = pivot * _cofactor_det(minor)
        det = det - term if c % 2 else det + term
    return det


def _bareiss_det(rows: List[List[RationalFunction]]) -> RationalFunction:
    """Fraction-free elimination; exact since every division is by a previous pivot"""
    a = [list(r) for r in rows]
    size = len(a)
    field = a[0][0].field
    sign = 1
    previous = RationalFunction.one(field)
    for i in range(size - 1):
        if a[i][i].is_zero():
            swap = next((r for r in range(i + 1, size) if not a[r][i].is_zero()), None)
            if swap is None:
                return RationalFunction.zero(field)
            a[i], a[swap] = a[swap], a[i]
            sign = -sign
        for r in range(i + 1, size):
            for c in range(i + 1, size):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) / previous
        previous = a[i][i]
    det = a[-1][-1]
    return det if sign > 0 else -det


def determinant(rows: List[List[RationalFunction]]) -> RationalFunction:
    if len(rows) <= 4:
        return _cofactor_det(rows)
    return _bareiss_det(rows)


def maximal_minors(M: PolyMatrix) -> List[RationalFunction]:
    """All k x k minors, columns in lexicographic order"""
    minors = []
    for columns in itertools.combinations(range(M.m), M.k):
        minors.append(determinant([[row[c] for c in columns] for row in M.entries]))
    return minors


def _is_unimodular_minors(minors: Sequence[RationalFunction], spec: HolomorphySpec) -> bool:
    g: Optional[Poly] = None
    for u in minors:
        if u.is_zero():
            continue
        g = u.num.monic() if g is None else gcd(g, u.num)
    if g is None:
        return False
    if not strip_factors(g, spec.finite_excluded).is_constant():
        return False
    if not spec.infinity_excluded:
        infinity = Place.infinity(spec.field)
        if all(valuation(u, infinity) >= 1 for u in minors):
            return False
    return True


def is_unimodular(M: PolyMatrix, spec: HolomorphySpec, validate: bool = True) -> bool:
    """The maximal minors generate H_S; entries outside H_S are a UsageError unless validate is off"""
    if validate:
        M.validate_in(spec)
    return _is_unimodular_minors(maximal_minors(M), spec)


def rank_mod_place(M: PolyMatrix, P: Place) -> int:
    """Rank over O_P/P of the reduced matrix; entries must be integral at P"""
    residue = ResidueField(P)
    for row in M.entries:
        for u in row:
            if valuation(u, P) < 0:
                raise DomainError(f"Entry {format_rational_function(u)} is not integral at {format_place(P)}")
    return residue.rank([[residue.reduce(u) for u in row] for row in M.entries])


def local_measure_by_size(residue_size: int, k: int, m: int) -> Fraction:
    """1 - prod_{i<k} (1 - Q^-(m-i)) for a residue field of size Q"""
    _check_shape(k, m)
    full_rank = Fraction(1)
    for i in range(k):
        full_rank *= 1 - Fraction(1, residue_size ** (m - i))
    return 1 - full_rank


def local_nonunimodular_measure(P: Place, k: int, m: int) -> Fraction:
    return local_measure_by_size(P.field.q ** P.degree, k, m)


class _RankCensus:
    """Counts rank-deficient k x m matrices over a residue field, row by row

    States are the reduced row echelon forms of the span of the rows chosen so
    far, so every matrix is counted once while equal spans share work.
    """

    def __init__(self, residue: ResidueField, k: int, m: int):
        self.residue = residue
        self.k = k
        self.m = m
        self.vectors = list(itertools.product(range(residue.size), repeat=m))
        self.memo: Dict[Tuple[Tuple[Tuple[int, ...], ...], int], int] = {}

    def _insert(self, basis: Tuple[Tuple[int, ...], ...], v: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
        R = self.residue
        v = list(v)
        for row in basis:
            pivot = next(i for i, c in enumerate(row) if c)
            if v[pivot]:
                factor = v[pivot]
                v = [R.sub(a, R.mul(factor, b)) for a, b in zip(v, row)]
        lead = next((i for i, c in enumerate(v) if c), None)
        if lead is None:
            return basis
        inv = R.inv(v[lead])
        v = [R.mul(inv, a) for a in v]
        rows = []
        for row in basis:
            if row[lead]:
                factor = row[lead]
                row = tuple(R.sub(a, R.mul(factor, b)) for a, b in zip(row, v))
            rows.append(row)
        rows.append(tuple(v))
        rows.sort(key=lambda r: next(i for i, c in enumerate(r) if c))
        return tuple(rows)

    def deficient(self, basis: Tuple[Tuple[int, ...], ...] = (), rows_left: Optional[int] = None) -> int:
        rows_left = self.k if rows_left is None else rows_left
        if rows_left == 0:
            return 1 if len(basis) < self.k else 0
        if len(basis) + rows_left < self.k:
            return len(self.vectors) ** rows_left
        key = (basis, rows_left)
        if key not in self.memo:
            self.memo[key] = sum(self.deficient(self._insert(basis, v), rows_left - 1) for v in self.vectors)
        return self.memo[key]


def local_nonunimodular_bruteforce(P: Place, k: int, m: int, cap: Optional[int] = None) -> Fraction:
    """Share of rank-deficient k x m matrices over O_P/P, by exhaustive census"""
    _check_shape(k, m)
    residue = ResidueField(P)
    total = residue.size ** (k * m)
    cap = cap if cap is not None else get_settings().max_bruteforce
    if total > cap:
        logger.warning(f"Rank census rejected at {format_place(P)}: {total} matrices exceed cap {cap}")
        raise CapExceededError(f"Rank census at {format_place(P)} covers {total} matrices, above the cap {cap}")
    return Fraction(_RankCensus(residue, k, m).deficient(), total)


def unimodular_density_exact(spec: HolomorphySpec, k: int, m: int, L: Optional[LPolynomial] = None) -> Fraction:
    """prod_{i=m-k+1}^{m} 1/zeta_H(i)"""
    _check_shape(k, m)
    density = Fraction(1)
    for i in range(m - k + 1, m + 1):
        density /= zeta_H(i, spec, L)
    return density


def unimodular_density_truncated(spec: HolomorphySpec, k: int, m: int, t: int,
                                 max_bits: Optional[int] = None) -> Fraction:
    """prod over P in S with deg P <= t of (1 - mu_P), mu_P the non-full-rank measure"""
    _check_shape(k, m)
    if t < 1:
        raise DomainError(f"Truncation degree must be >= 1, got {t}")
    counts = [(d, count_places_of_degree(spec.field, d, spec.excluded)) for d in range(1, t + 1)]
    max_bits = max_bits if max_bits is not None else get_settings().max_exact_bits
    bits = estimated_bits(counts, spec.q, m * k)
    if bits > max_bits:
        raise CapExceededError(f"Exact truncation at t={t} needs ~{bits:.0f} bits (cap {max_bits})")
    product = Fraction(1)
    for d, c in counts:
        if c:
            product *= (1 - local_measure_by_size(spec.q ** d, k, m)) ** c
    return product


# -- text format -------------------------------------------------------------

def format_matrix(M: PolyMatrix) -> str:
    """`x,x+1;0,1`"""
    return ";".join(",".join(format_rational_function(u) for u in row) for row in M.entries)


def parse_matrix(field: FieldSpec, text: str) -> PolyMatrix:
    cleaned = text.replace(" ", "")
    if cleaned.startswith("[") and cleaned.endswith("]"):
        cleaned = cleaned[1:-1]
    rows = []
    for _, row_text in split_top_level(cleaned, ";"):
        items = [item for _, item in split_top_level(row_text, ",")]
        if any(item == "" for item in items):
            raise UsageError(f"Empty matrix entry in {text!r}")
        rows.append(tuple(parse_rational_function(field, item) for item in items))
    return PolyMatrix(tuple(rows))
