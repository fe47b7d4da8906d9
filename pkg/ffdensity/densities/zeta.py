"""Zeta functions of F_q(x)-type function fields and of holomorphy rings, at integers s >= 2"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath

from ffdensity.algebra.holomorphy import HolomorphySpec
from ffdensity.algebra.places import count_places_of_degree
from ffdensity.config.settings import get_settings
from ffdensity.constants import MPMATH_DIGITS
from ffdensity.exceptions import CapExceededError, DomainError, UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LPolynomial:
    """Integer numerator c_0 + c_1 t + ... + c_2g t^2g of a zeta function, with c_0 = 1"""

    coeffs: Tuple[int, ...] = (1,)

    def __post_init__(self):
        coeffs = [int(c) for c in self.coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs or coeffs[0] != 1:
            raise DomainError(f"L-polynomial must satisfy L(0) = 1, got coefficients {self.coeffs}")
        if (len(coeffs) - 1) % 2:
            raise DomainError(f"L-polynomial degree must be even (2g), got {len(coeffs) - 1}")
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def one(cls) -> "LPolynomial":
        return cls((1,))

    @classmethod
    def parse(cls, text: str) -> "LPolynomial":
        """Comma-separated integers, constant first: `1,0,2`"""
        try:
            coeffs = [int(chunk) for chunk in text.replace(" ", "").split(",") if chunk != ""]
        except ValueError as e:
            raise UsageError(f"Malformed L-polynomial {text!r}") from e
        if not coeffs:
            raise UsageError("Empty L-polynomial")
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def genus(self) -> int:
        return self.degree // 2

    def evaluate(self, t: Fraction) -> Fraction:
        value = Fraction(0)
        for c in reversed(self.coeffs):
            value = value * t + c
        return value

    def __str__(self) -> str:
        return ",".join(str(c) for c in self.coeffs)


def _check_argument(s: int) -> None:
    if not isinstance(s, int) or s <= 1:
        raise DomainError(f"Zeta values are only supported at integers s >= 2, got {s!r}")


def zeta_F(s: int, q: int, L: Optional[LPolynomial] = None) -> Fraction:
    """L(q^-s) / ((1 - q^-s)(1 - q^(1-s)))"""
    _check_argument(s)
    L = L or LPolynomial.one()
    u = Fraction(1, q ** s)
    return L.evaluate(u) / ((1 - u) * (1 - Fraction(1, q ** (s - 1))))


def excluded_factor(s: int, spec: HolomorphySpec) -> Fraction:
    """prod over R in T of (1 - q^(-deg R * s))"""
    factor = Fraction(1)
    for R in spec.excluded:
        factor *= 1 - Fraction(1, spec.q ** (R.degree * s))
    return factor


def zeta_H(s: int, spec: HolomorphySpec, L: Optional[LPolynomial] = None) -> Fraction:
    """zeta_F(s) with the Euler factors of the excluded places removed"""
    return zeta_F(s, spec.q, L) * excluded_factor(s, spec)


def _place_counts(spec: HolomorphySpec, t: int) -> List[Tuple[int, int]]:
    return [(d, count_places_of_degree(spec.field, d, spec.excluded)) for d in range(1, t + 1)]


def _check_truncation(s: int, t: int) -> None:
    _check_argument(s)
    if t < 1:
        raise DomainError(f"Truncation degree must be >= 1, got {t}")


def estimated_bits(counts: Sequence[Tuple[int, int]], q: int, exponent: int) -> float:
    """Rough bit size of prod (1 - q^(-d*exponent))^(+-count)"""
    return sum(c * d * exponent for d, c in counts) * math.log2(q)


def zeta_H_euler_truncated(s: int, spec: HolomorphySpec, t: int, max_bits: Optional[int] = None) -> Fraction:
    """prod over P in S with deg P <= t of (1 - q^(-deg P * s))^-1, exactly"""
    _check_truncation(s, t)
    counts = _place_counts(spec, t)
    max_bits = max_bits if max_bits is not None else get_settings().max_exact_bits
    bits = estimated_bits(counts, spec.q, s)
    if bits > max_bits:
        logger.warning(f"Exact Euler product rejected: ~{bits:.0f} bits exceeds cap {max_bits}")
        raise CapExceededError(
            f"Exact truncation at t={t} needs ~{bits:.0f} bits (cap {max_bits}); use the approximate evaluation"
        )
    product = Fraction(1)
    for d, c in counts:
        product *= (1 - Fraction(1, spec.q ** (d * s))) ** c
    return 1 / product


def zeta_H_euler_truncated_approx(s: int, spec: HolomorphySpec, t: int) -> mpmath.mpf:
    """The same truncated product in 50-digit floating point"""
    _check_truncation(s, t)
    with mpmath.workdps(MPMATH_DIGITS):
        log_sum = mpmath.mpf(0)
        for d, c in _place_counts(spec, t):
            if c:
                log_sum -= c * mpmath.log1p(-mpmath.power(spec.q, -d * s))
        return +mpmath.exp(log_sum)


def euler_tail_bound(s: int, spec: HolomorphySpec, t: int) -> Fraction:
    """Upper bound for log(zeta_H(s) / truncation at t)

    Uses #places of degree d <= q^d + 1 and -log(1 - y) <= 2y for y <= 1/2, summed as
    two geometric series over d > t.
    """
    _check_truncation(s, t)
    q = Fraction(spec.q)
    ratio_main = q ** (1 - s)
    ratio_inf = q ** (-s)
    head = ratio_main ** (t + 1) / (1 - ratio_main)
    tail = ratio_inf ** (t + 1) / (1 - ratio_inf)
    return 2 * (head + tail)
