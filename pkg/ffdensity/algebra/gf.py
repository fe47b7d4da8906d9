"""Finite fields F_q, q = p^e.

Elements are stored as integer codes whose base-p digits are the coefficient
vector in the power basis of the modulus, least-significant digit first.
Enumeration order everywhere downstream is increasing code.
"""
import logging
import re
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ffdensity.constants import GENERATOR_SYMBOL, MAX_FIELD_SIZE
from ffdensity.exceptions import DomainError, UsageError

logger = logging.getLogger(__name__)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def prime_factors(n: int) -> List[int]:
    """Distinct prime factors of n >= 1, increasing"""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> Tuple[int, int]:
    """Split q = p^e, raising DomainError when q is not a prime power"""
    if q < 2:
        raise DomainError(f"q must be a prime power, got {q}")
    factors = prime_factors(q)
    if len(factors) != 1:
        raise DomainError(f"q must be a prime power, got {q}")
    p = factors[0]
    e = 0
    while q > 1:
        q //= p
        e += 1
    return p, e


# Dense polynomials over F_p as int lists, least-significant first. Only used to
# validate and search moduli; general polynomial arithmetic lives in polyring.

def _trim(a: List[int]) -> List[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _rem_mod_p(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        factor = (a[-1] * inv_lead) % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * c) % p
        _trim(a)
    return a


def _is_irreducible_mod_p(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= e/2"""
    e = len(modulus) - 1
    for d in range(1, e // 2 + 1):
        for index in range(p ** d):
            divisor = []
            for _ in range(d):
                index, r = divmod(index, p)
                divisor.append(r)
            divisor.append(1)
            if not _rem_mod_p(modulus, divisor, p):
                return False
    return True


def default_modulus(p: int, e: int) -> Tuple[int, ...]:
    """First monic irreducible of degree e over F_p in code order"""
    for index in range(p ** e):
        coeffs = []
        for _ in range(e):
            index, r = divmod(index, p)
            coeffs.append(r)
        coeffs.append(1)
        if coeffs[0] != 0 and _is_irreducible_mod_p(coeffs, p):
            return tuple(coeffs)
    raise DomainError(f"No irreducible polynomial of degree {e} over F_{p}")  # unreachable for e >= 1


class FieldSpec:
    """The finite field F_p[t]/(modulus) with q = p^e elements"""

    __slots__ = ("p", "e", "modulus", "q", "_exp", "_log", "_add_table")

    def __init__(self, p: int, e: int = 1, modulus: Optional[Sequence[int]] = None):
        if not is_prime(p):
            raise DomainError(f"Characteristic must be prime, got {p}")
        if e < 1:
            raise DomainError(f"Extension degree must be >= 1, got {e}")
        if p ** e > MAX_FIELD_SIZE:
            raise DomainError(f"Field size {p}^{e} exceeds supported maximum {MAX_FIELD_SIZE}")
        self.p = p
        self.e = e
        self.q = p ** e
        if e == 1:
            self.modulus: Tuple[int, ...] = (0, 1)
        else:
            if modulus is None:
                modulus = default_modulus(p, e)
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != e + 1 or modulus[-1] != 1:
                raise DomainError(f"Modulus must be monic of degree {e}: {modulus}")
            if not _is_irreducible_mod_p(modulus, p):
                raise DomainError(f"Modulus {modulus} is reducible over F_{p}")
            self.modulus = modulus
        self._exp: Optional[List[int]] = None
        self._log: Optional[List[int]] = None
        self._add_table: Optional[List[List[int]]] = None
        if e > 1:
            self._build_tables()
        logger.debug(f"FieldSpec created: p={p}, e={e}, modulus={self.modulus}")

    @classmethod
    def from_q(cls, q: int, modulus: Optional[Sequence[int]] = None) -> "FieldSpec":
        p, e = prime_power(q)
        return cls(p, e, modulus)

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, FieldSpec) and self.p == other.p and self.e == other.e
                and self.modulus == other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    def __repr__(self) -> str:
        if self.e == 1:
            return f"FieldSpec(q={self.q})"
        return f"FieldSpec(q={self.q}, modulus={format_modulus(self.modulus)})"

    def __reduce__(self):
        return (FieldSpec, (self.p, self.e, self.modulus))

    @property
    def is_prime_field(self) -> bool:
        return self.e == 1

    # -- codes <-> coefficient vectors --------------------------------------

    def digits(self, code: int) -> Tuple[int, ...]:
        out = []
        for _ in range(self.e):
            code, r = divmod(code, self.p)
            out.append(r)
        return tuple(out)

    def from_digits(self, digits: Sequence[int]) -> int:
        code = 0
        for c in reversed(digits):
            code = code * self.p + (c % self.p)
        return code

    # -- table construction for extension fields ----------------------------

    def _slow_mul(self, a: int, b: int) -> int:
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        return self.from_digits(_rem_mod_p(prod, self.modulus, self.p) + [0] * self.e)

    def _build_tables(self) -> None:
        order = self.q - 1
        primes = prime_factors(order)

        def slow_pow(a: int, n: int) -> int:
            result, base = 1, a
            while n:
                if n & 1:
                    result = self._slow_mul(result, base)
                base = self._slow_mul(base, base)
                n >>= 1
            return result

        generator = next(g for g in range(2, self.q)
                         if all(slow_pow(g, order // r) != 1 for r in primes))
        exp = [1] * (2 * order)
        log = [0] * self.q
        for i in range(1, order):
            exp[i] = self._slow_mul(exp[i - 1], generator)
            log[exp[i]] = i
        for i in range(order, 2 * order):
            exp[i] = exp[i - order]
        self._exp, self._log = exp, log
        if self.q <= 256:
            self._add_table = [[self._digit_add(a, b) for b in range(self.q)] for a in range(self.q)]

    def _digit_add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        p = self.p
        code, place = 0, 1
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            code += ((ra + rb) % p) * place
            place *= p
        return code

    # -- arithmetic on codes ------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self._add_table is not None:
            return self._add_table[a][b]
        return self._digit_add(a, b)

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self.from_digits([-c for c in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DomainError("Inverse of zero in a finite field")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def power(self, a: int, n: int) -> int:
        if n < 0:
            return self.power(self.inv(a), -n)
        if a == 0:
            return 1 if n == 0 else 0
        if self.e == 1:
            return pow(a, n, self.p)
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_q"""
        return n % self.p

    # -- elements -----------------------------------------------------------

    def element(self, code: int) -> "FieldElement":
        if not 0 <= code < self.q:
            raise UsageError(f"Element code {code} out of range for F_{self.q}")
        return FieldElement(self, code)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def elements(self) -> List["FieldElement"]:
        return [FieldElement(self, c) for c in range(self.q)]


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    value: int

    @property
    def coeffs(self) -> Tuple[int, ...]:
        return self.spec.digits(self.value)

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement) or other.spec != self.spec:
            raise UsageError("Cannot mix elements of different fields")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.spec, self.spec.add(self.value, other.value))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.spec, self.spec.sub(self.value, other.value))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.spec, self.spec.mul(self.value, other.value))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.neg(self.value))

    def __pow__(self, n: int) -> "FieldElement":
        return FieldElement(self.spec, self.spec.power(self.value, n))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.spec, self.spec.inv(self.value))

    def is_zero(self) -> bool:
        return self.value == 0

    def __str__(self) -> str:
        return format_element(self.spec, self.value)


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def neg(a: FieldElement) -> FieldElement:
    return -a


def inverse(a: FieldElement) -> FieldElement:
    return a.inverse()


def power(a: FieldElement, n: int) -> FieldElement:
    return a ** n


def enumerate_elements(spec: FieldSpec) -> List[FieldElement]:
    return spec.elements()


# -- text format ---------------------------------------------------------------

def _format_digits(digits: Sequence[int], symbol: str) -> str:
    terms = []
    for k in range(len(digits) - 1, -1, -1):
        c = digits[k]
        if c == 0:
            continue
        if k == 0:
            terms.append(str(c))
        else:
            mono = symbol if k == 1 else f"{symbol}^{k}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return "+".join(terms) if terms else "0"


def format_modulus(modulus: Sequence[int]) -> str:
    return _format_digits(modulus, GENERATOR_SYMBOL)


def format_element(spec: FieldSpec, code: int) -> str:
    if spec.e == 1:
        return str(code)
    return _format_digits(spec.digits(code), GENERATOR_SYMBOL)


_TERM_RE = re.compile(r"^(?:(\d+)\*?)?(?:([a-z])(?:\^(\d+))?)?$")


def parse_digits(text: str, p: int, symbol: str) -> List[int]:
    """Parse a polynomial over F_p in `symbol` into a digit list"""
    cleaned = text.replace(" ", "")
    if cleaned.startswith("(") and cleaned.endswith(")"):
        cleaned = cleaned[1:-1]
    if not cleaned:
        raise UsageError("Empty element text")
    digits: List[int] = []
    for sign, body in re.findall(r"([+-]?)([^+-]+)", cleaned):
        m = _TERM_RE.match(body)
        if not m or (m.group(2) is not None and m.group(2) != symbol) or body == "":
            raise UsageError(f"Malformed term {body!r} in {text!r}")
        coeff = int(m.group(1)) if m.group(1) is not None else 1
        k = 0 if m.group(2) is None else int(m.group(3) or 1)
        if sign == "-":
            coeff = -coeff
        while len(digits) <= k:
            digits.append(0)
        digits[k] = (digits[k] + coeff) % p
    if "".join(s + b for s, b in re.findall(r"([+-]?)([^+-]+)", cleaned)) != cleaned:
        raise UsageError(f"Malformed element text {text!r}")
    return digits


def parse_element(spec: FieldSpec, text: str) -> int:
    """Parse an element code from `3` (prime fields) or `t+1` (extension fields)"""
    digits = parse_digits(text, spec.p, GENERATOR_SYMBOL)
    if spec.e == 1:
        if len(digits) > 1 and any(digits[1:]):
            raise UsageError(f"Generator symbol used in prime field element {text!r}")
        return digits[0] if digits else 0
    if len(digits) > spec.e:
        # reduce by the modulus
        digits = _rem_mod_p(digits, spec.modulus, spec.p)
    return spec.from_digits(list(digits) + [0] * (spec.e - len(digits)))
