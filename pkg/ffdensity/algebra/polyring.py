"""Univariate polynomials over F_q"""
import logging
import re
from typing import Dict, Iterator, List, Sequence, Tuple

from ffdensity.algebra.gf import (
    FieldElement,
    FieldSpec,
    format_element,
    parse_element,
    prime_factors,
)
from ffdensity.constants import VARIABLE_SYMBOL
from ffdensity.exceptions import DomainError, UsageError

logger = logging.getLogger(__name__)

# Degree reported for the zero polynomial; stands for minus infinity.
ZERO_DEGREE = -1


class Poly:
    """Dense polynomial with coefficient codes, least-significant first.

    Coefficients never carry trailing zeros, so equality and hashing are
    structural.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldSpec, coeffs: Sequence[int] = ()):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.field = field
        self.coeffs: Tuple[int, ...] = tuple(coeffs)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field: FieldSpec) -> "Poly":
        return cls(field, ())

    @classmethod
    def one(cls, field: FieldSpec) -> "Poly":
        return cls(field, (1,))

    @classmethod
    def constant(cls, field: FieldSpec, code: int) -> "Poly":
        return cls(field, (code,))

    @classmethod
    def x(cls, field: FieldSpec) -> "Poly":
        return cls(field, (0, 1))

    @classmethod
    def monomial(cls, field: FieldSpec, k: int, code: int = 1) -> "Poly":
        return cls(field, [0] * k + [code])

    @classmethod
    def from_elements(cls, field: FieldSpec, elements: Sequence[FieldElement]) -> "Poly":
        for a in elements:
            if a.spec != field:
                raise UsageError("Coefficient from a different field")
        return cls(field, [a.value for a in elements])

    # -- basic properties ---------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def is_monic(self) -> bool:
        return self.leading == 1

    def coefficient(self, k: int) -> FieldElement:
        return FieldElement(self.field, self.coeffs[k] if k < len(self.coeffs) else 0)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)})"

    def __str__(self) -> str:
        return format_poly(self)

    def __reduce__(self):
        return (Poly, (self.field, self.coeffs))

    def _check(self, other: "Poly") -> None:
        if not isinstance(other, Poly) or other.field != self.field:
            raise UsageError("Cannot mix polynomials over different fields")

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        add = self.field.add
        for i, c in enumerate(b):
            out[i] = add(out[i], c)
        return Poly(self.field, out)

    def __neg__(self) -> "Poly":
        neg = self.field.neg
        return Poly(self.field, [neg(c) for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(self.field, ())
        field = self.field
        if field.e == 1:
            p = field.p
            out = [0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        out[i + j] += x * y
            return Poly(field, [c % p for c in out])
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = field.add(out[i + j], field.mul(x, y))
        return Poly(field, out)

    def scale(self, code: int) -> "Poly":
        mul = self.field.mul
        return Poly(self.field, [mul(code, c) for c in self.coeffs])

    def shift_up(self, k: int) -> "Poly":
        """Multiply by x^k"""
        if not self.coeffs:
            return self
        return Poly(self.field, (0,) * k + self.coeffs)

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise DomainError("Negative polynomial power")
        result, base = Poly.one(self.field), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: "Poly") -> Tuple["Poly", "Poly"]:
        self._check(other)
        if other.is_zero():
            raise DomainError("Division by the zero polynomial")
        field = self.field
        rem = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        if len(rem) - 1 < db:
            return Poly(field, ()), self
        inv_lead = field.inv(b[-1])
        quot = [0] * (len(rem) - db)
        if field.e == 1:
            p = field.p
            for k in range(len(rem) - 1, db - 1, -1):
                c = rem[k]
                if c:
                    factor = (c * inv_lead) % p
                    quot[k - db] = factor
                    shift = k - db
                    for i in range(db + 1):
                        rem[shift + i] = (rem[shift + i] - factor * b[i]) % p
        else:
            for k in range(len(rem) - 1, db - 1, -1):
                c = rem[k]
                if c:
                    factor = field.mul(c, inv_lead)
                    quot[k - db] = factor
                    shift = k - db
                    for i in range(db + 1):
                        rem[shift + i] = field.sub(rem[shift + i], field.mul(factor, b[i]))
        return Poly(field, quot), Poly(field, rem[:db])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def divides(self, other: "Poly") -> bool:
        return (other % self).is_zero()

    def eval(self, a: FieldElement) -> FieldElement:
        if a.spec != self.field:
            raise UsageError("Evaluation point from a different field")
        return FieldElement(self.field, self.eval_code(a.value))

    def eval_code(self, a: int) -> int:
        field = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = field.add(field.mul(acc, a), c)
        return acc

    def monic(self) -> "Poly":
        if self.is_zero():
            raise DomainError("The zero polynomial has no monic associate")
        if self.leading == 1:
            return self
        return self.scale(self.field.inv(self.leading))

    def derivative(self) -> "Poly":
        field = self.field
        return Poly(field, [field.mul(field.from_int(k), c) for k, c in enumerate(self.coeffs)][1:])

    def reversed_to(self, degree: int) -> "Poly":
        """x^degree * f(1/x) for degree >= deg f"""
        padded = list(self.coeffs) + [0] * (degree + 1 - len(self.coeffs))
        return Poly(self.field, padded[::-1])


# -- module level operations -------------------------------------------------

def add(f: Poly, g: Poly) -> Poly:
    return f + g


def sub(f: Poly, g: Poly) -> Poly:
    return f - g


def mul(f: Poly, g: Poly) -> Poly:
    return f * g


def poly_divmod(f: Poly, g: Poly) -> Tuple[Poly, Poly]:
    return divmod(f, g)


def evaluate(f: Poly, a: FieldElement) -> FieldElement:
    return f.eval(a)


def gcd(f: Poly, g: Poly) -> Poly:
    """Monic generator of the ideal (f, g)"""
    f._check(g)
    if f.is_zero() and g.is_zero():
        raise DomainError("gcd(0, 0) is undefined")
    while not g.is_zero():
        f, g = g, f % g
    return f.monic()


def extended_gcd(f: Poly, g: Poly) -> Tuple[Poly, Poly, Poly]:
    """(d, s, t) with s*f + t*g = d, d monic"""
    if f.is_zero() and g.is_zero():
        raise DomainError("gcd(0, 0) is undefined")
    field = f.field
    r0, r1 = f, g
    s0, s1 = Poly.one(field), Poly.zero(field)
    t0, t1 = Poly.zero(field), Poly.one(field)
    while not r1.is_zero():
        quot, rem = divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quot * s1
        t0, t1 = t1, t0 - quot * t1
    lead_inv = field.inv(r0.leading)
    return r0.scale(lead_inv), s0.scale(lead_inv), t0.scale(lead_inv)


def inverse_mod(f: Poly, m: Poly) -> Poly:
    d, s, _ = extended_gcd(f % m, m)
    if not d.is_one():
        raise DomainError(f"{f} is not invertible modulo {m}")
    return s % m


def powmod(f: Poly, e: int, m: Poly) -> Poly:
    result = Poly.one(f.field) % m
    base = f % m
    while e:
        if e & 1:
            result = (result * base) % m
        base = (base * base) % m
        e >>= 1
    return result


def is_irreducible(f: Poly) -> bool:
    """Rabin's test: x^(q^n) = x mod f and gcd(x^(q^(n/r)) - x, f) = 1 for primes r | n"""
    n = f.degree
    if n < 1:
        raise DomainError("Irreducibility is only defined for non-constant polynomials")
    if n == 1:
        return True
    f = f.monic()
    q = f.field.q
    x = Poly.x(f.field)
    frob = [x % f]
    for _ in range(n):
        frob.append(powmod(frob[-1], q, f))
    if frob[n] != x % f:
        return False
    for r in prime_factors(n):
        if not gcd(frob[n // r] - x, f).is_one():
            return False
    return True


def poly_from_index(field: FieldSpec, index: int, length: int = -1) -> Poly:
    """Polynomial whose coefficient codes are the base-q digits of index"""
    q = field.q
    coeffs = []
    while index or (length > 0 and len(coeffs) < length):
        index, r = divmod(index, q)
        coeffs.append(r)
        if length > 0 and len(coeffs) == length and index:
            raise UsageError("Polynomial index out of range")
    return Poly(field, coeffs)


def poly_index(f: Poly) -> int:
    q = f.field.q
    index = 0
    for c in reversed(f.coeffs):
        index = index * q + c
    return index


def enumerate_polys(field: FieldSpec, max_degree: int) -> Iterator[Poly]:
    """All polynomials of degree <= max_degree, in canonical order"""
    for index in range(field.q ** (max_degree + 1)):
        yield poly_from_index(field, index)


def enumerate_monic(field: FieldSpec, d: int) -> Iterator[Poly]:
    base = field.q ** d
    for index in range(base):
        yield poly_from_index(field, index + base)


def monic_irreducibles(field: FieldSpec, d: int) -> List[Poly]:
    if d < 1:
        raise DomainError(f"Degree must be >= 1, got {d}")
    return [f for f in enumerate_monic(field, d) if is_irreducible(f)]


def moebius(n: int) -> int:
    if n < 1:
        raise DomainError("Moebius function needs n >= 1")
    result = 1
    for r in prime_factors(n):
        if (n // r) % r == 0:
            return 0
        result = -result
    return result


def count_monic_irreducibles(q: int, d: int) -> int:
    """Necklace count (1/d) * sum_{e | d} mu(e) q^(d/e)"""
    if d < 1:
        raise DomainError(f"Degree must be >= 1, got {d}")
    total = sum(moebius(e) * q ** (d // e) for e in range(1, d + 1) if d % e == 0)
    return total // d


def distinct_degree_factors(f: Poly) -> Dict[int, Poly]:
    """{d: product of the distinct monic irreducible factors of f of degree d}

    Works for any nonzero f; repeated factors are reported once.
    """
    if f.is_zero():
        raise DomainError("Distinct-degree factorization of the zero polynomial")
    field = f.field
    rest = f.monic()
    x = Poly.x(field)
    result: Dict[int, Poly] = {}
    h = x
    d = 0
    while rest.degree >= 1:
        d += 1
        if rest.degree < 2 * d:
            # no factor of degree < d is left, so rest is irreducible
            result[rest.degree] = rest
            break
        h = powmod(h, field.q, rest)
        g = gcd(h - x, rest)
        if not g.is_one():
            result[d] = g
            common = g
            while not common.is_one():
                rest = rest // common
                common = gcd(rest, common)
            if rest.degree >= 1:
                h = h % rest
    return result


def factor_degrees(f: Poly) -> Dict[int, int]:
    """{d: number of distinct irreducible factors of degree d}"""
    return {d: g.degree // d for d, g in distinct_degree_factors(f).items()}


def strip_factors(f: Poly, divisors: Sequence[Poly]) -> Poly:
    """Remove every power of each divisor from f"""
    for p in divisors:
        if p.degree < 1:
            continue
        quot, rem = divmod(f, p)
        while rem.is_zero() and not f.is_zero():
            f = quot
            quot, rem = divmod(f, p)
    return f


# -- text format -------------------------------------------------------------

def _format_coeff(field: FieldSpec, code: int) -> str:
    text = format_element(field, code)
    if field.e > 1 and ("+" in text or "*" in text):
        return f"({text})"
    return text


def format_poly(f: Poly) -> str:
    """Human form, e.g. `x^3+x+1`"""
    if f.is_zero():
        return "0"
    terms = []
    for k in range(f.degree, -1, -1):
        c = f.coeffs[k]
        if c == 0:
            continue
        if k == 0:
            terms.append(_format_coeff(f.field, c))
            continue
        mono = VARIABLE_SYMBOL if k == 1 else f"{VARIABLE_SYMBOL}^{k}"
        terms.append(mono if c == 1 else f"{_format_coeff(f.field, c)}*{mono}")
    return "+".join(terms)


def format_poly_list(f: Poly) -> str:
    """Coefficient-list form, e.g. `[1,1,0,1]`"""
    return "[" + ",".join(format_element(f.field, c) for c in f.coeffs) + "]" if f.coeffs else "[0]"


def split_top_level(text: str, separators: str) -> List[Tuple[str, str]]:
    """Split on separators outside parentheses, keeping the separator before each part"""
    parts: List[Tuple[str, str]] = []
    depth, start, sep = 0, 0, ""
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise UsageError(f"Unbalanced parentheses in {text!r}")
        elif ch in separators and depth == 0 and i > 0 and text[i - 1] not in "*^(":
            parts.append((sep, text[start:i]))
            sep, start = ch, i + 1
    if depth != 0:
        raise UsageError(f"Unbalanced parentheses in {text!r}")
    parts.append((sep, text[start:]))
    return parts


_MONO_RE = re.compile(r"^x(?:\^(\d+))?$")


def parse_poly(field: FieldSpec, text: str) -> Poly:
    """Parse `x^3+x+1`, `(t+1)*x^2+x` or the list form `[1,1,0,1]`"""
    cleaned = text.replace(" ", "")
    if not cleaned:
        raise UsageError("Empty polynomial text")
    if cleaned.startswith("[") and cleaned.endswith("]"):
        body = cleaned[1:-1]
        if not body:
            return Poly.zero(field)
        items = [s for _, s in split_top_level(body, ",")]
        return Poly(field, [parse_element(field, item) for item in items])
    if cleaned.startswith("(") and cleaned.endswith(")") and _balanced_outer(cleaned):
        return parse_poly(field, cleaned[1:-1])
    coeffs: List[int] = []
    sign_first = ""
    if cleaned[0] in "+-":
        sign_first, cleaned = cleaned[0], cleaned[1:]
    for sep, term in split_top_level(cleaned, "+-"):
        sign = sep or sign_first
        sign_first = ""
        if not term:
            raise UsageError(f"Malformed polynomial text {text!r}")
        coeff_text, k = _split_term(term, text)
        code = parse_element(field, coeff_text)
        if sign == "-":
            code = field.neg(code)
        while len(coeffs) <= k:
            coeffs.append(0)
        coeffs[k] = field.add(coeffs[k], code)
    return Poly(field, coeffs)


def _balanced_outer(text: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0 and i < len(text) - 1:
            return False
    return True


def _split_term(term: str, text: str) -> Tuple[str, int]:
    # coefficient followed by an optional x-monomial
    depth = 0
    for i, ch in enumerate(term):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == VARIABLE_SYMBOL and depth == 0:
            mono = _MONO_RE.match(term[i:])
            if not mono:
                raise UsageError(f"Malformed monomial in {text!r}")
            coeff = term[:i].rstrip("*")
            return (coeff or "1"), int(mono.group(1) or 1)
    return term, 0
