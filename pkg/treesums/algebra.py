# Exact Algebra
# Rationals, polynomials in q and truncated power series in t

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import Poly, PolynomialError, QQ, Rational, Symbol, ff
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

logger = logging.getLogger(__name__)

# Scalars are Python's exact rationals: normalized, denominator > 0, zero is 0/1.
BigRational = Fraction

q_symbol = Symbol("q")

_TERM = r"(?:\d+(?:/\d+)?(?:\*q(?:\^\d+)?)?|q(?:\^\d+)?)"
_GRAMMAR = re.compile(rf"[+-]?{_TERM}(?:[+-]{_TERM})*")
_ZERO_DENOMINATOR = re.compile(r"/0+(?!\d)")
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


class TreeSumsError(Exception):
    """Base class for errors raised by treesums."""


class RingMismatchError(TreeSumsError):
    """Two series over different coefficient rings were combined."""


class SeriesDomainError(TreeSumsError):
    """A series operation was applied outside its domain."""


class SeedError(TreeSumsError):
    """Recursion seeds are inconsistent with the recursion."""


class PolynomialParseError(TreeSumsError, ValueError):
    """A polynomial string does not follow the c*q^k grammar."""


Scalar = Union[int, Fraction]


def to_rational(value: Scalar) -> Rational:
    value = Fraction(value)
    return Rational(value.numerator, value.denominator)


def to_fraction(value) -> Fraction:
    """sympy Rational (or Integer) to Fraction."""
    return Fraction(int(value.p), int(value.q))


class QPolynomial:
    """Polynomial in q over the rationals, backed by ``sympy.Poly`` over QQ.

    ``coeffs[i]`` is the coefficient of q^i as a Fraction; the last stored
    coefficient is nonzero and the zero polynomial stores nothing.
    Instances are immutable.
    """

    __slots__ = ("poly", "coeffs")

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        values = [to_rational(c) for c in coeffs]
        self._assign(Poly.from_list(values[::-1] or [0], q_symbol, domain=QQ))

    def _assign(self, poly: Poly) -> None:
        values = [to_fraction(c) for c in reversed(poly.all_coeffs())]
        while values and values[-1] == 0:
            values.pop()
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "coeffs", tuple(values))

    def __setattr__(self, name, value):
        raise AttributeError("QPolynomial is immutable")

    # --- constructors ---

    @classmethod
    def from_poly(cls, poly: Poly) -> "QPolynomial":
        result = cls.__new__(cls)
        result._assign(poly if poly.get_domain() == QQ else poly.set_domain(QQ))
        return result

    @classmethod
    def from_expr(cls, expr) -> "QPolynomial":
        """Any sympy expression that is a polynomial in q."""
        try:
            return cls.from_poly(Poly(expr, q_symbol, domain=QQ))
        except PolynomialError as e:
            raise PolynomialParseError(f"{expr} is not a polynomial in q") from e

    @classmethod
    def zero(cls) -> "QPolynomial":
        return cls()

    @classmethod
    def one(cls) -> "QPolynomial":
        return cls((1,))

    @classmethod
    def constant(cls, value: Scalar) -> "QPolynomial":
        return cls((value,))

    @classmethod
    def q(cls) -> "QPolynomial":
        return cls((0, 1))

    @classmethod
    def monomial(cls, coefficient: Scalar, power: int) -> "QPolynomial":
        if power < 0:
            raise ValueError("power must be non-negative")
        return cls([0] * power + [coefficient])

    @classmethod
    def from_terms(cls, terms: dict) -> "QPolynomial":
        """Build from a {power: coefficient} mapping."""
        if any(power < 0 for power in terms):
            raise ValueError("power must be non-negative")
        return cls.from_poly(Poly.from_dict(
            {(power,): to_rational(c) for power, c in terms.items()} or {(0,): 0},
            q_symbol, domain=QQ,
        ))

    def as_expr(self):
        return self.poly.as_expr()

    # --- inspection ---

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def coefficient(self, power: int) -> Fraction:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return Fraction(0)

    @property
    def constant_term(self) -> Fraction:
        return self.coefficient(0)

    def is_even(self) -> bool:
        """True when only even powers of q occur."""
        return all(c == 0 for c in self.coeffs[1::2])

    def is_palindromic(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    def has_nonnegative_integer_coefficients(self) -> bool:
        return all(c.denominator == 1 and c >= 0 for c in self.coeffs)

    def evaluate(self, value: Scalar) -> Fraction:
        return to_fraction(self.poly.eval(to_rational(value)))

    __call__ = evaluate

    # --- arithmetic ---

    @staticmethod
    def _coerce(other) -> Optional["QPolynomial"]:
        if isinstance(other, QPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return QPolynomial((other,))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QPolynomial.from_poly(self.poly + other.poly)

    __radd__ = __add__

    def __neg__(self) -> "QPolynomial":
        return QPolynomial.from_poly(-self.poly)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QPolynomial.from_poly(self.poly - other.poly)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QPolynomial.from_poly(other.poly - self.poly)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return QPolynomial.from_poly(self.poly * other.poly)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "QPolynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a non-negative integer")
        return QPolynomial.from_poly(self.poly ** exponent)

    def divmod(self, divisor: "QPolynomial") -> Tuple["QPolynomial", "QPolynomial"]:
        """Euclidean division over the rationals."""
        divisor = self._coerce(divisor)
        if divisor is None or divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        quotient, remainder = self.poly.div(divisor.poly)
        return QPolynomial.from_poly(quotient), QPolynomial.from_poly(remainder)

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if len(self.coeffs) <= 1:
            return hash(self.constant_term)
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    # --- text and JSON ---

    def to_string(self) -> str:
        """Descending powers, e.g. ``q^8+42*q^6+127*q^4+42*q^2+1``."""
        if not self.coeffs:
            return "0"
        parts: List[str] = []
        for power in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            magnitude = abs(c)
            if power == 0:
                body = str(magnitude)
            else:
                var = "q" if power == 1 else f"q^{power}"
                body = var if magnitude == 1 else f"{magnitude}*{var}"
            if not parts:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f"{sign}{body}")
        return "".join(parts)

    __str__ = to_string

    def __repr__(self) -> str:
        return f"QPolynomial('{self.to_string()}')"

    @classmethod
    def parse(cls, text: str) -> "QPolynomial":
        """Parse ``c*q^k`` terms joined by + and -; c is an integer or a fraction."""
        compact = re.sub(r"\s+", "", text or "").replace("−", "-")
        if not compact:
            raise PolynomialParseError("empty polynomial string")
        if not _GRAMMAR.fullmatch(compact):
            raise PolynomialParseError(f"cannot parse polynomial '{compact}'")
        if _ZERO_DENOMINATOR.search(compact):
            raise PolynomialParseError("zero denominator in polynomial")
        expr = parse_expr(compact, local_dict={"q": q_symbol}, transformations=_TRANSFORMATIONS)
        return cls.from_expr(expr)

    def to_json(self) -> list:
        """Triples ``[power, numerator, denominator]`` with base-10 strings."""
        return [
            [power, str(c.numerator), str(c.denominator)]
            for power, c in enumerate(self.coeffs)
            if c != 0
        ]

    @classmethod
    def from_json(cls, data: Sequence) -> "QPolynomial":
        terms = {}
        for entry in data:
            power, numerator, denominator = entry
            if int(denominator) <= 0:
                raise ValueError("denominator must be positive")
            terms[int(power)] = Fraction(int(numerator), int(denominator))
        return cls.from_terms(terms)


Q = QPolynomial.q()
Q2 = Q * Q


def falling_factorial(base: Union[QPolynomial, Scalar], k: int) -> QPolynomial:
    """base·(base−1)···(base−k+1), i.e. C(base, k)·k!; k = 0 gives 1."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if not isinstance(base, QPolynomial):
        base = QPolynomial.constant(base)
    return _falling_factorial(base, k)


@lru_cache(maxsize=4096)
def _falling_factorial(base: QPolynomial, k: int) -> QPolynomial:
    # the expression, not the Poly: ff of a Poly shifts its generator instead
    return QPolynomial.from_expr(ff(base.as_expr(), k))


def binomial(base: Union[QPolynomial, Scalar], k: int) -> QPolynomial:
    """C(base, k) for a polynomial top argument."""
    return falling_factorial(base, k) * Fraction(1, factorial(k))


def q_power(exponent: int) -> QPolynomial:
    return QPolynomial.monomial(1, exponent)


def kappa(m: int) -> QPolynomial:
    """Poincaré polynomial of projective (m−1)-space: 1 + q² + … + q^{2(m−1)}."""
    if m < 1:
        raise ValueError("m must be positive")
    return QPolynomial.from_terms({2 * i: 1 for i in range(m)})


# --- truncated power series ---

Ring = type
RINGS = (Fraction, QPolynomial)


def ring_zero(ring: Ring):
    return Fraction(0) if ring is Fraction else QPolynomial.zero()


def ring_one(ring: Ring):
    return Fraction(1) if ring is Fraction else QPolynomial.one()


def to_ring(value, ring: Ring):
    """Coerce a scalar into ``ring``; polynomials never collapse into rationals."""
    if ring is Fraction:
        if isinstance(value, QPolynomial):
            if value.is_constant():
                return value.constant_term
            raise RingMismatchError("a polynomial in q is not a rational coefficient")
        return Fraction(value)
    if ring is QPolynomial:
        if isinstance(value, QPolynomial):
            return value
        return QPolynomial.constant(value)
    raise RingMismatchError(f"unsupported coefficient ring {ring!r}")


def _is_invertible(value) -> bool:
    if isinstance(value, QPolynomial):
        return value.is_constant() and not value.is_zero()
    return value != 0


def _inverse(value):
    if isinstance(value, QPolynomial):
        return QPolynomial.constant(1 / value.constant_term)
    return 1 / Fraction(value)


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series in t known modulo t^(order+1).

    ``coeffs[n]`` is the coefficient of t^n, taken from ``ring`` (the
    rationals or QPolynomial). Operations keep the smaller order of their
    inputs; derivative lowers it by one.
    """

    order: int
    coeffs: tuple
    ring: Ring = QPolynomial

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be non-negative")
        if self.ring not in RINGS:
            raise RingMismatchError(f"unsupported coefficient ring {self.ring!r}")
        if len(self.coeffs) != self.order + 1:
            raise ValueError(f"expected {self.order + 1} coefficients, got {len(self.coeffs)}")
        object.__setattr__(self, "coeffs", tuple(to_ring(c, self.ring) for c in self.coeffs))

    # --- constructors ---

    @classmethod
    def from_coefficients(cls, coeffs: Sequence, order: Optional[int] = None,
                          ring: Ring = QPolynomial) -> "TruncatedSeries":
        """Pad with zeros or cut to ``order``."""
        values = list(coeffs)
        if order is None:
            order = max(len(values) - 1, 0)
        values = values[: order + 1]
        values += [ring_zero(ring)] * (order + 1 - len(values))
        return cls(order, tuple(values), ring)

    @classmethod
    def zero(cls, order: int, ring: Ring = QPolynomial) -> "TruncatedSeries":
        return cls.from_coefficients([], order, ring)

    @classmethod
    def one(cls, order: int, ring: Ring = QPolynomial) -> "TruncatedSeries":
        return cls.from_coefficients([ring_one(ring)], order, ring)

    @classmethod
    def variable(cls, order: int, ring: Ring = QPolynomial) -> "TruncatedSeries":
        """The series t."""
        return cls.from_coefficients([ring_zero(ring), ring_one(ring)], order, ring)

    # --- inspection ---

    def coefficient(self, n: int):
        if 0 <= n <= self.order:
            return self.coeffs[n]
        raise IndexError(f"coefficient t^{n} is beyond order {self.order}")

    @property
    def constant_term(self):
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def first_nonzero(self) -> Optional[int]:
        """Index of the first nonzero coefficient, or None."""
        for n, c in enumerate(self.coeffs):
            if c != 0:
                return n
        return None

    def factorial_coefficients(self) -> list:
        """n!·c_n for every n."""
        return [c * factorial(n) for n, c in enumerate(self.coeffs)]

    # --- structural ---

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise SeriesDomainError(f"cannot raise order {self.order} to {order}")
        return TruncatedSeries(order, self.coeffs[: order + 1], self.ring)

    def map_coefficients(self, fn: Callable, ring: Ring) -> "TruncatedSeries":
        return TruncatedSeries(self.order, tuple(fn(c) for c in self.coeffs), ring)

    def specialize(self, value: Scalar) -> "TruncatedSeries":
        """Substitute q = value in every coefficient."""
        if self.ring is Fraction:
            return self
        return self.map_coefficients(lambda c: c.evaluate(value), Fraction)

    def with_coefficient(self, n: int, value) -> "TruncatedSeries":
        values = list(self.coeffs)
        values[n] = value
        return TruncatedSeries(self.order, tuple(values), self.ring)

    # --- arithmetic ---

    def _operand(self, other):
        if isinstance(other, TruncatedSeries):
            if other.ring is not self.ring:
                raise RingMismatchError(
                    f"cannot combine series over {self.ring.__name__} and {other.ring.__name__}"
                )
            return other
        if isinstance(other, (int, Fraction, QPolynomial)):
            return TruncatedSeries.from_coefficients([to_ring(other, self.ring)], self.order, self.ring)
        return None

    def __add__(self, other):
        other = self._operand(other)
        if other is None:
            return NotImplemented
        order = min(self.order, other.order)
        return TruncatedSeries(
            order, tuple(self.coeffs[n] + other.coeffs[n] for n in range(order + 1)), self.ring
        )

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.order, tuple(-c for c in self.coeffs), self.ring)

    def __sub__(self, other):
        other = self._operand(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._operand(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QPolynomial)):
            scalar = to_ring(other, self.ring)
            return TruncatedSeries(self.order, tuple(c * scalar for c in self.coeffs), self.ring)
        other = self._operand(other)
        if other is None:
            return NotImplemented
        order = min(self.order, other.order)
        zero = ring_zero(self.ring)
        values = [zero] * (order + 1)
        for i in range(order + 1):
            a = self.coeffs[i]
            if a == 0:
                continue
            for j in range(order + 1 - i):
                b = other.coeffs[j]
                if b != 0:
                    values[i + j] = values[i + j] + a * b
        return TruncatedSeries(order, tuple(values), self.ring)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "TruncatedSeries":
        if not isinstance(exponent, int) or exponent < 0:
            raise SeriesDomainError("integer powers must be non-negative; use pow_series otherwise")
        result = TruncatedSeries.one(self.order, self.ring)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def derivative(self) -> "TruncatedSeries":
        if self.order == 0:
            raise SeriesDomainError("the derivative of an order-0 series is undetermined")
        return TruncatedSeries(
            self.order - 1,
            tuple(self.coeffs[n] * n for n in range(1, self.order + 1)),
            self.ring,
        )

    def integral(self) -> "TruncatedSeries":
        """Antiderivative with zero constant term; order grows by one."""
        values = [ring_zero(self.ring)]
        values += [c * Fraction(1, n + 1) for n, c in enumerate(self.coeffs)]
        return TruncatedSeries(self.order + 1, tuple(values), self.ring)

    def reciprocal(self) -> "TruncatedSeries":
        if not _is_invertible(self.constant_term):
            raise SeriesDomainError(f"constant term {self.constant_term} is not invertible")
        inverse0 = _inverse(self.constant_term)
        values = [inverse0]
        for n in range(1, self.order + 1):
            acc = ring_zero(self.ring)
            for k in range(1, n + 1):
                if self.coeffs[k] != 0:
                    acc = acc + self.coeffs[k] * values[n - k]
            values.append(-(acc * inverse0))
        return TruncatedSeries(self.order, tuple(values), self.ring)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        other = self._operand(other)
        if other is None:
            return NotImplemented
        return self * other.reciprocal()

    def exp(self) -> "TruncatedSeries":
        """exp(s) for s with zero constant term."""
        if self.constant_term != 0:
            raise SeriesDomainError("exp needs a zero constant term")
        values = [ring_one(self.ring)]
        for n in range(1, self.order + 1):
            acc = ring_zero(self.ring)
            for k in range(1, n + 1):
                if self.coeffs[k] != 0:
                    acc = acc + self.coeffs[k] * values[n - k] * k
            values.append(acc * Fraction(1, n))
        return TruncatedSeries(self.order, tuple(values), self.ring)

    def log1p(self) -> "TruncatedSeries":
        """log(1+s) = Σ (−1)^{k+1} s^k / k for s with zero constant term."""
        if self.constant_term != 0:
            raise SeriesDomainError("log1p needs a zero constant term")
        if self.order == 0:
            return TruncatedSeries.zero(0, self.ring)
        one_plus = self + 1
        return (self.derivative() * one_plus.truncate(self.order - 1).reciprocal()).integral()

    def pow_series(self, exponent) -> "TruncatedSeries":
        """(1+s)^exponent as exp(exponent·log(1+s)) for a series with constant term 1."""
        if self.constant_term != 1:
            raise SeriesDomainError("pow needs constant term exactly 1")
        return ((self - 1).log1p() * to_ring(exponent, self.ring)).exp()

    # --- JSON ---

    def to_json(self) -> dict:
        ring = "rational" if self.ring is Fraction else "polynomial"
        return {
            "order": self.order,
            "ring": ring,
            "coeffs": [to_ring(c, QPolynomial).to_json() for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TruncatedSeries":
        ring = Fraction if data.get("ring") == "rational" else QPolynomial
        coeffs = [to_ring(QPolynomial.from_json(c), ring) for c in data["coeffs"]]
        return cls(int(data["order"]), tuple(coeffs), ring)


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def series_derivative(a: TruncatedSeries) -> TruncatedSeries:
    return a.derivative()


def series_log1p(s: TruncatedSeries) -> TruncatedSeries:
    return s.log1p()


def series_expm1(s: TruncatedSeries) -> TruncatedSeries:
    return s.exp() - 1


def series_pow(one_plus_s: TruncatedSeries, exponent) -> TruncatedSeries:
    return one_plus_s.pow_series(exponent)


# --- coefficient recursions ---

@dataclass(frozen=True)
class CoefficientRecursion:
    """A rule producing c_{n+1} from the known coefficients c_0..c_n.

    ``seeds`` fix the leading coefficients; they must start with (0, 1).
    Seeds beyond c_1 are checked against the rule.
    """

    step: Callable[[Sequence, int], object]
    ring: Ring = QPolynomial
    seeds: tuple = (0, 1)
    name: str = "recursion"


def solve_ode_recursive(equation: CoefficientRecursion, order: int) -> TruncatedSeries:
    """The unique series in t + t²·ring[[t]] obeying ``equation`` to ``order``."""
    ring = equation.ring
    seeds = [to_ring(s, ring) for s in equation.seeds]
    if len(seeds) < 2 or seeds[0] != 0 or seeds[1] != 1:
        raise SeedError(f"{equation.name}: seeds must begin with c_0 = 0, c_1 = 1")
    coeffs = seeds[:2]
    for n in range(1, max(order, len(seeds) - 1)):
        value = to_ring(equation.step(coeffs, n), ring)
        if n + 1 < len(seeds) and seeds[n + 1] != value:
            raise SeedError(
                f"{equation.name}: seed c_{n + 1} = {seeds[n + 1]} but the recursion gives {value}"
            )
        coeffs.append(value)
        logger.debug(f"{equation.name}: solved coefficient t^{n + 1}")
    return TruncatedSeries.from_coefficients(coeffs, order, ring)


def linear_fractional_recursion(alpha, beta, ring: Ring = QPolynomial,
                                name: str = "linear-fractional") -> CoefficientRecursion:
    """Recursion for (1 + αt − βc)·c′ = 1 + c with c ∈ t + t²·ring[[t]].

    Matching t^n gives (n+1)c_{n+1} = c_n − α·n·c_n + β·Σ_{i=1..n} c_i·(n−i+1)·c_{n−i+1}.
    """
    a = to_ring(alpha, ring)
    b = to_ring(beta, ring)

    def step(c: Sequence, n: int):
        acc = c[n] - a * c[n] * n
        convolution = ring_zero(ring)
        for i in range(1, n + 1):
            convolution = convolution + c[i] * c[n - i + 1] * (n - i + 1)
        acc = acc + b * convolution
        return acc * Fraction(1, n + 1)

    return CoefficientRecursion(step=step, ring=ring, name=name)


def linear_fractional_residual(series: TruncatedSeries, alpha, beta) -> TruncatedSeries:
    """(1 + αt − βc)·c′ − 1 − c, to order N−1."""
    ring = series.ring
    t = TruncatedSeries.variable(series.order, ring)
    factor = (t * to_ring(alpha, ring) - series * to_ring(beta, ring)) + 1
    return (factor.truncate(series.order - 1) * series.derivative()
            - series.truncate(series.order - 1) - 1)
