from __future__ import annotations

import logging
from fractions import Fraction
from math import floor
from typing import TYPE_CHECKING

from mpmath import mpf, workprec
from sympy import Poly, Rational, Symbol

from ans_carry.exception import InitializationError, ParseError, PrecisionError

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)

MAX_REFINEMENTS = 400

_X = Symbol("X")


def _to_fraction(value) -> Fraction:
    value = Rational(value)
    return Fraction(int(value.p), int(value.q))


def _to_rational(value: Fraction) -> Rational:
    return Rational(value.numerator, value.denominator)


class AlgebraicReal:
    r"""
    Real algebraic number > 1 given by its minimal polynomial and an isolating interval.

    constructor arguments:
        `coefficients`: integer polynomial, highest degree first; it may be
            reducible, the irreducible factor vanishing in the interval is kept
        `interval`: rational (lo, hi) holding exactly one root; the largest real
            root is taken when None
    """

    __slots__ = ("_poly", "_poly_qq", "_lo", "_hi")

    _poly: Poly
    _poly_qq: Poly
    _lo: Fraction
    _hi: Fraction

    def __init__(
        self,
        coefficients: Sequence[int],
        interval: tuple[Fraction | int | str, Fraction | int | str] | None = None,
    ):
        poly = Poly([int(c) for c in coefficients], _X, domain="ZZ")
        if poly.degree() < 1:
            raise InitializationError(f"polynomial {coefficients} has no roots!", source=self)
        poly = poly.sqf_part()
        if interval is None:
            roots = poly.intervals()
            if not roots:
                raise InitializationError(f"polynomial {coefficients} has no real roots!", source=self)
            (lo, hi), _ = roots[-1]
            lo, hi = _to_fraction(lo), _to_fraction(hi)
        else:
            lo, hi = (Fraction(x) for x in interval)
            if lo > hi:
                raise InitializationError(f"empty interval [{lo}, {hi}]!", source=self)
            nroots = poly.count_roots(_to_rational(lo), _to_rational(hi))
            if nroots != 1:
                raise InitializationError(
                    f"interval [{lo}, {hi}] holds {nroots} roots of {coefficients}, exactly one is needed!",
                    source=self,
                )
        _, factors = poly.factor_list()
        for factor, _ in factors:
            if factor.count_roots(_to_rational(lo), _to_rational(hi)) == 1:
                poly = factor
                break
        if poly.LC() < 0:
            poly = -poly
        self._poly = poly
        self._poly_qq = poly.set_domain("QQ")
        self._lo, self._hi = lo, hi
        if poly.degree() == 1:
            a, b = (int(c) for c in poly.all_coeffs())
            self._lo = self._hi = Fraction(-b, a)
        else:
            while self._lo <= 1 <= self._hi:
                self.refine((self._hi - self._lo) / 2)
        if self._hi <= 1:
            raise InitializationError(f"the root in [{lo}, {hi}] is not above 1", source=self)

    @property
    def minpoly(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self._poly.all_coeffs())

    @property
    def degree(self) -> int:
        return self._poly.degree()

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return self._lo, self._hi

    @property
    def width(self) -> Fraction:
        return self._hi - self._lo

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    def refine(self, width: Fraction) -> tuple[Fraction, Fraction]:
        """Shrinks the isolating interval below `width`"""
        if self.is_rational or self.width <= width:
            return self.interval
        lo, hi = self._poly.refine_root(_to_rational(self._lo), _to_rational(self._hi), eps=_to_rational(width))
        self._lo, self._hi = _to_fraction(lo), _to_fraction(hi)
        return self.interval

    def to_mpf(self, precision: int = 128) -> mpf:
        self.refine(Fraction(1, 1 << (precision + 2)))
        with workprec(precision):
            mid = (self._lo + self._hi) / 2
            return mpf(mid.numerator) / mid.denominator

    def __float__(self) -> float:
        return float(self.to_mpf(64))

    def element(self, coefficients: Sequence[Fraction | int]) -> NumberFieldElement:
        return NumberFieldElement(self, coefficients)

    def one(self) -> NumberFieldElement:
        return NumberFieldElement(self, (1,))

    def generator(self) -> NumberFieldElement:
        return NumberFieldElement(self, (0, 1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraicReal):
            return NotImplemented
        if self.minpoly != other.minpoly:
            return False
        lo, hi = max(self._lo, other._lo), min(self._hi, other._hi)
        return lo <= hi and self._poly.count_roots(_to_rational(lo), _to_rational(hi)) == 1

    def __hash__(self) -> int:
        return hash(self.minpoly)

    def __repr__(self) -> str:
        return f"AlgebraicReal({self.minpoly}, [{self._lo}, {self._hi}])"


class NumberFieldElement:
    r"""
    Element Σ c_i β^i of Q(β), coefficients lowest degree first, reduced
    modulo the minimal polynomial of β.
    """

    __slots__ = ("_field", "_coefficients")

    _field: AlgebraicReal
    _coefficients: tuple[Fraction, ...]

    def __init__(self, field: AlgebraicReal, coefficients: Sequence[Fraction | int]):
        self._field = field
        coefficients = [Fraction(c) for c in coefficients]
        if len(coefficients) > field.degree:
            poly = Poly([_to_rational(c) for c in reversed(coefficients)], _X, domain="QQ")
            remainder = poly.rem(field._poly_qq)
            coefficients = [_to_fraction(c) for c in reversed(remainder.all_coeffs())]
        while coefficients and coefficients[-1] == 0:
            coefficients.pop()
        self._coefficients = tuple(coefficients)

    @property
    def field(self) -> AlgebraicReal:
        return self._field

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return self._coefficients

    @property
    def is_rational(self) -> bool:
        return len(self._coefficients) <= 1

    @property
    def is_zero(self) -> bool:
        return not self._coefficients

    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise InitializationError(f"{self} is irrational", source=self)
        return self._coefficients[0] if self._coefficients else Fraction(0)

    def _coerce(self, other) -> tuple[Fraction, ...]:
        if isinstance(other, NumberFieldElement):
            if other._field is not self._field and other._field.minpoly != self._field.minpoly:
                raise InitializationError("elements of different fields", source=self)
            return other._coefficients
        return (Fraction(other),)

    def __add__(self, other) -> NumberFieldElement:
        a, b = self._coefficients, self._coerce(other)
        n = max(len(a), len(b))
        a, b = a + (Fraction(0),) * (n - len(a)), b + (Fraction(0),) * (n - len(b))
        return NumberFieldElement(self._field, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self) -> NumberFieldElement:
        return NumberFieldElement(self._field, [-c for c in self._coefficients])

    def __sub__(self, other) -> NumberFieldElement:
        if isinstance(other, NumberFieldElement):
            return self + (-other)
        return self + (-Fraction(other))

    def __mul__(self, other) -> NumberFieldElement:
        a, b = self._coefficients, self._coerce(other)
        if not a or not b:
            return NumberFieldElement(self._field, ())
        product = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                product[i + j] += x * y
        return NumberFieldElement(self._field, product)

    __rmul__ = __mul__

    def enclosure(self) -> tuple[Fraction, Fraction]:
        """Rational interval holding the value for the current isolating interval"""
        lo, hi = self._field.interval
        a = b = Fraction(0)
        plo = phi = Fraction(1)
        for c in self._coefficients:
            if c >= 0:
                a += c * plo
                b += c * phi
            else:
                a += c * phi
                b += c * plo
            plo *= lo
            phi *= hi
        return a, b

    def floor(self) -> int:
        if self.is_rational:
            return floor(self.rational_value())
        for _ in range(MAX_REFINEMENTS):
            a, b = self.enclosure()
            if floor(a) == floor(b):
                return floor(a)
            self._field.refine(self._field.width / 2)
        raise PrecisionError(f"cannot separate {self} from an integer", source=self)

    def sign(self) -> int:
        if self.is_rational:
            value = self.rational_value()
            return (value > 0) - (value < 0)
        for _ in range(MAX_REFINEMENTS):
            a, b = self.enclosure()
            if a > 0:
                return 1
            if b < 0:
                return -1
            self._field.refine(self._field.width / 2)
        raise PrecisionError(f"cannot decide the sign of {self}", source=self)

    def to_mpf(self, precision: int = 128) -> mpf:
        beta = self._field.to_mpf(precision + 16)
        with workprec(precision + 16):
            total = mpf(0)
            for c in reversed(self._coefficients):
                total = total * beta + mpf(c.numerator) / c.denominator
        return total

    def __eq__(self, other: object) -> bool:
        if isinstance(other, NumberFieldElement):
            return self._coefficients == other._coefficients and self._field.minpoly == other._field.minpoly
        if isinstance(other, (int, Fraction)):
            return self.is_rational and self.rational_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._coefficients)

    def __repr__(self) -> str:
        terms = " + ".join(f"({c})*b^{i}" for i, c in enumerate(self._coefficients) if c)
        return f"NumberFieldElement({terms or '0'})"


def parse_beta(text: str, filename: str | None = None) -> AlgebraicReal:
    """Reads `poly: c_d ... c_0` and an optional `interval: lo hi`"""
    coefficients = None
    interval = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        try:
            match key.strip(), value.split():
                case "poly", values if sep and values:
                    coefficients = [int(x) for x in values]
                case "interval", [lo, hi] if sep:
                    interval = (Fraction(lo), Fraction(hi))
                case _:
                    raise ParseError(f"cannot read {line!r}", filename=filename, line=lineno)
        except ValueError as exc:
            raise ParseError(str(exc), filename=filename, line=lineno) from exc
    if coefficients is None:
        raise ParseError("missing `poly:` line", filename=filename)
    try:
        return AlgebraicReal(coefficients, interval)
    except InitializationError as exc:
        raise ParseError(str(exc), filename=filename) from exc
