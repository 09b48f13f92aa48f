from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

from ans_carry.exception import InitializationError

if TYPE_CHECKING:
    from collections.abc import Sequence


class BerlekampMassey:
    """Shortest linear recurrence of a rational sequence, fed one term at a time"""

    __slots__ = ("connection", "previous", "length", "discrepancy", "shift", "terms")

    connection: list[Fraction]
    previous: list[Fraction]
    length: int
    discrepancy: Fraction
    shift: int
    terms: list[Fraction]

    def __init__(self):
        self.connection = [Fraction(1)]
        self.previous = [Fraction(1)]
        self.length = 0
        self.discrepancy = Fraction(1)
        self.shift = 1
        self.terms = []

    def add(self, term: int | Fraction) -> None:
        self.terms.append(Fraction(term))
        n = len(self.terms) - 1
        d = sum(
            (self.connection[j] * self.terms[n - j] for j in range(min(len(self.connection), n + 1))),
            Fraction(0),
        )
        if d == 0:
            self.shift += 1
            return
        coef = d / self.discrepancy
        updated = self.connection + [Fraction(0)] * max(
            0, len(self.previous) + self.shift - len(self.connection)
        )
        for j, b in enumerate(self.previous):
            updated[j + self.shift] -= coef * b
        if 2 * self.length <= n:
            self.previous = self.connection
            self.length = n + 1 - self.length
            self.discrepancy = d
            self.shift = 1
        else:
            self.shift += 1
        self.connection = updated

    def result(self) -> tuple[list[Fraction], int]:
        """Connection polynomial C (C_0 = 1, lowest degree first) and the register length"""
        coeffs = list(self.connection)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        return coeffs, self.length


class LinearRecurrence:
    r"""
    Minimal monic polynomial P of a sequence with its order.

    `polynomial` is stored highest degree first. Writing P = X^t + c_1 X^{t-1} + ... + c_t,
    the sequence satisfies x(n) + c_1 x(n-1) + ... + c_t x(n-t) = 0 for every n >= `order`,
    where `order - t` is the length of the non-recurrent head (a factor X^{order-t} dropped).
    """

    __slots__ = ("_polynomial", "_order", "_initial")

    _polynomial: tuple[Fraction, ...]
    _order: int
    _initial: tuple[int | Fraction, ...]

    def __init__(self, polynomial: Sequence[Fraction | int], order: int, initial: Sequence[int | Fraction]):
        polynomial = tuple(Fraction(c) for c in polynomial)
        if not polynomial or polynomial[0] != 1:
            raise InitializationError(f"polynomial must be monic, but given {polynomial}!")
        if order < len(polynomial) - 1:
            raise InitializationError(f"order {order} is below the degree {len(polynomial) - 1}!")
        self._polynomial = polynomial
        self._order = order
        self._initial = tuple(initial)

    @property
    def polynomial(self) -> tuple[Fraction, ...]:
        return self._polynomial

    @property
    def degree(self) -> int:
        return len(self._polynomial) - 1

    @property
    def order(self) -> int:
        return self._order

    @property
    def initial(self) -> tuple[int | Fraction, ...]:
        return self._initial

    def annihilates(self, sequence: Sequence[int | Fraction]) -> bool:
        t = self.degree
        for n in range(max(self._order, t), len(sequence)):
            if sum(c * sequence[n - k] for k, c in enumerate(self._polynomial)) != 0:
                return False
        return True

    def extend(self, length: int) -> list[Fraction]:
        """Continues the known terms with the recurrence"""
        terms = [Fraction(x) for x in self._initial]
        t = self.degree
        while len(terms) < length:
            n = len(terms)
            if n < self._order:
                raise InitializationError(f"{self._order} initial terms are needed, {n} given!")
            terms.append(-sum(self._polynomial[k] * terms[n - k] for k in range(1, t + 1)))
        return terms[:length]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearRecurrence):
            return NotImplemented
        return self._polynomial == other._polynomial and self._order == other._order

    def __hash__(self) -> int:
        return hash((self._polynomial, self._order))

    def __repr__(self) -> str:
        coeffs = " ".join(str(c) for c in self._polynomial)
        return f"LinearRecurrence([{coeffs}], order={self._order})"


def minimal_recurrence(counts: Sequence[int | Fraction], degree_bound: int) -> LinearRecurrence:
    """Exact minimal polynomial of a sequence known to satisfy some recurrence of order <= degree_bound"""
    if degree_bound < 1:
        raise InitializationError(f"degree_bound must be positive, but given {degree_bound}!")
    if len(counts) < 2 * degree_bound + 1:
        raise InitializationError(
            f"{len(counts)} terms given, at least {2 * degree_bound + 1} are needed for degree {degree_bound}"
        )
    solver = BerlekampMassey()
    for x in counts:
        solver.add(x)
    connection, length = solver.result()
    # lowest-first coefficients of C read highest-first give X^deg C(1/X), the factor X^(length-deg) is the head
    return LinearRecurrence(connection, length, counts[:length])
