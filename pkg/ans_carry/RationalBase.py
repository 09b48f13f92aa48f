from __future__ import annotations

import logging
from fractions import Fraction
from math import gcd
from typing import TYPE_CHECKING, Literal

from numba import njit, prange
from numpy import empty, int64

from ans_carry.exception import InitializationError, NotInLanguageError
from ans_carry.Signature import Signature
from ans_carry.Word import Word

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from numpy.typing import NDArray

logger = logging.getLogger(__name__)

RandomAccessModes = {"python", "numba", "parallel"}
RandomAccessModesType = Literal["python", "numba", "parallel"]


class RationalBase:
    r"""
    Numeration in base p/q: q N_i = p N_{i+1} + a_i with digits a_i in 0..p-1.

    constructor arguments:
        `p`, `q`: coprime, p > q >= 1 (q = 1 is the integer base p)
    """

    __slots__ = ("_p", "_q")

    _p: int
    _q: int

    def __init__(self, p: int, q: int = 1):
        if not p > q >= 1:
            raise InitializationError(f"rational base needs p > q >= 1, but given {p}/{q}!", source=self)
        if gcd(p, q) != 1:
            raise InitializationError(f"p and q must be coprime, but given {p}/{q}!", source=self)
        self._p = p
        self._q = q

    @property
    def p(self) -> int:
        return self._p

    @property
    def q(self) -> int:
        return self._q

    @property
    def base(self) -> Fraction:
        return Fraction(self._p, self._q)

    def repr(self, n: int) -> Word:
        if n < 0:
            raise InitializationError(f"n must be non-negative, but given {n}!", source=self)
        digits = []
        while n:
            quotient, digit = divmod(self._q * n, self._p)
            digits.append(digit)
            n = quotient
        return Word(reversed(digits), self._p)

    def val(self, word: Word | Sequence[int]) -> Fraction:
        """Σ (a_i/q)(p/q)^i, an integer for valid expansions"""
        value = Fraction(0)
        for digit in word:
            if not 0 <= digit < self._p:
                raise NotInLanguageError(f"digit {digit} is not in 0..{self._p - 1}", source=self)
            value = value * self.base + Fraction(digit, self._q)
        return value

    def is_expansion(self, word: Word | Sequence[int]) -> bool:
        value = self.val(word)
        return value.denominator == 1 and self.repr(int(value)).digits == tuple(word)

    def succ(self, word: Word | Sequence[int]) -> Word:
        if not self.is_expansion(word):
            raise NotInLanguageError(f"{''.join(map(str, word))} is not a {self._p}/{self._q} expansion", source=self)
        return self.repr(int(self.val(word)) + 1)

    def signature(self) -> Signature:
        """Purely periodic: entry i counts the multiples of q in [p i, p i + p)"""
        period = [
            sum(1 for m in range(self._p * i, self._p * i + self._p) if m % self._q == 0)
            for i in range(self._q)
        ]
        return Signature((), period)

    def theoretical_cp(self) -> Fraction:
        return Fraction(self._p, self._p - self._q)

    def cp_stream(self, n: int, start: int = 0, mode: RandomAccessModesType = "numba") -> NDArray[int64]:
        return rb_cp_stream(self, n, start, mode)

    def __repr__(self) -> str:
        return f"RationalBase({self._p}/{self._q})"


def _rational_cp_python(p: int, q: int, start: int, cp: NDArray[int64]) -> None:
    for idx in prange(cp.shape[0]):
        a = start + idx
        b = a + 1
        i = 0
        while a != b:
            a = q * a // p
            b = q * b // p
            i += 1
        cp[idx] = i


_rational_cp_numba: Callable[[int, int, int, NDArray], None] = njit(cache=True)(_rational_cp_python)
_rational_cp_parallel: Callable[[int, int, int, NDArray], None] = njit(cache=True, parallel=True)(
    _rational_cp_python
)

_rational_cp_functions = {
    "python": _rational_cp_python,
    "numba": _rational_cp_numba,
    "parallel": _rational_cp_parallel,
}


def rb_repr(rb: RationalBase, n: int) -> Word:
    return rb.repr(n)


def rb_val(rb: RationalBase, word: Word | Sequence[int]) -> Fraction:
    return rb.val(word)


def rb_succ(rb: RationalBase, word: Word | Sequence[int]) -> Word:
    return rb.succ(word)


def rb_cp_stream(
    rb: RationalBase, n: int, start: int = 0, mode: RandomAccessModesType = "numba"
) -> NDArray[int64]:
    r"""
    cp(start), ..., cp(start+n-1): the least i >= 1 where the quotient chains of
    N and N+1 meet, N_{i+1} = floor(q N_i / p).
    """
    if mode not in RandomAccessModes:
        raise InitializationError(f"mode must be in {RandomAccessModes}, but given {mode}!")
    if start < 0 or (start + n) * rb.q >= 1 << 62:
        raise InitializationError(f"indices [{start}, {start + n}) are out of the int64 range!")
    cp = empty(n, dtype=int64)
    _rational_cp_functions[mode](rb.p, rb.q, start, cp)
    return cp
