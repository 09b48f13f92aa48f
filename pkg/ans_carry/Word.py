from __future__ import annotations

from functools import total_ordering
from typing import TYPE_CHECKING

from ans_carry.exception import AlphabetMismatchError, InitializationError, ParseError

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator

MAX_ALPHABET_SIZE = 1 << 16
EMPTY_WORD_TEXT = "e"


class Alphabet:
    """Digits 0..r-1 ordered as integers"""

    __slots__ = ("_size",)

    _size: int

    def __init__(self, size: int):
        if not 1 <= size <= MAX_ALPHABET_SIZE:
            raise InitializationError(
                f"alphabet size must be in [1, {MAX_ALPHABET_SIZE}], but given {size}!"
            )
        self._size = int(size)

    @property
    def size(self) -> int:
        return self._size

    def __len__(self) -> int:
        return self._size

    def __contains__(self, digit: int) -> bool:
        return 0 <= digit < self._size

    def __iter__(self) -> Iterator[int]:
        return iter(range(self._size))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and other._size == self._size

    def __hash__(self) -> int:
        return hash(("Alphabet", self._size))

    def __repr__(self) -> str:
        return f"Alphabet({self._size})"


@total_ordering
class Word:
    r"""
    Finite digit string, most significant digit first.

    The empty word is the representation of 0 and is printed as `e`.
    Comparison operators follow the radix (genealogical) order.
    """

    __slots__ = ("_digits", "_alphabet")

    _digits: tuple[int, ...]
    _alphabet: Alphabet

    def __init__(self, digits: Iterable[int] = (), alphabet: Alphabet | int = 2):
        if isinstance(alphabet, int):
            alphabet = Alphabet(alphabet)
        self._alphabet = alphabet
        self._digits = tuple(int(d) for d in digits)
        for pos, digit in enumerate(self._digits):
            if digit not in alphabet:
                raise InitializationError(
                    f"digit {digit} at position {pos} is out of the alphabet {alphabet}!"
                )

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet | int) -> Word:
        if isinstance(alphabet, int):
            alphabet = Alphabet(alphabet)
        text = text.strip()
        if text in (EMPTY_WORD_TEXT, "ε", ""):
            return cls((), alphabet)
        try:
            if alphabet.size > 10:
                digits = [int(chunk) for chunk in text.split(".")]
            else:
                digits = [int(char) for char in text]
        except ValueError as exc:
            raise ParseError(f"cannot read word {text!r}: {exc}") from exc
        return cls(digits, alphabet)

    @property
    def digits(self) -> tuple[int, ...]:
        return self._digits

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    def __len__(self) -> int:
        return len(self._digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self._digits)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self._digits[item], self._alphabet)
        return self._digits[item]

    def __add__(self, other: Word | Iterable[int]) -> Word:
        if isinstance(other, Word):
            _check_alphabets(self, other)
            other = other._digits
        return Word(self._digits + tuple(other), self._alphabet)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self._alphabet == other._alphabet and self._digits == other._digits

    def __lt__(self, other: Word) -> bool:
        return radix_cmp(self, other) < 0

    def __hash__(self) -> int:
        return hash((self._digits, self._alphabet.size))

    def __str__(self) -> str:
        if not self._digits:
            return EMPTY_WORD_TEXT
        if self._alphabet.size > 10:
            return ".".join(str(d) for d in self._digits)
        return "".join(str(d) for d in self._digits)

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, r={self._alphabet.size})"

    def is_suffix_of(self, other: Word) -> bool:
        n = len(self._digits)
        return n <= len(other._digits) and (n == 0 or other._digits[-n:] == self._digits)

    def is_prefix_of(self, other: Word) -> bool:
        return other._digits[: len(self._digits)] == self._digits

    def strip_leading_zeros(self) -> Word:
        digits = self._digits
        i = 0
        while i < len(digits) and digits[i] == 0:
            i += 1
        return Word(digits[i:], self._alphabet)

    def pad(self, length: int) -> Word:
        """Left padding with zeros up to `length`"""
        missing = length - len(self._digits)
        if missing <= 0:
            return self
        return Word((0,) * missing + self._digits, self._alphabet)


def _check_alphabets(u: Word, v: Word) -> None:
    if u.alphabet != v.alphabet:
        raise AlphabetMismatchError(
            f"words {u!r} and {v!r} have different alphabets {u.alphabet} and {v.alphabet}!"
        )


def radix_cmp(u: Word, v: Word) -> int:
    """Returns -1, 0 or 1: shorter words first, then lexicographic"""
    _check_alphabets(u, v)
    if len(u) != len(v):
        return -1 if len(u) < len(v) else 1
    if u.digits == v.digits:
        return 0
    return -1 if u.digits < v.digits else 1


def common_prefix_length(u: tuple[int, ...], v: tuple[int, ...]) -> int:
    n = min(len(u), len(v))
    i = 0
    while i < n and u[i] == v[i]:
        i += 1
    return i


def longest_common_prefix(u: Word, v: Word) -> Word:
    _check_alphabets(u, v)
    return Word(u.digits[: common_prefix_length(u.digits, v.digits)], u.alphabet)


def delta_digits(u: tuple[int, ...], v: tuple[int, ...]) -> int:
    if len(u) != len(v):
        return max(len(u), len(v))
    return len(u) - common_prefix_length(u, v)


def delta(u: Word, v: Word) -> int:
    """Number of trailing positions to rewrite to go from `u` to `v`"""
    _check_alphabets(u, v)
    return delta_digits(u.digits, v.digits)
