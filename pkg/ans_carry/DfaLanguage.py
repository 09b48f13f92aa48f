from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from numpy import empty, int64, zeros

from ans_carry.Dfa import Dfa
from ans_carry.exception import BudgetExceededError, InitializationError, NotInLanguageError
from ans_carry.Signature import LevelCounter
from ans_carry.Word import Word, delta_digits

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

    from numpy.typing import NDArray

    from ans_carry.Dfa import PceVerdict

logger = logging.getLogger(__name__)

REACHABILITY_BUDGET = 4096
MAX_WORDS = 50_000_000


class CountTable:
    r"""
    Exact counts u_q(ℓ) of the words of length ℓ read from state q to a final state.

    Rows are lengths, columns are states. Entries are python integers.
    """

    __slots__ = ("_u", "_v", "_initial")

    _u: NDArray
    _v: NDArray
    _initial: int

    def __init__(self, u: NDArray, initial: int):
        self._u = u
        self._v = u.cumsum(axis=0)
        self._initial = initial

    @property
    def level_max(self) -> int:
        return self._u.shape[0] - 1

    @property
    def per_state(self) -> NDArray:
        return self._u

    @property
    def cumulative(self) -> NDArray:
        return self._v

    def u(self, ell: int, state: int | None = None) -> int:
        return int(self._u[ell, self._initial if state is None else state])

    def v(self, ell: int, state: int | None = None) -> int:
        if ell < 0:
            return 0
        return int(self._v[ell, self._initial if state is None else state])

    def sequence(self, state: int | None = None) -> list[int]:
        return [int(x) for x in self._u[:, self._initial if state is None else state]]

    def level_counter(self, state: int | None = None) -> LevelCounter:
        return LevelCounter(self.sequence(state))


class DfaLanguage:
    r"""
    Radix order machinery of the language of a trim automaton.

    Count and reachability tables grow on demand; lengths are bounded by
    `length_budget`.
    """

    __slots__ = ("_dfa", "_adjacency", "_u", "_reachable", "_length_budget", "_pce")

    _dfa: Dfa
    _adjacency: NDArray
    _u: list[NDArray]
    _reachable: NDArray
    _length_budget: int
    _pce: PceVerdict | None

    def __init__(self, dfa: Dfa, *, length_budget: int = REACHABILITY_BUDGET):
        if length_budget < 1:
            raise InitializationError(f"length_budget must be positive, but given {length_budget}!")
        self._dfa = dfa.trim()
        self._adjacency = self._dfa.adjacency().astype(object)
        finals = zeros(self._dfa.nstates, dtype=object)
        for q in self._dfa.finals:
            finals[q] = 1
        self._u = [finals]
        self._reachable = (finals > 0).reshape(1, -1)
        self._length_budget = length_budget
        self._pce = None

    @property
    def dfa(self) -> Dfa:
        return self._dfa

    @property
    def length_budget(self) -> int:
        return self._length_budget

    @property
    def pce(self) -> PceVerdict:
        if self._pce is None:
            self._pce = self._dfa.check_pce()
        return self._pce

    def _check_length(self, length: int) -> None:
        if length > self._length_budget:
            raise BudgetExceededError(
                f"words of length {length} exceed the length budget {self._length_budget}", source=self
            )

    def _grow(self, level_max: int) -> None:
        self._check_length(level_max)
        while len(self._u) <= level_max:
            self._u.append(self._adjacency.dot(self._u[-1]))

    def _reach(self, length: int) -> NDArray:
        self._check_length(length)
        if self._reachable.shape[0] <= length:
            adjacency = self._dfa.adjacency()
            rows = [row for row in self._reachable]
            target = min(max(length, 2 * len(rows)), self._length_budget)
            while len(rows) <= target:
                rows.append(adjacency.dot(rows[-1].astype(int64)) > 0)
            self._reachable = empty((len(rows), self._dfa.nstates), dtype=bool)
            for i, row in enumerate(rows):
                self._reachable[i] = row
        return self._reachable

    def count(self, level_max: int) -> CountTable:
        self._grow(level_max)
        u = empty((level_max + 1, self._dfa.nstates), dtype=object)
        for ell in range(level_max + 1):
            u[ell] = self._u[ell]
        return CountTable(u, self._dfa.initial)

    def u(self, ell: int, state: int | None = None) -> int:
        self._grow(ell)
        return int(self._u[ell][self._dfa.initial if state is None else state])

    def v(self, ell: int, state: int | None = None) -> int:
        self._grow(max(ell, 0))
        q = self._dfa.initial if state is None else state
        return sum(int(self._u[i][q]) for i in range(ell + 1))

    def _path(self, digits: Sequence[int]) -> list[int]:
        path = [self._dfa.initial]
        for digit in digits:
            q = self._dfa.run((digit,), path[-1]) if path[-1] >= 0 else -1
            path.append(q)
        if path[-1] < 0 or path[-1] not in self._dfa.finals:
            raise NotInLanguageError(
                f"{self._dfa.format_word(tuple(digits))} is not in the language", source=self
            )
        return path

    def _as_digits(self, word: Word | Sequence[int]) -> tuple[int, ...]:
        if isinstance(word, Word) and word.alphabet != self._dfa.alphabet:
            raise NotInLanguageError(f"{word!r} is not over {self._dfa.alphabet}", source=self)
        return tuple(word)

    def _minimal_completion(self, state: int, length: int) -> tuple[int, ...]:
        reach = self._reach(length)
        table = self._dfa.table
        digits = []
        for remaining in range(length, 0, -1):
            for digit in range(self._dfa.alphabet.size):
                dst = table[state, digit]
                if dst >= 0 and reach[remaining - 1, dst]:
                    digits.append(digit)
                    state = int(dst)
                    break
        return tuple(digits)

    def _words_of_length(self, length: int) -> Iterator[tuple[int, ...]]:
        reach = self._reach(length)
        table = self._dfa.table
        size = self._dfa.alphabet.size

        def walk(state: int, remaining: int, head: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
            if remaining == 0:
                yield head
                return
            for digit in range(size):
                dst = table[state, digit]
                if dst >= 0 and reach[remaining - 1, dst]:
                    yield from walk(int(dst), remaining - 1, head + (digit,))

        if reach[length, self._dfa.initial]:
            yield from walk(self._dfa.initial, length, ())

    def _is_finite_below(self, length: int) -> bool:
        """No word of length in (length, length + nstates]"""
        reach = self._reach(length + self._dfa.nstates)
        return not reach[length + 1 :, self._dfa.initial].any()

    def enumerate(self, n: int) -> Iterator[Word]:
        """The first `n` words in radix order"""
        if n > MAX_WORDS:
            raise BudgetExceededError(f"{n} words requested, the budget is {MAX_WORDS}", source=self)
        produced = 0
        length = 0
        alphabet = self._dfa.alphabet
        while produced < n:
            for digits in self._words_of_length(length):
                yield Word(digits, alphabet)
                produced += 1
                if produced == n:
                    return
            if self._is_finite_below(length):
                return
            length += 1

    def successor(self, word: Word | Sequence[int]) -> Word:
        digits = self._as_digits(word)
        path = self._path(digits)
        length = len(digits)
        table = self._dfa.table
        reach = self._reach(length + 1)
        for i in range(length - 1, -1, -1):
            remaining = length - i - 1
            for digit in range(digits[i] + 1, self._dfa.alphabet.size):
                dst = table[path[i], digit]
                if dst >= 0 and reach[remaining, dst]:
                    tail = self._minimal_completion(int(dst), remaining)
                    return Word(digits[:i] + (digit,) + tail, self._dfa.alphabet)
        longer = length + 1
        while not self._reach(longer)[longer, self._dfa.initial]:
            if self._is_finite_below(longer):
                raise NotInLanguageError(
                    f"{self._dfa.format_word(digits)} is the last word of a finite language", source=self
                )
            longer += 1
        return Word(self._minimal_completion(self._dfa.initial, longer), self._dfa.alphabet)

    def value_of(self, word: Word | Sequence[int]) -> int:
        """Number of words before `word` in radix order"""
        digits = self._as_digits(word)
        path = self._path(digits)
        length = len(digits)
        self._grow(length)
        table = self._dfa.table
        value = self.v(length - 1) if length else 0
        for i, digit in enumerate(digits):
            row = self._u[length - i - 1]
            for smaller in range(digit):
                dst = table[path[i], smaller]
                if dst >= 0:
                    value += int(row[dst])
        return value

    def repr_of(self, n: int) -> Word:
        if n < 0:
            raise InitializationError(f"n must be non-negative, but given {n}!")
        length = 0
        below = 0
        while below + self.u(length) <= n:
            below += self.u(length)
            if self.u(length) == 0 and self._is_finite_below(length):
                raise NotInLanguageError(f"the language has only {below} words", source=self)
            length += 1
        rank = n - below
        state = self._dfa.initial
        table = self._dfa.table
        digits = []
        for remaining in range(length, 0, -1):
            row = self._u[remaining - 1]
            for digit in range(self._dfa.alphabet.size):
                dst = table[state, digit]
                if dst < 0:
                    continue
                size = int(row[dst])
                if rank < size:
                    digits.append(digit)
                    state = int(dst)
                    break
                rank -= size
        return Word(digits, self._dfa.alphabet)

    def cp(self, n: int) -> int:
        """delta(repr(n), repr(n+1))"""
        return delta_digits(self.repr_of(n).digits, self.repr_of(n + 1).digits)

    def left_bank_size(self, word: Word | Sequence[int]) -> int:
        r"""
        Number of words u with |u| <= |w|, u lexicographically before w and
        not a prefix of w.
        """
        digits = self._as_digits(word)
        path = self._path(digits)
        length = len(digits)
        self._grow(length)
        table = self._dfa.table
        cumulative = []
        total = zeros(self._dfa.nstates, dtype=object)
        for ell in range(length):
            total = total + self._u[ell]
            cumulative.append(total)
        size = 0
        for i, digit in enumerate(digits):
            row = cumulative[length - i - 1]
            for smaller in range(digit):
                dst = table[path[i], smaller]
                if dst >= 0:
                    size += int(row[dst])
        return size

    def fast_scp(self, n: int) -> int:
        """Σ_{i<n} cp(i) from the count tables, for a prefix-closed extendable language"""
        if not self.pce:
            raise InitializationError(
                f"the count-table sum needs a prefix-closed extendable language, but the automaton is {self.pce!r}",
                source=self,
            )
        if n < 0:
            raise InitializationError(f"n must be non-negative, but given {n}!")
        if n == 0:
            return 0
        last = self.repr_of(n - 1)
        following = self.repr_of(n)
        length = len(last)
        levels = sum(self.v(j) for j in range(length))
        if len(following) > length:
            return levels + self.v(length)
        return levels + self.left_bank_size(following)


def count(dfa: Dfa, level_max: int) -> CountTable:
    return DfaLanguage(dfa).count(level_max)
