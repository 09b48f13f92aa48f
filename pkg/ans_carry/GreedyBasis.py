from __future__ import annotations

import logging
import re
from typing import TYPE_CHECKING

from numba import njit, prange
from numpy import array, empty, int64, searchsorted

from ans_carry.AlgebraicReal import AlgebraicReal
from ans_carry.exception import (
    BudgetExceededError,
    InitializationError,
    NotInLanguageError,
    ParseError,
    UnknownSystemError,
)
from ans_carry.RationalBase import RandomAccessModes, RandomAccessModesType
from ans_carry.Word import MAX_ALPHABET_SIZE, Alphabet, Word

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from numpy.typing import NDArray

logger = logging.getLogger(__name__)

WORKING_LENGTH = 64
INT64_LIMIT = 1 << 62


class GreedyBasis:
    r"""
    Strictly increasing integers G_0 = 1 < G_1 < ... with bounded quotients.

    Terms beyond the given ones are produced by `rule(terms)`, which returns
    the next term from the list of the known ones; a basis without rule is an
    explicit finite list.

    constructor arguments:
        `terms`: the first terms, G_0 = 1 first
        `rule`: optional generator of the next term
        `name`: label used in reports
        `growth`: optional dominant growth constant of the basis
    """

    __slots__ = ("_terms", "_rule", "_name", "_growth", "_alphabet")

    _terms: list[int]
    _rule: Callable[[list[int]], int] | None
    _name: str
    _growth: AlgebraicReal | None
    _alphabet: Alphabet

    def __init__(
        self,
        terms: Sequence[int],
        *,
        rule: Callable[[list[int]], int] | None = None,
        name: str = "",
        growth: AlgebraicReal | None = None,
    ):
        self._terms = [int(g) for g in terms]
        self._rule = rule
        self._name = name
        self._growth = growth
        if not self._terms or self._terms[0] != 1:
            raise InitializationError(f"a basis starts with G_0 = 1, but given {self._terms[:1]}!", source=self)
        if rule is not None:
            self._extend(WORKING_LENGTH)
        for ell in range(len(self._terms) - 1):
            if self._terms[ell + 1] <= self._terms[ell]:
                raise InitializationError(
                    f"a basis is strictly increasing, but G_{ell + 1} = {self._terms[ell + 1]} <= {self._terms[ell]}",
                    source=self,
                )
        quotient = max(
            (-(-self._terms[ell + 1] // self._terms[ell]) for ell in range(len(self._terms) - 1)),
            default=2,
        )
        if quotient > MAX_ALPHABET_SIZE:
            raise InitializationError(f"basis quotients are unbounded (up to {quotient})", source=self)
        self._alphabet = Alphabet(max(quotient, 2))

    @classmethod
    def from_list(cls, terms: Sequence[int], name: str = "") -> GreedyBasis:
        return cls(terms, name=name)

    @classmethod
    def from_recurrence(
        cls,
        coefficients: Sequence[int],
        initial: Sequence[int],
        constant: int = 0,
        name: str = "",
    ) -> GreedyBasis:
        r"""
        G_n = c_1 G_{n-1} + ... + c_d G_{n-d} + constant.
        """
        coefficients = tuple(int(c) for c in coefficients)
        if len(initial) < len(coefficients):
            raise InitializationError(f"{len(coefficients)} initial terms are needed, {len(initial)} given!")

        def rule(terms: list[int]) -> int:
            return sum(c * terms[-i] for i, c in enumerate(coefficients, 1)) + constant

        growth = None
        try:
            growth = AlgebraicReal((1,) + tuple(-c for c in coefficients))
        except InitializationError:
            logger.debug("no dominant root above 1 for the recurrence %s", coefficients)
        return cls(initial, rule=rule, name=name, growth=growth)

    @classmethod
    def integer_base(cls, p: int) -> GreedyBasis:
        if p < 2:
            raise InitializationError(f"integer base must be >= 2, but given {p}!")
        return cls.from_recurrence((p,), (1,), name=f"base({p})")

    @property
    def name(self) -> str:
        return self._name

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    def growth(self) -> AlgebraicReal | None:
        return self._growth

    @property
    def known_terms(self) -> tuple[int, ...]:
        return tuple(self._terms)

    @property
    def is_finite(self) -> bool:
        return self._rule is None

    def _extend(self, length: int) -> None:
        if len(self._terms) >= length:
            return
        if self._rule is None:
            raise BudgetExceededError(
                f"the basis {self._name or self._terms[:4]} has only {len(self._terms)} terms, {length} needed",
                source=self,
            )
        while len(self._terms) < length:
            self._terms.append(int(self._rule(self._terms)))

    def term(self, ell: int) -> int:
        self._extend(ell + 1)
        return self._terms[ell]

    def terms(self, length: int) -> list[int]:
        self._extend(length)
        return self._terms[:length]

    def degree(self, n: int) -> int:
        """k with G_k <= n < G_{k+1}"""
        if n < 1:
            raise InitializationError(f"the degree is defined for n >= 1, but given {n}!", source=self)
        k = 0
        while self.term(k + 1) <= n:
            k += 1
        return k

    def as_array(self, limit: int) -> NDArray[int64]:
        """Terms up to the first one above `limit + 1`"""
        if limit + 1 >= INT64_LIMIT:
            raise InitializationError(f"{limit} is out of the int64 range", source=self)
        k = 0
        while self.term(k) <= limit + 1:
            k += 1
        return array(self._terms[: k + 1], dtype=int64)

    def repr(self, n: int) -> Word:
        if n < 0:
            raise InitializationError(f"n must be non-negative, but given {n}!", source=self)
        if n == 0:
            return Word((), self._alphabet)
        k = self.degree(n)
        digits = []
        for i in range(k, -1, -1):
            digit, n = divmod(n, self._terms[i])
            digits.append(digit)
        return Word(digits, self._alphabet)

    def is_member(self, word: Word | Sequence[int], allow_leading_zeros: bool = False) -> bool:
        """x_i G_i + ... + x_0 G_0 < G_{i+1} for every i"""
        digits = tuple(word)
        if digits and digits[0] == 0 and not allow_leading_zeros:
            return False
        self._extend(len(digits) + 1)
        total = 0
        for i, digit in enumerate(reversed(digits)):
            if digit < 0:
                return False
            total += digit * self._terms[i]
            if total >= self._terms[i + 1]:
                return False
        return True

    def val(self, word: Word | Sequence[int]) -> int:
        if not self.is_member(word):
            raise NotInLanguageError(f"{''.join(map(str, word))} is not a greedy expansion", source=self)
        return sum(digit * self._terms[i] for i, digit in enumerate(reversed(tuple(word))))

    def g_max(self, ell: int) -> Word:
        """repr(G_ℓ - 1), the largest word of length ℓ"""
        return self.repr(self.term(ell) - 1)

    def __repr__(self) -> str:
        head = ", ".join(str(g) for g in self._terms[:6])
        return f"GreedyBasis({self._name or head})"


def greedy_repr(basis: GreedyBasis, n: int) -> Word:
    return basis.repr(n)


def greedy_val(basis: GreedyBasis, word: Word | Sequence[int]) -> int:
    return basis.val(word)


def g_max(basis: GreedyBasis, ell: int) -> Word:
    return basis.g_max(ell)


def greedy_cp(basis: GreedyBasis, n: int) -> int:
    """1 + the largest k such that g_k is a suffix of repr(n)"""
    word = basis.repr(n)
    best = 0
    for k in range(1, len(word) + 1):
        if basis.g_max(k).is_suffix_of(word):
            best = k
    return best + 1


def _greedy_cp_python(terms: NDArray[int64], start: int, cp: NDArray[int64]) -> None:
    for idx in prange(cp.shape[0]):
        m = start + idx
        value = 1
        while m > 0:
            k = searchsorted(terms, m, side="right") - 1
            if m == terms[k + 1] - 1:
                value = k + 2
                break
            m = m % terms[k]
        cp[idx] = value


_greedy_cp_numba: Callable[[NDArray, int, NDArray], None] = njit(cache=True)(_greedy_cp_python)
_greedy_cp_parallel: Callable[[NDArray, int, NDArray], None] = njit(cache=True, parallel=True)(
    _greedy_cp_python
)

_greedy_cp_functions = {
    "python": _greedy_cp_python,
    "numba": _greedy_cp_numba,
    "parallel": _greedy_cp_parallel,
}


def greedy_cp_stream(
    basis: GreedyBasis, n: int, start: int = 0, mode: RandomAccessModesType = "numba"
) -> NDArray[int64]:
    r"""
    cp(start), ..., cp(start+n-1) by the reduction
    cp(N) = k+2 if N = G_{k+1}-1, else cp(N mod G_k), with G_k <= N < G_{k+1}.
    """
    if mode not in RandomAccessModes:
        raise InitializationError(f"mode must be in {RandomAccessModes}, but given {mode}!")
    terms = basis.as_array(start + n + 1)
    cp = empty(n, dtype=int64)
    logger.debug("greedy cp stream: [%d, %d) mode=%s", start, start + n, mode)
    _greedy_cp_functions[mode](terms, start, cp)
    return cp


class GnsPceVerdict:
    __slots__ = ("kind", "word", "prefix", "necessary_condition", "depth")

    kind: str
    word: Word | None
    prefix: Word | None
    necessary_condition: bool
    depth: int

    def __init__(
        self,
        kind: str,
        depth: int,
        necessary_condition: bool,
        word: Word | None = None,
        prefix: Word | None = None,
    ):
        self.kind = kind
        self.depth = depth
        self.necessary_condition = necessary_condition
        self.word = word
        self.prefix = prefix

    @property
    def is_pce(self) -> bool:
        return self.kind == "pce"

    def __bool__(self) -> bool:
        return self.is_pce

    def __repr__(self) -> str:
        if self.is_pce:
            return f"pce(depth={self.depth})"
        return f"{self.kind}(word={self.word}, prefix={self.prefix})"


def necessary_condition(basis: GreedyBasis, length: int) -> bool:
    """floor(G_{n+1}/G_n) is non-increasing over the first `length` terms"""
    terms = basis.terms(length)
    quotients = [terms[i + 1] // terms[i] for i in range(len(terms) - 1)]
    return all(a >= b for a, b in zip(quotients, quotients[1:]))


def check_pce_gns(basis: GreedyBasis, depth: int) -> GnsPceVerdict:
    """Prefix closure and extendability on all expansions of length <= depth"""
    if depth < 2:
        raise InitializationError(f"depth must be >= 2, but given {depth}!", source=basis)
    necessary = necessary_condition(basis, depth + 1)
    words = [basis.repr(n).digits for n in range(basis.term(depth))]
    members = set(words)
    for digits in words:
        if digits and digits[:-1] not in members:
            alphabet = basis.alphabet
            return GnsPceVerdict(
                "not_prefix_closed", depth, necessary, Word(digits, alphabet), Word(digits[:-1], alphabet)
            )
    size = basis.alphabet.size
    for digits in words:
        if len(digits) < depth and not any(digits + (a,) in members for a in range(size)):
            return GnsPceVerdict("not_extendable", depth, necessary, Word(digits, basis.alphabet))
    return GnsPceVerdict("pce", depth, necessary)


def fibonacci_basis() -> GreedyBasis:
    return GreedyBasis.from_recurrence((1, 1), (1, 2), name="fibonacci")


def tribonacci_basis() -> GreedyBasis:
    return GreedyBasis.from_recurrence((1, 1, 1), (1, 2, 4), name="tribonacci")


def fina_basis() -> GreedyBasis:
    return GreedyBasis.from_recurrence((3, -1), (1, 3), name="fina")


_builtin_bases = {
    "fibonacci": fibonacci_basis,
    "tribonacci": tribonacci_basis,
    "fina": fina_basis,
}

_base_name = re.compile(r"^base[:(]?(\d+)\)?$")


def builtin_basis(name: str) -> GreedyBasis:
    key = name.strip().lower()
    if match := _base_name.match(key):
        return GreedyBasis.integer_base(int(match.group(1)))
    try:
        return _builtin_bases[key]()
    except KeyError:
        raise UnknownSystemError(f"unknown basis {name!r}, expected base(p) or one of {tuple(_builtin_bases)}") from None


def parse_basis(text: str, filename: str | None = None) -> GreedyBasis:
    """One integer per line"""
    terms = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            terms.append(int(line))
        except ValueError as exc:
            raise ParseError(str(exc), filename=filename, line=lineno) from exc
    try:
        return GreedyBasis.from_list(terms, name=filename or "")
    except InitializationError as exc:
        raise ParseError(str(exc), filename=filename) from exc


def read_basis(path: str) -> GreedyBasis:
    with open(path) as f:
        return parse_basis(f.read(), filename=path)
