from __future__ import annotations

import logging
from fractions import Fraction
from typing import TYPE_CHECKING, Literal

from numba import njit
from numpy import array, concatenate, empty, full, int64, ones, resize, roll, zeros

from ans_carry.exception import (
    BudgetExceededError,
    InitializationError,
    InvalidSignatureError,
    ParseError,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator, Sequence

    from numpy.typing import NDArray

logger = logging.getLogger(__name__)

CpModes = {"python", "numba"}
CpModesType = Literal["python", "numba"]


class Rhythm:
    """Periodic part of a signature with directing parameter (q, p), p = sum of entries"""

    __slots__ = ("_entries",)

    _entries: tuple[int, ...]

    def __init__(self, entries: Sequence[int]):
        entries = tuple(int(r) for r in entries)
        if not entries or any(r < 0 for r in entries):
            raise InitializationError(f"rhythm entries must be non-negative, but given {entries}!")
        if sum(entries) <= len(entries):
            raise InitializationError(
                f"rhythm must have p > q, but given q={len(entries)}, p={sum(entries)}!"
            )
        self._entries = entries

    @property
    def entries(self) -> tuple[int, ...]:
        return self._entries

    @property
    def q(self) -> int:
        return len(self._entries)

    @property
    def p(self) -> int:
        return sum(self._entries)

    def __repr__(self) -> str:
        return f"Rhythm({self._entries}, q={self.q}, p={self.p})"


class LevelCounter:
    r"""
    Words per level `u` and words of length at most ℓ `v`.

    v(0) = u(0) = 1 stands for the empty word.
    """

    __slots__ = ("_u", "_v")

    _u: tuple[int, ...]
    _v: tuple[int, ...]

    def __init__(self, u: Sequence[int]):
        self._u = tuple(int(x) for x in u)
        total = 0
        v = []
        for x in self._u:
            total += x
            v.append(total)
        self._v = tuple(v)

    @classmethod
    def from_cumulative(cls, v: Sequence[int]) -> LevelCounter:
        u = [v[0]] + [v[i] - v[i - 1] for i in range(1, len(v))]
        return cls(u)

    @property
    def u(self) -> tuple[int, ...]:
        return self._u

    @property
    def v(self) -> tuple[int, ...]:
        return self._v

    @property
    def level_max(self) -> int:
        return len(self._u) - 1

    def growth_ratios(self) -> list[Fraction | None]:
        """u(ℓ+1)/u(ℓ), None where u(ℓ) = 0"""
        return [
            Fraction(self._u[i + 1], self._u[i]) if self._u[i] else None
            for i in range(len(self._u) - 1)
        ]

    def filtered_means(self) -> list[Fraction]:
        """(1/v(ℓ)) Σ_{i≤ℓ} v(i) for every level"""
        return partial_sum_ratios(self._v)


def partial_sum_ratios(x: Sequence[int]) -> list[Fraction]:
    """y(n)/x(n) where y(n) = x(0) + ... + x(n)"""
    ratios = []
    total = 0
    for value in x:
        total += value
        ratios.append(Fraction(total, value))
    return ratios


class Signature:
    r"""
    Eventually periodic breadth-first degree sequence of a language tree.

    The root is counted with a loop on itself, so the first entry is the
    number of one-letter words plus one.

    constructor arguments:
        `prefix`: the non-periodic head
        `period`: the repeated part (a rhythm when p > q)
    """

    __slots__ = ("_prefix", "_period")

    _prefix: tuple[int, ...]
    _period: tuple[int, ...]

    def __init__(self, prefix: Sequence[int] = (), period: Sequence[int] = ()):
        self._prefix = tuple(int(s) for s in prefix)
        self._period = tuple(int(s) for s in period)
        if not self._period:
            raise InitializationError("signature period must be non-empty!", source=self)
        if any(s < 0 for s in self._prefix + self._period):
            raise InitializationError(
                f"signature entries must be non-negative: {self._prefix}, {self._period}",
                source=self,
            )

    @property
    def prefix(self) -> tuple[int, ...]:
        return self._prefix

    @property
    def period(self) -> tuple[int, ...]:
        return self._period

    @property
    def rhythm(self) -> Rhythm:
        return Rhythm(self._period)

    @property
    def is_extendable(self) -> bool:
        return 0 not in self._prefix and 0 not in self._period

    def entry(self, i: int) -> int:
        if i < len(self._prefix):
            return self._prefix[i]
        return self._period[(i - len(self._prefix)) % len(self._period)]

    def degree_sum(self, m: int) -> int:
        """Σ_{k<m} s_k in closed form"""
        head = min(m, len(self._prefix))
        total = sum(self._prefix[:head])
        rest = m - head
        if rest <= 0:
            return total
        nperiods, partial = divmod(rest, len(self._period))
        return total + nperiods * sum(self._period) + sum(self._period[:partial])

    def degrees(self, n: int) -> NDArray[int64]:
        return self.degrees_range(0, n)

    def degrees_range(self, start: int, stop: int) -> NDArray[int64]:
        """Entries s_start, ..., s_{stop-1}"""
        lp = len(self._prefix)
        head = array(self._prefix[start:stop], dtype=int64)
        first = max(start, lp)
        if stop <= first:
            return head
        tail = roll(array(self._period, dtype=int64), -((first - lp) % len(self._period)))
        return concatenate((head, resize(tail, stop - first)))

    def level_counts(self, level_max: int) -> LevelCounter:
        v = [1]
        for _ in range(level_max):
            v.append(self.degree_sum(v[-1]))
        return LevelCounter.from_cumulative(v)

    def __repr__(self) -> str:
        return f"Signature(prefix={self._prefix}, period={self._period})"


class LevelSignature:
    r"""
    Signature given level by level by a rule `level_degrees(ℓ)`.

    Used for trees which are not eventually periodic, e.g. the unbalanced
    language H. Level 0 holds the root entry (loop included). Levels are
    generated on demand. `level_sum` and `extendable` answer level counts and
    extendability without generating the levels.
    """

    __slots__ = ("_rule", "_levels", "_level_max", "_name", "_level_sum", "_extendable")

    _rule: Callable[[int], NDArray[int64]]
    _levels: list[NDArray[int64]]
    _level_max: int
    _name: str
    _level_sum: Callable[[int], int] | None
    _extendable: bool | None

    def __init__(
        self,
        rule: Callable[[int], NDArray[int64]],
        level_max: int,
        name: str = "",
        level_sum: Callable[[int], int] | None = None,
        extendable: bool | None = None,
    ):
        if level_max < 1:
            raise InitializationError(f"level_max must be >= 1, but given {level_max}!")
        self._rule = rule
        self._levels = []
        self._level_max = level_max
        self._name = name
        self._level_sum = level_sum
        self._extendable = extendable

    @property
    def level_max(self) -> int:
        return self._level_max

    @property
    def name(self) -> str:
        return self._name

    @property
    def is_extendable(self) -> bool:
        if self._extendable is not None:
            return self._extendable
        return all((self.level(ell) > 0).all() for ell in range(self._level_max + 1))

    def level(self, ell: int) -> NDArray[int64]:
        if ell > self._level_max:
            raise BudgetExceededError(
                f"level {ell} requested, but only levels up to {self._level_max} are generated", source=self
            )
        while len(self._levels) <= ell:
            self._levels.append(self._rule(len(self._levels)))
        return self._levels[ell]

    def level_sum(self, ell: int) -> int:
        if self._level_sum is not None:
            return self._level_sum(ell)
        return int(self.level(ell).sum())

    def degrees_range(self, start: int, stop: int) -> NDArray[int64]:
        chunks = []
        offset = 0
        ell = 0
        while offset < stop:
            chunk = self.level(ell)
            if offset + len(chunk) > start:
                chunks.append(chunk[max(start - offset, 0) : stop - offset])
            offset += len(chunk)
            ell += 1
        return concatenate(chunks) if chunks else zeros(0, dtype=int64)

    def degrees(self, n: int) -> NDArray[int64]:
        return self.degrees_range(0, n)

    def level_counts(self, level_max: int | None = None) -> LevelCounter:
        if level_max is None:
            level_max = self._level_max
        v = [1]
        total = 0
        for ell in range(min(level_max, self._level_max + 1)):
            total += self.level_sum(ell)
            v.append(total)
        return LevelCounter.from_cumulative(v)

    def __repr__(self) -> str:
        return f"LevelSignature({self._name!r}, level_max={self._level_max})"


def _h_level_degrees(ell: int) -> NDArray[int64]:
    if ell == 0:
        return full(1, 3, dtype=int64)
    half = 1 << (ell - 1)
    degrees = ones(2 * half, dtype=int64)
    degrees[:half] = 3
    return degrees


def _h_level_sum(ell: int) -> int:
    return 3 if ell == 0 else 1 << (ell + 1)


def h_language_signature(level_max: int) -> LevelSignature:
    """Tree of H: on every level the first half of the nodes has 3 children, the rest 1"""
    return LevelSignature(_h_level_degrees, level_max, name="H", level_sum=_h_level_sum, extendable=True)


class ValidationResult:
    __slots__ = ("valid", "index")

    valid: bool
    index: int | None

    def __init__(self, valid: bool, index: int | None = None):
        self.valid = valid
        self.index = index

    def __bool__(self) -> bool:
        return self.valid

    def __repr__(self) -> str:
        return "valid" if self.valid else f"invalid({self.index})"


def validate(sig: Signature) -> ValidationResult:
    """Checks Σ_{i≤j} s_i > j+1 for every j"""
    q = len(sig.period)
    p = sum(sig.period)
    head = len(sig.prefix) + 2 * q
    total = 0
    j = 0
    while j < head:
        total += sig.entry(j)
        if total <= j + 1:
            return ValidationResult(False, j)
        j += 1
    if p >= q:
        # the slack changes by p-q per period
        return ValidationResult(True)
    while True:
        total += sig.entry(j)
        if total <= j + 1:
            return ValidationResult(False, j)
        j += 1


def theoretical_cp(sig: Signature) -> Fraction:
    """p/(p-q) for the rhythm of an eventually periodic signature"""
    rhythm = sig.rhythm
    return Fraction(rhythm.p, rhythm.p - rhythm.q)


STREAM_BLOCK = 1 << 16


def _tree_cp_python(
    degrees: NDArray[int64],
    history: NDArray[int64],
    base: int,
    state: NDArray[int64],
    cp: NDArray[int64],
    level: NDArray[int64],
) -> tuple[int, int]:
    # degrees[k] is the entry of node base+k, history[k] the cp of node base+k < start
    parent = state[0]
    end = state[1]
    cur_level = state[2]
    level_end = state[3]
    children_next = state[4]
    start = state[5]
    n = cp.shape[0]
    for j in range(n):
        i = start + j
        degree = degrees[i - base]
        if degree == 0:
            return 1, i
        children_next += degree
        while i >= end:
            parent += 1
            if parent >= i:
                return 2, i
            end += degrees[parent - base]
        if i + 1 == level_end:
            cp[j] = cur_level + 1
        elif i + 1 < end:
            cp[j] = 1
        elif parent < start:
            cp[j] = 1 + history[parent - base]
        else:
            cp[j] = 1 + cp[parent - start]
        level[j] = cur_level
        if i + 1 == level_end:
            cur_level += 1
            level_end = children_next
    state[0] = parent
    state[1] = end
    state[2] = cur_level
    state[3] = level_end
    state[4] = children_next
    state[5] = start + n
    return 0, start + n


_tree_cp_numba: Callable[[NDArray, NDArray, int, NDArray, NDArray, NDArray], tuple[int, int]] = njit(
    cache=True
)(_tree_cp_python)

_tree_cp_functions = {"python": _tree_cp_python, "numba": _tree_cp_numba}


def _initial_state(root_degree: int) -> NDArray[int64]:
    # parent, end of its children, level, end of the level, next level end, next node
    return array([0, root_degree, 0, 1, 0, 0], dtype=int64)


def _check_retcode(retcode: int, index: int) -> None:
    if retcode == 1:
        raise InvalidSignatureError(
            f"node {index} has no children: the successor is not defined below it", index=index
        )
    if retcode == 2:
        raise InvalidSignatureError(f"the tree is finite: no parent for node {index}", index=index)


def tree_cp(degrees: NDArray[int64], n: int, mode: CpModesType = "numba") -> tuple[NDArray, NDArray]:
    """cp(i) and level of word i for the first `n` words of the tree with given degrees"""
    if mode not in CpModes:
        raise InitializationError(f"mode must be in {CpModes}, but given {mode}!")
    if len(degrees) < n:
        raise InitializationError(f"{n} words need {n} degrees, but given {len(degrees)}!")
    cp = empty(n, dtype=int64)
    level = empty(n, dtype=int64)
    if n == 0:
        return cp, level
    logger.debug("tree cp stream: n=%d mode=%s", n, mode)
    retcode, index = _tree_cp_functions[mode](
        degrees, zeros(0, dtype=int64), 0, _initial_state(degrees[0]), cp, level
    )
    _check_retcode(retcode, index)
    return cp, level


def _check_signature(sig: Signature | LevelSignature) -> None:
    if isinstance(sig, Signature):
        verdict = validate(sig)
        if not verdict:
            raise InvalidSignatureError(f"{sig} is invalid at {verdict.index}", index=verdict.index)
        if not sig.is_extendable:
            raise InvalidSignatureError(f"{sig} has zero entries, it is not extendable")
    # level signatures: the kernel rejects zero entries among the walked nodes


def cp_levels(
    sig: Signature | LevelSignature, n: int, mode: CpModesType = "numba"
) -> tuple[NDArray[int64], NDArray[int64]]:
    _check_signature(sig)
    return tree_cp(sig.degrees(n), n, mode)


def enumerate_with_cp(
    sig: Signature | LevelSignature, n: int, mode: CpModesType = "numba", block: int = STREAM_BLOCK
) -> Iterator[tuple[int, int, int]]:
    r"""
    Yields (i, cp(i), |word i|) for the first `n` words in radix order.

    The tree is walked in blocks of `block` words. Only the degrees and cp
    values from the current parent on are kept between blocks.
    """
    if mode not in CpModes:
        raise InitializationError(f"mode must be in {CpModes}, but given {mode}!")
    if block < 1:
        raise InitializationError(f"block must be positive, but given {block}!")
    _check_signature(sig)
    if n <= 0:
        return
    kernel = _tree_cp_functions[mode]
    state = _initial_state(sig.degrees_range(0, 1)[0])
    history = zeros(0, dtype=int64)
    base = 0
    for start in range(0, n, block):
        size = min(block, n - start)
        cp = empty(size, dtype=int64)
        level = empty(size, dtype=int64)
        retcode, index = kernel(sig.degrees_range(base, start + size), history, base, state, cp, level)
        _check_retcode(retcode, index)
        parent = int(state[0])
        history = concatenate((history, cp))[parent - base :]
        base = parent
        for j in range(size):
            yield start + j, int(cp[j]), int(level[j])


def parse_signature(text: str, filename: str | None = None) -> Signature:
    fields: dict[str, list[int]] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in ("prefix", "period"):
            raise ParseError(f"expected `prefix:` or `period:`, got {line!r}", filename=filename, line=lineno)
        try:
            fields[key] = [int(x) for x in value.split()]
        except ValueError as exc:
            raise ParseError(str(exc), filename=filename, line=lineno) from exc
    if "period" not in fields:
        raise ParseError("missing `period:` line", filename=filename)
    try:
        return Signature(fields.get("prefix", ()), fields["period"])
    except InitializationError as exc:
        raise ParseError(str(exc), filename=filename) from exc


def read_signature(path: str) -> Signature:
    with open(path) as f:
        return parse_signature(f.read(), filename=path)
