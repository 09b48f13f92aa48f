from __future__ import annotations

import logging
import re
from collections import deque
from typing import TYPE_CHECKING

from numpy import concatenate, full, int64, zeros
from scipy.linalg import eigvals

from ans_carry.exception import EmptyLanguageError, InitializationError, ParseError, UnknownSystemError
from ans_carry.Word import Alphabet, Word

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Sequence

    from numpy.typing import NDArray

logger = logging.getLogger(__name__)


class PceVerdict:
    __slots__ = ("kind", "state")

    kind: str
    state: int | None

    def __init__(self, kind: str, state: int | None = None):
        self.kind = kind
        self.state = state

    @property
    def is_pce(self) -> bool:
        return self.kind == "pce"

    def __bool__(self) -> bool:
        return self.is_pce

    def __repr__(self) -> str:
        return self.kind if self.state is None else f"{self.kind}({self.state})"


class Dfa:
    r"""
    Deterministic automaton over the digits 0..r-1.

    constructor arguments:
        `nstates`: states are 0..nstates-1
        `initial`: the initial state
        `finals`: final states, all states when None
        `transitions`: iterable of (src, digit, dst)
        `alphabet`: digit alphabet or its size
        `names`: optional state names used in reports
        `symbols`: optional letters printed instead of digits
    """

    __slots__ = ("_table", "_initial", "_finals", "_alphabet", "_names", "_symbols")

    _table: NDArray[int64]
    _initial: int
    _finals: frozenset[int]
    _alphabet: Alphabet
    _names: tuple[str, ...]
    _symbols: str | None

    def __init__(
        self,
        nstates: int,
        initial: int,
        finals: Iterable[int] | None,
        transitions: Iterable[tuple[int, int, int]],
        alphabet: Alphabet | int,
        *,
        names: Sequence[str] | None = None,
        symbols: str | None = None,
    ):
        if isinstance(alphabet, int):
            alphabet = Alphabet(alphabet)
        if nstates < 1:
            raise InitializationError(f"nstates must be positive, but given {nstates}!", source=self)
        if not 0 <= initial < nstates:
            raise InitializationError(f"initial state {initial} is out of range!", source=self)
        self._alphabet = alphabet
        self._initial = initial
        self._finals = frozenset(range(nstates) if finals is None else finals)
        if any(not 0 <= q < nstates for q in self._finals):
            raise InitializationError(f"final states {sorted(self._finals)} are out of range!", source=self)
        self._table = full((nstates, alphabet.size), -1, dtype=int64)
        for src, digit, dst in transitions:
            if not (0 <= src < nstates and 0 <= dst < nstates):
                raise InitializationError(f"transition {(src, digit, dst)} uses unknown states!", source=self)
            if digit not in alphabet:
                raise InitializationError(f"transition {(src, digit, dst)} uses digit out of {alphabet}!", source=self)
            if self._table[src, digit] not in (-1, dst):
                raise InitializationError(f"two transitions from {src} by {digit}: not deterministic!", source=self)
            self._table[src, digit] = dst
        self._names = tuple(names) if names is not None else tuple(str(q) for q in range(nstates))
        if len(self._names) != nstates:
            raise InitializationError(f"{len(self._names)} names given for {nstates} states!", source=self)
        if symbols is not None and len(symbols) != alphabet.size:
            raise InitializationError(f"{len(symbols)} symbols given for {alphabet}!", source=self)
        self._symbols = symbols

    @property
    def nstates(self) -> int:
        return self._table.shape[0]

    @property
    def initial(self) -> int:
        return self._initial

    @property
    def finals(self) -> frozenset[int]:
        return self._finals

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    def table(self) -> NDArray[int64]:
        return self._table

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def symbols(self) -> str | None:
        return self._symbols

    def transitions(self) -> Iterator[tuple[int, int, int]]:
        for src in range(self.nstates):
            for digit in range(self._alphabet.size):
                if (dst := self._table[src, digit]) >= 0:
                    yield src, digit, int(dst)

    def step(self, state: int, digit: int) -> int:
        """Target state or -1"""
        return int(self._table[state, digit])

    def run(self, digits: Iterable[int], state: int | None = None) -> int:
        state = self._initial if state is None else state
        for digit in digits:
            if not 0 <= digit < self._alphabet.size:
                return -1
            state = int(self._table[state, digit])
            if state < 0:
                return -1
        return state

    def accepts(self, word: Word | Iterable[int]) -> bool:
        return self.run(word) in self._finals

    def format_word(self, word: Word | Sequence[int]) -> str:
        if self._symbols is None:
            return str(word if isinstance(word, Word) else Word(word, self._alphabet))
        return "".join(self._symbols[d] for d in word) or "e"

    def _accessible(self) -> set[int]:
        seen = {self._initial}
        queue = deque([self._initial])
        while queue:
            q = queue.popleft()
            for dst in self._table[q]:
                if dst >= 0 and int(dst) not in seen:
                    seen.add(int(dst))
                    queue.append(int(dst))
        return seen

    def _coaccessible(self) -> set[int]:
        reverse: dict[int, list[int]] = {}
        for src, _, dst in self.transitions():
            reverse.setdefault(dst, []).append(src)
        seen = set(self._finals)
        queue = deque(self._finals)
        while queue:
            q = queue.popleft()
            for src in reverse.get(q, ()):
                if src not in seen:
                    seen.add(src)
                    queue.append(src)
        return seen

    def with_initial(self, state: int) -> Dfa:
        return Dfa(
            self.nstates,
            state,
            self._finals,
            self.transitions(),
            self._alphabet,
            names=self._names,
            symbols=self._symbols,
        )

    def trim(self) -> Dfa:
        """Keeps accessible and co-accessible states, in their original order"""
        useful = sorted(self._accessible() & self._coaccessible())
        if self._initial not in useful:
            raise EmptyLanguageError("the automaton recognizes the empty language", source=self)
        index = {q: i for i, q in enumerate(useful)}
        transitions = [
            (index[src], digit, index[dst])
            for src, digit, dst in self.transitions()
            if src in index and dst in index
        ]
        return Dfa(
            len(useful),
            index[self._initial],
            [index[q] for q in self._finals if q in index],
            transitions,
            self._alphabet,
            names=[self._names[q] for q in useful],
            symbols=self._symbols,
        )

    def quotient(self, state: int) -> Dfa:
        """Automaton of the residual language read from `state`"""
        return self.with_initial(state).trim()

    def check_pce(self) -> PceVerdict:
        trimmed = self.trim()
        for q in range(trimmed.nstates):
            if q not in trimmed.finals:
                return PceVerdict("not_prefix_closed", q)
        for q in range(trimmed.nstates):
            if (trimmed.table[q] < 0).all():
                return PceVerdict("not_extendable", q)
        return PceVerdict("pce")

    def witnesses(self) -> dict[int, tuple[int, ...]]:
        """The radix-least word reaching each accessible state"""
        words = {self._initial: ()}
        queue = deque([self._initial])
        while queue:
            q = queue.popleft()
            for digit in range(self._alphabet.size):
                dst = int(self._table[q, digit])
                if dst >= 0 and dst not in words:
                    words[dst] = words[q] + (digit,)
                    queue.append(dst)
        return words

    def adjacency(self) -> NDArray[int64]:
        matrix = zeros((self.nstates, self.nstates), dtype=int64)
        for src, _, dst in self.transitions():
            matrix[src, dst] += 1
        return matrix

    def spectral_radius(self) -> float:
        return float(abs(eigvals(self.adjacency().astype("d"))).max())

    def degree_sequence(self, n: int) -> NDArray[int64]:
        r"""
        Breadth-first degrees of the language tree, root loop included.

        Only meaningful for trim automata with all states final.
        """
        table = self._table
        chunks = []
        total = 0
        states = full(1, self._initial, dtype=int64)
        while total < n:
            if states.size == 0:
                raise EmptyLanguageError(f"the language has fewer than {n} words", source=self)
            children = table[states]
            mask = children >= 0
            degrees = mask.sum(axis=1).astype(int64)
            if total == 0:
                degrees[0] += 1
            chunks.append(degrees)
            total += degrees.size
            states = children[mask]
        return concatenate(chunks)[:n]

    def __repr__(self) -> str:
        return f"Dfa(nstates={self.nstates}, initial={self._initial}, r={self._alphabet.size})"


def base_dfa(p: int) -> Dfa:
    if p < 2:
        raise InitializationError(f"integer base must be >= 2, but given {p}!")
    transitions = [(0, a, 1) for a in range(1, p)] + [(1, a, 1) for a in range(p)]
    return Dfa(2, 0, None, transitions, p, names=("I", "S"))


def fibonacci_dfa() -> Dfa:
    return Dfa(3, 0, None, [(0, 1, 1), (1, 0, 2), (2, 1, 1), (2, 0, 2)], 2, names="ABC")


def fina_dfa() -> Dfa:
    # no factor 2 1* 2
    transitions = [(0, 2, 1), (0, 1, 2), (1, 0, 2), (1, 1, 1), (2, 2, 1), (2, 0, 2), (2, 1, 2)]
    return Dfa(3, 0, None, transitions, 3, names="ABC")


def _all(src: int, dst: int) -> list[tuple[int, int, int]]:
    return [(src, a, dst) for a in range(4)]


def k1_dfa() -> Dfa:
    return Dfa(2, 0, None, [(0, 0, 1)] + _all(1, 0), 4, names="AB", symbols="abcd")


def k1prime_dfa() -> Dfa:
    return k1_dfa().with_initial(1)


def k2_dfa() -> Dfa:
    transitions = [(0, 0, 1), (0, 1, 1), (1, 2, 0), (1, 3, 0)]
    return Dfa(2, 0, None, transitions, 4, names="AB", symbols="abcd")


def k3_dfa() -> Dfa:
    transitions = [(0, 0, 1), (0, 1, 1), (1, 2, 0), (1, 3, 0), (0, 2, 2), (2, 0, 2), (2, 1, 2)]
    return Dfa(3, 0, None, transitions, 4, names="ABC", symbols="abcd")


def k4_dfa() -> Dfa:
    i, p, q, r, s = range(5)
    transitions = [(i, 0, p), (i, 1, p), (i, 2, r), (p, 0, q), (s, 0, r)]
    transitions += _all(q, p) + _all(r, s)
    return Dfa(5, i, None, transitions, 4, names="ipqrs", symbols="abcd")


def chain_dfa() -> Dfa:
    """a*b*, polynomial growth"""
    return Dfa(2, 0, None, [(0, 0, 0), (0, 1, 1), (1, 1, 1)], 2, names="AB", symbols="ab")


_builtins = {
    "fibonacci": fibonacci_dfa,
    "fina": fina_dfa,
    "k1": k1_dfa,
    "k1prime": k1prime_dfa,
    "k2": k2_dfa,
    "k3": k3_dfa,
    "k4": k4_dfa,
    "chain": chain_dfa,
}

_base_name = re.compile(r"^base[:(]?(\d+)\)?$")


def builtin_names() -> tuple[str, ...]:
    return ("base(p)",) + tuple(_builtins)


def builtin(name: str) -> Dfa:
    key = name.strip().lower()
    if match := _base_name.match(key):
        return base_dfa(int(match.group(1)))
    try:
        return _builtins[key]()
    except KeyError:
        raise UnknownSystemError(
            f"unknown automaton {name!r}, expected one of {builtin_names()}"
        ) from None


def parse_dfa(text: str, filename: str | None = None) -> Dfa:
    nstates = None
    initial = 0
    finals = None
    alphabet = None
    transitions = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, *values = line.split()
        try:
            numbers = [int(x) for x in values]
        except ValueError as exc:
            raise ParseError(str(exc), filename=filename, line=lineno) from exc
        match key, numbers:
            case "states", [n]:
                nstates = n
            case "initial", [q]:
                initial = q
            case "finals", _:
                finals = numbers
            case "alphabet", [r]:
                alphabet = r
            case "trans", [src, digit, dst]:
                transitions.append((src, digit, dst))
            case _:
                raise ParseError(f"cannot read {line!r}", filename=filename, line=lineno)
    if nstates is None:
        raise ParseError("missing `states` line", filename=filename)
    if alphabet is None:
        alphabet = max((digit for _, digit, _ in transitions), default=0) + 1
    try:
        return Dfa(nstates, initial, finals, transitions, alphabet)
    except InitializationError as exc:
        raise ParseError(str(exc), filename=filename) from exc


def read_dfa(path: str) -> Dfa:
    with open(path) as f:
        return parse_dfa(f.read(), filename=path)
