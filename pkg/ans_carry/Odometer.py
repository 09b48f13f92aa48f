from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from numba import njit, prange
from numpy import array, bincount, empty, int64, searchsorted

from ans_carry.bundles.serialize import decimal_str, exact_and_decimal, write_csv
from ans_carry.exception import InitializationError, NotInLanguageError, PrecisionError
from ans_carry.GreedyBasis import WORKING_LENGTH, greedy_cp_stream
from ans_carry.RationalBase import RandomAccessModes, RandomAccessModesType
from ans_carry.Word import Word

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence
    from typing import TextIO

    from numpy.typing import NDArray

    from ans_carry.GreedyBasis import GreedyBasis

logger = logging.getLogger(__name__)

ODOMETER_WINDOW = 32
ODOMETER_STABLE_RUNS = 8
TAIL_HORIZON = 256


@dataclass(frozen=True, slots=True)
class OdometerStep:
    r"""
    Successor of the longest truncation of s and the low order window.

    `stabilized` is set when the window is the same for the last truncation
    lengths; otherwise the image of s is not determined by these digits.
    """

    successor: Word
    window: tuple[int, ...]
    stabilized: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "successor": str(self.successor),
            "window": "".join(map(str, self.window)),
            "stabilized": self.stabilized,
        }


def _padded_successor(basis: GreedyBasis, digits: tuple[int, ...]) -> tuple[int, ...]:
    value = sum(d * basis.term(i) for i, d in enumerate(reversed(digits)))
    successor = basis.repr(value + 1).digits
    return (0,) * (len(digits) - len(successor)) + successor


def odometer_step(
    basis: GreedyBasis,
    s: Word | Sequence[int],
    window: int = ODOMETER_WINDOW,
    stable_runs: int = ODOMETER_STABLE_RUNS,
) -> OdometerStep:
    """τ_G on the left-truncated sequence s, read through succ of its suffixes s_[j,0]"""
    digits = tuple(s)
    if not basis.is_member(digits, allow_leading_zeros=True):
        raise NotInLanguageError(f"{''.join(map(str, digits))} has a suffix outside 0*L_G", source=basis)
    if stable_runs < 1:
        raise InitializationError(f"stable_runs must be positive, but given {stable_runs}!")
    width = min(window, len(digits) - stable_runs + 1)
    if width < 1:
        raise InitializationError(
            f"a truncation of length {len(digits)} is too short for {stable_runs} stable runs", source=basis
        )
    windows = []
    successor = ()
    for length in range(len(digits) - stable_runs + 1, len(digits) + 1):
        successor = _padded_successor(basis, digits[len(digits) - length :])
        windows.append(successor[-width:])
    stabilized = all(w == windows[-1] for w in windows)
    if not stabilized:
        logger.warning(
            "odometer window did not stabilize over truncation lengths %d..%d",
            len(digits) - stable_runs + 1,
            len(digits),
        )
    return OdometerStep(Word(successor, basis.alphabet), windows[-1], stabilized)


def _cylinder_hits_python(
    terms: NDArray[int64], suffix: NDArray[int64], start: int, hits: NDArray[int64]
) -> None:
    # suffix holds the lowest digit first
    length = suffix.shape[0]
    for idx in prange(hits.shape[0]):
        m = start + idx
        k = searchsorted(terms, m, side="right") - 1
        match = 1
        for pos in range(k, -1, -1):
            digit = m // terms[pos]
            m -= digit * terms[pos]
            if pos < length and digit != suffix[pos]:
                match = 0
        for pos in range(k + 1, length):
            if suffix[pos] != 0:
                match = 0
        hits[idx] = match


_cylinder_hits_numba: Callable[[NDArray, NDArray, int, NDArray], None] = njit(cache=True)(
    _cylinder_hits_python
)
_cylinder_hits_parallel: Callable[[NDArray, NDArray, int, NDArray], None] = njit(cache=True, parallel=True)(
    _cylinder_hits_python
)

_cylinder_hits_functions = {
    "python": _cylinder_hits_python,
    "numba": _cylinder_hits_numba,
    "parallel": _cylinder_hits_parallel,
}


def j_table(basis: GreedyBasis, k_max: int) -> list[int]:
    """J(k): the largest j < k with g_j a suffix of g_k; J(0) = -1"""
    maxima = [basis.g_max(k) for k in range(k_max + 1)]
    table = [-1]
    for k in range(1, k_max + 1):
        table.append(max(j for j in range(k) if maxima[j].is_suffix_of(maxima[k])))
    return table


def suffix_chain(table: Sequence[int], m: int) -> list[int]:
    """m, J(m), J(J(m)), ..., 0: the indices of the g's that are suffixes of g_m"""
    chain = []
    while m >= 0:
        chain.append(m)
        m = table[m]
    return chain


def layer_index(basis: GreedyBasis, n: int) -> int:
    """The k with n in D_k: g_k is the longest maximal word ending the padded repr(n)"""
    word = basis.repr(n)
    return max(k for k in range(len(word) + 1) if basis.g_max(k).is_suffix_of(word))


def g_cylinder_counts(
    basis: GreedyBasis, k_max: int, n: int, mode: RandomAccessModesType = "numba"
) -> list[int]:
    r"""
    #{i < n : g_ℓ ends the padded repr(i)} for ℓ = 0..k_max, from the cp histogram.
    """
    if n < 1:
        raise InitializationError(f"n must be positive, but given {n}!")
    histogram = bincount(greedy_cp_stream(basis, n, 0, mode))
    table = j_table(basis, max(k_max, len(histogram) - 2))
    counts = [0] * (k_max + 1)
    for cp, hits in enumerate(histogram):
        if cp == 0 or hits == 0:
            continue
        for ell in suffix_chain(table, cp - 1):
            if ell <= k_max:
                counts[ell] += int(hits)
    return counts


@dataclass(frozen=True, slots=True)
class CylinderQuery:
    word: Word
    n: int
    count: int

    @property
    def measure(self) -> Fraction:
        """ν_N(cyl(w))"""
        return Fraction(self.count, self.n)

    def to_dict(self) -> dict[str, Any]:
        return {"word": str(self.word), "n": self.n, "count": self.count, "measure": exact_and_decimal(self.measure)}


def cylinder_measure(
    basis: GreedyBasis, word: Word | Sequence[int], n: int, mode: RandomAccessModesType = "numba"
) -> CylinderQuery:
    if n < 1:
        raise InitializationError(f"n must be positive, but given {n}!")
    if mode not in RandomAccessModes:
        raise InitializationError(f"mode must be in {RandomAccessModes}, but given {mode}!")
    if not isinstance(word, Word):
        word = Word(word, basis.alphabet)
    length = len(word)
    if word == basis.g_max(length):
        count = g_cylinder_counts(basis, length, n, mode)[length]
    else:
        terms = basis.as_array(n)
        suffix = array(word.digits[::-1], dtype=int64)
        hits = empty(n, dtype=int64)
        _cylinder_hits_functions[mode](terms, suffix, 0, hits)
        count = int(hits.sum())
    return CylinderQuery(word, n, count)


def tail_bound(basis: GreedyBasis, k: int, horizon: int = TAIL_HORIZON) -> Fraction:
    """M_k = Σ_{j>k} (j+1)/G_j, summed up to k + horizon terms"""
    last = k + horizon
    if basis.is_finite:
        last = min(last, len(basis.known_terms) - 1)
    return sum((Fraction(j + 1, basis.term(j)) for j in range(k + 1, last + 1)), Fraction(0))


def is_summable(basis: GreedyBasis, length: int = WORKING_LENGTH) -> bool:
    """Σ k/G_k looks bounded: the second half of the first `length` terms adds less than 1/1000"""
    if basis.is_finite and len(basis.known_terms) < length:
        return False
    tail = sum(Fraction(k, basis.term(k)) for k in range(length // 2, length))
    return tail < Fraction(1, 1000)


@dataclass(frozen=True, slots=True)
class LayerRow:
    k: int
    g: Word
    j: int
    count: int
    cumulative: Fraction
    tail: Fraction

    @property
    def weight(self) -> int:
        return self.k - self.j


@dataclass(frozen=True, slots=True)
class LayerTable:
    r"""
    Carry propagation layer by layer: 1 + Σ_k (k - J(k)) ν_N(cyl(g_k)).

    With K at least the deepest layer reached below N the estimate is the
    exact mean scp(N)/N.
    """

    n: int
    rows: tuple[LayerRow, ...]

    @property
    def estimate(self) -> Fraction:
        return self.rows[-1].cumulative if self.rows else Fraction(1)

    @property
    def tail(self) -> Fraction:
        return self.rows[-1].tail if self.rows else Fraction(0)

    def measure(self, k: int) -> Fraction:
        return Fraction(self.rows[k - 1].count, self.n)

    def j_values(self) -> list[int]:
        return [row.j for row in self.rows]

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "estimate": exact_and_decimal(self.estimate),
            "tail_bound": exact_and_decimal(self.tail),
            "uniquely_ergodic_assumed": True,
            "layers": [
                {
                    "k": row.k,
                    "g": str(row.g),
                    "J": row.j,
                    "weight": row.weight,
                    "measure": exact_and_decimal(Fraction(row.count, self.n)),
                }
                for row in self.rows
            ],
        }

    def write_csv(self, stream: TextIO, metadata: dict[str, Any] | None = None) -> None:
        rows = (
            (
                row.k,
                str(row.g),
                row.j,
                row.weight,
                decimal_str(Fraction(row.count, self.n)),
                decimal_str(row.cumulative),
                decimal_str(row.tail),
            )
            for row in self.rows
        )
        header = ("k", "g_k", "J", "weight", "nu", "cumulative", "M_k")
        write_csv(header, rows, stream, {"n": self.n, **(metadata or {})})


def layer_cp(
    basis: GreedyBasis,
    k_max: int,
    n: int,
    tolerance: Fraction | float | None = None,
    mode: RandomAccessModesType = "numba",
) -> LayerTable:
    if k_max < 1:
        raise InitializationError(f"k_max must be positive, but given {k_max}!")
    if not is_summable(basis):
        raise InitializationError(f"Σ k/G_k does not look bounded for {basis}", source=basis)
    counts = g_cylinder_counts(basis, k_max, n, mode)
    table = j_table(basis, k_max)
    rows = []
    cumulative = Fraction(1)
    for k in range(1, k_max + 1):
        cumulative += Fraction((k - table[k]) * counts[k], n)
        rows.append(LayerRow(k, basis.g_max(k), table[k], counts[k], cumulative, tail_bound(basis, k)))
    result = LayerTable(n, tuple(rows))
    if tolerance is not None and result.tail > Fraction(tolerance):
        raise PrecisionError(
            f"tail bound {decimal_str(result.tail)} above the tolerance {tolerance} at K={k_max}", source=basis
        )
    logger.info("layer estimate %s with tail bound %s", decimal_str(result.estimate), decimal_str(result.tail))
    return result


def fk_identity_check(basis: GreedyBasis, k: int, n: int, mode: RandomAccessModesType = "numba") -> bool:
    r"""
    Σ_{i<N} f_k(i) = Σ_{i<N} f_{k-1}(i) + floor(N/G_k)(k+1) for 0 < N < G_{k+1},
    where f_k(i) = cp(i) if cp(i) <= k+1 and 0 otherwise.
    """
    if k < 0:
        raise InitializationError(f"k must be non-negative, but given {k}!")
    if not 0 < n < basis.term(k + 1):
        raise InitializationError(f"N must be in (0, G_{k + 1}) = (0, {basis.term(k + 1)}), but given {n}!")
    cp = greedy_cp_stream(basis, n, 0, mode)
    left = int(cp[cp <= k + 1].sum())
    right = int(cp[cp <= k].sum()) + n // basis.term(k) * (k + 1)
    if left != right:
        logger.warning("f_k identity fails for k=%d, N=%d: %d != %d", k, n, left, right)
    return left == right
