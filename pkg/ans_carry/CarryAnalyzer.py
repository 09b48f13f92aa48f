from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from mpmath import mpf, workprec
from numpy import cumsum, int64

from ans_carry.bundles.serialize import decimal_str, exact_and_decimal, write_csv
from ans_carry.DfaLanguage import MAX_WORDS, REACHABILITY_BUDGET
from ans_carry.exception import BudgetExceededError, InitializationError, PrecisionError
from ans_carry.Signature import Signature
from ans_carry.SpectralReport import language_report
from ans_carry.SystemSource import DfaSource, GreedySource, RationalBaseSource, SignatureSource

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence
    from typing import TextIO

    from ans_carry.Signature import LevelCounter
    from ans_carry.SystemSource import SystemSource, TheoreticalCp

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1 << 20
CONVERGENCE_TOLERANCE = Fraction(1, 1000)


@dataclass(frozen=True, slots=True)
class Checkpoint:
    n: int
    scp: int

    @property
    def mean(self) -> Fraction:
        return Fraction(self.scp, self.n)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "scp": self.scp, "mean": exact_and_decimal(self.mean)}


@dataclass(frozen=True, slots=True)
class FilteredPoint:
    level: int
    v: int
    mean: Fraction

    def to_dict(self) -> dict[str, Any]:
        return {"level": self.level, "v": self.v, "mean": exact_and_decimal(self.mean)}


@dataclass(frozen=True, slots=True)
class CpReport:
    r"""
    Amortized carry propagation of the first `n` words: running means at the
    checkpoints, length-filtered means at the v(ℓ) <= n and the closed form
    value when the system has one.
    """

    source: str
    n: int
    scp: int
    checkpoints: tuple[Checkpoint, ...]
    filtered: tuple[FilteredPoint, ...] = field(default=())
    theoretical: TheoreticalCp | None = None

    @property
    def mean(self) -> Fraction:
        return Fraction(self.scp, self.n)

    @property
    def deviation(self) -> mpf | None:
        """|mean - theoretical value|"""
        if self.theoretical is None:
            return None
        with workprec(128):
            return abs(mpf(self.scp) / self.n - self.theoretical.value)

    def to_dict(self) -> dict[str, Any]:
        deviation = self.deviation
        return {
            "source": self.source,
            "n": self.n,
            "scp": self.scp,
            "mean": exact_and_decimal(self.mean),
            "theoretical": self.theoretical.to_dict() if self.theoretical else None,
            "deviation": decimal_str(deviation) if deviation is not None else None,
            "checkpoints": [checkpoint.to_dict() for checkpoint in self.checkpoints],
            "filtered": [point.to_dict() for point in self.filtered],
        }

    def rows(self) -> Iterable[tuple]:
        for checkpoint in self.checkpoints:
            yield checkpoint.n, checkpoint.scp, checkpoint.mean, decimal_str(checkpoint.mean)

    def write_csv(self, stream: TextIO) -> None:
        metadata = {"source": self.source, "n": self.n}
        if self.theoretical is not None:
            metadata["theoretical"] = decimal_str(self.theoretical.value)
            metadata["provenance"] = self.theoretical.provenance
        write_csv(("checkpoint", "scp", "mean", "mean_decimal"), self.rows(), stream, metadata)


def _check_budget(n: int) -> None:
    if n > MAX_WORDS:
        raise BudgetExceededError(f"{n} words requested, the budget is {MAX_WORDS}")


def level_counts_upto(src: SystemSource, n: int) -> LevelCounter:
    """Level counts far enough for v(ℓ) > n"""
    level_max = 16
    while True:
        counter = src.level_counter(level_max)
        if counter.v[-1] > n or counter.level_max < level_max or level_max >= REACHABILITY_BUDGET:
            return counter
        level_max = min(2 * level_max, REACHABILITY_BUDGET)


def scp_at(src: SystemSource, points: Sequence[int], mode: str = "numba") -> list[int]:
    r"""
    scp(N) for the increasing `points`, from one pass over the cp stream.

    Random access sources are streamed in blocks.
    """
    if not points:
        return []
    if any(b <= a for a, b in zip(points, points[1:])) or points[0] < 0:
        raise InitializationError(f"points must be increasing and non-negative, given {list(points[:8])}...")
    n = points[-1]
    _check_budget(n)
    block = BLOCK_SIZE if src.random_access else max(n, 1)
    results = []
    index = 0
    total = 0
    while index < len(points) and points[index] == 0:
        results.append(0)
        index += 1
    for start in range(0, n, block):
        size = min(block, n - start)
        sums = cumsum(src.cp_array(size, start=start, mode=mode), dtype=int64)
        while index < len(points) and points[index] <= start + size:
            results.append(total + int(sums[points[index] - start - 1]))
            index += 1
        total += int(sums[-1])
    return results


def default_checkpoints(src: SystemSource, n: int) -> list[int]:
    """Powers of 2 and all v(ℓ) up to n, and n itself"""
    points = set()
    power = 1
    while power <= n:
        points.add(power)
        power *= 2
    points.update(v for v in level_counts_upto(src, n).v if 0 < v <= n)
    points.add(n)
    return sorted(points)


def empirical_cp(
    src: SystemSource,
    n: int,
    checkpoints: Sequence[int] | None = None,
    mode: str = "numba",
) -> CpReport:
    if n < 1:
        raise InitializationError(f"n must be positive, but given {n}!")
    _check_budget(n)
    if checkpoints is None:
        points = default_checkpoints(src, n)
    else:
        points = sorted({c for c in checkpoints if 0 < c < n} | {n})
    logger.debug("%s: %d words, %d checkpoints", src.name, n, len(points))
    sums = scp_at(src, points, mode)
    counter = level_counts_upto(src, n)
    filtered = tuple(
        FilteredPoint(ell, v, mean)
        for ell, (v, mean) in enumerate(zip(counter.v, counter.filtered_means()))
        if v <= n
    )
    report = CpReport(
        src.name,
        n,
        sums[-1],
        tuple(Checkpoint(c, s) for c, s in zip(points, sums)),
        filtered,
        src.theoretical(),
    )
    logger.info("%s: mean carry propagation %s over %d words", src.name, decimal_str(report.mean), n)
    return report


@dataclass(frozen=True, slots=True)
class FilteredCp:
    r"""
    Length-filtered means (1/v(ℓ)) Σ_{i≤ℓ} v(i).

    `trend` is "converging" when the increments shrink, "diverging" when the
    late increments do not.
    """

    points: tuple[FilteredPoint, ...]
    trend: str

    @property
    def last(self) -> Fraction:
        return self.points[-1].mean

    @property
    def limit(self) -> Fraction | None:
        return self.last if self.trend == "converging" else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "trend": self.trend,
            "limit": "+inf" if self.trend == "diverging" else exact_and_decimal(self.last),
            "points": [point.to_dict() for point in self.points],
        }


def _trend(means: Sequence[Fraction]) -> str:
    increments = [abs(b - a) for a, b in zip(means, means[1:])]
    if len(increments) < 8:
        return "unknown"
    quarter = len(increments) // 4
    late = sum(increments[-quarter:]) / quarter
    before = sum(increments[-2 * quarter : -quarter]) / quarter
    if late > CONVERGENCE_TOLERANCE and late * 10 >= before * 9:
        return "diverging"
    return "converging"


def filtered_cp(src: SystemSource, level_max: int) -> FilteredCp:
    if level_max < 1:
        raise InitializationError(f"level_max must be positive, but given {level_max}!")
    counter = src.level_counter(level_max)
    points = tuple(
        FilteredPoint(ell, v, mean) for ell, (v, mean) in enumerate(zip(counter.v, counter.filtered_means()))
    )
    trend = _trend([point.mean for point in points])
    if trend == "diverging":
        logger.warning("%s: filtered carry propagation grows without bound", src.name)
    return FilteredCp(points, trend)


def probe(src: SystemSource, points: Sequence[int], mode: str = "numba") -> tuple[Checkpoint, ...]:
    """scp(N_j)/N_j along an increasing sequence"""
    points = list(points)
    if any(b <= a for a, b in zip(points, points[1:])) or not points or points[0] < 1:
        raise InitializationError("probe points must be positive and increasing")
    if isinstance(src, DfaSource) and src.is_pce:
        sums = [src.scp(n) for n in points]
    else:
        sums = scp_at(src, points, mode)
    return tuple(Checkpoint(n, s) for n, s in zip(points, sums))


@dataclass(frozen=True, slots=True)
class LocalGrowth:
    r"""
    u(ℓ+1)/u(ℓ) series with the exact local growth rate γ when it is known.

    `consistent` compares the closed form carry propagation with γ/(γ-1).
    """

    ratios: tuple[Fraction | None, ...]
    gamma: mpf | None
    exact: Fraction | None
    verdict: str
    consistent: bool | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "gamma": decimal_str(self.gamma) if self.gamma is not None else None,
            "gamma_exact": str(self.exact) if self.exact is not None else None,
            "consistent": self.consistent,
            "ratios": [decimal_str(r) if r is not None else None for r in self.ratios],
        }


def _growth_rate(src: SystemSource) -> tuple[str, mpf | None, Fraction | None]:
    match src:
        case DfaSource():
            try:
                report = language_report(src.language)
            except PrecisionError:
                return "unknown", None, None
            if report.local_growth_rate is None:
                return "none", None, None
            return "exists", report.local_growth_rate, report.exact_modulus
        case RationalBaseSource():
            gamma = src.base.base
        case SignatureSource() if isinstance(src.signature, Signature):
            rhythm = src.signature.rhythm
            gamma = Fraction(rhythm.p, rhythm.q)
        case GreedySource() if src.basis.growth is not None:
            growth = src.basis.growth
            if growth.is_rational:
                gamma = growth.interval[0]
            else:
                return "exists", growth.to_mpf(128), None
        case _:
            return "unknown", None, None
    with workprec(128):
        return "exists", mpf(gamma.numerator) / gamma.denominator, gamma


def local_growth(src: SystemSource, level_max: int) -> LocalGrowth:
    ratios = tuple(src.level_counter(level_max).growth_ratios())
    verdict, gamma, exact = _growth_rate(src)
    consistent = None
    if gamma is not None and gamma > 1 and (theoretical := src.theoretical()) is not None:
        with workprec(128):
            consistent = abs(gamma / (gamma - 1) - theoretical.value) < mpf(2) ** -64
    logger.info("%s: local growth rate %s", src.name, decimal_str(gamma) if gamma is not None else verdict)
    return LocalGrowth(ratios, gamma, exact, verdict, consistent)
