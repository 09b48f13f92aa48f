from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Literal

from mpmath import mpf, workprec

from ans_carry.AlgebraicReal import AlgebraicReal, NumberFieldElement
from ans_carry.exception import BudgetExceededError, InitializationError
from ans_carry.GreedyBasis import GreedyBasis
from ans_carry.Word import Word

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)

STATE_CAP = 10_000

ParryClass = Literal["simple", "non-simple", "unknown"]


@dataclass(frozen=True, slots=True)
class BetaExpansion:
    r"""
    Rényi expansion of 1: `preperiod` followed by `period` repeated forever.

    A finite expansion has an empty period, an expansion cut at the state cap
    keeps all computed digits in `preperiod` and is of class "unknown".
    """

    preperiod: tuple[int, ...]
    period: tuple[int, ...]
    parry: ParryClass

    @property
    def is_finite(self) -> bool:
        return self.parry == "simple"

    def __str__(self) -> str:
        head = "".join(map(str, self.preperiod))
        if self.parry == "non-simple":
            return f"{head}({''.join(map(str, self.period))})^ω"
        if self.parry == "unknown":
            return f"{head}..."
        return head


def beta_expand_one(beta: AlgebraicReal, state_cap: int = STATE_CAP) -> BetaExpansion:
    """x_i = floor(β r_{i-1}), r_i = {β r_{i-1}} with r_0 = 1, in exact arithmetic"""
    if state_cap < 1:
        raise InitializationError(f"state_cap must be positive, but given {state_cap}!")
    generator = beta.generator()
    remainder: NumberFieldElement = beta.one()
    seen = {remainder: 0}
    digits = []
    for i in range(1, state_cap + 1):
        y = generator * remainder
        digit = y.floor()
        remainder = y - digit
        digits.append(digit)
        if remainder.is_zero:
            logger.info("β-expansion of 1 is finite: %s", "".join(map(str, digits)))
            return BetaExpansion(tuple(digits), (), "simple")
        if (start := seen.get(remainder)) is not None:
            logger.info("β-expansion of 1 is eventually periodic, preperiod %d, period %d", start, i - start)
            return BetaExpansion(tuple(digits[:start]), tuple(digits[start:]), "non-simple")
        seen[remainder] = i
    logger.warning("no period found within %d remainders, Parry class unknown", state_cap)
    return BetaExpansion(tuple(digits), (), "unknown")


def quasi_greedy(expansion: BetaExpansion) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """d* as (preperiod, period)"""
    match expansion.parry:
        case "simple":
            *head, last = expansion.preperiod
            return (), tuple(head) + (last - 1,)
        case "non-simple":
            return expansion.preperiod, expansion.period
        case _:
            raise InitializationError("the quasi-greedy expansion of 1 is unknown within the state cap")


class BetaProfile:
    r"""
    β with its expansion of 1, the quasi-greedy expansion d* and the
    greedy numeration system G_β.

    constructor arguments:
        `beta`: real algebraic number > 1
        `state_cap`: number of remainders tried before the class is declared unknown
    """

    __slots__ = ("_beta", "_expansion", "_preperiod", "_period", "_basis")

    _beta: AlgebraicReal
    _expansion: BetaExpansion
    _preperiod: tuple[int, ...]
    _period: tuple[int, ...]
    _basis: GreedyBasis | None

    def __init__(self, beta: AlgebraicReal, state_cap: int = STATE_CAP):
        self._beta = beta
        self._expansion = beta_expand_one(beta, state_cap)
        if self._expansion.parry == "unknown":
            self._preperiod, self._period = self._expansion.preperiod, ()
        else:
            self._preperiod, self._period = quasi_greedy(self._expansion)
        self._basis = None

    @property
    def beta(self) -> AlgebraicReal:
        return self._beta

    @property
    def expansion(self) -> BetaExpansion:
        return self._expansion

    @property
    def parry(self) -> ParryClass:
        return self._expansion.parry

    @property
    def quasi_greedy(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return quasi_greedy(self._expansion)

    @property
    def is_truncated(self) -> bool:
        return self.parry == "unknown"

    @property
    def odometer_continuous(self) -> bool | None:
        """The odometer of G_β is continuous iff β is a simple Parry number"""
        if self.parry == "unknown":
            return None
        return self.parry == "simple"

    def d(self, i: int) -> int:
        """i-th digit of d*, starting from d_1"""
        if i < 1:
            raise InitializationError(f"digits of d* start at 1, but given {i}!", source=self)
        index = i - 1
        if index < len(self._preperiod):
            return self._preperiod[index]
        if not self._period:
            raise BudgetExceededError(
                f"d* is known only up to {len(self._preperiod)} digits", source=self
            )
        return self._period[(index - len(self._preperiod)) % len(self._period)]

    def d_prefix(self, length: int) -> tuple[int, ...]:
        return tuple(self.d(i) for i in range(1, length + 1))

    def d_star_str(self) -> str:
        head = "".join(map(str, self._preperiod))
        if not self._period:
            return f"{head}..."
        return f"{head}({''.join(map(str, self._period))})^ω"

    def basis(self) -> GreedyBasis:
        if self._basis is None:
            self._basis = basis_from_beta(self)
        return self._basis

    def to_dict(self) -> dict[str, Any]:
        preperiod, period = self._preperiod, self._period
        return {
            "minpoly": list(self._beta.minpoly),
            "interval": [str(x) for x in self._beta.interval],
            "expansion_of_one": str(self._expansion),
            "parry": self.parry,
            "quasi_greedy": {"preperiod": list(preperiod), "period": list(period)},
            "odometer_continuous": self.odometer_continuous,
        }

    def __repr__(self) -> str:
        return f"BetaProfile({self._beta.minpoly}, {self._expansion}, {self.parry})"


def basis_from_beta(profile: BetaProfile) -> GreedyBasis:
    r"""
    G_0 = 1, G_ℓ = d_1 G_{ℓ-1} + ... + d_ℓ G_0 + 1 with d* = d_1 d_2 ...
    """
    if profile.is_truncated:
        logger.warning("building G_β from the truncated expansion %s", profile.d_star_str())

    def rule(terms: list[int]) -> int:
        ell = len(terms)
        return sum(profile.d(i) * terms[ell - i] for i in range(1, ell + 1)) + 1

    return GreedyBasis((1,), rule=rule, name=f"beta{profile.beta.minpoly}", growth=profile.beta)


def basis_constant(profile: BetaProfile, level: int, precision: int = 128) -> mpf:
    """K̂ = G_ℓ / β^ℓ"""
    term = profile.basis().term(level)
    beta = profile.beta.to_mpf(precision)
    with workprec(precision):
        return mpf(term) / beta**level


def beta_membership(profile: BetaProfile, word: Word | Sequence[int]) -> bool:
    """Every suffix w_i ... w_0 is lexicographically <= d_1 ... d_{i+1}"""
    digits = tuple(word)
    if not digits:
        return True
    if digits[0] == 0:
        return False
    bound = profile.d_prefix(len(digits))
    for length in range(1, len(digits) + 1):
        if digits[-length:] > bound[:length]:
            return False
    return True


def integer_beta(p: int) -> AlgebraicReal:
    if p < 2:
        raise InitializationError(f"integer base must be >= 2, but given {p}!")
    return AlgebraicReal((1, -p))
