from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from mpmath import mpc, mpf, polyroots, workprec
from mpmath.libmp import NoConvergence
from sympy import Poly, Rational, Symbol

from ans_carry.bundles.serialize import decimal_str, fraction_str
from ans_carry.DfaLanguage import DfaLanguage
from ans_carry.exception import InitializationError, PrecisionError
from ans_carry.LinearRecurrence import LinearRecurrence, minimal_recurrence

if TYPE_CHECKING:
    from ans_carry.Dfa import Dfa

logger = logging.getLogger(__name__)

PRECISION_START = 128
PRECISION_MAX = 2048

_X = Symbol("X")


@dataclass(frozen=True, slots=True)
class Root:
    value: mpc
    multiplicity: int
    factor: tuple[int, ...]

    @property
    def modulus(self) -> mpf:
        return abs(self.value)

    def to_dict(self, digits: int = 30) -> dict[str, Any]:
        return {
            "re": decimal_str(self.value.real, digits),
            "im": decimal_str(self.value.imag, digits),
            "multiplicity": self.multiplicity,
        }


@dataclass(frozen=True, slots=True)
class SpectralReport:
    r"""
    Root structure of the minimal polynomial of a counting sequence.

    `modulus` is the largest root modulus and `dominant` the real positive
    root attaining it (None if there is no such root, which never happens for
    counting sequences of automata).
    """

    recurrence: LinearRecurrence
    roots: tuple[Root, ...]
    modulus: mpf
    dominant: Root | None
    tied: tuple[Root, ...]
    precision: int
    is_dev: bool
    is_adev: bool
    growth: str
    multiplicities_bounded: bool = field(default=True)

    @property
    def polynomial(self) -> tuple[Fraction, ...]:
        return self.recurrence.polynomial

    @property
    def local_growth_rate(self) -> mpf | None:
        if self.is_adev and self.dominant is not None:
            return self.dominant.value.real
        return None

    @property
    def exact_modulus(self) -> Fraction | None:
        """The modulus when it is rational"""
        if self.dominant is None or len(self.dominant.factor) != 2:
            return None
        a, b = self.dominant.factor
        return Fraction(-b, a)

    def to_dict(self) -> dict[str, Any]:
        growth = self.local_growth_rate
        return {
            "polynomial": [fraction_str(c) for c in self.polynomial],
            "order": self.recurrence.order,
            "roots": [root.to_dict() for root in self.roots],
            "modulus": decimal_str(self.modulus, 30),
            "modulus_polynomial": list(self.dominant.factor) if self.dominant else None,
            "is_dev": self.is_dev,
            "is_adev": self.is_adev,
            "growth": self.growth,
            "local_growth_rate": decimal_str(growth, 30) if growth is not None else None,
            "precision": self.precision,
        }


def _irreducible_factors(polynomial: tuple[Fraction, ...]) -> list[tuple[tuple[int, ...], int]]:
    """Primitive integer irreducible factors, highest degree first, with multiplicities"""
    poly = Poly([Rational(c.numerator, c.denominator) for c in polynomial], _X, domain="QQ")
    factors = []
    if poly.degree() < 1:
        return factors
    _, sqf = poly.sqf_list()
    for part, multiplicity in sqf:
        _, irreducibles = part.factor_list()
        for factor, _ in irreducibles:
            _, integral = factor.clear_denoms(convert=True)
            coeffs = tuple(int(c) for c in integral.primitive()[1].all_coeffs())
            if coeffs[0] < 0:
                coeffs = tuple(-c for c in coeffs)
            factors.append((coeffs, multiplicity))
    factors.sort()
    return factors


def _roots(factors: list[tuple[tuple[int, ...], int]], precision: int) -> list[Root] | None:
    roots = []
    with workprec(precision):
        for coeffs, multiplicity in factors:
            if len(coeffs) == 2:
                values = [mpc(mpf(-coeffs[1]) / coeffs[0])]
            else:
                try:
                    values = polyroots(coeffs, maxsteps=50 + 10 * len(coeffs), extraprec=precision)
                except NoConvergence:
                    return None
            roots.extend(Root(mpc(value), multiplicity, coeffs) for value in values)
    return roots


def _classify(recurrence: LinearRecurrence, roots: list[Root], precision: int) -> SpectralReport | None:
    with workprec(precision):
        if not roots:
            return SpectralReport(recurrence, (), mpf(0), None, (), precision, False, False, "finite")
        moduli = [root.modulus for root in roots]
        largest = max(moduli)
        tight = mpf(2) ** (-(precision // 2))
        loose = mpf(2) ** (-(precision // 4))
        tied = []
        for root, modulus in zip(roots, moduli):
            gap = (largest - modulus) / largest
            if gap <= tight:
                tied.append(root)
            elif gap <= loose:
                return None
        dominant = None
        for root in tied:
            if abs(root.value.imag) <= tight * largest and root.value.real > 0:
                dominant = root
        if dominant is None:
            logger.warning("no real positive root of maximal modulus for %s", recurrence)
            is_adev = False
            bounded = False
        else:
            others = [root for root in tied if root is not dominant]
            is_adev = all(root.multiplicity < dominant.multiplicity for root in others)
            bounded = all(root.multiplicity <= dominant.multiplicity for root in others)
        if largest > 1 + tight:
            growth = "exponential"
        elif largest >= 1 - tight:
            growth = "polynomial"
        else:
            growth = "finite"
        return SpectralReport(
            recurrence,
            tuple(roots),
            largest,
            dominant,
            tuple(tied),
            precision,
            len(tied) == 1 and dominant is not None,
            is_adev,
            growth,
            bounded,
        )


def spectral_classify(
    recurrence: LinearRecurrence,
    *,
    precision: int = PRECISION_START,
    precision_max: int = PRECISION_MAX,
) -> SpectralReport:
    factors = _irreducible_factors(recurrence.polynomial)
    while precision <= precision_max:
        roots = _roots(factors, precision)
        if roots is not None and (report := _classify(recurrence, roots, precision)) is not None:
            return report
        logger.debug("root moduli not separated at %d bits, escalating", precision)
        precision *= 2
    raise PrecisionError(
        f"root moduli of {recurrence} remain indistinguishable at {precision_max} bits"
    )


def same_modulus(a: SpectralReport, b: SpectralReport) -> bool:
    if a.dominant is not None and b.dominant is not None:
        if a.dominant.factor != b.dominant.factor:
            return False
    precision = min(a.precision, b.precision)
    with workprec(precision):
        scale = max(a.modulus, b.modulus)
        if scale == 0:
            return True
        return abs(a.modulus - b.modulus) <= scale * mpf(2) ** (-(precision // 2))


@dataclass(frozen=True, slots=True)
class QuotientReport:
    state: int
    name: str
    witness: str
    report: SpectralReport

    def to_dict(self) -> dict[str, Any]:
        return {
            "state": self.name,
            "witness": self.witness,
            "modulus": decimal_str(self.report.modulus, 30),
            "is_adev": self.report.is_adev,
            "is_dev": self.report.is_dev,
        }


@dataclass(frozen=True, slots=True)
class CpVerdict:
    r"""
    Outcome of the quotient test for the amortized carry propagation.

    `exists` is a sufficient verdict; a negative outcome means only that the
    test does not apply, the offending quotients are listed in `offending`.
    """

    exists: bool
    language: SpectralReport
    quotients: tuple[QuotientReport, ...]
    offending: tuple[QuotientReport, ...]
    diagnostics: tuple[str, ...]
    adjacency_radius: float

    @property
    def status(self) -> str:
        return "exists" if self.exists else "undetermined"

    @property
    def value(self) -> Fraction | None:
        """λ/(λ-1) when λ is rational"""
        if not self.exists or (modulus := self.language.exact_modulus) is None:
            return None
        return modulus / (modulus - 1)

    @property
    def value_decimal(self) -> str | None:
        if not self.exists:
            return None
        with workprec(self.language.precision):
            lam = self.language.dominant.value.real
            return decimal_str(lam / (lam - 1), 30)

    def to_dict(self) -> dict[str, Any]:
        value = self.value
        return {
            "status": self.status,
            "value": {"exact": fraction_str(value) if value is not None else None, "decimal": self.value_decimal},
            "language": self.language.to_dict(),
            "adjacency_radius": decimal_str(self.adjacency_radius),
            "quotients": [quotient.to_dict() for quotient in self.quotients],
            "offending": [quotient.to_dict() for quotient in self.offending],
            "diagnostics": list(self.diagnostics),
        }


def language_report(language: DfaLanguage, state: int | None = None, extra: int = 20) -> SpectralReport:
    nstates = language.dfa.nstates
    table = language.count(2 * nstates + extra)
    return spectral_classify(minimal_recurrence(table.sequence(state), nstates))


def decide_cp(dfa: Dfa) -> CpVerdict:
    language = DfaLanguage(dfa)
    trimmed = language.dfa
    if not (pce := trimmed.check_pce()):
        raise InitializationError(f"the quotient test needs a pce language, got {pce}", source=dfa)
    main = language_report(language)
    witnesses = trimmed.witnesses()
    quotients = tuple(
        QuotientReport(q, trimmed.names[q], trimmed.format_word(witnesses[q]), language_report(language, q))
        for q in range(trimmed.nstates)
    )
    radius = trimmed.spectral_radius()
    if float(main.modulus) > radius * (1 + 1e-9):
        logger.warning("modulus %s above the adjacency spectral radius %s", main.modulus, radius)

    diagnostics = []
    offending = tuple(
        quotient
        for quotient in quotients
        if same_modulus(quotient.report, main) and not quotient.report.is_adev
    )
    if main.growth != "exponential":
        diagnostics.append(f"{main.growth} growth: modulus {decimal_str(main.modulus)} is not above 1")
    if not main.is_adev:
        diagnostics.append("the language has no almost dominating eigenvalue")
    for quotient in offending:
        diagnostics.append(
            f"quotient {quotient.witness}^-1 L (state {quotient.name}) of modulus "
            f"{decimal_str(quotient.report.modulus)} is not adev"
        )
    exists = not diagnostics
    logger.info("carry propagation test: %s", "exists" if exists else "undetermined")
    return CpVerdict(exists, main, quotients, offending, tuple(diagnostics), radius)
