from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any, ClassVar

from mpmath import mpf, workprec
from numpy import array, int64

from ans_carry.bundles.serialize import decimal_str, fraction_str
from ans_carry.Dfa import Dfa, builtin, builtin_names
from ans_carry.DfaLanguage import DfaLanguage
from ans_carry.exception import InitializationError, UnknownSystemError
from ans_carry.GreedyBasis import GreedyBasis, builtin_basis, greedy_cp_stream
from ans_carry.RationalBase import RationalBase, rb_cp_stream
from ans_carry.Signature import (
    LevelCounter,
    LevelSignature,
    Signature,
    cp_levels,
    h_language_signature,
    theoretical_cp,
    tree_cp,
)
from ans_carry.SpectralReport import decide_cp
from ans_carry.Word import delta_digits

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from ans_carry.BetaProfile import BetaProfile
    from ans_carry.SpectralReport import CpVerdict
    from ans_carry.Word import Word

logger = logging.getLogger(__name__)

H_LEVEL_MAX = 40


@dataclass(frozen=True, slots=True)
class TheoreticalCp:
    """Closed form value with its provenance: per-sig, a-dev-cp, beta or gns-exponential"""

    value: mpf
    provenance: str
    exact: Fraction | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "exact": fraction_str(self.exact) if self.exact is not None else None,
            "decimal": decimal_str(self.value),
            "provenance": self.provenance,
        }


def _from_growth(gamma: mpf, provenance: str, exact_gamma: Fraction | None = None) -> TheoreticalCp:
    exact = exact_gamma / (exact_gamma - 1) if exact_gamma is not None else None
    with workprec(128):
        return TheoreticalCp(gamma / (gamma - 1), provenance, exact)


class SystemSource:
    r"""
    A numeration system seen through its carry propagation stream.

    `random_access` sources compute cp(n) independently for every n and may
    start a stream anywhere; the others stream from 0.
    """

    __slots__ = ("_name",)

    kind: ClassVar[str] = ""
    random_access: ClassVar[bool] = False

    _name: str

    def __init__(self, name: str):
        self._name = name

    @property
    def name(self) -> str:
        return self._name

    def cp_array(self, n: int, start: int = 0, mode: str = "numba") -> NDArray[int64]:
        raise NotImplementedError

    def level_counter(self, level_max: int) -> LevelCounter:
        raise NotImplementedError

    def theoretical(self) -> TheoreticalCp | None:
        return None

    def scp(self, n: int, mode: str = "numba") -> int:
        """Σ_{i<n} cp(i)"""
        return int(self.cp_array(n, mode=mode).sum())

    def word(self, i: int) -> Word | None:
        return None

    def _check_start(self, start: int) -> None:
        if start and not self.random_access:
            raise InitializationError(f"{self.kind} sources stream from 0, but start={start}", source=self)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self._name})"


class SignatureSource(SystemSource):
    __slots__ = ("_signature",)

    kind = "signature"

    _signature: Signature | LevelSignature

    def __init__(self, signature: Signature | LevelSignature, name: str = ""):
        super().__init__(name or getattr(signature, "name", "") or repr(signature))
        self._signature = signature

    @property
    def signature(self) -> Signature | LevelSignature:
        return self._signature

    def cp_array(self, n: int, start: int = 0, mode: str = "numba") -> NDArray[int64]:
        self._check_start(start)
        cp, _ = cp_levels(self._signature, n, mode)
        return cp

    def level_counter(self, level_max: int) -> LevelCounter:
        return self._signature.level_counts(level_max)

    def theoretical(self) -> TheoreticalCp | None:
        if not isinstance(self._signature, Signature):
            return None
        value = theoretical_cp(self._signature)
        with workprec(128):
            return TheoreticalCp(mpf(value.numerator) / value.denominator, "per-sig", value)


class DfaSource(SystemSource):
    __slots__ = ("_language", "_pce", "_verdict")

    kind = "dfa"

    _language: DfaLanguage
    _pce: bool
    _verdict: CpVerdict | None

    def __init__(self, dfa: Dfa, name: str = ""):
        super().__init__(name or repr(dfa))
        self._language = DfaLanguage(dfa)
        self._pce = bool(self._language.dfa.check_pce())
        self._verdict = None

    @property
    def language(self) -> DfaLanguage:
        return self._language

    @property
    def is_pce(self) -> bool:
        return self._pce

    def verdict(self) -> CpVerdict:
        if self._verdict is None:
            self._verdict = decide_cp(self._language.dfa)
        return self._verdict

    def cp_array(self, n: int, start: int = 0, mode: str = "numba") -> NDArray[int64]:
        self._check_start(start)
        if self._pce:
            cp, _ = tree_cp(self._language.dfa.degree_sequence(n), n, mode)
            return cp
        logger.debug("language is not pce, cp from successive representations")
        words = [w.digits for w in self._language.enumerate(n + 1)]
        return array([delta_digits(u, v) for u, v in zip(words, words[1:])], dtype=int64)

    def level_counter(self, level_max: int) -> LevelCounter:
        return self._language.count(level_max).level_counter()

    def theoretical(self) -> TheoreticalCp | None:
        if not self._pce:
            return None
        verdict = self.verdict()
        if not verdict.exists:
            return None
        language = verdict.language
        with workprec(language.precision):
            gamma = language.dominant.value.real
        return _from_growth(gamma, "a-dev-cp", language.exact_modulus)

    def scp(self, n: int, mode: str = "numba") -> int:
        if self._pce:
            return self._language.fast_scp(n)
        return super().scp(n, mode)

    def word(self, i: int) -> Word:
        return self._language.repr_of(i)


class RationalBaseSource(SystemSource):
    __slots__ = ("_base",)

    kind = "rational"
    random_access = True

    _base: RationalBase

    def __init__(self, base: RationalBase, name: str = ""):
        super().__init__(name or f"{base.p}/{base.q}")
        self._base = base

    @property
    def base(self) -> RationalBase:
        return self._base

    def cp_array(self, n: int, start: int = 0, mode: str = "numba") -> NDArray[int64]:
        return rb_cp_stream(self._base, n, start, mode)

    def level_counter(self, level_max: int) -> LevelCounter:
        return self._base.signature().level_counts(level_max)

    def theoretical(self) -> TheoreticalCp:
        value = self._base.theoretical_cp()
        with workprec(128):
            return TheoreticalCp(mpf(value.numerator) / value.denominator, "per-sig", value)

    def word(self, i: int) -> Word:
        return self._base.repr(i)


class GreedySource(SystemSource):
    __slots__ = ("_basis", "_provenance")

    kind = "gns"
    random_access = True

    _basis: GreedyBasis
    _provenance: str

    def __init__(self, basis: GreedyBasis, name: str = "", provenance: str = "gns-exponential"):
        super().__init__(name or basis.name or repr(basis))
        self._basis = basis
        self._provenance = provenance

    @classmethod
    def from_beta(cls, profile: BetaProfile) -> GreedySource:
        return cls(profile.basis(), name=f"beta{profile.beta.minpoly}", provenance="beta")

    @property
    def basis(self) -> GreedyBasis:
        return self._basis

    def cp_array(self, n: int, start: int = 0, mode: str = "numba") -> NDArray[int64]:
        return greedy_cp_stream(self._basis, n, start, mode)

    def level_counter(self, level_max: int) -> LevelCounter:
        length = level_max + 1
        if self._basis.is_finite:
            length = min(length, len(self._basis.known_terms))
        return LevelCounter.from_cumulative(self._basis.terms(length))

    def theoretical(self) -> TheoreticalCp | None:
        growth = self._basis.growth
        if growth is None:
            return None
        exact = Fraction(growth.interval[0]) if growth.is_rational else None
        return _from_growth(growth.to_mpf(128), self._provenance, exact)

    def word(self, i: int) -> Word:
        return self._basis.repr(i)


def source_names() -> tuple[str, ...]:
    return ("h",) + builtin_names() + ("tribonacci",)


def builtin_source(name: str, level_max: int = H_LEVEL_MAX) -> SystemSource:
    """H, the builtin automata, then the builtin bases"""
    key = name.strip().lower()
    if key == "h":
        return SignatureSource(h_language_signature(level_max), name="H")
    try:
        return DfaSource(builtin(key), name=key)
    except UnknownSystemError:
        pass
    try:
        return GreedySource(builtin_basis(key), name=key)
    except UnknownSystemError:
        raise UnknownSystemError(f"unknown system {name!r}, expected one of {source_names()}") from None
