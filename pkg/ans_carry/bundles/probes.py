from __future__ import annotations

from typing import TYPE_CHECKING

from ans_carry.exception import InitializationError

if TYPE_CHECKING:
    from collections.abc import Iterable

    from ans_carry.DfaLanguage import DfaLanguage


def h_points(levels: Iterable[int]) -> list[int]:
    """M(ℓ) = 3·2^ℓ - 1, the end of the first half of the level below ℓ in the tree of H"""
    return [3 * (1 << ell) - 1 for ell in levels]


def quotient_points(language: DfaLanguage, letter: int, levels: Iterable[int], factor: int = 2) -> list[int]:
    r"""
    N(ℓ) = v(ℓ-1) + factor·u_{a^-1 L}(ℓ-1): the words up to length ℓ-1 and the
    first `factor` blocks of the level ℓ words starting with the letter a.
    """
    dfa = language.dfa
    state = dfa.step(dfa.initial, letter)
    if state < 0:
        raise InitializationError(f"no word starts with {dfa.format_word((letter,))}", source=language)
    points = []
    for ell in levels:
        if ell < 1:
            raise InitializationError(f"levels start at 1, but given {ell}!")
        points.append(language.v(ell - 1) + factor * language.u(ell - 1, state))
    return points


def k4_points(language: DfaLanguage, levels: Iterable[int]) -> list[int]:
    """N(ℓ) = v_{K4}(ℓ-1) + 2·u_{K1}(ℓ-1) with K1 = a^-1 K4"""
    return quotient_points(language, 0, levels)
