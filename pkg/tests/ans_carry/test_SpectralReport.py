from fractions import Fraction

from mpmath import mpf, sqrt
from pytest import mark, raises

from ans_carry.Dfa import Dfa, base_dfa, builtin
from ans_carry.DfaLanguage import DfaLanguage
from ans_carry.exception import InitializationError
from ans_carry.LinearRecurrence import LinearRecurrence
from ans_carry.SpectralReport import decide_cp, language_report, spectral_classify


@mark.parametrize(
    "name,polynomial,is_dev,is_adev",
    (
        ("k1", (1, 0, -4), False, False),
        ("k2", (1, -2), True, True),
        ("k3", (1, -2, -4, 8), False, True),
        ("fibonacci", (1, -1, -1), True, True),
    ),
)
def test_SpectralReport_classify(name: str, polynomial: tuple, is_dev: bool, is_adev: bool):
    report = language_report(DfaLanguage(builtin(name)))
    assert report.polynomial == polynomial
    assert report.is_dev == is_dev
    assert report.is_adev == is_adev
    assert report.growth == "exponential"
    print(report.to_dict())


def test_SpectralReport_k3_modulus():
    report = language_report(DfaLanguage(builtin("k3")))
    assert report.exact_modulus == 2
    assert report.local_growth_rate == 2
    assert report.dominant.multiplicity == 2
    assert len(report.tied) == 2


def test_SpectralReport_chain():
    report = language_report(DfaLanguage(builtin("chain")))
    assert report.polynomial == (1, -2, 1)
    assert report.growth == "polynomial"


def test_SpectralReport_complex_roots():
    # X^2 + 4 has the roots ±2i and no real positive root of modulus 2
    report = spectral_classify(LinearRecurrence((1, 0, 4), 2, (1, 0)))
    assert report.dominant is None
    assert not report.is_adev
    assert report.local_growth_rate is None


@mark.parametrize("p", (2, 3, 10))
def test_SpectralReport_base(p: int):
    verdict = decide_cp(base_dfa(p))
    assert verdict.exists and verdict.status == "exists"
    assert verdict.value == Fraction(p, p - 1)
    assert not verdict.offending


def test_SpectralReport_fibonacci():
    verdict = decide_cp(builtin("fibonacci"))
    assert verdict.exists
    assert verdict.value is None
    phi = (1 + sqrt(5)) / 2
    assert abs(mpf(verdict.value_decimal) - phi / (phi - 1)) < mpf(10) ** -25
    assert verdict.value_decimal.startswith("2.6180339887")


def test_SpectralReport_k4():
    verdict = decide_cp(builtin("k4"))
    assert verdict.language.is_dev
    assert not verdict.exists
    assert verdict.status == "undetermined"
    assert "a" in {quotient.witness for quotient in verdict.offending}
    assert verdict.diagnostics
    assert verdict.value is None and verdict.value_decimal is None
    assert verdict.to_dict()["status"] == "undetermined"


@mark.parametrize("name", ("k1", "chain"))
def test_SpectralReport_undetermined(name: str):
    verdict = decide_cp(builtin(name))
    assert not verdict.exists
    assert verdict.diagnostics


def test_SpectralReport_k3():
    verdict = decide_cp(builtin("k3"))
    assert verdict.exists
    assert verdict.value == 2


def test_SpectralReport_not_pce():
    with raises(InitializationError):
        decide_cp(Dfa(2, 0, [0], [(0, 0, 1), (1, 0, 0)], 2))


@mark.parametrize("name", ("base(2)", "base(5)", "fibonacci", "fina", "k1", "k1prime", "k2", "k3", "k4", "chain"))
def test_SpectralReport_dominant_root(name: str):
    """The largest modulus is a real positive root of the highest multiplicity, on every quotient"""
    language = DfaLanguage(builtin(name))
    for state in (None, *range(language.dfa.nstates)):
        report = language_report(language, state)
        if not report.roots:
            continue
        assert report.dominant is not None
        assert report.dominant.value.real > 0
        assert abs(report.dominant.value - report.modulus) < mpf(10) ** -20
        assert report.multiplicities_bounded


def test_SpectralReport_multiplicities_unbounded():
    # (X - 2)(X + 2)^2: the negative root of modulus 2 is the double one
    report = spectral_classify(LinearRecurrence((1, 2, -4, -8), 3, (1, 1, 1)))
    assert report.dominant is not None and report.dominant.multiplicity == 1
    assert len(report.tied) == 2
    assert not report.multiplicities_bounded
    assert not report.is_adev
