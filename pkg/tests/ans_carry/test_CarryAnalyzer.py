from fractions import Fraction
from io import StringIO

from matplotlib import pyplot as plt
from mpmath import mpf, sqrt
from pytest import mark, raises

from ans_carry.AlgebraicReal import AlgebraicReal
from ans_carry.BetaProfile import BetaProfile
from ans_carry.bundles.probes import h_points, k4_points
from ans_carry.CarryAnalyzer import empirical_cp, filtered_cp, local_growth, probe, scp_at
from ans_carry.Dfa import base_dfa
from ans_carry.exception import InitializationError, UnknownSystemError
from ans_carry.GreedyBasis import fibonacci_basis
from ans_carry.RationalBase import RationalBase
from ans_carry.SystemSource import (
    DfaSource,
    GreedySource,
    RationalBaseSource,
    SignatureSource,
    builtin_source,
)


@mark.parametrize(
    "name,cls",
    (
        ("H", SignatureSource),
        ("fibonacci", DfaSource),
        ("base(3)", DfaSource),
        ("k4", DfaSource),
        ("tribonacci", GreedySource),
    ),
)
def test_SystemSource_builtin(name: str, cls: type):
    assert isinstance(builtin_source(name), cls)


def test_SystemSource_unknown():
    with raises(UnknownSystemError):
        builtin_source("lucas")


def test_SystemSource_theoretical():
    base = DfaSource(base_dfa(2), name="base2").theoretical()
    assert base.provenance == "a-dev-cp" and base.exact == 2
    rational = RationalBaseSource(RationalBase(3, 2)).theoretical()
    assert rational.provenance == "per-sig" and rational.exact == 3
    tribonacci = builtin_source("tribonacci").theoretical()
    assert tribonacci.provenance == "gns-exponential" and tribonacci.exact is None
    psi = AlgebraicReal((1, -1, -1, -1)).to_mpf()
    assert abs(tribonacci.value - psi / (psi - 1)) < mpf(10) ** -25
    assert abs(tribonacci.value - mpf("2.191488")) < mpf(10) ** -6
    profile = BetaProfile(AlgebraicReal((1, -1, -1)))
    beta = GreedySource.from_beta(profile).theoretical()
    phi = (1 + sqrt(5)) / 2
    assert beta.provenance == "beta"
    assert abs(beta.value - phi**2) < mpf(10) ** -25
    assert builtin_source("k4").theoretical() is None
    assert builtin_source("H").theoretical() is None


@mark.parametrize("p", (2, 3, 10))
def test_CarryAnalyzer_base(p: int):
    report = empirical_cp(DfaSource(base_dfa(p), name=f"base{p}"), 1_000_000)
    assert report.theoretical.exact == Fraction(p, p - 1)
    assert report.deviation < 1e-3
    assert report.checkpoints[-1].n == 1_000_000
    if p == 2:
        # scp(N) = 2N - s_2(N)
        for checkpoint in report.checkpoints:
            assert checkpoint.scp == 2 * checkpoint.n - bin(checkpoint.n).count("1")


@mark.parametrize("src", (builtin_source("fibonacci"), GreedySource(fibonacci_basis())))
def test_CarryAnalyzer_fibonacci(src, testname: str, plots: bool):
    phi = (1 + sqrt(5)) / 2
    report = empirical_cp(src, 1_000_000)
    print(f"{src.name}: {float(report.mean)}, expected {float(phi**2)}")
    assert abs(float(report.mean) - float(phi**2)) < 1e-2
    assert report.theoretical.exact is None

    if plots:
        plt.figure()
        plt.semilogx(
            [c.n for c in report.checkpoints], [float(c.mean) for c in report.checkpoints], "o-", label="scp(N)/N"
        )
        plt.axhline(float(phi**2), color="k", linestyle="--", label=r"$\varphi^2$")
        plt.xlabel("N")
        plt.legend()
        plt.savefig(f"output/{testname}-plot.png")
        plt.close()


def test_CarryAnalyzer_three_halves():
    report = empirical_cp(RationalBaseSource(RationalBase(3, 2)), 1_000_000)
    assert report.theoretical.provenance == "per-sig"
    assert abs(report.mean - 3) < 0.05


@mark.parametrize("src", (builtin_source("fibonacci"), GreedySource(fibonacci_basis()), builtin_source("H")))
def test_CarryAnalyzer_filtered_points(src):
    """The filtered mean at level ℓ is the running mean after v(ℓ) words"""
    report = empirical_cp(src, 100_000)
    points = [point for point in report.filtered if point.v > 0]
    assert points
    sums = scp_at(src, [point.v for point in points])
    for point, scp in zip(points, sums):
        assert Fraction(scp, point.v) == point.mean


def test_CarryAnalyzer_report_output():
    report = empirical_cp(RationalBaseSource(RationalBase(3, 2)), 1000, checkpoints=[10, 100, 5000])
    assert [c.n for c in report.checkpoints] == [10, 100, 1000]
    data = report.to_dict()
    assert data["theoretical"]["provenance"] == "per-sig"
    stream = StringIO()
    report.write_csv(stream)
    text = stream.getvalue()
    assert "checkpoint,scp,mean,mean_decimal" in text
    assert "provenance" in text


def test_CarryAnalyzer_chain():
    result = filtered_cp(builtin_source("chain"), 24)
    assert result.trend == "diverging"
    assert result.limit is None
    for point in result.points:
        assert point.mean == Fraction(point.level + 3, 3)
    assert result.to_dict()["limit"] == "+inf"


def test_CarryAnalyzer_h(testname: str, plots: bool):
    """Filtered means of H converge to 2 while scp/N along M(ℓ) stays below"""
    src = builtin_source("H")
    result = filtered_cp(src, 16)
    assert result.trend == "converging"
    assert result.last > Fraction(199, 100)
    levels = list(range(2, 16))
    points = probe(src, h_points(levels))
    assert points[-1].n == 98303
    assert points[-1].mean < Fraction(19, 10)

    if plots:
        plt.figure()
        plt.plot([p.level for p in result.points], [float(p.mean) for p in result.points], "o-", label="filtered")
        plt.plot(levels, [float(p.mean) for p in points], "s-", label="scp(M)/M")
        plt.xlabel("level")
        plt.legend()
        plt.savefig(f"output/{testname}-plot.png")
        plt.close()


def test_CarryAnalyzer_k4():
    src = builtin_source("k4")
    even, odd = probe(src, k4_points(src.language, (20, 21)))
    print(f"K4: {float(even.mean)} at {even.n}, {float(odd.mean)} at {odd.n}")
    assert abs(even.mean - Fraction(13, 6)) < Fraction(2, 100)
    assert abs(odd.mean - Fraction(28, 15)) < Fraction(2, 100)


def test_CarryAnalyzer_probe_invalid():
    src = builtin_source("fibonacci")
    with raises(InitializationError):
        probe(src, [10, 5])
    with raises(InitializationError):
        probe(src, [])
    with raises(InitializationError):
        empirical_cp(src, 0)
    with raises(InitializationError):
        filtered_cp(src, 0)
    with raises(InitializationError):
        builtin_source("H").cp_array(10, start=5)


def test_CarryAnalyzer_local_growth():
    k1 = local_growth(builtin_source("k1"), 10)
    assert k1.verdict == "none" and k1.gamma is None
    assert k1.ratios[:6] == (1, 4, 1, 4, 1, 4)
    k3 = local_growth(builtin_source("k3"), 10)
    assert k3.verdict == "exists"
    assert k3.exact == 2
    assert k3.consistent
    rational = local_growth(RationalBaseSource(RationalBase(5, 2)), 10)
    assert rational.exact == Fraction(5, 2)
    assert rational.consistent


def test_CarryAnalyzer_h_default_depth():
    src = builtin_source("H")
    assert scp_at(src, [100])[0] == scp_at(src, [63, 100])[1]
    # v(ℓ) = 2^(ℓ+1) - 1 and the words of length ℓ carry v(ℓ) in total
    assert scp_at(src, [63])[0] == 120
    assert empirical_cp(src, 1_000_000).checkpoints[-1].n == 1_000_000


@mark.parametrize(
    "src",
    (
        *(builtin_source(name) for name in ("base(2)", "fibonacci", "fina", "k1", "k2", "k3", "k4", "chain")),
        builtin_source("tribonacci"),
        GreedySource(fibonacci_basis()),
        RationalBaseSource(RationalBase(3, 2)),
        RationalBaseSource(RationalBase(5, 3)),
        builtin_source("H"),
    ),
)
def test_CarryAnalyzer_level_sums(src):
    """The carries of the words of length ℓ add up to v(ℓ)"""
    v = src.level_counter(15).v
    cp = src.cp_array(v[-1])
    first = 0
    for ell, last in enumerate(v):
        assert int(cp[first:last].sum()) == last, f"{src.name}: level {ell}"
        first = last
