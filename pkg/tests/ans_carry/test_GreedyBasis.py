from numpy import allclose
from numpy.random import default_rng
from pytest import mark, raises

from ans_carry.exception import BudgetExceededError, InitializationError, NotInLanguageError, ParseError
from ans_carry.GreedyBasis import (
    GreedyBasis,
    builtin_basis,
    check_pce_gns,
    fibonacci_basis,
    fina_basis,
    g_max,
    greedy_cp,
    greedy_cp_stream,
    greedy_repr,
    greedy_val,
    necessary_condition,
    parse_basis,
    tribonacci_basis,
)
from ans_carry.Word import delta, delta_digits

bases = {
    "fibonacci": fibonacci_basis,
    "tribonacci": tribonacci_basis,
    "fina": fina_basis,
    "base3": lambda: GreedyBasis.integer_base(3),
    "list": lambda: GreedyBasis.from_list([1, 2, 3, 5, 9, 14, 23, 37, 60, 97, 157, 254, 411, 665, 1076, 1741, 2817, 4558]),
}


def test_GreedyBasis_fibonacci():
    basis = fibonacci_basis()
    assert basis.terms(7) == [1, 2, 3, 5, 8, 13, 21]
    assert basis.alphabet.size == 2
    assert str(greedy_repr(basis, 9)) == "10001"
    assert str(greedy_repr(basis, 0)) == "e"
    assert str(g_max(basis, 5)) == "10101"
    assert str(g_max(basis, 0)) == "e"
    assert greedy_cp(basis, 9) == 2
    assert greedy_cp(basis, 12) == 6
    assert basis.degree(12) == 4


def test_GreedyBasis_tribonacci_fina():
    tribonacci = tribonacci_basis()
    assert tribonacci.terms(6) == [1, 2, 4, 7, 13, 24]
    assert str(g_max(tribonacci, 3)) == "110"
    assert str(g_max(tribonacci, 4)) == "1101"
    fina = fina_basis()
    assert fina.terms(5) == [1, 3, 8, 21, 55]
    assert fina.alphabet.size == 3
    assert str(greedy_repr(fina, 2)) == "2"
    assert str(g_max(fina, 3)) == "211"


@mark.parametrize("name", tuple(bases))
def test_GreedyBasis_values(name: str):
    basis = bases[name]()
    for n in range(3000):
        word = greedy_repr(basis, n)
        assert greedy_val(basis, word) == n
        assert basis.is_member(word)


def test_GreedyBasis_not_member():
    basis = fibonacci_basis()
    assert not basis.is_member((1, 1))
    assert not basis.is_member((0, 1))
    assert basis.is_member((0, 1), allow_leading_zeros=True)
    with raises(NotInLanguageError):
        greedy_val(basis, (1, 1, 0))


@mark.parametrize("mode", ("python", "numba", "parallel"))
@mark.parametrize("name", tuple(bases))
def test_GreedyBasis_cp_stream(name: str, mode: str):
    basis = bases[name]()
    n = 2000
    words = [greedy_repr(basis, i) for i in range(n + 1)]
    expected = [delta(u, v) for u, v in zip(words, words[1:])]
    cp = greedy_cp_stream(basis, n, mode=mode)
    assert cp.tolist() == expected
    assert [greedy_cp(basis, i) for i in range(0, n, 37)] == expected[::37]
    assert greedy_cp_stream(basis, 50, 777, mode).tolist() == expected[777:827]


@mark.parametrize("name", ("fibonacci", "tribonacci", "fina", "base3"))
def test_GreedyBasis_cp_delta(name: str):
    basis = bases[name]()
    n = 100_000
    words = [greedy_repr(basis, i).digits for i in range(n + 1)]
    expected = [delta_digits(u, v) for u, v in zip(words, words[1:])]
    assert greedy_cp_stream(basis, n).tolist() == expected
    assert [greedy_cp(basis, i) for i in range(0, n, 101)] == expected[::101]


@mark.parametrize("name", ("fibonacci", "tribonacci", "fina"))
def test_GreedyBasis_reduction(name: str):
    """cp(N) = cp(N mod G_k) unless N = G_{k+1} - 1"""
    basis = bases[name]()
    rng = default_rng(0)
    for n in rng.integers(1, 10**9, size=300):
        n = int(n)
        k = basis.degree(n)
        if n == basis.term(k + 1) - 1:
            assert greedy_cp(basis, n) == k + 2
        else:
            assert greedy_cp(basis, n) == greedy_cp(basis, n % basis.term(k))


def test_GreedyBasis_check_pce():
    basis = GreedyBasis.from_list([1, 2, 3, 5, 9, 14, 23])
    assert basis.alphabet.size == 2
    assert str(greedy_repr(basis, 8)) == "1100"
    verdict = check_pce_gns(basis, 6)
    assert verdict.kind == "not_prefix_closed" and not verdict
    assert str(verdict.word) == "1100"
    assert str(verdict.prefix) == "110"
    # the quotient condition holds, it is only necessary
    assert verdict.necessary_condition
    assert necessary_condition(basis, 7)


@mark.parametrize("name,depth", (("fibonacci", 12), ("tribonacci", 10), ("fina", 7), ("base3", 6)))
def test_GreedyBasis_check_pce_builtin(name: str, depth: int):
    verdict = check_pce_gns(bases[name](), depth)
    assert verdict.is_pce
    assert verdict.necessary_condition


def test_GreedyBasis_builtin():
    assert builtin_basis("base(10)").terms(4) == [1, 10, 100, 1000]
    assert builtin_basis("Tribonacci").name == "tribonacci"
    assert allclose(float(builtin_basis("fibonacci").growth), (1 + 5**0.5) / 2)
    assert builtin_basis("base7").growth.is_rational


def test_GreedyBasis_invalid():
    with raises(InitializationError):
        GreedyBasis.from_list([2, 3])
    with raises(InitializationError):
        GreedyBasis.from_list([1, 3, 2])
    with raises(InitializationError):
        GreedyBasis.from_list([1, 2, 2])
    with raises(InitializationError):
        check_pce_gns(fibonacci_basis(), 1)
    with raises(BudgetExceededError):
        GreedyBasis.from_list([1, 2, 3, 5, 8]).term(10)


def test_GreedyBasis_parse():
    basis = parse_basis("1\n2\n3\n5\n# comment\n8\n")
    assert basis.known_terms == (1, 2, 3, 5, 8)
    assert basis.is_finite
    with raises(ParseError) as excinfo:
        parse_basis("1\nx\n")
    assert excinfo.value.line == 2
    with raises(ParseError):
        parse_basis("1\n1\n")
