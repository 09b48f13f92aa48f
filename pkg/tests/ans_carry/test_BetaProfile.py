from itertools import product

from mpmath import mpf, sqrt
from pytest import mark, raises

from ans_carry.AlgebraicReal import AlgebraicReal
from ans_carry.BetaProfile import BetaProfile, basis_constant, beta_expand_one, beta_membership, integer_beta
from ans_carry.exception import BudgetExceededError, InitializationError

betas = {
    "golden": (1, -1, -1),
    "tribonacci": (1, -1, -1, -1),
    "fina": (1, -3, 1),
}


def test_BetaProfile_golden_ratio():
    profile = BetaProfile(AlgebraicReal(betas["golden"]))
    assert str(profile.expansion) == "11"
    assert profile.parry == "simple"
    assert profile.quasi_greedy == ((), (1, 0))
    assert profile.d_star_str() == "(10)^ω"
    assert profile.basis().terms(6) == [1, 2, 3, 5, 8, 13]
    assert profile.odometer_continuous


def test_BetaProfile_tribonacci():
    profile = BetaProfile(AlgebraicReal(betas["tribonacci"]))
    assert str(profile.expansion) == "111"
    assert profile.quasi_greedy == ((), (1, 1, 0))
    assert profile.basis().terms(6) == [1, 2, 4, 7, 13, 24]


def test_BetaProfile_fina():
    profile = BetaProfile(AlgebraicReal(betas["fina"]))
    assert profile.parry == "non-simple"
    assert profile.quasi_greedy == ((2,), (1,))
    assert str(profile.expansion) == "2(1)^ω"
    assert profile.odometer_continuous is False
    terms = profile.basis().terms(20)
    assert terms[:5] == [1, 3, 8, 21, 55]
    assert all(terms[n + 2] == 3 * terms[n + 1] - terms[n] for n in range(18))


@mark.parametrize("p", (2, 3, 10))
def test_BetaProfile_integer(p: int):
    profile = BetaProfile(integer_beta(p))
    assert profile.expansion.preperiod == (p,)
    assert profile.quasi_greedy == ((), (p - 1,))
    assert profile.basis().terms(5) == [p**k for k in range(5)]


def test_BetaProfile_membership():
    golden = BetaProfile(AlgebraicReal(betas["golden"]))
    assert not beta_membership(golden, (1, 1))
    assert beta_membership(golden, (1, 0))
    assert beta_membership(golden, ())
    assert not beta_membership(golden, (0, 1))
    fina = BetaProfile(AlgebraicReal(betas["fina"]))
    assert not beta_membership(fina, (2, 1, 2))
    assert beta_membership(fina, (2, 1, 1))


@mark.parametrize("name", tuple(betas))
def test_BetaProfile_membership_language(name: str):
    """Words with all suffixes below d* are exactly the greedy expansions"""
    profile = BetaProfile(AlgebraicReal(betas[name]))
    basis = profile.basis()
    length = 8
    words = {()}
    size = basis.alphabet.size
    for ell in range(1, length + 1):
        for digits in product(range(size), repeat=ell):
            if beta_membership(profile, digits):
                words.add(digits)
    expected = {basis.repr(n).digits for n in range(basis.term(length))}
    assert words == expected


def test_BetaProfile_constant():
    profile = BetaProfile(AlgebraicReal(betas["golden"]))
    phi = (1 + sqrt(5)) / 2
    assert abs(basis_constant(profile, 40) - phi**2 / sqrt(5)) < mpf(10) ** -12


def test_BetaProfile_state_cap():
    profile = BetaProfile(AlgebraicReal(betas["fina"]), state_cap=1)
    assert profile.parry == "unknown" and profile.is_truncated
    assert profile.odometer_continuous is None
    assert profile.d(1) == 2
    with raises(BudgetExceededError):
        profile.d(2)
    with raises(InitializationError):
        profile.quasi_greedy
    with raises(BudgetExceededError):
        profile.basis()
    with raises(InitializationError):
        beta_expand_one(AlgebraicReal(betas["fina"]), state_cap=0)
