from fractions import Fraction

from numpy import allclose
from pytest import raises

from ans_carry.AlgebraicReal import AlgebraicReal, parse_beta
from ans_carry.exception import InitializationError, ParseError


def test_AlgebraicReal_golden_ratio():
    phi = AlgebraicReal((1, -1, -1))
    assert phi.minpoly == (1, -1, -1)
    assert phi.degree == 2 and not phi.is_rational
    assert allclose(float(phi), (1 + 5**0.5) / 2)
    lo, hi = phi.refine(Fraction(1, 10**12))
    assert hi - lo <= Fraction(1, 10**12)
    assert lo <= Fraction(1618033988750, 10**12) and hi >= Fraction(1618033988749, 10**12)
    assert phi == AlgebraicReal((1, -1, -1), (1, 2))


def test_AlgebraicReal_reducible():
    # (X - 1)(X - 2): the largest root 2 is kept with its linear factor
    two = AlgebraicReal((1, -3, 2))
    assert two.is_rational
    assert two.minpoly == (1, -2)
    assert two.interval == (2, 2)
    # (X^2 - X - 1)(X + 3), the root in [1, 2]
    phi = AlgebraicReal((1, 2, -4, -3), (1, 2))
    assert phi.minpoly == (1, -1, -1)


def test_AlgebraicReal_invalid():
    with raises(InitializationError):
        AlgebraicReal((1, 0, -2), (-2, 2))
    with raises(InitializationError):
        AlgebraicReal((1, -1))
    with raises(InitializationError):
        AlgebraicReal((1, 0, 1))
    with raises(InitializationError):
        AlgebraicReal((3,))
    with raises(InitializationError):
        AlgebraicReal((1, -1, -1), (2, 1))


def test_AlgebraicReal_number_field():
    phi = AlgebraicReal((1, -1, -1))
    b = phi.generator()
    square = b * b
    assert square == b + 1
    assert (square - b - 1).is_zero
    assert square.floor() == 2
    assert (b - 2).sign() == -1
    assert (b * 3 - 4).sign() == 1
    assert (b * b * b).floor() == 4
    assert phi.one() == 1


def test_AlgebraicReal_tribonacci():
    psi = AlgebraicReal((1, -1, -1, -1))
    b = psi.generator()
    assert b * b * b == b * b + b + 1
    assert allclose(float(psi), 1.839286755214161)
    assert (b * b).floor() == 3


def test_AlgebraicReal_parse():
    psi = parse_beta("# tribonacci\npoly: 1 -1 -1 -1\ninterval: 1 2\n")
    assert psi.minpoly == (1, -1, -1, -1)
    assert parse_beta("poly: 1 -3 1") == AlgebraicReal((1, -3, 1))
    with raises(ParseError) as excinfo:
        parse_beta("poly: 1 -1 -1\nroot: 2\n", filename="beta.txt")
    assert excinfo.value.line == 2
    with raises(ParseError):
        parse_beta("interval: 1 2\n")
    with raises(ParseError):
        parse_beta("poly: 1 x\n")
