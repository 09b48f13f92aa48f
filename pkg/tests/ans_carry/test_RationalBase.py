from fractions import Fraction

from pytest import mark, raises

from ans_carry.exception import InitializationError, NotInLanguageError
from ans_carry.RationalBase import RationalBase, rb_cp_stream, rb_repr, rb_succ, rb_val
from ans_carry.Signature import cp_levels
from ans_carry.Word import Word, delta


def test_RationalBase_three_halves():
    rb = RationalBase(3, 2)
    assert [str(rb_repr(rb, n)) for n in range(5)] == ["e", "2", "21", "210", "212"]
    assert str(rb_succ(rb, Word.parse("212", 3))) == "2101"
    assert rb_val(rb, Word.parse("2101", 3)) == 5
    assert rb.signature().period == (2, 1)
    assert rb.theoretical_cp() == 3


@mark.parametrize("p,q", ((3, 2), (5, 2), (7, 3), (5, 3), (4, 1)))
def test_RationalBase_values(p: int, q: int):
    rb = RationalBase(p, q)
    for n in range(2000):
        word = rb_repr(rb, n)
        assert rb_val(rb, word) == n
        assert rb.is_expansion(word)
        assert all(0 <= d < p for d in word.digits)
        assert n == 0 or word.digits[0] != 0


def test_RationalBase_not_expansion():
    rb = RationalBase(3, 2)
    assert rb_val(rb, (1,)) == Fraction(1, 2)
    assert not rb.is_expansion((1,))
    with raises(NotInLanguageError):
        rb_val(rb, (3,))
    with raises(NotInLanguageError):
        rb_succ(rb, (1, 1))


@mark.parametrize("mode", ("python", "numba", "parallel"))
@mark.parametrize("p,q", ((3, 2), (5, 2), (5, 3), (2, 1)))
def test_RationalBase_cp_stream(p: int, q: int, mode: str):
    rb = RationalBase(p, q)
    n = 3000
    words = [rb_repr(rb, i) for i in range(n + 1)]
    expected = [delta(u, v) for u, v in zip(words, words[1:])]
    assert rb_cp_stream(rb, n, mode=mode).tolist() == expected
    start = 1234
    assert rb_cp_stream(rb, 100, start, mode).tolist() == expected[start : start + 100]


@mark.parametrize("p,q", ((3, 2), (5, 2), (7, 4)))
def test_RationalBase_signature_stream(p: int, q: int):
    """The tree of the signature carries the same stream"""
    rb = RationalBase(p, q)
    n = 100_000
    cp, _ = cp_levels(rb.signature(), n, "numba")
    assert (cp == rb_cp_stream(rb, n)).all()


def test_RationalBase_mean():
    rb = RationalBase(3, 2)
    n = 1_000_000
    mean = rb_cp_stream(rb, n).sum() / n
    print(f"3/2: mean carry propagation {mean} over {n} words")
    assert abs(mean - 3) < 0.05


def test_RationalBase_invalid():
    with raises(InitializationError):
        RationalBase(4, 2)
    with raises(InitializationError):
        RationalBase(2, 3)
    with raises(InitializationError):
        RationalBase(3, 2).repr(-1)
    with raises(InitializationError):
        rb_cp_stream(RationalBase(3, 2), 10, mode="cuda")
