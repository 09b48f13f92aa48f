from fractions import Fraction

from pytest import mark, raises

from ans_carry.Dfa import builtin, fibonacci_dfa, k1_dfa, k3_dfa
from ans_carry.DfaLanguage import count
from ans_carry.exception import InitializationError
from ans_carry.LinearRecurrence import BerlekampMassey, LinearRecurrence, minimal_recurrence


def test_LinearRecurrence_fibonacci_counts():
    counts = count(fibonacci_dfa(), 20).sequence()
    assert counts[:8] == [1, 1, 1, 2, 3, 5, 8, 13]
    recurrence = minimal_recurrence(counts, 3)
    assert recurrence.polynomial == (1, -1, -1)
    assert recurrence.order == 3
    assert recurrence.annihilates(counts)


@mark.parametrize(
    "dfa,polynomial",
    (
        (k1_dfa(), (1, 0, -4)),
        (k3_dfa(), (1, -2, -4, 8)),
    ),
)
def test_LinearRecurrence_automata(dfa, polynomial):
    counts = count(dfa, 2 * dfa.nstates + 20).sequence()
    recurrence = minimal_recurrence(counts, dfa.nstates)
    assert recurrence.polynomial == polynomial
    assert recurrence.extend(len(counts)) == counts


def test_LinearRecurrence_head():
    # 5, 7, then powers of 2: the head of length 2 is outside the recurrence
    counts = [5, 7] + [1 << n for n in range(12)]
    recurrence = minimal_recurrence(counts, 3)
    assert recurrence.polynomial == (1, -2)
    assert recurrence.order == 3
    assert recurrence.extend(len(counts)) == counts


def test_LinearRecurrence_zero():
    recurrence = minimal_recurrence([0] * 9, 4)
    assert recurrence.degree == 0
    assert recurrence.annihilates([0] * 9)


def test_LinearRecurrence_solver_steps():
    solver = BerlekampMassey()
    for x in (1, 2, 4, 8, 16):
        solver.add(x)
    connection, length = solver.result()
    assert connection == [1, -2] and length == 1
    assert all(isinstance(c, Fraction) for c in connection)


def test_LinearRecurrence_invalid():
    with raises(InitializationError):
        minimal_recurrence([1, 2, 3], 2)
    with raises(InitializationError):
        LinearRecurrence((2, 1), 1, (1,))
    with raises(InitializationError):
        LinearRecurrence((1, 1, 1), 1, (1,))


@mark.parametrize("name", ("base(2)", "base(7)", "fibonacci", "fina", "k1", "k1prime", "k2", "k3", "k4", "chain"))
def test_LinearRecurrence_builtins(name: str):
    dfa = builtin(name)
    counts = count(dfa, 2 * dfa.nstates + 20).sequence()
    recurrence = minimal_recurrence(counts, dfa.nstates)
    assert recurrence.degree <= dfa.nstates
    assert recurrence.annihilates(counts)
    assert recurrence.extend(len(counts)) == counts
