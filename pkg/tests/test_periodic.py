from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import S
from steinitz_measure.measure import FiniteMeasureAlgebra, measure_of
from steinitz_measure.periodic import (
    ONE,
    ZERO,
    FiniteSupportSet,
    embed_standard,
    fs_ops,
    pw_combine,
    pw_in_algebra,
    pw_measure,
    pw_normalize,
    standard_preimage,
)


@st.composite
def words(draw, max_period=12):
    k = draw(st.integers(1, max_period))
    return pw_normalize(k, "".join(draw(st.sampled_from("01")) for _ in range(k)))


def test_normalize_finds_minimal_period():
    assert str(pw_normalize(6, "101010")) == "2:10"
    assert str(pw_normalize(4, "0000")) == "1:0"
    assert str(pw_normalize(3, "110")) == "3:110"
    with pytest.raises(ValueError):
        pw_normalize(3, "10")


def test_combine_and_measure():
    x, y = pw_normalize(2, "10"), pw_normalize(3, "100")
    assert str(pw_combine("mul", x, y)) == "6:100000"
    assert str(pw_combine("add", x, y)) == "6:001110"
    assert pw_measure(pw_combine("add", x, y)) == Fraction(1, 2)
    assert pw_combine("add", x, x) == ZERO
    assert pw_measure(ONE) == 1


def test_membership_in_H_u():
    u = S("2^inf")
    assert pw_in_algebra(pw_normalize(4, "1000"), u)
    assert not pw_in_algebra(pw_normalize(3, "100"), u)


def test_embedding_of_standard_algebra():
    phi = embed_standard(4, S("2^inf*3"))
    St4 = FiniteMeasureAlgebra.standard(4)
    a = St4.element("1010")
    assert str(phi(a)) == "2:10"
    assert pw_measure(phi(a)) == measure_of(a)
    with pytest.raises(ValueError):
        embed_standard(9, S("2^inf*3"))


def test_standard_preimage():
    k, els = standard_preimage([pw_normalize(2, "10"), pw_normalize(3, "011")])
    assert k == 6
    assert [e.bits() for e in els] == ["101010", "011011"]


def test_finite_support_sets():
    a, b = FiniteSupportSet({1, 2, 3}), FiniteSupportSet({3, 4})
    assert str(fs_ops("add", a, b)) == "{1,2,4}"
    assert str(fs_ops("mul", a, b)) == "{3}"
    assert fs_ops("measure", a) == 3
    with pytest.raises(ValueError):
        FiniteSupportSet({0})


@given(words(), words())
def test_measure_axiom(x, y):
    assert pw_measure(pw_combine("add", x, y)) + 2 * pw_measure(pw_combine("mul", x, y)) == pw_measure(x) + pw_measure(y)


@given(words(), words(), words())
def test_hamming_metric(x, y, z):
    d = lambda a, b: pw_measure(pw_combine("add", a, b))
    assert d(x, y) == d(y, x)
    assert (d(x, y) == 0) == (x == y)
    assert d(x, z) <= d(x, y) + d(y, z)


@given(words(), words())
def test_operations_agree_with_standard_preimage(x, y):
    k, (a, b) = standard_preimage([x, y])
    assert pw_combine("add", x, y) == pw_normalize(k, (a + b).bits())
    assert pw_combine("mul", x, y) == pw_normalize(k, (a * b).bits())
    assert pw_measure(x) == measure_of(a)


@given(st.frozensets(st.integers(1, 30)), st.frozensets(st.integers(1, 30)))
def test_finite_support_measure_axiom(a, b):
    A, B = FiniteSupportSet(a), FiniteSupportSet(b)
    m = lambda X: fs_ops("measure", X)
    assert m(fs_ops("add", A, B)) + 2 * m(fs_ops("mul", A, B)) == m(A) + m(B)
