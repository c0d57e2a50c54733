from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from steinitz_measure.steinitz import INF, SteinitzNumber

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

SMALL_PRIMES = (2, 3, 5, 7, 11, 13)

exponents = st.one_of(st.integers(0, 4), st.just(INF))


@st.composite
def steinitz_numbers(draw, primes=SMALL_PRIMES, default=st.sampled_from([0, 0, 0, 1, INF])):
    d = draw(default)
    exc = {p: draw(exponents) for p in draw(st.sets(st.sampled_from(primes), max_size=4))}
    return SteinitzNumber.make(d, exc)


@st.composite
def finite_default_steinitz(draw, primes=SMALL_PRIMES):
    exc = {p: draw(exponents) for p in draw(st.sets(st.sampled_from(primes), max_size=4))}
    return SteinitzNumber.make(0, exc)


positive_fractions = st.builds(Fraction, st.integers(1, 60), st.integers(1, 60))


def S(text):
    from steinitz_measure.literals import parse_steinitz

    return parse_steinitz(text)


@pytest.fixture
def two_inf():
    return SteinitzNumber.make(0, {2: INF})
