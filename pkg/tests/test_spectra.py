import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import S
from steinitz_measure.literals import parse_descriptor as D
from steinitz_measure.literals import parse_scaled
from steinitz_measure.spectra import (
    Fin,
    SClosed,
    SInf,
    SOpen,
    canonicalize,
    member,
    saturated_check,
    separating_witness,
    spectra_equal,
    sqrt_bound,
    unital_spectrum,
    unitality_criterion,
)
from steinitz_measure.steinitz import ScaledSteinitz, omega_elements

F = Fraction


@pytest.mark.parametrize("t, d, want", [
    ("2^inf*3", "S(2; 2^inf*5)", True),
    ("2^inf*3", "S(1/2; 2^inf*5)", False),
    ("3/2 * 2^inf", "S(2; 2^inf)", True),
    ("4/2 * 2^inf", "S(2; 2^inf)", True),
    ("4/2 * 2^inf", "S+(2; 2^inf)", False),
    ("2 * 2^inf", "S+(2; 2^inf)", True),  # a plain product: 2*2^inf is 2^inf
    ("3", "Fin(4)", True),
    ("5", "Fin(4)", False),
    ("7 * 2^inf", "S(inf; 2^inf)", True),
    ("2^inf", "S(inf; 3^inf)", False),
])
def test_member_examples(t, d, want):
    assert member(parse_scaled(t), D(d)) is want


def test_member_raw_pair_outside_omega():
    assert not member((F(1, 3), S("2^inf")), D("S(inf; 2^inf)"))


def test_member_with_irrational_bound():
    d = SClosed(sqrt_bound(2), S("2^inf"))
    assert member(ScaledSteinitz(F(45, 32), S("2^inf")), d)  # 1.40625
    assert not member(ScaledSteinitz(F(91, 64), S("2^inf")), d)  # 1.421875


def test_descriptor_validation():
    with pytest.raises(ValueError):
        SClosed(F(1), S("12"))
    with pytest.raises(ValueError):
        SOpen(F(1, 3), S("2^inf"))
    with pytest.raises(ValueError):
        Fin(0)


def test_canonicalize():
    c = canonicalize(D("S(3/2; 2^inf*3)"))
    assert c.class_rep == S("2^inf") and c.r_star == F(9, 2) and c.attained
    c = canonicalize(D("S(1/3; 2^inf)"))
    assert not c.attained and c.as_descriptor() == SClosed(F(1, 3), S("2^inf"))
    assert canonicalize(D("S(inf; 2^inf*5)")).kind == "unbounded"
    assert str(canonicalize(D("Fin(3)"))) == "finite n=3"


def test_closed_with_denominator_outside_omega_equals_open_nowhere():
    # S(1/3; 2^inf) never attains 1/3, but S+(1/3; ...) is not even a descriptor
    assert spectra_equal(D("S(1/3; 2^inf)"), SClosed(F(1, 3), S("2^inf")))


def test_spectra_equal_examples():
    assert spectra_equal(D("S(3; 2^inf)"), D("S(1; 2^inf*3)"))
    assert not spectra_equal(D("S(1; 2^inf)"), D("S+(1; 2^inf)"))
    assert spectra_equal(D("S(inf; 2^inf)"), D("S(inf; 2^inf*3^4)"))
    assert not spectra_equal(D("S(inf; 2^inf)"), D("S(inf; 3^inf)"))


def test_rescaled_pair_rescales_above_one():
    assert canonicalize(D("S(1/4; 2^inf)")).rescaled_pair() == (S("2^inf"), F(1))
    s, r = canonicalize(D("S(3/8; 2^inf*3)")).rescaled_pair()
    assert (s, r) == (S("2^inf"), F(9, 8))
    # the pair is exponentwise; under cancellative equality it names another set
    assert not spectra_equal(SClosed(F(1), S("2^inf")), D("S(1/4; 2^inf)"))


def test_unital_spectrum_and_criterion():
    assert unital_spectrum(S("12")) == Fin(12)
    assert unital_spectrum(S("2^inf")) == SClosed(F(1), S("2^inf"))
    assert unitality_criterion(D("S(3; 2^inf)"))
    assert not unitality_criterion(D("S+(3; 2^inf)"))
    assert not unitality_criterion(D("S(1/3; 2^inf)"))
    assert not unitality_criterion(D("S(inf; 2^inf)"))
    assert unitality_criterion(D("Fin(2)"))


def test_separating_witness_examples():
    w = separating_witness(D("S(1; 2^inf)"), D("S+(1; 2^inf)"))
    assert w == ScaledSteinitz.of(S("2^inf"))
    assert separating_witness(D("S(1; 2^inf)"), D("S(1; 2^inf)")) is None
    with pytest.raises(ValueError):
        separating_witness(D("S(1; 2^inf)"), D("S(1; 3^inf)"))


def test_separating_witness_random_pairs():
    rng = random.Random(7)
    s = S("2^inf*3")
    for _ in range(50):
        r1, r2 = F(rng.randint(1, 30), rng.randint(1, 12)), F(rng.randint(1, 30), rng.randint(1, 12))
        k1 = SClosed(r1, s) if rng.random() < 0.5 or not _den_ok(r1, s) else SOpen(r1, s)
        k2 = SClosed(r2, s) if rng.random() < 0.5 or not _den_ok(r2, s) else SOpen(r2, s)
        if spectra_equal(k1, k2):
            continue
        w = separating_witness(k1, k2)
        assert w is not None and member(w, k1) != member(w, k2)


def _den_ok(r, s):
    return r.denominator in omega_elements(s, r.denominator)


def test_saturation_of_descriptors():
    for d in (D("S(3/2; 2^inf)"), D("S+(2; 3^inf)"), D("S(inf; 5^inf)"), D("Fin(5)")):
        base = S("1") if isinstance(d, Fin) else d.s
        sample = [ScaledSteinitz(F(a, b), base) for b in omega_elements(base, 16) for a in range(1, 3 * b + 1)]
        assert saturated_check(lambda t, d=d: member(t, d), sample) == []


def test_saturation_detects_gaps():
    planted = {ScaledSteinitz.of(5), ScaledSteinitz.of(15)}
    v = saturated_check(lambda t: t in planted, sorted(planted, key=str))
    assert {x.axiom for x in v} >= {2, 3}
    disconnected = {ScaledSteinitz.of(S("2^inf")), ScaledSteinitz.of(S("3^inf"))}
    assert any(x.axiom == 1 for x in saturated_check(lambda t: t in disconnected, list(disconnected)))


# --- properties ------------------------------------------------------------

bases = st.sampled_from([S("2^inf"), S("2^inf*3"), S("3^inf*5^2"), S("2^inf*7^inf")])
rationals = st.builds(F, st.integers(1, 40), st.integers(1, 12))


@st.composite
def descriptors(draw):
    s = draw(bases)
    kind = draw(st.sampled_from(["inf", "closed", "open"]))
    if kind == "inf":
        return SInf(s)
    r = draw(rationals)
    if kind == "open" and _den_ok(r, s):
        return SOpen(r, s)
    return SClosed(r, s)


@given(descriptors())
def test_canonicalize_is_idempotent(d):
    c = canonicalize(d)
    assert canonicalize(c.as_descriptor()) == c


@given(descriptors(), descriptors(), descriptors())
def test_spectra_equal_is_an_equivalence(a, b, c):
    assert spectra_equal(a, a)
    assert spectra_equal(a, b) == spectra_equal(b, a)
    if spectra_equal(a, b) and spectra_equal(b, c):
        assert spectra_equal(a, c)


@given(descriptors(), st.integers(1, 40), st.integers(0, 6))
def test_membership_agrees_with_canonical_form(d, a, k):
    b = omega_elements(d.s, 64)[min(k, len(omega_elements(d.s, 64)) - 1)]
    t = ScaledSteinitz(F(a, b), d.s)
    assert member(t, d) == member(t, canonicalize(d).as_descriptor())
