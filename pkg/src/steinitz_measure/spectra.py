"""Spectrum descriptors, membership, saturation checks and canonical invariants.

Spectra are sets of scaled Steinitz values.  The four shapes are

* ``Fin(n)``      = {1, ..., n}
* ``SInf(s)``     = {(a/b) s : a in N, b in Omega(s)}
* ``SClosed(r,s)``= {(a/b) s : b in Omega(s), a <= r b}
* ``SOpen(r,s)``  = {(a/b) s : b in Omega(s), a <  r b}

Membership reduces to the lowest-terms ratio ``a0/b0`` of the candidate
against the descriptor's base: any representation is a common multiple of
``(a0, b0)``, the inequalities are invariant under common multipliers, and
Omega(s) is closed under divisors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import floor, isqrt
from typing import Callable, Iterable, NamedTuple, Optional, Union

from .steinitz import (
    ScaledSteinitz,
    SteinitzNumber,
    class_representative,
    iter_omega,
    nat_divides,
    omega_elements,
    rationally_connected,
)

SAMPLE_SEED = 20240229
CROSS_CHECK_SAMPLES = 64


class ConsistencyError(AssertionError):
    """Analytic descriptor equality disagreed with sampled membership."""


class RealBound:
    """A real number given by shrinking rational brackets.

    ``approx(k)`` must return ``(lo, hi)`` with ``lo <= r <= hi`` and
    ``hi - lo -> 0``.  Only used for irrational bounds in :func:`member`.
    """

    def __init__(self, approx: Callable[[int], tuple[Fraction, Fraction]], name: str = "r", max_refine: int = 200):
        self.approx = approx
        self.name = name
        self.max_refine = max_refine

    def compare(self, q: Fraction) -> int:
        """-1, 0 or 1 as ``q`` is below, equal to or above the real."""
        for k in range(1, self.max_refine + 1):
            lo, hi = self.approx(k)
            if q < lo:
                return -1
            if q > hi:
                return 1
            if lo == hi == q:
                return 0
        raise ArithmeticError(f"could not separate {q} from {self.name}")

    def __str__(self) -> str:
        return self.name


def sqrt_bound(n: int) -> RealBound:
    """sqrt(n) for a non-square n, bracketed to 2k binary digits."""

    def approx(k):
        scale = 4**k
        a = isqrt(n * scale * scale)
        return Fraction(a, scale), Fraction(a + 1, scale)

    return RealBound(approx, f"sqrt({n})")


Bound = Union[Fraction, RealBound]


def _cmp(q: Fraction, r: Bound) -> int:
    if isinstance(r, RealBound):
        return r.compare(q)
    return (q > r) - (q < r)


@dataclass(frozen=True)
class Fin:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("Fin(n) needs n >= 1")

    def __str__(self):
        return f"Fin({self.n})"


@dataclass(frozen=True)
class SInf:
    s: SteinitzNumber

    def __str__(self):
        return f"S(inf; {self.s})"


def _fmt_r(r: Bound) -> str:
    return f"{r.numerator}/{r.denominator}" if isinstance(r, Fraction) else str(r)


@dataclass(frozen=True)
class SClosed:
    r: Bound
    s: SteinitzNumber

    def __post_init__(self):
        if not isinstance(self.r, RealBound):
            object.__setattr__(self, "r", Fraction(self.r))
            if self.r <= 0:
                raise ValueError("r must be positive")
        if self.s.is_natural:
            raise ValueError("S(r, s) needs an infinite Steinitz number s")

    def __str__(self):
        return f"S({_fmt_r(self.r)}; {self.s})"


@dataclass(frozen=True)
class SOpen:
    r: Fraction
    s: SteinitzNumber

    def __post_init__(self):
        object.__setattr__(self, "r", Fraction(self.r))
        if self.r <= 0:
            raise ValueError("r must be positive")
        if self.s.is_natural:
            raise ValueError("S+(r, s) needs an infinite Steinitz number s")
        if not nat_divides(self.r.denominator, self.s):
            raise ValueError(f"denominator of r must lie in Omega({self.s})")

    def __str__(self):
        return f"S+({_fmt_r(self.r)}; {self.s})"


Descriptor = Union[Fin, SInf, SClosed, SOpen]

Candidate = Union[ScaledSteinitz, tuple]


def _ratio_to(t: Candidate, base: SteinitzNumber) -> Optional[Fraction]:
    if isinstance(t, ScaledSteinitz):
        q, tb = t.scale, t.base
    else:
        q, tb = Fraction(t[0]), t[1]
    c = rationally_connected(tb, base)
    return None if c is None else q * c


def member(t: Candidate, d: Descriptor) -> bool:
    """Is the scaled value ``t`` in the spectrum ``d``?

    ``t`` may also be a raw ``(q, base)`` pair that is not a genuine
    Steinitz number (denominator of ``q`` outside Omega(base)); such a
    pair is never a member.
    """
    if isinstance(d, Fin):
        q = _ratio_to(t, SteinitzNumber.one())
        return q is not None and q.denominator == 1 and 1 <= q <= d.n
    q = _ratio_to(t, d.s)
    if q is None or q <= 0 or not nat_divides(q.denominator, d.s):
        return False
    if isinstance(d, SInf):
        return True
    c = _cmp(q, d.r)
    return c <= 0 if isinstance(d, SClosed) else c < 0


# ---------------------------------------------------------------------------
# saturation


class Violation(NamedTuple):
    axiom: int
    detail: str


def saturated_check(
    member_oracle: Callable[[ScaledSteinitz], bool],
    samples: Iterable[ScaledSteinitz],
    div_limit: int = 12,
    mult_limit: int = 6,
) -> list[Violation]:
    """Check the three saturation axioms on a finite sample.

    1. members are pairwise rationally connected;
    2. finite divisors ``t/b`` (``b`` up to ``div_limit``) of members are members;
    3. if ``t`` and ``n t`` are members then so is ``k t`` for ``1 <= k <= n``.
    Pairs for axiom 3 come from the sample itself and from ``n t`` with
    ``n <= mult_limit``.
    """
    members = [t for t in samples if member_oracle(t)]
    out: list[Violation] = []
    for i, t1 in enumerate(members):
        for t2 in members[i + 1:]:
            if t1.ratio(t2) is None:
                out.append(Violation(1, f"{t1} and {t2} are not rationally connected"))
    for t in members:
        for b in omega_elements(t.raw(), div_limit)[1:]:
            d = t.times(Fraction(1, b))
            if not member_oracle(d):
                out.append(Violation(2, f"{t} / {b} = {d} missing"))
    multiples = set()
    for t1 in members:
        for t2 in members:
            rho = t2.ratio(t1)
            if rho is not None and rho.denominator == 1 and rho > 1:
                multiples.add((t1, int(rho)))
        for n in range(2, mult_limit + 1):
            if member_oracle(t1.times(n)):
                multiples.add((t1, n))
    for t, n in sorted(multiples, key=lambda x: (str(x[0]), x[1])):
        for k in range(2, n):
            if not member_oracle(t.times(k)):
                out.append(Violation(3, f"{t} and {n}x in set but {k}x missing"))
    return out


# ---------------------------------------------------------------------------
# canonical invariants


@dataclass(frozen=True)
class CanonicalInvariant:
    kind: str  # "finite" | "bounded" | "unbounded"
    n: Optional[int] = None
    class_rep: Optional[SteinitzNumber] = None
    r_star: Optional[Fraction] = None
    attained: Optional[bool] = None

    def as_descriptor(self) -> Descriptor:
        if self.kind == "finite":
            return Fin(self.n)
        if self.kind == "unbounded":
            return SInf(self.class_rep)
        if self.attained:
            return SClosed(self.r_star, self.class_rep)
        if nat_divides(self.r_star.denominator, self.class_rep):
            return SOpen(self.r_star, self.class_rep)
        return SClosed(self.r_star, self.class_rep)

    def rescaled_pair(self) -> Optional[tuple[SteinitzNumber, Fraction]]:
        """``(s, r)`` rescaled so that ``r >= 1``.

        Uses the smallest ``b`` in Omega(class_rep) with ``r_star * b >= 1``
        and reports ``(class_rep / b, r_star * b)``; the Steinitz part is
        given exponentwise.
        """
        if self.kind != "bounded":
            return None
        from .steinitz import st_div_by_nat

        for b in iter_omega(self.class_rep):
            if self.r_star * b >= 1:
                return st_div_by_nat(self.class_rep, b), self.r_star * b
        raise AssertionError("unreachable")

    def __str__(self) -> str:
        if self.kind == "finite":
            return f"finite n={self.n}"
        if self.kind == "unbounded":
            return f"unbounded class={self.class_rep}"
        r = self.r_star
        return f"bounded class={self.class_rep} r*={r.numerator}/{r.denominator} attained={str(self.attained).lower()}"


def canonicalize(d: Descriptor) -> CanonicalInvariant:
    if isinstance(d, Fin):
        return CanonicalInvariant("finite", n=d.n)
    rep = class_representative(d.s)
    q = rationally_connected(d.s, rep)
    if isinstance(d, SInf):
        return CanonicalInvariant("unbounded", class_rep=rep)
    if isinstance(d.r, RealBound):
        raise TypeError("canonical invariants need a rational r")
    r_star = d.r * q
    attained = isinstance(d, SClosed) and nat_divides(r_star.denominator, rep)
    return CanonicalInvariant("bounded", class_rep=rep, r_star=r_star, attained=attained)


def sample_candidates(d: Descriptor, k: int, rng: random.Random) -> list[ScaledSteinitz]:
    """Candidates in and just outside ``d``, for sampled cross-checks."""
    if isinstance(d, Fin):
        return [ScaledSteinitz.of(rng.randint(1, d.n + 3)) for _ in range(k)]
    omega = omega_elements(d.s, 64)
    bound = 4 if isinstance(d, SInf) else d.r
    if isinstance(bound, RealBound):
        bound = bound.approx(4)[1]
    out = []
    if not isinstance(d, SInf) and nat_divides(bound.denominator, d.s):
        out.append(ScaledSteinitz(bound, d.s))
    while len(out) < k:
        b = rng.choice(omega)
        a = rng.randint(1, int(floor(bound * b)) + 2)
        out.append(ScaledSteinitz(Fraction(a, b), d.s))
    return out[:k]


def spectra_equal(d1: Descriptor, d2: Descriptor, cross_check: bool = True) -> bool:
    """Equality of spectra via canonical invariants.

    With ``cross_check`` the answer is compared against membership on a
    deterministic sample drawn from both descriptors; an "equal" verdict
    that some sample separates raises :class:`ConsistencyError`.
    """
    equal = canonicalize(d1) == canonicalize(d2)
    if cross_check and equal:
        rng = random.Random(SAMPLE_SEED)
        half = CROSS_CHECK_SAMPLES // 2
        for t in sample_candidates(d1, half, rng) + sample_candidates(d2, half, rng):
            if member(t, d1) != member(t, d2):
                raise ConsistencyError(f"{d1} and {d2} canonicalize equal but disagree on {t}")
    return equal


def separating_witness(d1: Descriptor, d2: Descriptor, limit: int = 10**6) -> Optional[ScaledSteinitz]:
    """A value in exactly one of two bounded descriptors over the same class."""
    c1, c2 = canonicalize(d1), canonicalize(d2)
    if c1.kind != "bounded" or c2.kind != "bounded" or c1.class_rep != c2.class_rep:
        raise ValueError("witness search needs bounded descriptors over one class")
    if c1 == c2:
        return None
    lo, hi = sorted([c1, c2], key=lambda c: (c.r_star, c.attained))
    if lo.r_star == hi.r_star:
        # same bound, only one attains it
        return ScaledSteinitz(hi.r_star, hi.class_rep)
    for b in iter_omega(lo.class_rep):
        if b > limit:
            break
        q = Fraction(floor(lo.r_star * b) + 1, b)
        if q < hi.r_star or (q == hi.r_star and hi.attained):
            return ScaledSteinitz(q, lo.class_rep)
    return None


def unital_spectrum(s: SteinitzNumber) -> Descriptor:
    """Spectrum {(a/b) s : b in Omega(s), 1 <= a <= b} of a unital algebra."""
    if s.is_natural:
        return Fin(s.to_int())
    return SClosed(Fraction(1), s)


def unitality_criterion(d: Descriptor) -> bool:
    if isinstance(d, Fin):
        return True
    c = canonicalize(d)
    return c.kind == "bounded" and bool(c.attained)
