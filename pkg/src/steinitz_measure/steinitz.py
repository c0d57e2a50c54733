"""Steinitz (supernatural) numbers and scaled Steinitz values.

A Steinitz number is stored as a default exponent plus a finite table of
exceptions, so only eventually-constant exponent functions are
representable.  "Exponent 1 on primes congruent to 1 mod 4 only" is an
example of a Steinitz number this module cannot hold.

Exponents are ``int`` or ``INF`` (``math.inf``); ``INF`` absorbs finite
exponents under addition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping, Optional, Union

from sympy import factorint, isprime

INF = math.inf

Exponent = Union[int, float]

def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer."""
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    return dict(_factor_cached(n))


@lru_cache(maxsize=65536)
def _factor_cached(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(factorint(n).items()))


def is_prime(n: int) -> bool:
    return bool(isprime(n))


def valuation(q: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def rational_support(q: Fraction) -> dict[int, int]:
    """Primes with nonzero valuation in ``q`` mapped to that valuation."""
    out = dict(factorize(q.numerator))
    for p, k in factorize(q.denominator).items():
        out[p] = -k
    return out


def _fmt_exp(e: Exponent) -> str:
    return "inf" if e == INF else str(int(e))


@dataclass(frozen=True)
class SteinitzNumber:
    """Formal product of prime powers, exponents in N ∪ {inf}.

    ``default`` is the exponent of every prime not listed in ``exceptions``.
    Construct through :meth:`make` to get the canonical form.
    """

    default: Exponent
    exceptions: tuple[tuple[int, Exponent], ...]

    @classmethod
    def make(cls, default: Exponent = 0, exceptions: Optional[Mapping[int, Exponent]] = None) -> "SteinitzNumber":
        default = _check_exp(default)
        items = []
        for p, e in (exceptions or {}).items():
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            e = _check_exp(e)
            if e != default:
                items.append((p, e))
        items.sort()
        return cls(default, tuple(items))

    @classmethod
    def of_int(cls, n: int) -> "SteinitzNumber":
        return cls.make(0, factorize(n))

    @classmethod
    def one(cls) -> "SteinitzNumber":
        return cls(0, ())

    def exponent(self, p: int) -> Exponent:
        for q, e in self.exceptions:
            if q == p:
                return e
        return self.default

    def exc(self) -> dict[int, Exponent]:
        return dict(self.exceptions)

    @property
    def is_natural(self) -> bool:
        return self.default == 0 and all(e != INF for _, e in self.exceptions)

    @property
    def is_infinite(self) -> bool:
        return not self.is_natural

    def to_int(self) -> int:
        if not self.is_natural:
            raise ValueError(f"{self} is an infinite Steinitz number")
        n = 1
        for p, e in self.exceptions:
            n *= p ** int(e)
        return n

    def infinite_primes(self) -> frozenset[int]:
        """Exception primes with exponent inf (all others if default is inf)."""
        return frozenset(p for p, e in self.exceptions if e == INF)

    def __mul__(self, other: "SteinitzNumber") -> "SteinitzNumber":
        return st_mul(self, other)

    def __str__(self) -> str:
        parts = []
        if self.default != 0:
            parts.append(f"rest^{_fmt_exp(self.default)}")
        for p, e in self.exceptions:
            parts.append(str(p) if e == 1 else f"{p}^{_fmt_exp(e)}")
        return "*".join(parts) if parts else "1"

    def __repr__(self) -> str:
        return f"SteinitzNumber({self})"


def _check_exp(e: Exponent) -> Exponent:
    if e == INF:
        return INF
    if isinstance(e, float):
        if not e.is_integer():
            raise ValueError(f"bad exponent {e}")
        e = int(e)
    if not isinstance(e, int) or e < 0:
        raise ValueError(f"bad exponent {e!r}")
    return e


def _combine(s1: SteinitzNumber, s2: SteinitzNumber, op) -> SteinitzNumber:
    keys = set(s1.exc()) | set(s2.exc())
    default = op(s1.default, s2.default)
    return SteinitzNumber.make(default, {p: op(s1.exponent(p), s2.exponent(p)) for p in keys})


def st_mul(s1: SteinitzNumber, s2: SteinitzNumber) -> SteinitzNumber:
    # float inf + int is inf, which is exactly the absorbing rule
    return _combine(s1, s2, lambda a, b: a + b)


def st_lcm(s1: SteinitzNumber, s2: SteinitzNumber) -> SteinitzNumber:
    return _combine(s1, s2, max)


def nat_divides(n: int, s: SteinitzNumber) -> bool:
    """True iff the natural number ``n`` lies in Omega(s)."""
    if n < 1:
        raise ValueError("n must be positive")
    return all(k <= s.exponent(p) for p, k in factorize(n).items())


def st_div_by_nat(s: SteinitzNumber, b: int) -> SteinitzNumber:
    if not nat_divides(b, s):
        raise ValueError(f"{b} does not divide {s}")
    fb = factorize(b)
    exc = s.exc()
    for p, k in fb.items():
        exc[p] = s.exponent(p) - k
    return SteinitzNumber.make(s.default, exc)


def rationally_connected(s1: SteinitzNumber, s2: SteinitzNumber) -> Optional[Fraction]:
    """The rational ``q`` with ``s1 = q * s2``, or None.

    ``q`` is read off the finite-exponent primes only; the two numbers must
    agree on the default and on which primes carry exponent inf.
    """
    if s1.default != s2.default:
        return None
    q = Fraction(1)
    for p in set(s1.exc()) | set(s2.exc()):
        e1, e2 = s1.exponent(p), s2.exponent(p)
        if (e1 == INF) != (e2 == INF):
            return None
        if e1 != INF:
            q *= Fraction(p) ** int(e1 - e2)
    return q


def finitely_divides(s1: SteinitzNumber, s2: SteinitzNumber) -> Optional[int]:
    """The ``b`` in Omega(s2) with ``s1 = s2 / b``, or None."""
    q = rationally_connected(s1, s2)
    if q is None or q.numerator != 1 or not nat_divides(q.denominator, s2):
        return None
    return q.denominator


def st_leq(s1: SteinitzNumber, s2: SteinitzNumber) -> bool:
    """``s1 = (a/b) s2`` with ``b`` in Omega(s2) and ``1 <= a <= b``.

    Reduces to the lowest-terms ratio: any representation (a, b) is a common
    multiple of (a0, b0), and Omega(s2) is closed under divisors.
    """
    q = rationally_connected(s1, s2)
    return q is not None and q <= 1 and nat_divides(q.denominator, s2)


def class_representative(s: SteinitzNumber) -> SteinitzNumber:
    """Canonical member of the rational-connectedness class of ``s``.

    Finite-exponent exceptions are reset to the default; when the default is
    inf they are reset to 0 instead, since inf would change the class.
    """
    if s.default == INF:
        return SteinitzNumber.make(INF, {p: 0 for p, e in s.exceptions})
    return SteinitzNumber.make(s.default, {p: e for p, e in s.exceptions if e == INF})


def omega_elements(s: SteinitzNumber, limit: int) -> list[int]:
    """All elements of Omega(s) up to ``limit``, ascending."""
    return [n for n in range(1, limit + 1) if nat_divides(n, s)]


def iter_omega(s: SteinitzNumber) -> Iterator[int]:
    n = 1
    while True:
        if nat_divides(n, s):
            yield n
        n += 1


# ---------------------------------------------------------------------------
# scaled values


@dataclass(frozen=True, eq=False)
class ScaledSteinitz:
    """An exact positive rational times a Steinitz base, compared cancellatively.

    ``(3/4) * 2^inf`` and ``(3/2) * 2^inf`` are different values even though
    both multiply out to ``3 * 2^inf``; use :func:`st_exponentwise_equal` for
    the absorbing comparison.
    """

    scale: Fraction
    base: SteinitzNumber

    def __post_init__(self):
        q = Fraction(self.scale)
        object.__setattr__(self, "scale", q)
        if q <= 0:
            raise ValueError("scale must be positive")
        if not nat_divides(q.denominator, self.base):
            raise ValueError(f"denominator of {q} does not divide {self.base}")

    @classmethod
    def of(cls, s: Union[SteinitzNumber, int]) -> "ScaledSteinitz":
        if isinstance(s, int):
            s = SteinitzNumber.of_int(s)
        return cls(Fraction(1), s)

    def canonical(self) -> tuple[Fraction, SteinitzNumber]:
        rep = class_representative(self.base)
        q = rationally_connected(self.base, rep)
        return self.scale * q, rep

    def ratio(self, other: "ScaledSteinitz") -> Optional[Fraction]:
        """The rational ``rho`` with ``self = rho * other``, or None."""
        q = rationally_connected(self.base, other.base)
        if q is None:
            return None
        return self.scale * q / other.scale

    def rebase(self, new_base: SteinitzNumber) -> Optional["ScaledSteinitz"]:
        return scaled_rebase(self, new_base)

    def times(self, q) -> "ScaledSteinitz":
        return ScaledSteinitz(self.scale * Fraction(q), self.base)

    def raw(self) -> SteinitzNumber:
        """Exponentwise product, with inf absorbing the scale."""
        exc = self.base.exc()
        for p, v in rational_support(self.scale).items():
            exc[p] = self.base.exponent(p) + v
        return SteinitzNumber.make(self.base.default, exc)

    @property
    def is_natural(self) -> bool:
        return self.base.is_natural

    def __eq__(self, other):
        if not isinstance(other, ScaledSteinitz):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def __str__(self) -> str:
        q = self.scale
        return f"{q.numerator}/{q.denominator} * {self.base}"

    def __repr__(self) -> str:
        return f"ScaledSteinitz({self})"


def scaled_rebase(t: ScaledSteinitz, new_base: SteinitzNumber) -> Optional[ScaledSteinitz]:
    q = rationally_connected(t.base, new_base)
    if q is None:
        return None
    try:
        return ScaledSteinitz(t.scale * q, new_base)
    except ValueError:
        return None


def st_exponentwise_equal(t1: ScaledSteinitz, t2: ScaledSteinitz) -> bool:
    return t1.raw() == t2.raw()


def scaled_leq(t1: ScaledSteinitz, t2: ScaledSteinitz) -> bool:
    """The ``<=`` of Steinitz numbers, applied to scaled values."""
    rho = t1.ratio(t2)
    return rho is not None and rho <= 1 and nat_divides(rho.denominator, t2.raw())
