"""Periodic 0/1 sequences (the algebras H(u)) and finite subsets (H(inf))."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Union

from .measure import AlgElement, FiniteMeasureAlgebra
from .steinitz import SteinitzNumber, nat_divides


def _divisors(k: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= k:
        if k % d == 0:
            small.append(d)
            if d * d != k:
                large.append(k // d)
        d += 1
    return small + large[::-1]


@dataclass(frozen=True)
class PeriodicWord:
    """One period of a periodic sequence; always the minimal period.

    Use :func:`pw_normalize` to build one from an arbitrary period.
    """

    period: int
    bits: str

    def __post_init__(self):
        if self.period < 1 or len(self.bits) != self.period or set(self.bits) - {"0", "1"}:
            raise ValueError(f"bad periodic word {self.period}:{self.bits}")

    def expand(self, k: int) -> str:
        if k % self.period:
            raise ValueError(f"{k} is not a multiple of the period {self.period}")
        return self.bits * (k // self.period)

    @property
    def is_zero(self) -> bool:
        return self.bits == "0"

    def __str__(self) -> str:
        return f"{self.period}:{self.bits}"


def pw_normalize(period: int, bits: str) -> PeriodicWord:
    if period < 1 or len(bits) != period:
        raise ValueError(f"bits must have length {period}")
    for d in _divisors(period):
        if bits[:d] * (period // d) == bits:
            return PeriodicWord(d, bits[:d])
    raise AssertionError("unreachable: d = period always matches")


ZERO = PeriodicWord(1, "0")
ONE = PeriodicWord(1, "1")


def pw_combine(kind: str, x: PeriodicWord, y: PeriodicWord) -> PeriodicWord:
    k = lcm(x.period, y.period)
    a, b = x.expand(k), y.expand(k)
    if kind == "add":
        bits = "".join("1" if p != q else "0" for p, q in zip(a, b))
    elif kind == "mul":
        bits = "".join("1" if p == q == "1" else "0" for p, q in zip(a, b))
    else:
        raise ValueError(f"unknown operation {kind!r}")
    return pw_normalize(k, bits)


def pw_measure(x: PeriodicWord) -> Fraction:
    return Fraction(x.bits.count("1"), x.period)


def pw_in_algebra(x: PeriodicWord, u: SteinitzNumber) -> bool:
    return nat_divides(x.period, u)


def embed_standard(n: int, u: SteinitzNumber) -> Callable[[AlgElement], PeriodicWord]:
    """Embedding of St_n into H(u) sending coordinate i to the n-periodic
    indicator of position i."""
    if not nat_divides(n, u):
        raise ValueError(f"{n} is not in Omega({u})")
    St = FiniteMeasureAlgebra.standard(n)

    def phi(a: AlgElement) -> PeriodicWord:
        if a.algebra != St:
            raise ValueError(f"element is not in St_{n}")
        return pw_normalize(n, a.bits())

    return phi


def standard_preimage(words: Iterable[PeriodicWord]):
    """Witness that finitely many words lie in one standard subalgebra.

    Returns ``(k, elements)`` where ``k`` is the lcm of the periods and each
    word is the image of the matching element of St_k.
    """
    words = list(words)
    k = lcm(*(w.period for w in words)) if words else 1
    St = FiniteMeasureAlgebra.standard(k)
    return k, [St.element(w.expand(k)) for w in words]


# ---------------------------------------------------------------------------
# H(inf): finite subsets of the positive integers, measure = cardinality


@dataclass(frozen=True)
class FiniteSupportSet:
    items: frozenset

    def __post_init__(self):
        object.__setattr__(self, "items", frozenset(self.items))
        if any(not isinstance(i, int) or i < 1 for i in self.items):
            raise ValueError("elements must be positive integers")

    def __str__(self) -> str:
        return "{" + ",".join(map(str, sorted(self.items))) + "}"


def fs_ops(kind: str, a: FiniteSupportSet, b: FiniteSupportSet = None) -> Union[FiniteSupportSet, int]:
    if kind == "measure":
        return len(a.items)
    if b is None:
        raise ValueError(f"{kind} needs two operands")
    if kind == "add":
        return FiniteSupportSet(a.items ^ b.items)
    if kind == "mul":
        return FiniteSupportSet(a.items & b.items)
    raise ValueError(f"unknown operation {kind!r}")
