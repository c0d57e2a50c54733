"""Finite weighted Boolean measure algebras.

Every finite Boolean algebra is atomic, so an algebra is just a tuple of
positive atom weights and an element is a bit mask over atom indices
(bit ``i`` set means atom ``i`` is in the element).  Atom indices are
0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .steinitz import ScaledSteinitz


class AlgebraMismatch(ValueError):
    pass


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def iter_bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class FiniteMeasureAlgebra:
    weights: tuple[Fraction, ...]
    scale: Optional[Fraction] = None

    def __post_init__(self):
        w = tuple(Fraction(x) for x in self.weights)
        if not w:
            raise ValueError("an algebra needs at least one atom")
        if any(x <= 0 for x in w):
            raise ValueError("atom weights must be strictly positive")
        object.__setattr__(self, "weights", w)

    @classmethod
    def standard(cls, n: int) -> "FiniteMeasureAlgebra":
        if n < 1:
            raise ValueError("St_n needs n >= 1")
        return cls((Fraction(1, n),) * n)

    @property
    def n(self) -> int:
        return len(self.weights)

    @cached_property
    def total(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    @cached_property
    def is_standard(self) -> bool:
        return len(set(self.weights)) == 1

    def top(self) -> "AlgElement":
        return AlgElement(self, (1 << self.n) - 1)

    def zero(self) -> "AlgElement":
        return AlgElement(self, 0)

    def element(self, bits: str) -> "AlgElement":
        """Element from a 0/1 string, character ``i`` being atom ``i``."""
        if len(bits) != self.n or set(bits) - {"0", "1"}:
            raise ValueError(f"expected {self.n} bits, got {bits!r}")
        return AlgElement(self, mask_of(i for i, c in enumerate(bits) if c == "1"))

    def atom(self, i: int) -> "AlgElement":
        return AlgElement(self, 1 << i)

    def elements(self):
        for m in range(1 << self.n):
            yield AlgElement(self, m)

    def mask_measure(self, mask: int) -> Fraction:
        return sum((self.weights[i] for i in iter_bits(mask)), Fraction(0))

    def __str__(self) -> str:
        return "weights: " + ",".join(f"{w.numerator}/{w.denominator}" for w in self.weights)


@dataclass(frozen=True)
class AlgElement:
    algebra: FiniteMeasureAlgebra
    atoms: int

    def __post_init__(self):
        if self.atoms < 0 or self.atoms >> self.algebra.n:
            raise ValueError("atom set out of range")

    def __add__(self, other: "AlgElement") -> "AlgElement":
        return elem_combine("add", self, other)

    def __mul__(self, other: "AlgElement") -> "AlgElement":
        return elem_combine("mul", self, other)

    def __le__(self, other: "AlgElement") -> bool:
        _same(self, other)
        return self.atoms & ~other.atoms == 0

    @property
    def is_zero(self) -> bool:
        return self.atoms == 0

    def bits(self) -> str:
        return "".join("1" if self.atoms >> i & 1 else "0" for i in range(self.algebra.n))

    def indices(self) -> list[int]:
        return list(iter_bits(self.atoms))

    def __str__(self) -> str:
        return self.bits()


def _same(a: AlgElement, b: AlgElement):
    if a.algebra != b.algebra:
        raise AlgebraMismatch("elements belong to different algebras")


def elem_combine(kind: str, a: AlgElement, b: AlgElement) -> AlgElement:
    _same(a, b)
    if kind == "add":
        return AlgElement(a.algebra, a.atoms ^ b.atoms)
    if kind == "mul":
        return AlgElement(a.algebra, a.atoms & b.atoms)
    raise ValueError(f"unknown operation {kind!r}")


def measure_of(a: AlgElement) -> Fraction:
    return a.algebra.mask_measure(a.atoms)


def distance(a: AlgElement, b: AlgElement) -> Fraction:
    return measure_of(elem_combine("add", a, b))


def corner_algebra(H: FiniteMeasureAlgebra, h: AlgElement) -> FiniteMeasureAlgebra:
    """The relative algebra hH with measure renormalized by mu(h)."""
    if h.algebra != H:
        raise AlgebraMismatch("element not in algebra")
    if h.is_zero:
        raise ValueError("corner at the zero element")
    mu_h = measure_of(h)
    return FiniteMeasureAlgebra(tuple(H.weights[i] / mu_h for i in h.indices()))


def tensor_algebra(H1: FiniteMeasureAlgebra, H2: FiniteMeasureAlgebra) -> FiniteMeasureAlgebra:
    """Atom (i, j) sits at index ``i * H2.n + j`` with weight w1[i] * w2[j]."""
    return FiniteMeasureAlgebra(tuple(a * b for a in H1.weights for b in H2.weights))


def pure_tensor(a: AlgElement, b: AlgElement, T: FiniteMeasureAlgebra) -> AlgElement:
    n2 = b.algebra.n
    return AlgElement(T, mask_of(i * n2 + j for i in a.indices() for j in b.indices()))


# ---------------------------------------------------------------------------
# atom maps


@dataclass(frozen=True)
class AtomMap:
    """A map sending each source atom to a set of target atoms.

    Instances are plain data; :meth:`problems` lists every violated
    invariant and :meth:`validated` raises on the first.
    """

    source: FiniteMeasureAlgebra
    target: FiniteMeasureAlgebra
    images: tuple[int, ...]

    def problems(self, normalized: bool = False) -> list[str]:
        out = []
        if len(self.images) != self.source.n:
            return [f"expected {self.source.n} atom images, got {len(self.images)}"]
        seen = 0
        for i, img in enumerate(self.images):
            if img == 0:
                out.append(f"atom {i} maps to zero (not injective)")
            if img >> self.target.n:
                out.append(f"atom {i} image out of range")
            if seen & img:
                out.append(f"atom {i} image overlaps an earlier image")
            seen |= img
        if not out and self.scaling(normalized) is None:
            out.append("measure scaling is not constant across atoms")
        return out

    def validated(self, normalized: bool = False) -> "AtomMap":
        p = self.problems(normalized)
        if p:
            raise ValueError(p[0])
        return self

    def scaling(self, normalized: bool = False) -> Optional[Fraction]:
        """The constant lambda with mu_t(image(a)) = lambda * mu_s(a), if any."""
        ws, wt = self.source.weights, self.target.weights
        ts, tt = (self.source.total, self.target.total) if normalized else (1, 1)
        lam = None
        for i, img in enumerate(self.images):
            m = sum((wt[j] for j in iter_bits(img)), Fraction(0)) / tt
            r = m / (ws[i] / ts)
            if lam is None:
                lam = r
            elif r != lam:
                return None
        return lam

    def apply_mask(self, mask: int) -> int:
        out = 0
        for i in iter_bits(mask):
            out |= self.images[i]
        return out

    def __call__(self, a: AlgElement) -> AlgElement:
        if a.algebra != self.source:
            raise AlgebraMismatch("element not in source algebra")
        return AlgElement(self.target, self.apply_mask(a.atoms))

    @property
    def is_permutation(self) -> bool:
        return (
            self.source.n == self.target.n
            and all(popcount(m) == 1 for m in self.images)
            and len(set(self.images)) == self.source.n
        )

    def as_permutation(self) -> list[int]:
        if not self.is_permutation:
            raise ValueError("not a permutation of atoms")
        return [m.bit_length() - 1 for m in self.images]

    def compose(self, first: "AtomMap") -> "AtomMap":
        """``self ∘ first``."""
        if first.target != self.source:
            raise AlgebraMismatch("maps are not composable")
        return AtomMap(first.source, self.target, tuple(self.apply_mask(m) for m in first.images))

    @classmethod
    def from_permutation(cls, H: FiniteMeasureAlgebra, perm: Sequence[int]) -> "AtomMap":
        if sorted(perm) != list(range(H.n)):
            raise ValueError("not a permutation")
        return cls(H, H, tuple(1 << j for j in perm))

    @classmethod
    def identity(cls, H: FiniteMeasureAlgebra) -> "AtomMap":
        return cls.from_permutation(H, range(H.n))


def scalar_equivalent(H1: FiniteMeasureAlgebra, H2: FiniteMeasureAlgebra):
    """``(alpha, AtomMap)`` with mu2(phi(a)) = alpha * mu1(a), or None.

    Atoms are matched by sorting both weight lists (stable), so the answer
    is deterministic.
    """
    if H1.n != H2.n:
        return None
    alpha = H2.total / H1.total
    o1 = sorted(range(H1.n), key=lambda i: H1.weights[i])
    o2 = sorted(range(H2.n), key=lambda i: H2.weights[i])
    images = [0] * H1.n
    for i, j in zip(o1, o2):
        if H2.weights[j] != alpha * H1.weights[i]:
            return None
        images[i] = 1 << j
    return alpha, AtomMap(H1, H2, tuple(images))


def standard_embedding(n: int, m: int) -> AtomMap:
    """Atom ``i`` of St_n goes to the ``i``-th block of m/n consecutive atoms of St_m."""
    if n < 1 or m % n:
        raise ValueError(f"{n} does not divide {m}")
    c = m // n
    block = (1 << c) - 1
    return AtomMap(FiniteMeasureAlgebra.standard(n), FiniteMeasureAlgebra.standard(m),
                   tuple(block << (i * c) for i in range(n)))


def extend_automorphism(perm: AtomMap, emb: AtomMap) -> AtomMap:
    """Extend an automorphism of the source of ``emb`` to its target.

    The image block of atom ``i`` is carried onto the image block of
    ``perm(i)`` keeping order inside blocks; atoms outside the image of
    ``emb`` are fixed.  The result satisfies ``ext ∘ emb = emb ∘ perm``.
    """
    if perm.source != emb.source or perm.target != emb.source:
        raise AlgebraMismatch("permutation does not act on the embedded algebra")
    p = perm.as_permutation()
    if perm.scaling() != 1:
        raise ValueError("permutation is not measure preserving")
    m = emb.target.n
    out = list(range(m))
    for i, j in enumerate(p):
        src, dst = list(iter_bits(emb.images[i])), list(iter_bits(emb.images[j]))
        if len(src) != len(dst):
            raise ValueError(f"blocks of atoms {i} and {j} differ in size")
        for x, y in zip(src, dst):
            out[x] = y
    ext = AtomMap.from_permutation(emb.target, out)
    if ext.scaling() != 1:
        raise ValueError("extension is not measure preserving")
    return ext


def mapping_automorphism(H: FiniteMeasureAlgebra, a: AlgElement, b: AlgElement) -> AtomMap:
    """A measure-preserving atom permutation of standard ``H`` carrying a to b.

    Atoms of ``a`` go to atoms of ``b`` in index order; the complements are
    matched the same way.
    """
    if not H.is_standard:
        raise ValueError("mapping_automorphism needs a standard algebra")
    if measure_of(a) != measure_of(b):
        raise ValueError("elements have different measure")
    perm = [0] * H.n
    top = (1 << H.n) - 1
    for src, dst in ((a.atoms, b.atoms), (top & ~a.atoms, top & ~b.atoms)):
        for x, y in zip(iter_bits(src), iter_bits(dst)):
            perm[x] = y
    return AtomMap.from_permutation(H, perm)


def corner_steinitz(st_H: ScaledSteinitz, h_measure) -> ScaledSteinitz:
    """Steinitz invariant of a corner of normalized measure ``h_measure``."""
    h_measure = Fraction(h_measure)
    if not 0 < h_measure <= 1:
        raise ValueError("corner measure must lie in (0, 1]")
    return st_H.times(h_measure)


def finite_spectrum(H: FiniteMeasureAlgebra) -> set[int]:
    """Corner Steinitz numbers of St_n: a corner with k atoms is St_k."""
    if not H.is_standard:
        raise ValueError("finite_spectrum needs a standard algebra")
    if H.n <= 12:
        return {popcount(m) for m in range(1, 1 << H.n)}
    return set(range(1, H.n + 1))
