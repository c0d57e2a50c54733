"""Finite matrix algebras over the rationals: rank, relative range, block
embeddings and the diagonal Cartan bridge to measure algebras."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .chains import ChainPresentation
from .measure import AtomMap, FiniteMeasureAlgebra
from .steinitz import ScaledSteinitz


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class RationalMatrix:
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in r) for r in self.rows)
        if any(len(r) != len(rows) for r in rows):
            raise ShapeError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def diag(cls, entries: Sequence) -> "RationalMatrix":
        n = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> "RationalMatrix":
        return cls.diag([0] * n)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.diag([1] * n)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if other.n != self.n:
            raise ShapeError(f"cannot multiply {self.n}x{self.n} by {other.n}x{other.n}")
        cols = list(zip(*other.rows))
        return RationalMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows))

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if other.n != self.n:
            raise ShapeError("shape mismatch")
        return RationalMatrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def is_idempotent(self) -> bool:
        return self @ self == self

    def __str__(self) -> str:
        return "; ".join(" ".join(str(x) for x in r) for r in self.rows)


def matrix_rank(a: RationalMatrix) -> int:
    """Exact rank: clear denominators, then fraction-free (Bareiss) elimination."""
    m = [[int(x * lcm(*(y.denominator for y in r))) for x in r] for r in a.rows]
    n = a.n
    rank = 0
    prev = 1
    for col in range(n):
        piv = next((i for i in range(rank, n) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, n):
            for j in range(col + 1, n):
                m[i][j] = (m[i][j] * m[rank][col] - m[i][col] * m[rank][j]) // prev
            m[i][col] = 0
        prev = m[rank][col]
        rank += 1
    return rank


def relative_range(a: RationalMatrix, n: int = None) -> Fraction:
    n = a.n if n is None else n
    if n != a.n:
        raise ShapeError(f"matrix is {a.n}x{a.n}, not {n}x{n}")
    return Fraction(matrix_rank(a), n)


@dataclass(frozen=True)
class BlockEmbedding:
    """``a -> diag(a, ..., a, 0)`` with ``m`` copies of ``a`` inside M_N."""

    n: int
    N: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.m * self.n > self.N:
            raise ShapeError(f"need m*n <= N, got {self.m}*{self.n} > {self.N}")

    @property
    def unital(self) -> bool:
        return self.m * self.n == self.N

    def __call__(self, a: RationalMatrix) -> RationalMatrix:
        if a.n != self.n:
            raise ShapeError(f"expected a {self.n}x{self.n} matrix")
        rows = []
        for k in range(self.N):
            blk, i = divmod(k, self.n)
            if blk < self.m:
                rows.append((0,) * (blk * self.n) + a.rows[i] + (0,) * (self.N - (blk + 1) * self.n))
            else:
                rows.append((0,) * self.N)
        return RationalMatrix(tuple(rows))

    def unit_image(self) -> RationalMatrix:
        return self(RationalMatrix.identity(self.n))

    def compose(self, first: "BlockEmbedding") -> "BlockEmbedding":
        """``self ∘ first``."""
        if first.N != self.n:
            raise ShapeError("embeddings are not composable")
        # the composite places m1*m2 copies, but interleaved with zero padding
        # when the first one is non-unital; only the unital case stays a block map
        if not first.unital:
            raise ShapeError("composite of a non-unital first map is not a plain block embedding")
        return BlockEmbedding(first.n, self.N, first.m * self.m)


def embed_and_check(a: RationalMatrix, emb: BlockEmbedding):
    """Image of ``a`` and whether ``r_N(image) = r_n(a) * r_N(e)``, ``e`` the unit image."""
    img = emb(a)
    lhs = relative_range(img)
    rhs = relative_range(a) * relative_range(emb.unit_image())
    return img, lhs == rhs


def diagonal_idempotent(bits: str) -> RationalMatrix:
    return RationalMatrix.diag([int(ch) for ch in bits])


def cartan_extract(n: int) -> FiniteMeasureAlgebra:
    """Idempotents of the diagonal Cartan subalgebra of M_n, measured by relative range."""
    if n < 1:
        raise ValueError("n must be positive")
    return FiniteMeasureAlgebra.standard(n)


def idempotent_to_element(e: RationalMatrix):
    """The element of ``cartan_extract(n)`` for a diagonal idempotent."""
    d = [e.rows[i][i] for i in range(e.n)]
    off = any(e.rows[i][j] for i in range(e.n) for j in range(e.n) if i != j)
    if off or any(x not in (0, 1) for x in d):
        raise ValueError("not a diagonal idempotent")
    return cartan_extract(e.n).element("".join(str(int(x)) for x in d))


def matrix_spectrum(n: int) -> set:
    """``{k : 1 <= k <= n}``: the corner ``e M_n e`` is ``M_rank(e)``."""
    out = set()
    for k in range(1, n + 1):
        e = diagonal_idempotent("1" * k + "0" * (n - k))
        out.add(ScaledSteinitz.of(matrix_rank(e)))
    return out


def block_atom_map(emb: BlockEmbedding) -> AtomMap:
    """The map induced on diagonal idempotents: diagonal ``j`` goes to ``{j + c n : c < m}``."""
    src, tgt = cartan_extract(emb.n), cartan_extract(emb.N)
    images = tuple(sum(1 << (j + c * emb.n) for c in range(emb.m)) for j in range(emb.n))
    return AtomMap(src, tgt, images)


def chain_from_embeddings(embs: Sequence[BlockEmbedding], st: ScaledSteinitz = None) -> ChainPresentation:
    """Bridge a chain ``M_{n_1} -> M_{n_2} -> ...`` to a measure-algebra chain."""
    if not embs:
        raise ValueError("need at least one embedding")
    for e1, e2 in zip(embs, embs[1:]):
        if e1.N != e2.n:
            raise ShapeError("embeddings do not chain")
    stages = [cartan_extract(embs[0].n)] + [cartan_extract(e.N) for e in embs]
    maps = tuple(block_atom_map(e) for e in embs)
    unital = all(e.unital for e in embs)
    return ChainPresentation(tuple(stages), maps, unital, st)


__all__ = [
    "BlockEmbedding",
    "RationalMatrix",
    "ShapeError",
    "block_atom_map",
    "cartan_extract",
    "chain_from_embeddings",
    "diagonal_idempotent",
    "embed_and_check",
    "idempotent_to_element",
    "matrix_rank",
    "matrix_spectrum",
    "relative_range",
]
