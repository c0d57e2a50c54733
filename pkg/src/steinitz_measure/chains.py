"""Direct-limit presentations of countable locally standard measure algebras.

A :class:`ChainPresentation` is a finite prefix ``A_1 -> A_2 -> ... -> A_N``
of finite measure algebras joined by corner embeddings.  Elements are
``ChainElement(stage, mask)``; the limit measure of an element is its
normalized stage measure divided by ``alpha_stage``, the normalized measure
of the stage-1 top inside that stage, so the stage-1 top has measure 1.

Model chains for a spectrum descriptor are built symbolically
(:class:`SymbolicChain`) and realized on demand; stage ``i`` of the model
``St_{m_i} ⊗ H(s/b_i)`` is represented by its standard factor ``St_{m_i}``,
which is enough because every element of ``H(s/b_i)`` shows up at a later
stage.

All existential choices are resolved deterministically: smallest stage
first, then lowest atom indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import floor, prod
from typing import Callable, Iterator, Optional, Sequence, Union

from sympy import prime

from .measure import AtomMap, FiniteMeasureAlgebra, iter_bits, popcount
from .spectra import (
    Descriptor,
    Fin,
    RealBound,
    SClosed,
    SInf,
    SOpen,
    spectra_equal,
)
from .steinitz import (
    INF,
    ScaledSteinitz,
    SteinitzNumber,
    factorize,
    nat_divides,
    scaled_leq,
)

DEFAULT_DEPTH = 8


class ChainError(ValueError):
    pass


class PrefixTooShort(ChainError):
    """The realized prefix is too short to decide; a deeper one may succeed."""


class PrefixInconclusive(ChainError):
    """A symbolic rule could not be classified from the probed prefix."""


class DominationError(ChainError):
    """``find_dominating`` failed.  ``reason`` is one of ``violates-leq``,
    ``not-connected`` or ``prefix-too-short``."""

    def __init__(self, reason: str, message: str):
        super().__init__(f"{reason}: {message}")
        self.reason = reason


class DepthExhausted(ChainError):
    def __init__(self, matched: int, message: str):
        super().__init__(f"depth exhausted after {matched} matched pairs: {message}")
        self.matched = matched


class SpectraMismatch(ChainError):
    pass


# ---------------------------------------------------------------------------
# block embeddings that do not materialize one big int per atom


class BlockAtomMap(AtomMap):
    """Atom ``j`` of the source goes to atoms ``[j*c, (j+1)*c)`` of the target."""

    def __init__(self, source: FiniteMeasureAlgebra, target: FiniteMeasureAlgebra, factor: int):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "factor", factor)

    @property
    def images(self):
        c = self.factor
        block = (1 << c) - 1
        return tuple(block << (j * c) for j in range(self.source.n))

    def apply_mask(self, mask: int) -> int:
        if not mask:
            return 0
        bits = format(mask, "b")[::-1]
        return int("".join(ch * self.factor for ch in bits)[::-1], 2)

    def problems(self, normalized: bool = False) -> list[str]:
        if self.factor < 1:
            return ["block factor must be positive"]
        if self.factor * self.source.n > self.target.n:
            return ["block images run past the last target atom"]
        if self.source.is_standard and self.target.is_standard:
            return []
        return super().problems(normalized)

    def scaling(self, normalized: bool = False) -> Optional[Fraction]:
        if self.source.is_standard and self.target.is_standard:
            ws, wt = self.source.weights[0], self.target.weights[0]
            ts, tt = (self.source.total, self.target.total) if normalized else (1, 1)
            return (self.factor * wt / tt) / (ws / ts)
        return super().scaling(normalized)

    def __eq__(self, other):
        if isinstance(other, BlockAtomMap):
            return (self.source, self.target, self.factor) == (other.source, other.target, other.factor)
        return NotImplemented

    def __hash__(self):
        return hash((self.source, self.target, self.factor))

    def __repr__(self):
        return f"BlockAtomMap({self.source.n}->{self.target.n}, factor={self.factor})"


# ---------------------------------------------------------------------------
# chains


@dataclass(frozen=True)
class ChainElement:
    stage: int
    mask: int

    def __str__(self):
        return f"{self.stage}:{popcount(self.mask)}"


@dataclass(frozen=True)
class ChainReport:
    ok: bool
    stage: Optional[int] = None
    reason: str = ""
    lambdas: tuple = ()
    alphas: tuple = ()


@dataclass(frozen=True, eq=False)
class ChainPresentation:
    """Finite prefix of a direct limit of finite measure algebras.

    ``st`` is the Steinitz invariant of the stage-1 top, when known; it
    fixes the invariant of every corner (``st(h) = mu(h) * st``).
    ``descriptor`` is the target spectrum for chains built from a model.
    """

    stages: tuple
    embeddings: tuple
    unital: bool
    st: Optional[ScaledSteinitz] = None
    descriptor: Optional[Descriptor] = None

    @property
    def depth(self) -> int:
        return len(self.stages)

    def n_atoms(self, i: int) -> int:
        return self.stages[i - 1].n

    def top(self, i: int) -> ChainElement:
        return ChainElement(i, (1 << self.n_atoms(i)) - 1)

    @cached_property
    def lambdas(self) -> tuple:
        return tuple(e.scaling(normalized=True) for e in self.embeddings)

    @cached_property
    def alphas(self) -> tuple:
        """``alpha_i``: normalized measure of the stage-1 top inside stage ``i``."""
        out = [Fraction(1)]
        for lam in self.lambdas:
            out.append(out[-1] * lam if lam is not None else None)
        return tuple(out)

    def push(self, mask: int, i: int, j: int) -> int:
        if j < i:
            raise ChainError(f"cannot push from stage {i} back to stage {j}")
        for k in range(i, j):
            mask = self.embeddings[k - 1].apply_mask(mask)
        return mask

    def render(self, e: ChainElement) -> str:
        """``stage:bits`` (atom 0 first) for small stages, a count otherwise."""
        n = self.n_atoms(e.stage)
        if n <= 32:
            return f"{e.stage}:" + "".join("1" if e.mask >> k & 1 else "0" for k in range(n))
        return f"{e.stage}:[{popcount(e.mask)} of {n} atoms]"

    def lift(self, e: ChainElement, j: int) -> ChainElement:
        return ChainElement(j, self.push(e.mask, e.stage, j))

    def _check_stage(self, i: int):
        if not 1 <= i <= self.depth:
            raise ChainError(f"stage {i} outside realized prefix 1..{self.depth}")

    def atom_measure(self, i: int, k: int) -> Fraction:
        A = self.stages[i - 1]
        return A.weights[k] / A.total / self.alphas[i - 1]

    def chain_measure(self, e: ChainElement) -> Fraction:
        self._check_stage(e.stage)
        A = self.stages[e.stage - 1]
        return A.mask_measure(e.mask) / A.total / self.alphas[e.stage - 1]

    def st_of(self, e: ChainElement) -> ScaledSteinitz:
        if self.st is None:
            raise ChainError("chain has no Steinitz assignment")
        if e.mask == 0:
            raise ChainError("the zero element has no corner invariant")
        return self.st.times(self.chain_measure(e))

    def contains(self, small: ChainElement, big: ChainElement) -> bool:
        j = max(small.stage, big.stage)
        a, b = self.push(small.mask, small.stage, j), self.push(big.mask, big.stage, j)
        return a & ~b == 0

    def same(self, x: ChainElement, y: ChainElement) -> bool:
        j = max(x.stage, y.stage)
        return self.push(x.mask, x.stage, j) == self.push(y.mask, y.stage, j)

    def pull(self, mask: int, j: int) -> Optional[int]:
        """Preimage of a stage-``j`` mask at stage ``j - 1``, if it has one."""
        emb = self.embeddings[j - 2]
        out = 0
        covered = 0
        for k, img in enumerate(emb.images):
            inter = mask & img
            if inter == img:
                out |= 1 << k
                covered |= img
            elif inter:
                return None
        return out if covered == mask else None

    def elements(self) -> Iterator[ChainElement]:
        """All elements, stage-major; within a stage by increasing mask.

        Each element is listed once, at the first stage that contains it.
        """
        for i in range(1, self.depth + 1):
            for m in range(1 << self.n_atoms(i)):
                if i == 1 or self.pull(m, i) is None:
                    yield ChainElement(i, m)


def validate_chain(c: ChainPresentation) -> ChainReport:
    """Check the invariants of a chain; report the first violation."""
    if len(c.embeddings) != len(c.stages) - 1:
        return ChainReport(False, None, "need exactly one embedding between consecutive stages")
    for i, emb in enumerate(c.embeddings, start=1):
        if emb.source != c.stages[i - 1] or emb.target != c.stages[i]:
            return ChainReport(False, i, "embedding does not join consecutive stages")
        p = emb.problems(normalized=True)
        if p:
            return ChainReport(False, i, p[0])
        top_img = emb.apply_mask((1 << emb.source.n) - 1)
        is_unital = top_img == (1 << emb.target.n) - 1
        if c.unital and not is_unital:
            return ChainReport(False, i, "unital chain with a non-unital embedding")
        if not c.unital and emb.source.n == emb.target.n and is_unital:
            return ChainReport(False, i, "non-unital chain is not strictly ascending")
    lambdas, alphas = c.lambdas, c.alphas
    for i in range(2, c.depth + 1):
        pushed = c.push((1 << c.n_atoms(1)) - 1, 1, i)
        direct = c.stages[i - 1].mask_measure(pushed) / c.stages[i - 1].total
        if direct != alphas[i - 1]:
            return ChainReport(False, i, "alpha_i is not the product of the lambdas")
    return ChainReport(True, None, "ok", lambdas, alphas)


def chain_measure(c: ChainPresentation, x: ChainElement) -> Fraction:
    return c.chain_measure(x)


def stage_invariant(c: ChainPresentation, h: ChainElement, s_assignment: Optional[ScaledSteinitz] = None) -> ScaledSteinitz:
    """Steinitz invariant of the corner at ``h``.

    ``s_assignment`` is the invariant of the whole stage ``h.stage``; when
    omitted it is derived from the chain's own assignment.
    """
    if h.mask == 0:
        raise ChainError("the zero element has no corner invariant")
    if s_assignment is None:
        return c.st_of(h)
    A = c.stages[h.stage - 1]
    return s_assignment.times(A.mask_measure(h.mask) / A.total)


def covering_element(c: ChainPresentation, *xs: ChainElement) -> ChainElement:
    """Top of the smallest stage containing every argument."""
    return c.top(max(x.stage for x in xs))


# ---------------------------------------------------------------------------
# divisor rules and symbolic model chains


def nth_prime(k: int) -> int:
    """1-based."""
    return int(prime(k))


@dataclass(frozen=True)
class PowerRule:
    """``b_i = prod p^(k*i + c)`` over listed ``(p, k, c)``."""

    terms: tuple

    def __call__(self, i: int) -> int:
        return prod(p ** (k * i + c) for p, k, c in self.terms)

    def __str__(self):
        parts = []
        for p, k, c in self.terms:
            e = ("i" if k == 1 else f"{k}i") if k else ""
            if e and c:
                e = f"({e}+{c})"
            parts.append(f"{p}^{e or c}")
        return "*".join(parts) or "1"


@dataclass(frozen=True)
class DefaultRule:
    """``b_i = prod p^min(s(p), i)`` over the exception primes of ``s`` and,
    when the default exponent is positive, the first ``i`` primes."""

    s: SteinitzNumber

    def __call__(self, i: int) -> int:
        primes = {p for p, _ in self.s.exceptions}
        if self.s.default != 0:
            primes |= {nth_prime(k) for k in range(1, i + 1)}
        out = 1
        for p in primes:
            e = self.s.exponent(p)
            out *= p ** int(min(e, i))
        return out

    def __str__(self):
        return "default"


@dataclass(frozen=True)
class ShiftedRule:
    """``i -> rule(i + shift)``; prints as the wrapped rule, since the shift
    is recomputed from the descriptor whenever a model is built."""

    rule: Callable[[int], int]
    shift: int

    def __call__(self, i: int) -> int:
        return self.rule(i + self.shift)

    def __str__(self):
        return str(self.rule)


def default_rule(s: SteinitzNumber) -> Callable[[int], int]:
    if s.is_natural:
        n = s.to_int()
        return PowerRule(tuple((p, 0, k) for p, k in sorted(factorize(n).items())))
    return DefaultRule(s)


def _floor_times(r, b: int) -> int:
    if isinstance(r, RealBound):
        for k in range(1, r.max_refine + 1):
            lo, hi = r.approx(k)
            if floor(lo * b) == floor(hi * b) and hi * b != floor(hi * b):
                return floor(lo * b)
        raise ArithmeticError(f"could not resolve floor({r} * {b})")
    return floor(r * b)


@dataclass(frozen=True)
class SymbolicChain:
    """Model chain ``M_i = St_{m_i} ⊗ H(s / b_i)`` given by rules for b and m."""

    s: SteinitzNumber
    b_rule: Callable[[int], int]
    m_rule: Callable[[int], int]
    depth: int = DEFAULT_DEPTH
    target: Optional[Descriptor] = None

    def b(self, i: int) -> int:
        return self.b_rule(i)

    def m(self, i: int) -> int:
        return self.m_rule(i)

    def prefix(self, depth: Optional[int] = None) -> list[tuple[int, int, int]]:
        return [(i, self.b(i), self.m(i)) for i in range(1, (depth or self.depth) + 1)]

    def problems(self, depth: Optional[int] = None) -> list[str]:
        depth = depth or self.depth
        out = []
        for i, b, m in self.prefix(depth):
            if m < 1:
                out.append(f"m_{i} = {m} is not positive")
            if not nat_divides(b, self.s):
                out.append(f"b_{i} = {b} is not in Omega(s)")
            if i < depth:
                b2, m2 = self.b(i + 1), self.m(i + 1)
                if b2 % b:
                    out.append(f"b_{i} does not divide b_{i + 1}")
                elif m * (b2 // b) > m2:
                    out.append(f"corner condition fails at {i}: {m}*{b2 // b} > {m2}")
        bd = factorize(self.b(depth))
        primes = {p for p, _ in self.s.exceptions}
        if self.s.default != 0:
            primes |= {nth_prime(k) for k in range(1, depth + 1)}
        for p in sorted(primes):
            want = min(self.s.exponent(p), depth)
            if bd.get(p, 0) < want:
                out.append(f"b_{depth} has {p}^{bd.get(p, 0)}, lcm of the b_i cannot reach {self.s}")
        return out

    def unital_steps(self, depth: Optional[int] = None) -> list[bool]:
        depth = depth or self.depth
        return [self.m(i) * (self.b(i + 1) // self.b(i)) == self.m(i + 1) for i in range(1, depth)]


def construct_model(d: Descriptor, depth: int = DEFAULT_DEPTH, b_rule: Optional[Callable[[int], int]] = None) -> SymbolicChain:
    """The model chain whose limit has spectrum ``d``."""
    if depth < 1:
        raise ChainError("depth must be at least 1")
    if isinstance(d, Fin):
        one = SteinitzNumber.one()
        return SymbolicChain(one, PowerRule(()), lambda i, n=d.n: n, depth, d)
    s = d.s
    rule = b_rule or default_rule(s)
    if isinstance(rule, DefaultRule) and not isinstance(d, SInf):
        # small r: start where r * b_1 leaves room for at least one atom
        shift = 0
        while d.r * rule(shift + 1) <= 1 if isinstance(d, SOpen) else _floor_times(d.r, rule(shift + 1)) < 1:
            shift += 1
            if shift > 64:
                raise ChainError(f"r = {d.r} too small for the default divisor rule")
        if shift:
            rule = ShiftedRule(rule, shift)
    if isinstance(d, SInf):
        m_rule = lambda i: i * rule(i)  # noqa: E731
    elif isinstance(d, SClosed):
        r = d.r
        m_rule = lambda i: _floor_times(r, rule(i))  # noqa: E731
    elif isinstance(d, SOpen):
        r = d.r

        def m_rule(i):
            rb = r * rule(i)
            return int(rb) - 1 if rb.denominator == 1 else floor(rb)
    else:
        raise TypeError(f"not a descriptor: {d!r}")
    sc = SymbolicChain(s, rule, m_rule, depth, d)
    p = sc.problems()
    if p:
        raise ChainError(p[0])
    return sc


def realize(sc: SymbolicChain, depth: Optional[int] = None) -> ChainPresentation:
    """Finite chain ``St_{m_1} -> St_{m_2} -> ...`` of a symbolic model."""
    depth = depth or sc.depth
    stages, embs = [], []
    for i, b, m in sc.prefix(depth):
        stages.append(FiniteMeasureAlgebra.standard(m))
        if i > 1:
            embs.append(BlockAtomMap(stages[-2], stages[-1], b // sc.b(i - 1)))
    unital = all(sc.unital_steps(depth))
    st = ScaledSteinitz(Fraction(sc.m(1), sc.b(1)), sc.s)
    return ChainPresentation(tuple(stages), tuple(embs), unital, st, sc.target)


def _simplest_between(lo: Fraction, hi: Optional[Fraction], lo_open: bool, hi_open: bool) -> Optional[Fraction]:
    """Rational with the smallest denominator in the interval (Stern-Brocot descent).

    ``hi = None`` means no upper bound.
    """
    if hi is not None and (lo > hi or (lo == hi and (lo_open or hi_open))):
        return None
    fl = floor(lo)
    n = fl if (fl == lo and not lo_open) else fl + 1
    if hi is None or n < hi or (n == hi and not hi_open):
        return Fraction(n)
    # no integer inside, so lo, hi sit in [fl, fl + 1]; recurse on 1/(x - fl)
    y = _simplest_between(1 / (hi - fl), 1 / (lo - fl) if lo > fl else None, hi_open, lo_open)
    return fl + 1 / y


def symbolic_spectrum(sc: SymbolicChain, probe: int = 4) -> Descriptor:
    """Read the spectrum off a model chain's rules.

    The ratio ``m_i / b_i`` is nondecreasing.  A floor rule
    ``m_i = [r b_i]`` pins ``r`` to ``[m_i/b_i, (m_i+1)/b_i)``, the open
    variant to ``(m_i/b_i, (m_i+1)/b_i]``; the simplest rational in the
    tighter intersection is taken as ``r`` and then checked against every
    probed term (``sc.depth + probe`` terms).  Ratios growing by at least 1
    per step are read as unbounded.  Anything else is inconclusive.
    """
    depth = sc.depth + probe
    pre = sc.prefix(depth)
    p = sc.problems(depth)
    if p:
        raise ChainError(p[0])
    bs = [b for _, b, _ in pre]
    ms = [m for _, _, m in pre]
    rho = [Fraction(m, b) for b, m in zip(bs, ms)]
    s = sc.s
    if s.is_natural and len(set(bs)) == 1 and len(set(ms)) == 1:
        return Fin(ms[0] * s.to_int() // bs[0])
    if all(rho[i + 1] - rho[i] >= 1 for i in range(len(rho) - 1)):
        return SInf(s)
    if s.is_natural:
        raise PrefixInconclusive("a natural Steinitz number with a non-stabilizing chain")
    lo_c = max(rho)
    hi = min(Fraction(m + 1, b) for b, m in zip(bs, ms))
    cand_closed = _simplest_between(lo_c, hi, False, True)
    cand_open = _simplest_between(lo_c, hi, True, False)

    def fits(r, open_rule):
        for b, m in zip(bs, ms):
            rb = r * b
            want = int(rb) - 1 if open_rule and rb.denominator == 1 else floor(rb)
            if want != m:
                return False
        return True

    options = []
    if cand_closed is not None and fits(cand_closed, False):
        options.append((cand_closed.denominator, 0, cand_closed))
    if cand_open is not None and fits(cand_open, True):
        options.append((cand_open.denominator, 1, cand_open))
    if not options:
        raise PrefixInconclusive("ratios m_i/b_i fit neither floor rule")
    _, kind, r = min(options)
    integral_seen = any((r * b).denominator == 1 for b in bs)
    if nat_divides(r.denominator, s) and not integral_seen:
        raise PrefixInconclusive(f"r = {r} may or may not be attained within {depth} terms")
    if kind == 1 and integral_seen:
        return SOpen(r, s)
    return SClosed(r, s)


# ---------------------------------------------------------------------------
# domination and back-and-forth


def _stage_uniform(c: ChainPresentation, j: int) -> bool:
    return c.stages[j - 1].is_standard


def _extend_to_measure(c: ChainPresentation, j: int, base: int, want: Fraction) -> Optional[int]:
    """Lowest-index atoms added to ``base`` at stage ``j`` reaching chain measure ``want``."""
    n = c.n_atoms(j)
    have = c.chain_measure(ChainElement(j, base))
    need = want - have
    if need < 0:
        return None
    if need == 0:
        return base
    free = [k for k in range(n) if not base >> k & 1]
    if _stage_uniform(c, j):
        per = c.atom_measure(j, 0)
        cnt = need / per
        if cnt.denominator != 1 or cnt > len(free):
            return None
        out = base
        for k in free[: int(cnt)]:
            out |= 1 << k
        return out
    # non-uniform weights: lexicographically least subset by DFS
    weights = [c.atom_measure(j, k) for k in free]

    def dfs(idx, remaining, chosen):
        if remaining == 0:
            return chosen
        for t in range(idx, len(free)):
            if weights[t] <= remaining:
                r = dfs(t + 1, remaining - weights[t], chosen | (1 << free[t]))
                if r is not None:
                    return r
        return None

    if len(free) > 24:
        raise ChainError(f"stage {j} too large for a non-uniform subset search")
    return dfs(0, need, base)


def find_dominating(c: ChainPresentation, h: ChainElement, s_target: ScaledSteinitz) -> ChainElement:
    """An element ``h' >= h`` whose corner invariant is ``s_target``.

    Searches stages from ``h.stage`` upward and takes the first hit, adding
    the lowest-index atoms to ``h``.
    """
    if c.st is None:
        raise ChainError("chain has no Steinitz assignment")
    if h.mask and not scaled_leq(c.st_of(h), s_target):
        raise DominationError("violates-leq", f"st(h) = {c.st_of(h)} is not <= {s_target}")
    want = s_target.ratio(c.st)
    if want is None:
        raise DominationError("not-connected", f"{s_target} is not rationally connected to {c.st}")
    if c.unital and want > 1:
        # every corner of a unital limit has st(h') = mu(h') st(H) with mu(h') <= 1
        raise DominationError("violates-leq", f"{s_target} exceeds st(H) = {c.st} of a unital chain")
    for j in range(h.stage, c.depth + 1):
        got = _extend_to_measure(c, j, c.push(h.mask, h.stage, j), want)
        if got is not None:
            return ChainElement(j, got)
    raise DominationError("prefix-too-short", f"no element with invariant {s_target} up to stage {c.depth}")


@dataclass(frozen=True)
class StageMap:
    """Boolean isomorphism between corners, given on atoms at fixed levels."""

    level_a: int
    level_b: int
    pairs: tuple  # ((atom in A at level_a, atom in B at level_b), ...)

    def image_mask(self, mask: int) -> int:
        d = dict(self.pairs)
        out = 0
        for k in iter_bits(mask):
            out |= 1 << d[k]
        return out


@dataclass(frozen=True)
class PartialIsomorphism:
    a: tuple  # ChainElements of the first chain
    b: tuple
    maps: tuple  # StageMap per pair
    alpha: Optional[Fraction]
    listed_a: tuple = ()
    listed_b: tuple = ()

    def table(self, cA: ChainPresentation, cB: ChainPresentation) -> list[tuple]:
        rows = []
        for n, (x, y) in enumerate(zip(self.a, self.b)):
            ma, mb = cA.chain_measure(x), cB.chain_measure(y)
            rows.append((n, cA.render(x), cB.render(y), ma, mb, mb / ma if ma else None))
        return rows


def _atom_list(c: ChainPresentation, mask: int, i: int, j: int) -> list[int]:
    return list(iter_bits(c.push(mask, i, j)))


def _extend_map(cA, cB, prev: StageMap, a_prev, b_prev, t, z, min_a, min_b, alpha):
    """Refine ``prev`` to levels where ``t`` and ``z`` have equally many atoms."""
    lo_a = max(prev.level_a, t.stage, min_a)
    lo_b = max(prev.level_b, z.stage, min_b)
    levels = sorted(itertools.product(range(lo_a, cA.depth + 1), range(lo_b, cB.depth + 1)),
                    key=lambda ik: (ik[0] + ik[1], ik[0]))
    for i, k in levels:
        ta, zb = _atom_list(cA, t.mask, t.stage, i), _atom_list(cB, z.mask, z.stage, k)
        if len(ta) != len(zb):
            continue
        pairs = []
        used_a = used_b = 0
        ok = True
        for x, y in prev.pairs:
            px = _atom_list(cA, 1 << x, prev.level_a, i)
            py = _atom_list(cB, 1 << y, prev.level_b, k)
            if len(px) != len(py):
                ok = False
                break
            pairs.extend(zip(px, py))
            for u in px:
                used_a |= 1 << u
            for v in py:
                used_b |= 1 << v
        if not ok:
            continue
        rest_a = [u for u in ta if not used_a >> u & 1]
        rest_b = [v for v in zb if not used_b >> v & 1]
        if len(rest_a) != len(rest_b):
            continue
        pairs.extend(zip(rest_a, rest_b))
        if all(cB.atom_measure(k, v) == alpha * cA.atom_measure(i, u) for u, v in pairs):
            return StageMap(i, k, tuple(pairs))
    raise PrefixTooShort("no pair of levels refines the previous stage map")


def _construct(cA: ChainPresentation, cB: ChainPresentation, n_steps: int) -> PartialIsomorphism:
    if cA.st is None or cB.st is None:
        raise ChainError("back-and-forth needs Steinitz assignments on both chains")
    if cA.descriptor is not None and cB.descriptor is not None:
        if not spectra_equal(cA.descriptor, cB.descriptor):
            raise SpectraMismatch(f"{cA.descriptor} and {cB.descriptor} are different spectra")
    alpha = cA.st.ratio(cB.st)
    if alpha is None:
        raise SpectraMismatch(f"{cA.st} and {cB.st} are not rationally connected")
    enum_a, enum_b = cA.elements(), cB.elements()
    ha, hb = [next(enum_a)], [next(enum_b)]
    a, b = [ChainElement(1, 0)], [ChainElement(1, 0)]
    maps = [StageMap(1, 1, ())]
    for n in range(n_steps):
        try:
            hp, hpp = next(enum_a), next(enum_b)
        except StopIteration:
            raise PrefixTooShort("ran out of realized elements")
        x = covering_element(cA, a[-1], hp)
        y = find_dominating(cB, b[-1], cA.st_of(x))
        z = covering_element(cB, y, hpp)
        t = find_dominating(cA, x, cB.st_of(z))
        m = _extend_map(cA, cB, maps[-1], a[-1], b[-1], t, z, hp.stage, hpp.stage, alpha)
        ha.append(hp)
        hb.append(hpp)
        a.append(t)
        b.append(z)
        maps.append(m)
    return PartialIsomorphism(tuple(a), tuple(b), tuple(maps), alpha, tuple(ha), tuple(hb))


ChainSource = Union[ChainPresentation, SymbolicChain]


def back_and_forth(A: ChainSource, B: ChainSource, n_steps: int, start_depth: int = 2,
                   max_depth: int = DEFAULT_DEPTH) -> PartialIsomorphism:
    """Alternating construction of a scalar equivalence between two chains.

    Symbolic inputs are realized lazily, starting at ``start_depth`` and
    deepening up to ``max_depth`` whenever the prefix runs out.  The result
    is machine-checked with :func:`verify_partial_isomorphism`.
    """
    depths = {id(A): start_depth, id(B): start_depth}

    def real(src):
        if isinstance(src, SymbolicChain):
            return realize(src, min(depths[id(src)], max_depth))
        return src

    while True:
        cA, cB = real(A), real(B)
        try:
            pi = _construct(cA, cB, n_steps)
        except (PrefixTooShort, DominationError) as e:
            if isinstance(e, DominationError) and e.reason != "prefix-too-short":
                raise
            grown = False
            for src in (A, B):
                if isinstance(src, SymbolicChain) and depths[id(src)] < max_depth:
                    depths[id(src)] += 1
                    grown = True
            if not grown:
                matched = _count_matched(cA, cB, n_steps)
                raise DepthExhausted(matched, str(e)) from e
            continue
        problems = verify_partial_isomorphism(pi, cA, cB)
        if problems:
            raise ChainError("constructed map failed verification: " + problems[0])
        return pi


def back_and_forth_chains(A: ChainSource, B: ChainSource, n_steps: int, **kw):
    """Like :func:`back_and_forth` but also returns the realized chains used."""
    pi = back_and_forth(A, B, n_steps, **kw)
    depth_a = max(m.level_a for m in pi.maps)
    depth_b = max(m.level_b for m in pi.maps)
    cA = realize(A, max(depth_a, 1)) if isinstance(A, SymbolicChain) else A
    cB = realize(B, max(depth_b, 1)) if isinstance(B, SymbolicChain) else B
    return pi, cA, cB


def _count_matched(cA, cB, n_steps) -> int:
    lo, hi = 0, n_steps
    while lo < hi:
        mid = (lo + hi + 1) // 2
        try:
            _construct(cA, cB, mid)
            lo = mid
        except ChainError:
            hi = mid - 1
    return lo + 1


def verify_partial_isomorphism(pi: PartialIsomorphism, cA: ChainPresentation, cB: ChainPresentation,
                               samples: int = 32) -> list[str]:
    """Machine-check a back-and-forth result; returns the problems found."""
    out = []
    alpha = pi.alpha
    for n, (x, y, m) in enumerate(zip(pi.a, pi.b, pi.maps)):
        ta = _atom_list(cA, x.mask, x.stage, m.level_a)
        zb = _atom_list(cB, y.mask, y.stage, m.level_b)
        dom = [u for u, _ in m.pairs]
        cod = [v for _, v in m.pairs]
        if sorted(dom) != ta or sorted(cod) != zb or len(set(cod)) != len(cod):
            out.append(f"step {n}: stage map is not a bijection between the corners")
            continue
        for u, v in m.pairs:
            if cB.atom_measure(m.level_b, v) != alpha * cA.atom_measure(m.level_a, u):
                out.append(f"step {n}: atom {u} -> {v} breaks the scalar {alpha}")
                break
        if x.mask:
            if cA.st_of(x) != cB.st_of(y):
                out.append(f"step {n}: corner invariants differ")
            if cB.chain_measure(y) != alpha * cA.chain_measure(x):
                out.append(f"step {n}: measure ratio differs from alpha")
        # Boolean operations on a deterministic sample of corner elements
        full = (1 << len(m.pairs)) - 1
        for k in range(min(samples, full + 1)):
            e1 = (k * 2654435761) & full
            e2 = (k * 40503 + 7) & full
            mask = lambda bits: sum(1 << m.pairs[i][0] for i in iter_bits(bits))  # noqa: E731
            p1, p2 = mask(e1), mask(e2)
            if m.image_mask(p1 ^ p2) != m.image_mask(p1) ^ m.image_mask(p2) or \
                    m.image_mask(p1 & p2) != m.image_mask(p1) & m.image_mask(p2):
                out.append(f"step {n}: stage map is not a Boolean homomorphism")
                break
        if n:
            prev, xp, yp = pi.maps[n - 1], pi.a[n - 1], pi.b[n - 1]
            if not cA.contains(xp, x) or not cB.contains(yp, y):
                out.append(f"step {n}: matched elements are not increasing")
            if not cA.contains(pi.listed_a[n], x) or not cB.contains(pi.listed_b[n], y):
                out.append(f"step {n}: listed element not covered")
            for u, v in prev.pairs:
                left = m.image_mask(cA.push(1 << u, prev.level_a, m.level_a))
                right = cB.push(1 << v, prev.level_b, m.level_b)
                if left != right:
                    out.append(f"step {n}: stage map does not restrict to step {n - 1}")
                    break
    return out


def realized_spectrum(c: ChainPresentation, h: Optional[ChainElement] = None, depth: Optional[int] = None,
                      limit: int = 4096) -> set:
    """Corner invariants of nonzero elements below ``h`` over the realized prefix.

    Uniform stages only need one element per atom count.
    """
    depth = depth or c.depth
    out = set()
    for j in range(h.stage if h else 1, depth + 1):
        base = c.push(h.mask, h.stage, j) if h else (1 << c.n_atoms(j)) - 1
        atoms = list(iter_bits(base))
        if _stage_uniform(c, j):
            for k in range(1, len(atoms) + 1):
                out.add(c.st_of(ChainElement(j, sum(1 << a for a in atoms[:k]))))
        else:
            if len(atoms) > 12:
                raise ChainError("non-uniform stage too large to enumerate")
            for sub in range(1, 1 << len(atoms)):
                out.add(c.st_of(ChainElement(j, sum(1 << atoms[i] for i in iter_bits(sub)))))
        if len(out) > limit:
            break
    return out
