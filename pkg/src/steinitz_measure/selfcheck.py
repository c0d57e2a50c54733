"""Acceptance checks, one function per criterion.

Each check returns a :class:`Result`.  ``run_all`` is what ``selftest``
on the command line and ``tests/test_acceptance.py`` both call.  Seeds
are fixed, so the output is the same on every run.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Callable, NamedTuple

from .chains import PowerRule, back_and_forth_chains, construct_model, symbolic_spectrum
from .locmat import (
    BlockEmbedding,
    RationalMatrix,
    diagonal_idempotent,
    embed_and_check,
    matrix_rank,
)
from .measure import (
    AtomMap,
    FiniteMeasureAlgebra,
    corner_algebra,
    distance,
    extend_automorphism,
    pure_tensor,
    scalar_equivalent,
    standard_embedding,
    tensor_algebra,
)
from .periodic import FiniteSupportSet, fs_ops, pw_combine, pw_measure, pw_normalize
from .spectra import Fin, SClosed, SInf, SOpen, canonicalize, member, saturated_check, spectra_equal
from .steinitz import INF, ScaledSteinitz, SteinitzNumber, nat_divides, omega_elements

SEED = 20240229


class Result(NamedTuple):
    number: int
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


def _two_inf():
    return SteinitzNumber.make(0, {2: INF})


# ---------------------------------------------------------------------------
# 1: measure axioms


def _axiom_failures_algebra(H: FiniteMeasureAlgebra, rng: random.Random, exhaustive: bool) -> int:
    n = H.n
    bad = 0
    if exhaustive:
        table = [H.mask_measure(m) for m in range(1 << n)]
        bad += sum(1 for m, v in enumerate(table) if (v == 0) != (m == 0))
        full = (1 << n) - 1
        for a in range(1 << n):
            comp = full & ~a
            b = comp
            while True:  # every b disjoint from a
                if table[a | b] != table[a] + table[b]:
                    bad += 1
                if b == 0:
                    break
                b = (b - 1) & comp
    else:
        for _ in range(300):
            a = rng.getrandbits(n)
            b = rng.getrandbits(n) & ~a
            va, vb = H.mask_measure(a), H.mask_measure(b)
            bad += (va == 0) != (a == 0)
            bad += H.mask_measure(a | b) != va + vb
    return bad


def check_measure_axioms() -> Result:
    rng = random.Random(SEED)
    algebras = []
    for n in range(1, 11):
        algebras.append(FiniteMeasureAlgebra.standard(n))
        algebras.append(FiniteMeasureAlgebra(tuple(Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(n))))
    algebras.append(corner_algebra(algebras[9], algebras[9].element("10110")))
    algebras.append(tensor_algebra(FiniteMeasureAlgebra.standard(2), algebras[5]))
    bad = sum(_axiom_failures_algebra(H, rng, exhaustive=True) for H in algebras)
    big = [FiniteMeasureAlgebra(tuple(Fraction(rng.randint(1, 50), 7) for _ in range(n))) for n in (16, 40, 100)]
    big.append(tensor_algebra(FiniteMeasureAlgebra.standard(8), FiniteMeasureAlgebra.standard(9)))
    bad += sum(_axiom_failures_algebra(H, rng, exhaustive=False) for H in big)
    # periodic words: all words of period <= 10, all disjoint pairs of period <= 6
    words = 0
    for k in range(1, 11):
        for m in range(1 << k):
            bits = format(m, f"0{k}b")
            w = pw_normalize(k, bits)
            words += 1
            bad += (pw_measure(w) == 0) != (m == 0)
    for k1, k2 in itertools.product(range(1, 7), repeat=2):
        for m1 in range(1 << k1):
            x = pw_normalize(k1, format(m1, f"0{k1}b"))
            for m2 in range(1 << k2):
                y = pw_normalize(k2, format(m2, f"0{k2}b"))
                if pw_combine("mul", x, y).is_zero:
                    bad += pw_measure(pw_combine("add", x, y)) != pw_measure(x) + pw_measure(y)
    for _ in range(2000):
        k1, k2 = rng.randint(1, 32), rng.randint(1, 32)
        x = pw_normalize(k1, "".join(rng.choice("01") for _ in range(k1)))
        y = pw_normalize(k2, "".join(rng.choice("01") for _ in range(k2)))
        y = pw_combine("add", y, pw_combine("mul", x, y))  # y minus x
        bad += pw_measure(pw_combine("add", x, y)) != pw_measure(x) + pw_measure(y)
        bad += (pw_measure(x) == 0) != x.is_zero
    for _ in range(500):
        a = FiniteSupportSet(frozenset(rng.sample(range(1, 60), rng.randint(0, 8))))
        b = FiniteSupportSet(frozenset(rng.sample(range(1, 60), rng.randint(0, 8))) - a.items)
        bad += fs_ops("measure", fs_ops("add", a, b)) != fs_ops("measure", a) + fs_ops("measure", b)
        bad += (fs_ops("measure", a) == 0) != (not a.items)
    return Result(1, "measure axioms", bad == 0,
                  f"{len(algebras)} algebras exhaustive, {len(big)} randomized, {words} periodic words; {bad} violations")


# ---------------------------------------------------------------------------
# 2: Hamming metric on St_n


def check_hamming_metric() -> Result:
    bad = pairs = 0
    for n in range(1, 7):
        St = FiniteMeasureAlgebra.standard(n)
        els = list(St.elements())
        for a, b in itertools.product(els, repeat=2):
            pairs += 1
            ham = sum(1 for x, y in zip(a.bits(), b.bits()) if x != y)
            if distance(a, b) != Fraction(ham, n):
                bad += 1
    return Result(2, "Hamming metric on St_n", bad == 0, f"{pairs} pairs for n <= 6; {bad} mismatches")


# ---------------------------------------------------------------------------
# 3: tensor law


def check_tensor_law() -> Result:
    bad = tensors = 0
    for m, n in itertools.product(range(1, 9), repeat=2):
        S1, S2 = FiniteMeasureAlgebra.standard(m), FiniteMeasureAlgebra.standard(n)
        T = tensor_algebra(S1, S2)
        eq = scalar_equivalent(T, FiniteMeasureAlgebra.standard(m * n))
        if eq is None or eq[0] != 1 or eq[1].problems():
            bad += 1
        mus1 = {a.atoms: S1.mask_measure(a.atoms) for a in S1.elements()}
        mus2 = {b.atoms: S2.mask_measure(b.atoms) for b in S2.elements()}
        for a in S1.elements():
            for b in S2.elements():
                tensors += 1
                if T.mask_measure(pure_tensor(a, b, T).atoms) != mus1[a.atoms] * mus2[b.atoms]:
                    bad += 1
    return Result(3, "tensor law", bad == 0, f"64 (m, n) pairs, {tensors} pure tensors; {bad} failures")


# ---------------------------------------------------------------------------
# 4: membership against brute force

_PRIMES = (2, 3, 5, 7)


def _vec(q: Fraction, base: SteinitzNumber, primes) -> tuple:
    """Formal exponent vector of ``q * base``: inf primes keep the scale offset."""
    out = [("default", base.default)]
    for p in primes:
        e = base.exponent(p)
        v = 0
        num, den = q.numerator, q.denominator
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        out.append(("inf", v) if e == INF else ("fin", e + v))
    return tuple(out)


def _primes_of(*nums) -> set:
    out = set()
    for n in nums:
        p = 2
        while p * p <= n:
            while n % p == 0:
                out.add(p)
                n //= p
            p += 1
        if n > 1:
            out.add(n)
    return out


def _quotient(t: tuple, s: SteinitzNumber):
    """The rational ``y`` with ``t = y * s`` compared vector by vector, or None."""
    q, base = t
    primes = sorted(set(_PRIMES) | {p for p, _ in base.exceptions} | {p for p, _ in s.exceptions}
                    | _primes_of(q.numerator, q.denominator))
    vt, vs = _vec(q, base, primes), _vec(Fraction(1), s, primes)
    if vt[0] != vs[0]:
        return None
    y = Fraction(1)
    for p, (kt, et), (ks, es) in zip(primes, vt[1:], vs[1:]):
        if kt != ks:
            return None
        y *= Fraction(p) ** (et - es)
    return y


B_MAX = 10**6


def _omega_upto(s: SteinitzNumber, limit: int) -> list[int]:
    """Omega(s) up to ``limit`` for ``s`` with default exponent 0."""
    if s.default != 0:
        raise ValueError("brute force needs finitely many primes")
    out = [1]
    for p, e in s.exceptions:
        grown = []
        for n in out:
            k, m = 0, n
            while m <= limit and k <= e:
                grown.append(m)
                m *= p
                k += 1
        out = grown
    return sorted(out)


def brute_member(t: tuple, d) -> bool:
    """Search representations ``(a/b) s`` with ``b`` in Omega(s), ``a <= 200``."""
    s = SteinitzNumber.one() if isinstance(d, Fin) else d.s
    y = _quotient(t, s)
    if y is None:
        return False
    for b in _omega_upto(s, B_MAX):
        a = y * b
        if a.denominator != 1 or not 1 <= a <= 200:
            continue
        x = Fraction(int(a), b)
        if isinstance(d, Fin):
            return a <= d.n
        if isinstance(d, SInf):
            return True
        return x < d.r if isinstance(d, SOpen) else x <= d.r
    return False


def _random_steinitz(rng, need_inf: bool) -> SteinitzNumber:
    while True:
        exc = {p: rng.choice([0, 0, 1, 2, 3, INF]) for p in _PRIMES}
        if need_inf and INF not in exc.values():
            continue
        return SteinitzNumber.make(0, exc)


def _random_descriptor(rng):
    kind = rng.choice(["fin", "inf", "closed", "open"])
    if kind == "fin":
        return Fin(rng.randint(1, 12))
    s = _random_steinitz(rng, need_inf=True)
    if kind == "inf":
        return SInf(s)
    while True:
        r = Fraction(rng.randint(1, 12), rng.randint(1, 12))
        if kind == "closed":
            return SClosed(r, s)
        if nat_divides(r.denominator, s):
            return SOpen(r, s)


def _random_candidate(rng, d) -> tuple:
    s = d.s if not isinstance(d, Fin) else SteinitzNumber.one()
    roll = rng.random()
    if roll < 0.15:
        # unrelated base
        return Fraction(rng.randint(1, 30), rng.randint(1, 30)), _random_steinitz(rng, need_inf=False)
    omega = omega_elements(s, 200)
    b = rng.choice(omega) if roll < 0.9 else rng.randint(1, 40)
    a = rng.randint(1, 200 if not isinstance(d, Fin) else 15)
    q = Fraction(a, b)
    # re-express over another base in the same class: multiply base by c, divide q by c
    c = rng.choice([1, 1, 2, 3, 6, 5, 7])
    base = s
    if c > 1:
        exc = base.exc()
        for p in _primes_of(c):
            exc[p] = base.exponent(p) + 1
        base = SteinitzNumber.make(base.default, exc)
        q = q / c
    return q, base


def check_member_oracle(n_pairs: int = 2000) -> Result:
    rng = random.Random(SEED + 4)
    agree = positives = 0
    mismatches = []
    done = 0
    while done < n_pairs:
        d = _random_descriptor(rng)
        t = _random_candidate(rng, d)
        y = _quotient(t, SteinitzNumber.one() if isinstance(d, Fin) else d.s)
        if y is not None and (y.numerator > 200 or y.denominator > B_MAX):
            continue  # outside the a <= 200, b <= B_MAX search window
        done += 1
        got, want = member(t, d), brute_member(t, d)
        agree += got == want
        positives += want
        if got != want and len(mismatches) < 3:
            mismatches.append(f"{t[0]} * {t[1]} in {d}: member={got} brute={want}")
    ok = agree == n_pairs
    detail = f"{agree}/{n_pairs} agree ({positives} members)"
    if mismatches:
        detail += "; " + " | ".join(mismatches)
    return Result(4, "membership vs brute force", ok, detail)


# ---------------------------------------------------------------------------
# 5: saturation


def check_saturation() -> Result:
    rng = random.Random(SEED + 5)
    two = _two_inf()
    descs = [Fin(6), SInf(SteinitzNumber.make(0, {2: INF, 3: 1})), SClosed(Fraction(3, 2), two), SOpen(Fraction(2), two)]
    violations = 0
    for d in descs:
        for _ in range(100):
            # an instance: a member plus a few more candidates around it
            samples = _saturation_sample(d, rng)
            violations += len(saturated_check(lambda t, d=d: member(t, d), samples))
    s = ScaledSteinitz.of(5)
    planted = {s, s.times(3)}
    caught = saturated_check(lambda t: t in planted, sorted(planted, key=str))
    rejected = any(v.axiom == 3 for v in caught)
    ok = violations == 0 and rejected
    return Result(5, "saturation axioms", ok,
                  f"4 descriptors x 100 instances, {violations} violations; planted {{s, 3s}} rejected={rejected}")


def _saturation_sample(d, rng):
    if isinstance(d, Fin):
        return [ScaledSteinitz.of(rng.randint(1, d.n + 2)) for _ in range(3)]
    omega = omega_elements(d.s, 64)
    hi = 6 if isinstance(d, SInf) else d.r
    out = []
    for _ in range(3):
        b = rng.choice(omega)
        a = rng.randint(1, max(1, int(hi * b)))
        out.append(ScaledSteinitz(Fraction(a, b), d.s))
    return out


# ---------------------------------------------------------------------------
# 6: relative range multiplicativity


def _random_invertible(rng, n):
    while True:
        P = RationalMatrix(tuple(tuple(Fraction(rng.randint(-3, 3)) for _ in range(n)) for _ in range(n)))
        if matrix_rank(P) == n:
            return P


def _inverse(P: RationalMatrix) -> RationalMatrix:
    n = P.n
    M = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(P.rows)]
    for c in range(n):
        piv = next(i for i in range(c, n) if M[i][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return RationalMatrix(tuple(tuple(r[n:]) for r in M))


def check_relative_range() -> Result:
    cases = bad = 0
    for n in range(1, 7):
        embs = [BlockEmbedding(n, N, m) for N in range(n, 2 * n + 3) for m in range(1, N // n + 1)]
        for emb in embs:
            for mask in range(1 << n):
                a = diagonal_idempotent("".join("1" if mask >> k & 1 else "0" for k in range(n)))
                _, ok = embed_and_check(a, emb)
                cases += 1
                bad += not ok
    # composable pairs for small n
    for n in range(1, 4):
        for e1 in [BlockEmbedding(n, N, m) for N in range(n, 2 * n + 1) for m in range(1, N // n + 1)]:
            for e2 in [BlockEmbedding(e1.N, N, m) for N in (e1.N, e1.N + 1, 2 * e1.N) for m in range(1, N // e1.N + 1)]:
                for mask in range(1 << n):
                    a = diagonal_idempotent("".join("1" if mask >> k & 1 else "0" for k in range(n)))
                    img, ok1 = embed_and_check(a, e1)
                    _, ok2 = embed_and_check(img, e2)
                    cases += 1
                    bad += not (ok1 and ok2)
    rng = random.Random(SEED + 6)
    for _ in range(200):
        n = rng.randint(1, 5)
        P = _random_invertible(rng, n)
        D = RationalMatrix.diag([rng.randint(0, 1) for _ in range(n)])
        e = P @ D @ _inverse(P)
        if not e.is_idempotent():
            bad += 1
            continue
        N = rng.randint(n, 3 * n)
        emb = BlockEmbedding(n, N, rng.randint(1, N // n))
        _, ok = embed_and_check(e, emb)
        cases += 1
        bad += not ok
    return Result(6, "relative range multiplicativity", bad == 0, f"{cases} cases incl. 200 random idempotents; {bad} failures")


# ---------------------------------------------------------------------------
# 7: model chain round trip


def check_model_chain() -> Result:
    five = SteinitzNumber.make(0, {5: INF})
    d1 = SClosed(Fraction(3, 2), five)
    sc1 = construct_model(d1)
    m1, m2 = sc1.m(1), sc1.m(2)
    corner = m1 * (sc1.b(2) // sc1.b(1))
    rt1 = symbolic_spectrum(sc1)
    d2 = SOpen(Fraction(2), _two_inf())
    sc2 = construct_model(d2)
    ms = [sc2.m(i) for i in range(1, sc2.depth + 1)]
    want = [2 ** (i + 1) - 1 for i in range(1, sc2.depth + 1)]
    rt2 = symbolic_spectrum(sc2)
    ok = (m1, m2) == (7, 37) and corner == 35 and corner <= m2 and spectra_equal(rt1, d1) \
        and ms == want and spectra_equal(rt2, d2)
    return Result(7, "model chains round-trip", ok,
                  f"S(3/2;5^inf): m1={m1} m2={m2} corner {corner}<={m2} -> {rt1}; "
                  f"S+(2;2^inf): m={ms[:4]}... -> {rt2}")


# ---------------------------------------------------------------------------
# 8: back-and-forth


def check_back_and_forth() -> Result:
    two = _two_inf()
    d = SClosed(Fraction(1), two)
    dbl = construct_model(d, b_rule=PowerRule(((2, 1, 0),)))
    quad = construct_model(d, b_rule=PowerRule(((2, 2, 0),)))
    pi1, cA, cB = back_and_forth_chains(dbl, quad, 6)
    ratios1 = {row[5] for row in pi1.table(cA, cB)[1:]}
    five = SteinitzNumber.make(0, {5: INF})
    e = SClosed(Fraction(3, 2), five)
    x = construct_model(e, b_rule=PowerRule(((5, 1, 0),)))
    y = construct_model(e, b_rule=PowerRule(((5, 2, 0),)))
    pi2, cX, cY = back_and_forth_chains(x, y, 5)
    ratios2 = {row[5] for row in pi2.table(cX, cY)[1:]}
    ok = (len(pi1.a) >= 6 and ratios1 == {1} and pi1.alpha == 1
          and len(pi2.a) >= 5 and len(ratios2) == 1 and ratios2 == {pi2.alpha})
    return Result(8, "back-and-forth scalar equivalence", ok,
                  f"H(2^inf) 2^i vs 4^i: {len(pi1.a)} pairs, alpha={pi1.alpha}; "
                  f"H(3/2,5^inf) 5^i vs 25^i: {len(pi2.a)} pairs, alpha={pi2.alpha}")


# ---------------------------------------------------------------------------
# 9: automorphism extension


def check_extension() -> Result:
    cases = bad = 0
    for n in range(1, 6):
        St = FiniteMeasureAlgebra.standard(n)
        for k in range(1, 5):
            emb = standard_embedding(n, n * k)
            for perm in itertools.permutations(range(n)):
                p = AtomMap.from_permutation(St, perm)
                ext = extend_automorphism(p, emb)
                cases += 1
                restricts = all(ext.apply_mask(emb.images[i]) == emb.images[perm[i]] for i in range(n))
                T = emb.target
                preserves = ext.scaling() == 1 and all(
                    T.mask_measure(ext.apply_mask(1 << j)) == T.weights[j] for j in range(T.n))
                bad += not (restricts and preserves)
    return Result(9, "automorphism extension", bad == 0, f"{cases} (permutation, embedding) pairs; {bad} failures")


# ---------------------------------------------------------------------------
# 10: classification invariant


def check_classification() -> Result:
    two = _two_inf()
    family = [SClosed(Fraction(1), two), SClosed(Fraction(3, 2), two), SInf(two)]
    invs = [canonicalize(d) for d in family]
    distinct = len(set(invs)) == 3 and not any(spectra_equal(a, b) for a, b in itertools.combinations(family, 2))
    three_two = SteinitzNumber.make(0, {2: INF, 3: 1})
    same = canonicalize(SInf(two)) == canonicalize(SInf(three_two)) and spectra_equal(SInf(two), SInf(three_two))
    return Result(10, "classification invariant", distinct and same,
                  f"pairwise distinct={distinct}; S(inf;2^inf) == S(inf;3*2^inf): {same}")


CHECKS: list[Callable[[], Result]] = [
    check_measure_axioms,
    check_hamming_metric,
    check_tensor_law,
    check_member_oracle,
    check_saturation,
    check_relative_range,
    check_model_chain,
    check_back_and_forth,
    check_extension,
    check_classification,
]


def run_all(echo: Callable[[str], None] = None) -> list[Result]:
    out = []
    for fn in CHECKS:
        try:
            r = fn()
        except Exception as e:  # a crash is a failed criterion, not a crashed suite
            r = Result(CHECKS.index(fn) + 1, fn.__name__, False, f"raised {type(e).__name__}: {e}")
        out.append(r)
        if echo:
            echo(r.line())
    return out
