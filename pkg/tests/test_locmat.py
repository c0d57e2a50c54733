import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from steinitz_measure.chains import validate_chain
from steinitz_measure.literals import parse_matrix
from steinitz_measure.locmat import (
    BlockEmbedding,
    RationalMatrix,
    ShapeError,
    block_atom_map,
    cartan_extract,
    chain_from_embeddings,
    diagonal_idempotent,
    embed_and_check,
    idempotent_to_element,
    matrix_rank,
    matrix_spectrum,
    relative_range,
)
from steinitz_measure.measure import measure_of
from steinitz_measure.steinitz import ScaledSteinitz

F = Fraction


@st.composite
def matrices(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    entry = st.one_of(st.just(F(0)), st.fractions(min_value=-5, max_value=5, max_denominator=6))
    return RationalMatrix(tuple(tuple(draw(entry) for _ in range(n)) for _ in range(n)))


def test_rank_examples():
    assert matrix_rank(parse_matrix("1 2; 2 4")) == 1
    assert matrix_rank(parse_matrix("1/2 0; 0 1/3")) == 2
    assert matrix_rank(RationalMatrix.zero(3)) == 0
    assert relative_range(parse_matrix("1 0 0; 0 1 0; 0 0 0")) == F(2, 3)
    with pytest.raises(ShapeError):
        relative_range(parse_matrix("1 0; 0 1"), 3)


@given(matrices())
def test_rank_matches_sympy(a):
    assert matrix_rank(a) == sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in a.rows]).rank()


def test_block_embedding_examples():
    emb = BlockEmbedding(2, 5, 2)
    img, ok = embed_and_check(diagonal_idempotent("10"), emb)
    assert ok and relative_range(img) == F(2, 5)
    assert not emb.unital
    with pytest.raises(ShapeError):
        BlockEmbedding(3, 5, 2)


@given(matrices(4), st.integers(1, 3), st.integers(0, 2))
def test_relative_range_scales_through_embeddings(a, m, pad):
    _, ok = embed_and_check(a, BlockEmbedding(a.n, a.n * m + pad, m))
    assert ok


def test_compose_unital_first():
    e1, e2 = BlockEmbedding(2, 4, 2), BlockEmbedding(4, 12, 3)
    c = e2.compose(e1)
    a = parse_matrix("1 2; 3 4")
    assert c(a) == e2(e1(a))
    with pytest.raises(ShapeError):
        BlockEmbedding(4, 13, 3).compose(BlockEmbedding(2, 5, 2))


def _inverse(p):
    n = len(p)
    m = [list(r) + [F(int(i == j)) for j in range(n)] for i, r in enumerate(p)]
    for c in range(n):
        piv = next(i for i in range(c, n) if m[i][c])
        m[c], m[piv] = m[piv], m[c]
        m[c] = [x / m[c][c] for x in m[c]]
        for i in range(n):
            if i != c and m[i][c]:
                m[i] = [x - m[i][c] * y for x, y in zip(m[i], m[c])]
    return [r[n:] for r in m]


def test_rank_is_conjugation_invariant():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 5)
        while True:
            p = [[F(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
            if matrix_rank(RationalMatrix(tuple(map(tuple, p)))) == n:
                break
        e = diagonal_idempotent("".join(rng.choice("01") for _ in range(n)))
        P, Pi = RationalMatrix(tuple(map(tuple, p))), RationalMatrix(tuple(map(tuple, _inverse(p))))
        conj = P @ e @ Pi
        assert conj.is_idempotent()
        assert relative_range(conj) == relative_range(e)


@pytest.mark.parametrize("n", range(1, 9))
def test_cartan_measure_is_relative_range(n):
    H = cartan_extract(n)
    for k in range(1 << n):
        bits = "".join("1" if k >> i & 1 else "0" for i in range(n))
        e = diagonal_idempotent(bits)
        assert measure_of(idempotent_to_element(e)) == relative_range(e)
    assert H.n == n


def test_idempotent_to_element_rejects_others():
    with pytest.raises(ValueError):
        idempotent_to_element(parse_matrix("1 1; 0 0"))


def test_matrix_spectrum():
    assert matrix_spectrum(3) == {ScaledSteinitz.of(k) for k in (1, 2, 3)}


def test_bridge_agrees_with_chain_measure():
    embs = [BlockEmbedding(2, 4, 2), BlockEmbedding(4, 9, 2)]
    c = chain_from_embeddings(embs)
    assert validate_chain(c).ok and not c.unital
    from steinitz_measure.chains import ChainElement

    e = ChainElement(1, 0b01)
    top = c.lift(e, 3)
    mat = embs[1](embs[0](diagonal_idempotent("10")))
    assert relative_range(mat) == c.chain_measure(top) * c.alphas[2]
    assert block_atom_map(embs[0]).images == (0b0101, 0b1010)
