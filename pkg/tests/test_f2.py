import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rectpcp import f2
from rectpcp.f2 import BitMatrix, BitVector, DecodeFailure, DimensionMismatch


def naive_matmul(a, b):
    """Independent unpacked triple-loop product."""
    al, bl = a.to_lists(), b.to_lists()
    out = [[0] * b.n_cols for _ in range(a.n_rows)]
    for i in range(a.n_rows):
        for j in range(b.n_cols):
            s = 0
            for k in range(a.n_cols):
                s ^= al[i][k] & bl[k][j]
            out[i][j] = s
    return out


def det_f2(rows):
    """Leibniz determinant over F2 (tiny matrices only)."""
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        prod = 1
        for i in range(n):
            prod &= rows[i][perm[i]]
        total ^= prod
    return total


def minor_rank(mat):
    """Largest size of an invertible square minor."""
    lists = mat.to_lists()
    n, m = mat.n_rows, mat.n_cols
    for size in range(min(n, m), 0, -1):
        for rr in itertools.combinations(range(n), size):
            for cc in itertools.combinations(range(m), size):
                sub = [[lists[i][j] for j in cc] for i in rr]
                if det_f2(sub):
                    return size
    return 0


def test_matmul_identity():
    i3 = BitMatrix.identity(3)
    assert f2.matmul(i3, i3) == i3


def test_matmul_even_characteristic():
    ones = BitMatrix.ones(2, 2)
    assert f2.matmul(ones, ones) == BitMatrix.zeros(2, 2)


def test_matmul_against_triple_loop():
    rng = random.Random(7)
    a = BitMatrix.random(6, 4, rng)
    b = BitMatrix.random(4, 6, rng)
    assert f2.matmul(a, b).to_lists() == naive_matmul(a, b)


def test_matmul_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        f2.matmul(BitMatrix.zeros(2, 3), BitMatrix.zeros(2, 3))


def test_rank_identity_and_zero():
    assert f2.rank(BitMatrix.identity(5)) == 5
    assert f2.rank(BitMatrix.zeros(4, 4)) == 0


def test_rank_matches_minor_enumeration():
    rng = random.Random(21)
    for _ in range(20):
        m = BitMatrix.random(4, 4, rng)
        assert f2.rank(m) == minor_rank(m)


def test_rank_does_not_mutate():
    rng = random.Random(3)
    m = BitMatrix.random(5, 5, rng)
    before = m.rows
    f2.rank(m)
    assert m.rows == before


def test_hamming_distance():
    rng = random.Random(11)
    a = BitMatrix.random(5, 7, rng)
    assert f2.hamming_distance(a, a) == 0
    assert f2.hamming_distance(BitMatrix.zeros(2, 2), BitMatrix.ones(2, 2)) == 4
    b = BitMatrix.random(5, 7, rng)
    manual = sum(
        a.get(i, j) ^ b.get(i, j) for i in range(5) for j in range(7)
    )
    assert f2.hamming_distance(a, b) == manual


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**30), st.integers(0, 2**30), st.integers(0, 2**30))
def test_rank_of_product_bounded(sa, sb, sc):
    rng = random.Random(sa ^ sb ^ sc)
    a = BitMatrix.random(5, 4, rng)
    b = BitMatrix.random(4, 6, rng)
    assert f2.rank(f2.matmul(a, b)) <= min(f2.rank(a), f2.rank(b))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**30))
def test_matmul_associative(seed):
    rng = random.Random(seed)
    a = BitMatrix.random(3, 4, rng)
    b = BitMatrix.random(4, 5, rng)
    c = BitMatrix.random(5, 2, rng)
    assert f2.matmul(f2.matmul(a, b), c) == f2.matmul(a, f2.matmul(b, c))


# -- affine form as a rank-3 product ---------------------------------------

def test_affine_rank3_zero_and_ones():
    z = BitVector(3, 0)
    a, b = f2.affine_to_rank3(3, z, z, 0)
    assert f2.matmul(a, b) == BitMatrix.zeros(8, 8)
    a, b = f2.affine_to_rank3(3, z, z, 1)
    assert f2.matmul(a, b) == BitMatrix.ones(8, 8)


def test_affine_rank3_mixed_example():
    u = BitVector.from_bits([1, 0])
    v = BitVector.from_bits([0, 1])
    a, b = f2.affine_to_rank3(2, u, v, 0)
    prod = f2.matmul(a, b)
    for x in range(4):
        for y in range(4):
            assert prod.get(x, y) == (x & 1) ^ ((y >> 1) & 1)


def test_affine_rank3_rank_bound_and_identity():
    rng = random.Random(5)
    for m in range(1, 7):
        u = BitVector(m, rng.getrandbits(m))
        v = BitVector(m, rng.getrandbits(m))
        bbit = rng.getrandbits(1)
        a, b = f2.affine_to_rank3(m, u, v, bbit)
        prod = f2.matmul(a, b)
        assert f2.rank(prod) <= 3
        for x in range(1 << m):
            for y in range(1 << m):
                expect = ((x & u.bits).bit_count() & 1) ^ (
                    (y & v.bits).bit_count() & 1
                ) ^ bbit
                assert prod.get(x, y) == expect


def test_affine_rank3_length_mismatch():
    with pytest.raises(DimensionMismatch):
        f2.affine_to_rank3(3, BitVector(2, 0), BitVector(3, 0), 0)


# -- linear codes ------------------------------------------------------------

def test_code_roundtrip_all_messages():
    code = f2.random_systematic_code(6, 14, seed=4, min_distance=3)
    for msg in range(1 << 6):
        vec = BitVector(6, msg)
        word = f2.encode(code, vec)
        assert f2.is_codeword(code, word)
        assert f2.decode(code, word) == vec


def test_single_flip_leaves_code():
    code = f2.random_systematic_code(5, 12, seed=9, min_distance=2)
    word = f2.encode(code, BitVector(5, 0b10110))
    for j in range(code.block_len):
        flipped = BitVector(code.block_len, word.bits ^ (1 << j))
        assert not f2.is_codeword(code, flipped)
        with pytest.raises(DecodeFailure):
            f2.decode(code, flipped)


def test_min_distance_matches_weight_scan():
    code = f2.random_systematic_code(8, 24, seed=13, min_distance=2)
    gen = code.generator.to_lists()
    best = None
    for msg in range(1, 1 << 8):
        word = [0] * 24
        for i in range(8):
            if (msg >> i) & 1:
                word = [w ^ g for w, g in zip(word, gen[i])]
        weight = sum(word)
        best = weight if best is None else min(best, weight)
    assert code.min_distance == best


def test_codeword_pairs_respect_distance():
    code = f2.random_systematic_code(6, 15, seed=2, min_distance=3)
    words = code.codewords()
    for i, w1 in enumerate(words):
        for w2 in words[i + 1 :]:
            assert (w1 ^ w2).bit_count() >= code.min_distance


def test_code_rejects_wrong_distance_claim():
    gen = BitMatrix.identity(3)
    with pytest.raises(ValueError):
        f2.LinearCode(3, 3, gen, True, 2)


# -- file formats ------------------------------------------------------------

def test_matrix_text_roundtrip():
    rng = random.Random(31)
    m = BitMatrix.random(5, 9, rng)
    assert f2.matrix_from_text(f2.matrix_to_text(m)) == m


def test_matrix_binary_roundtrip():
    rng = random.Random(32)
    m = BitMatrix.random(7, 19, rng)
    assert f2.matrix_from_bytes(f2.matrix_to_bytes(m)) == m


def test_matrix_text_rejects_garbage():
    with pytest.raises(ValueError):
        f2.matrix_from_text("2 2\n01\n0x\n")
    with pytest.raises(ValueError):
        f2.matrix_from_text("2 2\n01\n")


def test_padding_invariant_enforced():
    with pytest.raises(ValueError):
        BitMatrix(1, 2, (0b100,))
    with pytest.raises(ValueError):
        BitVector(3, 0b1000)
