import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rectpcp.f2 import BitMatrix, matmul
from rectpcp.lowrank import (
    FOURIER_ARITY_LIMIT,
    UnsupportedRank,
    acceptance_probability,
    count_ones_bucketed,
    count_ones_naive,
    fourier,
)


def test_count_identity():
    i2 = BitMatrix.identity(2)
    assert count_ones_naive(i2, i2) == 2
    assert count_ones_bucketed(i2, i2) == 2


def test_count_rank_one_all_ones():
    n = 17
    a = BitMatrix.ones(n, 1)
    b = BitMatrix.ones(1, n)
    assert count_ones_bucketed(a, b) == n * n


def test_count_matches_product_popcount():
    rng = random.Random(1)
    a = BitMatrix.random(32, 4, rng)
    b = BitMatrix.random(4, 32, rng)
    assert count_ones_naive(a, b) == matmul(a, b).weight()
    assert count_ones_bucketed(a, b) == count_ones_naive(a, b)


def test_count_single_bucket():
    rng = random.Random(2)
    u = rng.getrandbits(6) | 1
    v = rng.getrandbits(6) | 1
    n = 9
    a = BitMatrix(n, 6, (u,) * n)
    b = BitMatrix(n, 6, (v,) * n).transpose()
    expect = n * n * ((u & v).bit_count() & 1)
    assert count_ones_bucketed(a, b) == expect


def test_count_guard():
    with pytest.raises(UnsupportedRank):
        count_ones_bucketed(BitMatrix.zeros(2, 25), BitMatrix.zeros(25, 2))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**30), st.integers(2, 40), st.integers(1, 6))
def test_bucketed_equals_naive(seed, n, rho):
    rng = random.Random(seed)
    a = BitMatrix.random(n, rho, rng)
    b = BitMatrix.random(rho, n, rng)
    assert count_ones_bucketed(a, b) == count_ones_naive(a, b)


# -- Walsh-Hadamard decomposition --------------------------------------------

def test_fourier_constant_one():
    table = fourier([1, 1, 1, 1])
    assert table.coefficients == {0: Fraction(1)}


def test_fourier_parity():
    bits = [(y.bit_count() & 1) for y in range(8)]
    table = fourier(bits)
    # parity = 1/2 - 1/2 * chi_full; only masks 0 and 7 survive
    assert set(table.coefficients) == {0, 7}
    for y in range(8):
        assert table.reconstruct(y) == bits[y]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**30))
def test_fourier_reconstructs_random_tables(seed):
    rng = random.Random(seed)
    bits = [rng.getrandbits(1) for _ in range(64)]
    table = fourier(bits)
    for y in range(64):
        assert table.reconstruct(y) == bits[y]
    for coeff in table.coefficients.values():
        assert coeff.denominator in (1, 2, 4, 8, 16, 32, 64)


def test_fourier_rejects_bad_lengths():
    with pytest.raises(ValueError):
        fourier([0, 1, 1])
    with pytest.raises(ValueError):
        fourier([0] * (1 << (FOURIER_ARITY_LIMIT + 1)))


# -- predicate acceptance over product reads ---------------------------------

def enumerate_acceptance(bits, lefts, rights):
    """Direct enumeration over all (row, col) index pairs."""
    n_rows = lefts[0].n_rows
    n_cols = rights[0].n_cols
    prods = [matmul(a, b) for a, b in zip(lefts, rights)]
    acc = 0
    for i in range(n_rows):
        for j in range(n_cols):
            y = 0
            for k, pr in enumerate(prods):
                y |= pr.get(i, j) << k
            acc += bits[y]
    return Fraction(acc, n_rows * n_cols)


def test_acceptance_tautology():
    rng = random.Random(3)
    lefts = [BitMatrix.random(8, 2, rng) for _ in range(3)]
    rights = [BitMatrix.random(2, 8, rng) for _ in range(3)]
    table = fourier([1] * 8)
    assert acceptance_probability(table, lefts, rights) == 1


def test_acceptance_first_input_all_ones():
    n = 8
    lefts = [BitMatrix.ones(n, 1), BitMatrix.zeros(n, 1)]
    rights = [BitMatrix.ones(1, n), BitMatrix.zeros(1, n)]
    bits = [y & 1 for y in range(4)]
    table = fourier(bits)
    assert acceptance_probability(table, lefts, rights) == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**30))
def test_acceptance_matches_enumeration(seed):
    rng = random.Random(seed)
    arity = 4
    n = 32  # 2^5 rows/cols
    bits = [rng.getrandbits(1) for _ in range(1 << arity)]
    lefts = [BitMatrix.random(n, 2, rng) for _ in range(arity)]
    rights = [BitMatrix.random(2, n, rng) for _ in range(arity)]
    table = fourier(bits)
    assert acceptance_probability(table, lefts, rights) == enumerate_acceptance(
        bits, lefts, rights
    )
