import itertools
import random

import pytest

from rectpcp.f2 import BitMatrix, hamming_distance, matmul, rank
from rectpcp.rigidity import (
    ExactModeGuard,
    distance_to_rank,
    is_rigid,
    rigidity_scan,
    search_low_rank_witness,
)


def brute_distance(m: BitMatrix, rho: int) -> int:
    """Minimum distance to rank-<=rho by enumerating every factor pair."""
    n, c = m.n_rows, m.n_cols
    best = None
    for p_bits in range(1 << (n * rho)):
        p = BitMatrix(
            n, rho, tuple((p_bits >> (i * rho)) & ((1 << rho) - 1) for i in range(n))
        )
        for q_bits in range(1 << (rho * c)):
            q = BitMatrix(
                rho, c, tuple((q_bits >> (i * c)) & ((1 << c) - 1) for i in range(rho))
            )
            d = hamming_distance(m, matmul(p, q))
            best = d if best is None else min(best, d)
    return best


def test_distance_zero_cases():
    rng = random.Random(0)
    m = BitMatrix.random(4, 4, rng)
    dist, p, q = distance_to_rank(m, rank(m))
    assert dist == 0
    assert matmul(p, q) == m
    assert distance_to_rank(BitMatrix.zeros(3, 3), 1)[0] == 0


def test_identity4_rank1_exact():
    dist, p, q = distance_to_rank(BitMatrix.identity(4), 1)
    assert dist == brute_distance(BitMatrix.identity(4), 1) == 3
    assert hamming_distance(BitMatrix.identity(4), matmul(p, q)) == 3
    assert rank(matmul(p, q)) <= 1


def test_exact_matches_brute_force_small():
    rng = random.Random(5)
    for _ in range(6):
        m = BitMatrix.random(3, 3, rng)
        for rho in (1, 2):
            dist, p, q = distance_to_rank(m, rho)
            assert dist == brute_distance(m, rho)
            assert rank(matmul(p, q)) <= rho
            assert hamming_distance(m, matmul(p, q)) == dist


def test_distance_monotone_in_rank():
    rng = random.Random(6)
    m = BitMatrix.random(4, 3, rng)
    dists = [distance_to_rank(m, rho)[0] for rho in range(4)]
    assert all(a >= b for a, b in zip(dists, dists[1:]))


def test_distance_invariant_under_permutations():
    rng = random.Random(8)
    m = BitMatrix.random(4, 3, rng)
    base = distance_to_rank(m, 1)[0]
    rows = list(m.rows)
    rng.shuffle(rows)
    assert distance_to_rank(BitMatrix(4, 3, tuple(rows)), 1)[0] == base
    perm = list(range(3))
    rng.shuffle(perm)
    permuted = BitMatrix.from_rows(
        [[m.get(i, perm[j]) for j in range(3)] for i in range(4)]
    )
    assert distance_to_rank(permuted, 1)[0] == base


def test_exact_guard():
    with pytest.raises(ExactModeGuard):
        distance_to_rank(BitMatrix.zeros(8, 8), 2)


def test_is_rigid():
    assert is_rigid(BitMatrix.identity(2), 0, 0)
    assert not is_rigid(BitMatrix.zeros(3, 3), 0, 0)
    dist, _, _ = distance_to_rank(BitMatrix.identity(4), 1)
    assert is_rigid(BitMatrix.identity(4), dist - 1, 1)
    assert not is_rigid(BitMatrix.identity(4), dist, 1)


def test_search_finds_planted_low_rank():
    rng = random.Random(9)
    p0 = BitMatrix.random(8, 2, rng)
    q0 = BitMatrix.random(2, 8, rng)
    m = matmul(p0, q0)
    dist, p, q = search_low_rank_witness(m, 2, budget=5, seed=1)
    assert dist == 0
    assert matmul(p, q) == m


def test_search_budget_zero_returns_weight():
    rng = random.Random(10)
    m = BitMatrix.random(6, 6, rng)
    dist, p, q = search_low_rank_witness(m, 2, budget=0, seed=0)
    assert dist == m.weight()
    assert p.weight() == 0 and q.weight() == 0


def test_search_upper_bounds_exact():
    rng = random.Random(11)
    for _ in range(5):
        m = BitMatrix.random(4, 3, rng)
        exact = distance_to_rank(m, 1)[0]
        heur, p, q = search_low_rank_witness(m, 1, budget=30, seed=3)
        assert heur >= exact
        assert hamming_distance(m, matmul(p, q)) == heur


def test_rigidity_scan_report():
    m = BitMatrix.identity(4)
    report = rigidity_scan(m)
    dists = {e["rho"]: e["distance"] for e in report.entries}
    assert dists[0] == 4
    assert dists[4] == 0
    assert "entries" in report.to_json()
