"""Counting ones in products of low-rank F2 matrices.

The bucketed counter groups identical rows of the left factor and identical
columns of the right factor (at most 2^rank distinct values each) and sums
``n_u * m_v`` over bucket pairs with odd inner product.  It is exact, and
subquadratic whenever the rank is small relative to log of the dimension.

Acceptance probabilities of predicates on low-rank bit reads are computed
through the Walsh-Hadamard decomposition of the predicate: the expectation
of each parity character is one ones-count of a concatenated product.
Probabilities are exact rationals throughout; soundness thresholds are
sharp inequalities and never see floating point.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from rectpcp.f2 import BitMatrix, DimensionMismatch, matmul

BUCKET_RANK_LIMIT = 24
FOURIER_ARITY_LIMIT = 20


class UnsupportedRank(Exception):
    """The inner dimension exceeds the bucket-table guard."""


def count_ones_naive(a: BitMatrix, b: BitMatrix) -> int:
    """Ones in a*b by materializing the product."""
    return matmul(a, b).weight()


def count_ones_bucketed(a: BitMatrix, b: BitMatrix) -> int:
    """Ones in a*b without materializing it; requires inner dim <= 24."""
    if a.n_cols != b.n_rows:
        raise DimensionMismatch(
            f"inner dimensions differ: {a.n_cols} vs {b.n_rows}"
        )
    rho = a.n_cols
    if rho > BUCKET_RANK_LIMIT:
        raise UnsupportedRank(
            f"inner dimension {rho} exceeds the bucket guard {BUCKET_RANK_LIMIT}"
        )
    if rho == 0:
        return 0
    row_counts: dict[int, int] = {}
    for r in a.rows:
        row_counts[r] = row_counts.get(r, 0) + 1
    col_counts: dict[int, int] = {}
    for c in b.transpose().rows:
        col_counts[c] = col_counts.get(c, 0) + 1

    if len(row_counts) * len(col_counts) >= 1 << 12:
        return _bucket_pairs_numpy(row_counts, col_counts)
    total = 0
    for u, nu in row_counts.items():
        for v, mv in col_counts.items():
            if (u & v).bit_count() & 1:
                total += nu * mv
    return total


def _bucket_pairs_numpy(row_counts: dict[int, int], col_counts: dict[int, int]) -> int:
    us = np.fromiter(row_counts.keys(), dtype=np.int64)
    nu = np.fromiter(row_counts.values(), dtype=np.int64)
    vs = np.fromiter(col_counts.keys(), dtype=np.int64)
    mv = np.fromiter(col_counts.values(), dtype=np.int64)
    ands = us[:, None] & vs[None, :]
    par = np.zeros_like(ands)
    while ands.any():
        par ^= ands & 1
        ands >>= 1
    return int((nu[:, None] * mv[None, :] * (par & 1)).sum())


@dataclass(frozen=True)
class FourierTable:
    """Walsh-Hadamard coefficients of a Boolean predicate.

    ``coefficients[mask]`` is the coefficient of the character
    ``(-1)^(xor of inputs selected by mask)``; all are dyadic rationals with
    denominator dividing 2^arity and the expansion reconstructs the
    predicate exactly.
    """

    arity: int
    coefficients: dict[int, Fraction]

    def reconstruct(self, y: int) -> Fraction:
        total = Fraction(0)
        for mask, coeff in self.coefficients.items():
            sign = -1 if (mask & y).bit_count() & 1 else 1
            total += coeff * sign
        return total


def fourier(truth_table: Sequence[int]) -> FourierTable:
    """Walsh-Hadamard transform of a 0/1 truth table of length 2^arity."""
    n = len(truth_table)
    if n == 0 or n & (n - 1):
        raise ValueError("truth table length must be a power of two")
    arity = n.bit_length() - 1
    if arity > FOURIER_ARITY_LIMIT:
        raise ValueError(f"arity {arity} exceeds the guard {FOURIER_ARITY_LIMIT}")
    vals = list(truth_table)
    h = 1
    while h < n:
        for start in range(0, n, h * 2):
            for i in range(start, start + h):
                x, y = vals[i], vals[i + h]
                vals[i], vals[i + h] = x + y, x - y
        h *= 2
    coeffs = {
        mask: Fraction(v, n) for mask, v in enumerate(vals) if v != 0
    }
    return FourierTable(arity, coeffs)


def acceptance_probability(
    table: FourierTable,
    left_mats: Sequence[BitMatrix],
    right_mats: Sequence[BitMatrix],
) -> Fraction:
    """Exact acceptance probability of a predicate over product-read bits.

    Input ``k`` of the predicate is ``(left_mats[k] * right_mats[k])[i, j]``
    for a uniformly random row index i and column index j.  Each character's
    expectation is computed by one ones-count of the product of the row-wise
    concatenation of the selected left factors with the column-wise
    concatenation of the selected right factors.
    """
    if len(left_mats) != table.arity or len(right_mats) != table.arity:
        raise DimensionMismatch("need one matrix pair per predicate input")
    if table.arity == 0:
        return table.coefficients.get(0, Fraction(0))
    n_rows = left_mats[0].n_rows
    n_cols = right_mats[0].n_cols
    for lm, rm in zip(left_mats, right_mats):
        if lm.n_rows != n_rows or rm.n_cols != n_cols:
            raise DimensionMismatch("outer dimensions differ across the sequence")
        if lm.n_cols != rm.n_rows:
            raise DimensionMismatch("inner dimensions differ within a pair")
    total_cells = n_rows * n_cols
    prob = Fraction(0)
    for mask, coeff in table.coefficients.items():
        if mask == 0:
            prob += coeff
            continue
        lefts = [left_mats[k] for k in range(table.arity) if (mask >> k) & 1]
        rights = [right_mats[k] for k in range(table.arity) if (mask >> k) & 1]
        left = lefts[0]
        for lm in lefts[1:]:
            left = left.hstack(lm)
        right = rights[0]
        for rm in rights[1:]:
            right = right.vstack(rm)
        if left.n_cols <= BUCKET_RANK_LIMIT:
            ones = count_ones_bucketed(left, right)
        else:
            ones = count_ones_naive(left, right)
        prob += coeff * (1 - Fraction(2 * ones, total_cells))
    return prob


@dataclass(frozen=True)
class CountBenchmark:
    n: int
    rho: int
    naive_ns: int
    bucketed_ns: int

    @property
    def speedup(self) -> float:
        return self.naive_ns / max(self.bucketed_ns, 1)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rho": self.rho,
            "naive_ns": self.naive_ns,
            "bucketed_ns": self.bucketed_ns,
        }


def benchmark_counting(n: int, rho: int, seed: int, repeats: int = 3) -> CountBenchmark:
    """Time both backends on a random instance; best of ``repeats`` runs."""
    import random as _random

    rng = _random.Random(seed)
    a = BitMatrix.random(n, rho, rng)
    b = BitMatrix.random(rho, n, rng)
    best_naive = best_bucket = None
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        naive = count_ones_naive(a, b)
        t1 = time.perf_counter_ns()
        bucketed = count_ones_bucketed(a, b)
        t2 = time.perf_counter_ns()
        if naive != bucketed:
            raise AssertionError("backends disagree")
        best_naive = t1 - t0 if best_naive is None else min(best_naive, t1 - t0)
        best_bucket = t2 - t1 if best_bucket is None else min(best_bucket, t2 - t1)
    return CountBenchmark(n, rho, best_naive, best_bucket)
