"""Ground-truth rigidity: exact Hamming distance to the rank-<=rho matrices.

Exact mode enumerates column spaces of the left factor (deduplicated by
reduced column echelon form, since the distance depends only on the span)
and picks the best right factor column by column.  The heuristic is a
seeded alternating search usable at moderate sizes; its value is always an
upper bound on the exact distance.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional

from rectpcp.f2 import BitMatrix, hamming_distance, matmul, rank

EXACT_FACTOR_BITS = 12


class ExactModeGuard(Exception):
    """Instance too large for exact enumeration; use the heuristic search."""


def _span_bases(n: int, rho: int) -> list[tuple[int, ...]]:
    """All subspaces of F2^n of dimension <= rho, as echelonized bases.

    Each basis is a tuple of column vectors (ints, bit i = row i) in reduced
    echelon form, one per subspace.
    """
    bases: list[tuple[int, ...]] = [()]
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(rho):
        next_frontier = []
        for basis in frontier:
            pivots = [max(b.bit_length() - 1, 0) for b in basis]
            for v in range(1, 1 << n):
                red = v
                for b in basis:
                    red = min(red, red ^ b)
                if red == 0:
                    continue
                # Canonical extension: new pivot above all existing pivots.
                pivot = red.bit_length() - 1
                if pivots and pivot <= max(pivots):
                    continue
                next_frontier.append(basis + (red,))
        # Deduplicate by span representative.
        seen = set()
        deduped = []
        for basis in next_frontier:
            span = frozenset(_span(basis))
            if span not in seen:
                seen.add(span)
                deduped.append(basis)
        bases.extend(deduped)
        frontier = deduped
    return bases


def _span(basis: tuple[int, ...]) -> list[int]:
    out = [0]
    for b in basis:
        out.extend(x ^ b for x in out)
    return out


def distance_to_rank(
    m: BitMatrix, rho: int
) -> tuple[int, BitMatrix, BitMatrix]:
    """Exact minimum Hamming distance from m to the rank-<=rho matrices.

    Returns the distance and a witness factorization (P, Q) attaining it,
    with ties broken by lexicographic order of the packed payloads.
    """
    n, cols = m.n_rows, m.n_cols
    if rho < 0:
        raise ValueError("negative rank")
    if rank(m) <= rho:
        # Rank factorization of m itself witnesses distance zero.
        p = _left_factor_from_columns(m, rho)
        q, dist = _best_q(m, p)
        assert dist == 0
        return 0, p, q
    if n * rho > EXACT_FACTOR_BITS or rho * cols > EXACT_FACTOR_BITS:
        raise ExactModeGuard(
            f"{n}x{rho} / {rho}x{cols} factors exceed the {EXACT_FACTOR_BITS}-bit "
            "exact-mode guard; use search_low_rank_witness"
        )
    best = None
    for basis in _span_bases(n, rho):
        span = _span(basis)
        dist = 0
        choices = []
        for j in range(cols):
            col = m.column(j)
            best_vec, best_d = 0, col.bit_count()
            for v in span:
                d = (v ^ col).bit_count()
                if d < best_d or (d == best_d and v < best_vec):
                    best_vec, best_d = v, d
            dist += best_d
            choices.append(best_vec)
        p, q = _factors_from_choice(n, cols, rho, basis, span, choices)
        key = (dist, p.rows, q.rows)
        if best is None or key < best[0]:
            best = (key, dist, p, q)
    assert best is not None
    return best[1], best[2], best[3]


def _factors_from_choice(
    n: int, cols: int, rho: int, basis: tuple[int, ...], span: list[int], choices: list[int]
) -> tuple[BitMatrix, BitMatrix]:
    # P columns = basis vectors (padded with zero columns up to rho).
    p_cols = list(basis) + [0] * (rho - len(basis))
    p_rows = []
    for i in range(n):
        v = 0
        for jj, c in enumerate(p_cols):
            if (c >> i) & 1:
                v |= 1 << jj
        p_rows.append(v)
    p = BitMatrix(n, rho, tuple(p_rows))
    # Q[:, j] = coordinates of the chosen span vector in the basis.
    q_rows = [0] * rho
    for j, vec in enumerate(choices):
        coords = _coords_in_basis(basis, vec)
        for jj in range(len(basis)):
            if (coords >> jj) & 1:
                q_rows[jj] |= 1 << j
    q = BitMatrix(rho, cols, tuple(q_rows))
    return p, q


def _coords_in_basis(basis: tuple[int, ...], vec: int) -> int:
    coords = 0
    residue = vec
    for jj in range(len(basis) - 1, -1, -1):
        pivot = basis[jj].bit_length() - 1
        if (residue >> pivot) & 1:
            residue ^= basis[jj]
            coords |= 1 << jj
    if residue:
        raise ValueError("vector outside span")
    return coords


def is_rigid(m: BitMatrix, delta: int, rho: int) -> bool:
    """True iff the exact distance to rank-<=rho exceeds delta."""
    dist, _, _ = distance_to_rank(m, rho)
    return dist > delta


def search_low_rank_witness(
    m: BitMatrix, rho: int, budget: int, seed: int
) -> tuple[int, BitMatrix, BitMatrix]:
    """Seeded heuristic upper bound on distance_to_rank.

    Randomized restarts plus alternating exact minimization of one factor
    given the other, with greedy single-column perturbations.  With budget 0
    this returns the all-zero factorization, i.e. the weight of m.
    """
    n, cols = m.n_rows, m.n_cols
    zero_p = BitMatrix.zeros(n, rho)
    zero_q = BitMatrix.zeros(rho, cols)
    best = (hamming_distance(m, matmul(zero_p, zero_q)), zero_p, zero_q)
    if budget <= 0 or rho == 0:
        return best
    rng = random.Random(seed)
    starts: list[BitMatrix] = []
    # Rank factorization of m itself reaches distance 0 whenever rank(m) <= rho.
    if rank(m) <= rho:
        starts.append(_left_factor_from_columns(m, rho))
    for _ in range(budget):
        starts.append(BitMatrix.random(n, rho, rng))
    for p in starts[: budget + 1]:
        p_cur = p
        dist = None
        for _ in range(8):
            q_cur, dist_q = _best_q(m, p_cur)
            p_cur, dist_p = _best_p(m, q_cur)
            if dist is not None and dist_p >= dist:
                break
            dist = dist_p
        q_cur, dist = _best_q(m, p_cur)
        cand = (dist, p_cur, q_cur)
        if cand[0] < best[0] or (
            cand[0] == best[0] and (cand[1].rows, cand[2].rows) < (best[1].rows, best[2].rows)
        ):
            best = cand
        if best[0] == 0:
            break
    return best


def _left_factor_from_columns(m: BitMatrix, rho: int) -> BitMatrix:
    basis: list[int] = []
    for j in range(m.n_cols):
        v = m.column(j)
        for b in basis:
            v = min(v, v ^ b)
        if v and len(basis) < rho:
            basis.append(v)
    cols = basis + [0] * (rho - len(basis))
    rows = []
    for i in range(m.n_rows):
        r = 0
        for jj, c in enumerate(cols):
            if (c >> i) & 1:
                r |= 1 << jj
        rows.append(r)
    return BitMatrix(m.n_rows, rho, tuple(rows))


def _best_q(m: BitMatrix, p: BitMatrix) -> tuple[BitMatrix, int]:
    """Exact best Q for fixed P: per-column nearest vector in the column span."""
    span_coords = _span_with_coords(p)
    rho = p.n_cols
    q_rows = [0] * rho
    dist = 0
    for j in range(m.n_cols):
        col = m.column(j)
        best_d, best_coord = None, 0
        for vec, coord in span_coords:
            d = (vec ^ col).bit_count()
            if best_d is None or d < best_d or (d == best_d and coord < best_coord):
                best_d, best_coord = d, coord
        dist += best_d
        for jj in range(rho):
            if (best_coord >> jj) & 1:
                q_rows[jj] |= 1 << j
    return BitMatrix(rho, m.n_cols, tuple(q_rows)), dist


def _best_p(m: BitMatrix, q: BitMatrix) -> tuple[BitMatrix, int]:
    """Exact best P for fixed Q: per-row nearest vector in the row span."""
    span_coords = _span_with_coords(q.transpose())
    rho = q.n_rows
    p_rows = []
    dist = 0
    for i in range(m.n_rows):
        row = m.rows[i]
        best_d, best_coord = None, 0
        for vec, coord in span_coords:
            d = (vec ^ row).bit_count()
            if best_d is None or d < best_d or (d == best_d and coord < best_coord):
                best_d, best_coord = d, coord
        dist += best_d
        p_rows.append(best_coord)
    return BitMatrix(m.n_rows, rho, tuple(p_rows)), dist


def _span_with_coords(p: BitMatrix) -> list[tuple[int, int]]:
    """(vector, coordinate mask) pairs spanning the column space of p."""
    cols = [p.column(j) for j in range(p.n_cols)]
    out = [(0, 0)]
    for jj, c in enumerate(cols):
        out.extend((v ^ c, coord | (1 << jj)) for v, coord in out)
    # Keep the lexicographically least coordinates per vector.
    best: dict[int, int] = {}
    for v, coord in out:
        if v not in best or coord < best[v]:
            best[v] = coord
    return sorted(best.items())


@dataclass
class RigidityReport:
    """Per-rank distance table for one square matrix."""

    n: int
    entries: list[dict] = field(default_factory=list)

    def add(self, rho: int, distance: int, exact: bool, p: BitMatrix, q: BitMatrix) -> None:
        self.entries.append(
            {
                "rho": rho,
                "distance": distance,
                "exact": exact,
                "witness_p_rows": list(p.rows),
                "witness_q_rows": list(q.rows),
            }
        )

    def validate(self) -> None:
        dists = [e["distance"] for e in sorted(self.entries, key=lambda e: e["rho"])]
        if any(d2 > d1 for d1, d2 in zip(dists, dists[1:])):
            raise AssertionError("distance must be non-increasing in rho")

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "entries": self.entries}, indent=2)


def rigidity_scan(
    m: BitMatrix,
    max_rho: Optional[int] = None,
    budget: int = 50,
    seed: int = 0,
) -> RigidityReport:
    """Distance table over rho = 0..max_rho, exact where the guard allows."""
    if m.n_rows != m.n_cols:
        raise ValueError("rigidity scan expects a square matrix")
    n = m.n_rows
    if max_rho is None:
        max_rho = rank(m)
    report = RigidityReport(n=n)
    for rho in range(max_rho + 1):
        try:
            dist, p, q = distance_to_rank(m, rho)
            report.add(rho, dist, True, p, q)
        except ExactModeGuard:
            dist, p, q = search_low_rank_witness(m, rho, budget, seed)
            report.add(rho, dist, False, p, q)
    report.validate()
    return report
