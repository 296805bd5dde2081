"""Product-graph MAXCUT machinery: incidence views, cut indicators, and
low-rank cut counting.

A cut of a product digraph is a 0/1 matrix over the factor vertex sets.  An
edge pair is cut exactly when the endpoint memberships XOR to one, which
makes the cut-indicator matrix a sum of two three-factor products; with a
low-rank cut the indicator inherits twice that rank and the cut size is a
single low-rank ones-count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from rectpcp.f2 import BitMatrix, DimensionMismatch, matmul
from rectpcp.lowrank import BUCKET_RANK_LIMIT, count_ones_bucketed, count_ones_naive


@dataclass(frozen=True)
class Digraph:
    """Directed multigraph: the edge list is a multiset of ordered pairs."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range")

    @property
    def m(self) -> int:
        return len(self.edges)

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Digraph":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        n, m = map(int, lines[0].split())
        if len(lines) - 1 != m:
            raise ValueError(f"expected {m} edges, found {len(lines) - 1}")
        edges = tuple(tuple(map(int, ln.split())) for ln in lines[1:])
        return cls(n, edges)  # type: ignore[arg-type]

    @classmethod
    def random(cls, n: int, m: int, rng) -> "Digraph":
        return cls(n, tuple((rng.randrange(n), rng.randrange(n)) for _ in range(m)))


def product_graph(g1: Digraph, g2: Digraph) -> Digraph:
    """Product digraph: vertex (u1,u2) -> u1*|V2|+u2; one edge per edge pair."""
    edges = []
    for u1, v1 in g1.edges:
        for u2, v2 in g2.edges:
            edges.append((u1 * g2.n + u2, v1 * g2.n + v2))
    return Digraph(g1.n * g2.n, tuple(edges))


@dataclass(frozen=True)
class ProductMaxcutInstance:
    """Two factor digraphs with lazily materialized incidence views.

    The left/right incidence matrices have one 1 per row (the edge's left
    or right endpoint); only the endpoint lookup is stored, and the
    BitMatrix views are built on demand.
    """

    g1: Digraph
    g2: Digraph

    def left_endpoint(self, factor: int, e: int) -> int:
        g = self.g1 if factor == 1 else self.g2
        return g.edges[e][0]

    def right_endpoint(self, factor: int, e: int) -> int:
        g = self.g1 if factor == 1 else self.g2
        return g.edges[e][1]

    def incidence(self, factor: int, side: str) -> BitMatrix:
        g = self.g1 if factor == 1 else self.g2
        pick = 0 if side == "left" else 1
        return BitMatrix(
            g.m, g.n, tuple(1 << g.edges[e][pick] for e in range(g.m))
        )


def cut_indicator(inst: ProductMaxcutInstance, s: BitMatrix) -> BitMatrix:
    """|E1| x |E2| matrix marking the product edges cut by s."""
    g1, g2 = inst.g1, inst.g2
    if (s.n_rows, s.n_cols) != (g1.n, g2.n):
        raise DimensionMismatch("cut matrix shape must be |V1| x |V2|")
    rows = []
    for u1, v1 in g1.edges:
        row = 0
        for j, (u2, v2) in enumerate(g2.edges):
            if s.get(u1, u2) ^ s.get(v1, v2):
                row |= 1 << j
        rows.append(row)
    return BitMatrix(g1.m, g2.m, tuple(rows))


def cut_value(inst: ProductMaxcutInstance, s: BitMatrix) -> int:
    return cut_indicator(inst, s).weight()


def cut_value_lowrank(inst: ProductMaxcutInstance, p: BitMatrix, q: BitMatrix) -> int:
    """Cut size of s = p*q via one ones-count of a rank-<=2*rank block product.

    The left block stacks, per edge of the first factor, the p-rows of both
    endpoints; the right block stacks, per edge of the second factor, the
    q-columns of both endpoints.
    """
    g1, g2 = inst.g1, inst.g2
    if p.n_rows != g1.n or q.n_cols != g2.n:
        raise DimensionMismatch("factor shapes disagree with the instance")
    if p.n_cols != q.n_rows:
        raise DimensionMismatch("inner dimensions differ")
    rho = p.n_cols
    left_rows = []
    for u1, v1 in g1.edges:
        left_rows.append(p.rows[u1] | (p.rows[v1] << rho))
    left = BitMatrix(g1.m, 2 * rho, tuple(left_rows))
    qt = q.transpose()
    right_cols = []
    for u2, v2 in g2.edges:
        right_cols.append(qt.rows[u2] | (qt.rows[v2] << rho))
    right = BitMatrix(g2.m, 2 * rho, tuple(right_cols)).transpose()
    if 2 * rho <= BUCKET_RANK_LIMIT:
        return count_ones_bucketed(left, right)
    return count_ones_naive(left, right)


def brute_cut_value(g: Digraph, membership: Sequence[int]) -> int:
    """Edges cut (in either direction) by a 0/1 membership vector."""
    if len(membership) != g.n:
        raise ValueError("membership length differs from the vertex count")
    return sum(
        1 for u, v in g.edges if (membership[u] ^ membership[v]) & 1
    )


def flatten_cut(s: BitMatrix) -> list[int]:
    """Cut matrix to a membership vector of the product graph's vertices."""
    return s.flatten()


@dataclass(frozen=True)
class AlmostRectReport:
    ok: bool
    detail: str
    n_factors: int = 0
    factor_edge_count: int = 0
    tau_log: float | None = None


def check_almost_rectangular(
    g: Digraph, decomposition: Sequence[tuple[Digraph, Digraph]]
) -> AlmostRectReport:
    """Verify an edge-disjoint product-graph decomposition of g.

    Checks multiset equality of the union with g's edges, equal factor edge
    counts across the list, and reports the shared-exponent value implied by
    |factors| relative to the total edge count.
    """
    union: list[tuple[int, int]] = []
    sizes = set()
    for g1j, g2j in decomposition:
        if g1j.n * g2j.n != g.n:
            return AlmostRectReport(False, "factor vertex counts do not multiply to |V|")
        if g1j.m != g2j.m:
            return AlmostRectReport(False, "factor edge counts differ within a pair")
        sizes.add(g1j.m)
        union.extend(product_graph(g1j, g2j).edges)
    if len(sizes) > 1:
        return AlmostRectReport(False, f"factor edge counts differ across pairs: {sizes}")
    if sorted(union) != sorted(g.edges):
        if len(union) != len(set(union)) and len(set(union)) == len(
            set(g.edges)
        ):
            return AlmostRectReport(False, "decomposition is not edge-disjoint")
        return AlmostRectReport(False, "union of products differs from the edge multiset")
    m = g.m
    n_factors = len(decomposition)
    tau_log = math.log(n_factors, m) if m > 1 and n_factors >= 1 else None
    return AlmostRectReport(
        True,
        "edge-disjoint product decomposition verified",
        n_factors=n_factors,
        factor_edge_count=sizes.pop() if sizes else 0,
        tau_log=tau_log,
    )


def fractional_cut_value(inst: ProductMaxcutInstance, s: BitMatrix) -> Fraction:
    total = inst.g1.m * inst.g2.m
    return Fraction(cut_value(inst, s), total)
