"""Regular graphs with a verified sampling property.

A graph is an alpha-sampler when, for every vertex subset S, fewer than an
alpha fraction of vertices see the density of S in their closed
neighborhood deviate from the global density by more than alpha (both
inequalities strict).  Closed neighborhoods include the vertex itself via
an implicit self-loop, so a (degree)-regular simple graph has closed
neighborhoods of uniform size degree+1.

Construction is by verified randomness: either the complete graph with
self-loops (a perfect sampler, used whenever the generic degree bound
4/alpha^4 already reaches n-1) or a seeded random regular graph rejected
until the verifier passes.  Canonically ordered neighbor lists are part of
the contract: downstream consumers index into them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

EXHAUSTIVE_VERIFY_LIMIT = 20
MONTE_CARLO_SAMPLES = 100_000


class SamplerConstructionError(Exception):
    """Verified construction failed within the retry budget."""

    def __init__(self, message: str, witness: Optional[int] = None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class SamplerGraph:
    """A degree-regular simple graph plus implicit self-loops.

    ``degree`` counts neighbors other than the vertex itself; the closed
    neighborhood of every vertex therefore has size degree+1.  Neighbor
    lists are sorted ascending; that canonical order is part of the type's
    contract.
    """

    n: int
    degree: int
    alpha: Fraction
    adjacency: tuple[tuple[int, ...], ...]
    construction_seed: int
    verified_exhaustively: bool

    def __post_init__(self) -> None:
        if self.n <= 0:
            raise ValueError("need at least one vertex")
        if len(self.adjacency) != self.n:
            raise ValueError("adjacency length mismatch")
        for v, nbrs in enumerate(self.adjacency):
            if len(nbrs) != self.degree:
                raise ValueError(f"vertex {v} has degree {len(nbrs)} != {self.degree}")
            if list(nbrs) != sorted(set(nbrs)):
                raise ValueError(f"vertex {v} neighbor list not sorted/distinct")
            if v in nbrs:
                raise ValueError("explicit self-loops are not stored")

    @property
    def closed_size(self) -> int:
        return self.degree + 1

    def closed_neighborhood(self, v: int) -> tuple[tuple[int, ...], int]:
        """Sorted closed neighborhood of v and the position of v within it."""
        if not 0 <= v < self.n:
            raise IndexError(v)
        merged = tuple(sorted(self.adjacency[v] + (v,)))
        return merged, merged.index(v)


def closed_neighborhood(g: SamplerGraph, v: int) -> tuple[tuple[int, ...], int]:
    return g.closed_neighborhood(v)


def _neighborhood_masks(g: SamplerGraph) -> list[int]:
    masks = []
    for v in range(g.n):
        m = 1 << v
        for u in g.adjacency[v]:
            m |= 1 << u
        masks.append(m)
    return masks


def verify_sampler(
    g: SamplerGraph, alpha: Fraction, samples: int = MONTE_CARLO_SAMPLES, seed: int = 0
) -> tuple[bool, Optional[int], dict]:
    """Check the sampling property; exhaustive for n <= 20, sampled above.

    Returns (ok, worst witness subset as a bitmask or None, details).  The
    witness maximizes the number of deviating vertices.  Deviation of
    vertex v on subset S is |S|/n - |closed(v) & S|/(degree+1); a vertex
    deviates when the absolute value strictly exceeds alpha, and the graph
    fails on S when at least alpha*n vertices deviate.
    """
    n = g.n
    delta = g.closed_size
    masks = _neighborhood_masks(g)
    a_num, a_den = alpha.numerator, alpha.denominator
    exhaustive = n <= EXHAUSTIVE_VERIFY_LIMIT
    if exhaustive:
        subsets = range(1 << n)
        mode = {"mode": "exhaustive", "subsets": 1 << n}
    else:
        rng = random.Random(seed)
        subsets = (rng.getrandbits(n) for _ in range(samples))
        mode = {"mode": "monte_carlo", "subsets": samples, "seed": seed}
    worst_count = -1
    worst_subset = None
    ok = True
    for s in subsets:
        size = s.bit_count()
        deviators = 0
        for v in range(n):
            inter = (masks[v] & s).bit_count()
            # | size/n - inter/delta | > alpha  <=>  |size*delta - inter*n| * a_den > a_num*n*delta
            if abs(size * delta - inter * n) * a_den > a_num * n * delta:
                deviators += 1
        if deviators * a_den >= a_num * n:
            ok = False
            if deviators > worst_count:
                worst_count, worst_subset = deviators, s
    detail = dict(mode)
    detail["worst_deviator_count"] = worst_count if worst_count >= 0 else 0
    return ok, worst_subset, detail


def _random_regular(n: int, degree: int, rng: random.Random) -> Optional[list[set[int]]]:
    """One pairing-model attempt at a simple degree-regular graph."""
    stubs = [v for v in range(n) for _ in range(degree)]
    rng.shuffle(stubs)
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(0, len(stubs), 2):
        u, v = stubs[i], stubs[i + 1]
        if u == v or v in adj[u]:
            return None
        adj[u].add(v)
        adj[v].add(u)
    return adj


def build_sampler(
    n: int, alpha: Fraction, seed: int, retries: int = 200
) -> SamplerGraph:
    """Deterministic-in-seed construction of a verified alpha-sampler.

    When the generic degree bound 4/alpha^4 is at least n-1 the complete
    graph with self-loops is returned; its closed neighborhoods are the
    whole vertex set, so every deviation is exactly zero.  Otherwise seeded
    random regular graphs are drawn and rejected until verification passes.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie strictly between 0 and 1")
    if n == 1:
        return SamplerGraph(1, 0, alpha, ((),), seed, True)
    bound = 4 / (alpha ** 4)
    if bound >= n - 1:
        adjacency = tuple(
            tuple(u for u in range(n) if u != v) for v in range(n)
        )
        return SamplerGraph(n, n - 1, alpha, adjacency, seed, n <= EXHAUSTIVE_VERIFY_LIMIT)
    degree = int(bound) if bound == int(bound) else int(bound) + 1
    if (n * degree) % 2:
        degree += 1
    if degree >= n:
        degree = n - 1
        if (n * degree) % 2:
            raise SamplerConstructionError(
                f"no regular degree near the bound fits n={n}"
            )
    rng = random.Random(seed)
    last_witness = None
    for _ in range(retries):
        adj = _random_regular(n, degree, rng)
        if adj is None:
            continue
        g = SamplerGraph(
            n,
            degree,
            alpha,
            tuple(tuple(sorted(s)) for s in adj),
            seed,
            n <= EXHAUSTIVE_VERIFY_LIMIT,
        )
        ok, witness, _ = verify_sampler(g, alpha, seed=seed)
        if ok:
            return g
        last_witness = witness
    raise SamplerConstructionError(
        f"could not verify an alpha-sampler on n={n} within {retries} attempts",
        witness=last_witness,
    )


_CANONICAL_SALT = 0x5EED0F

_canonical_cache: dict[tuple[int, int, int], SamplerGraph] = {}


def canonical_sampler(n: int, alpha: Fraction) -> SamplerGraph:
    """The sampler all consumers agree on for a given (size, alpha) pair.

    Keyed deterministically so that independent parties looking at the same
    neighbor list derive the identical graph.
    """
    alpha = Fraction(alpha)
    key = (n, alpha.numerator, alpha.denominator)
    if key not in _canonical_cache:
        seed = (n * 1_000_003 + alpha.numerator * 7919 + alpha.denominator * 104729
                + _CANONICAL_SALT) & 0x7FFFFFFF
        _canonical_cache[key] = build_sampler(n, alpha, seed)
    return _canonical_cache[key]
