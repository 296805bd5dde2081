"""Hand-built toy verifiers for transform and pipeline exercises.

The permuted-grid family addresses a proof matrix through per-slot seeded
permutations of the row and column coin parts, which makes neighbor listing
synchronizable by construction: every (slot, shared) combination has exactly
one preimage pair, so neighbor classes all have size q * |shared space|.

The two-query member admits an exact optimum: each coin sequence constrains
the XOR of two proof cells, the constraint graph decomposes into disjoint
cycles, and a cycle is satisfiable exactly when its labels XOR to zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from rectpcp.core import (
    AffineCheck,
    Predicate,
    RandomnessPartition,
    VerifierSpec,
)


def _seeded_perms(rng: random.Random, count: int, size: int) -> list[list[int]]:
    perms = []
    for _ in range(count):
        p = list(range(size))
        rng.shuffle(p)
        perms.append(p)
    return perms


def _invert(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for i, v in enumerate(perm):
        inv[v] = i
    return inv


def permuted_grid_toy(
    r_row: int,
    r_shared_row: int,
    r_shared_col: int,
    q: int,
    seed: int,
    predicate: Predicate,
    name: str = "grid-toy",
    soundness: Optional[Fraction] = None,
) -> VerifierSpec:
    """Planted-RNL table verifier on a 2^r_row x 2^r_row proof matrix.

    Query slot k reads cell (ROW[k][srow][row], COL[k][scol][col]) where the
    inner tables are seeded permutations.  The predicate is a single fixed
    object (so the predicate and parity-check choice are trivially oblivious
    to the coins), and the verifier carries synchronized neighbor-listing
    agents.
    """
    part = RandomnessPartition.binary(r_row, r_row, r_shared_row, r_shared_col)
    ell = 1 << r_row
    rng = random.Random(seed)
    row_perm = [
        _seeded_perms(rng, part.size_shared_row, ell) for _ in range(q)
    ]
    col_perm = [
        _seeded_perms(rng, part.size_shared_col, ell) for _ in range(q)
    ]
    row_inv = [[_invert(p) for p in per_k] for per_k in row_perm]
    col_inv = [[_invert(p) for p in per_k] for per_k in col_perm]

    def query_fn(r_index: int) -> tuple[int, ...]:
        row, col, srow, scol = part.split(r_index)
        return tuple(
            row_perm[k][srow][row] * ell + col_perm[k][scol][col] for k in range(q)
        )

    def row_query_fn(row: int, shared: int) -> tuple[int, ...]:
        srow, _ = part.split_shared(shared)
        return tuple(row_perm[k][srow][row] for k in range(q))

    def col_query_fn(col: int, shared: int) -> tuple[int, ...]:
        _, scol = part.split_shared(shared)
        return tuple(col_perm[k][scol][col] for k in range(q))

    def row_agent(row_idx: int, shared: int, k: int):
        srow, scol = part.split_shared(shared)
        target_row = row_perm[k][srow][row_idx]
        out = []
        self_index = None
        pos = 0
        for kp in range(q):
            for srp in range(part.size_shared_row):
                for scp in range(part.size_shared_col):
                    out.append((row_inv[kp][srp][target_row], srp, kp))
                    if (kp, srp, scp) == (k, srow, scol):
                        self_index = pos
                    pos += 1
        return out, self_index

    def col_agent(col_idx: int, shared: int, k: int):
        srow, scol = part.split_shared(shared)
        target_col = col_perm[k][scol][col_idx]
        out = []
        self_index = None
        pos = 0
        for kp in range(q):
            for srp in range(part.size_shared_row):
                for scp in range(part.size_shared_col):
                    out.append((col_inv[kp][scp][target_col], scp, kp))
                    if (kp, srp, scp) == (k, srow, scol):
                        self_index = pos
                    pos += 1
        return out, self_index

    return VerifierSpec(
        name=name,
        partition=part,
        q=q,
        p=predicate.n_parities,
        proof_len=ell * ell,
        query_fn=query_fn,
        predicate_fn=lambda r: predicate,
        shape=(ell, ell),
        row_query_fn=row_query_fn,
        col_query_fn=col_query_fn,
        row_agent=row_agent,
        col_agent=col_agent,
        soundness=soundness,
        decision_size=1 << predicate.arity,
        metadata={"kind": "grid-toy", "seed": seed},
    )


def xor_predicate(q: int, parity_checks: tuple[AffineCheck, ...], target: int) -> Predicate:
    """Accept iff the XOR of all reads and parity inputs equals target."""
    p = len(parity_checks)

    def fn(y: int) -> int:
        return 1 if (y.bit_count() & 1) == target else 0

    return Predicate.from_function(q, p, fn, parity_checks)


@dataclass(frozen=True)
class CycleToy:
    """Two-query XOR toy with its exact best acceptance probability."""

    verifier: VerifierSpec
    max_acceptance: Fraction
    n_cycles: int
    odd_cycles: int
    satisfying_proofs: int

    @property
    def satisfiable(self) -> bool:
        return self.odd_cycles == 0


def cycle_xor_toy(
    r_row: int,
    seed: int,
    parity_mask: int = 0,
    parity_const: int = 0,
    target: int = 0,
    name: str = "cycle-toy",
) -> CycleToy:
    """q=2 grid toy whose acceptance optimum is computed, not estimated.

    The verifier accepts when read1 XOR read2 XOR parity equals target.
    Every coin sequence gives one 2-variable XOR constraint on proof cells;
    the constraint multigraph is a disjoint union of cycles (both location
    maps are bijections on coins), so the maximum fraction of satisfiable
    constraints is 1 - (#odd-labeled cycles) / #coins, exactly.
    """
    check = AffineCheck(parity_mask, parity_const)
    pred = xor_predicate(2, (check,), target)
    v = permuted_grid_toy(
        r_row, 0, 0, 2, seed, pred, name=name
    )
    part = v.partition
    ell = 1 << r_row
    n_cells = ell * ell
    succ = [0] * n_cells
    label_at = [0] * n_cells
    for r_index in range(part.size):
        row, col, _, _ = part.split(r_index)
        loc1, loc2 = v.query_fn(r_index)
        # Acceptance per coin: pi[loc1] ^ pi[loc2] ^ parity == target.
        g = target ^ check.evaluate(part.oblivious_index(row, col))
        succ[loc1] = loc2
        label_at[loc1] = g
    seen = [False] * n_cells
    n_cycles = odd = 0
    for start in range(n_cells):
        if seen[start]:
            continue
        n_cycles += 1
        acc = 0
        cur = start
        while not seen[cur]:
            seen[cur] = True
            acc ^= label_at[cur]
            cur = succ[cur]
        odd += acc
    max_acc = Fraction(part.size - odd, part.size)
    v.soundness = max_acc
    v.metadata.update({"cycles": n_cycles, "odd_cycles": odd})
    return CycleToy(
        verifier=v,
        max_acceptance=max_acc,
        n_cycles=n_cycles,
        odd_cycles=odd,
        satisfying_proofs=(1 << n_cycles) if odd == 0 else 0,
    )


def cycle_toy_optimal_proof(toy: CycleToy) -> list[int]:
    """A proof attaining the exact optimum (all even cycles satisfied)."""
    v = toy.verifier
    part = v.partition
    n_cells = v.proof_len
    succ = [0] * n_cells
    label_at = [0] * n_cells
    for r_index in range(part.size):
        row, col, _, _ = part.split(r_index)
        loc1, loc2 = v.query_fn(r_index)
        pred = v.predicate_fn(r_index)
        g = pred.parity_values(part.oblivious_index(row, col))[0]
        # Accepting assignments have pi[loc1]^pi[loc2] = g ^ target; the
        # target is baked into the predicate table, recover it by probing.
        target = 0 if pred.evaluate([0, 0], [0]) else 1
        succ[loc1] = loc2
        label_at[loc1] = g ^ target
    proof = [0] * n_cells
    seen = [False] * n_cells
    for start in range(n_cells):
        if seen[start]:
            continue
        cur, val = start, 0
        while not seen[cur]:
            seen[cur] = True
            proof[cur] = val
            val ^= label_at[cur]
            cur = succ[cur]
    return proof


def find_unsat_cycle_toy(
    r_row: int, start_seed: int = 0, max_tries: int = 64
) -> CycleToy:
    """Seeded search for a cycle toy with a nontrivial gap (optimum < 1)."""
    for offset in range(max_tries):
        seed = start_seed + offset
        toy = cycle_xor_toy(
            r_row,
            seed,
            parity_mask=(seed % ((1 << (2 * r_row)) - 1)) + 1,
            parity_const=0,
            target=1,
            name=f"cycle-unsat-{seed}",
        )
        if 0 < toy.max_acceptance < 1:
            return toy
    raise RuntimeError("no gapped toy found in the seed range")


def random_rect_toy(
    seed: int,
    r_row: int,
    r_shared_row: int,
    r_shared_col: int,
    q: int,
    p: int,
    ell: Optional[int] = None,
) -> VerifierSpec:
    """Random rectangular verifier with oblivious predicates, no agents.

    Row and column location components are independent random tables of the
    respective coin parts; the predicate truth table and parity checks are
    drawn per shared value.  Used to exercise the low-rank acceptance path
    against plain emulation.
    """
    part = RandomnessPartition.binary(r_row, r_row, r_shared_row, r_shared_col)
    rng = random.Random(seed)
    if ell is None:
        ell = 1 << r_row
    n_obliv_bits = 2 * r_row
    row_map = {}
    col_map = {}
    for k in range(q):
        for sh in range(part.size_shared):
            for row in range(part.size_row):
                row_map[k, sh, row] = rng.randrange(ell)
            for col in range(part.size_col):
                col_map[k, sh, col] = rng.randrange(ell)
    preds = []
    for sh in range(part.size_shared):
        checks = tuple(
            AffineCheck(rng.getrandbits(n_obliv_bits), rng.getrandbits(1))
            for _ in range(p)
        )
        tt = rng.getrandbits(1 << (q + p))
        preds.append(Predicate(q, p, tt, checks))

    def query_fn(r_index: int) -> tuple[int, ...]:
        row, col, srow, scol = part.split(r_index)
        sh = part.shared_index(srow, scol)
        return tuple(
            row_map[k, sh, row] * ell + col_map[k, sh, col] for k in range(q)
        )

    def row_query_fn(row: int, shared: int) -> tuple[int, ...]:
        return tuple(row_map[k, shared, row] for k in range(q))

    def col_query_fn(col: int, shared: int) -> tuple[int, ...]:
        return tuple(col_map[k, shared, col] for k in range(q))

    def predicate_fn(r_index: int) -> Predicate:
        _, _, srow, scol = part.split(r_index)
        return preds[part.shared_index(srow, scol)]

    return VerifierSpec(
        name=f"random-rect-{seed}",
        partition=part,
        q=q,
        p=p,
        proof_len=ell * ell,
        query_fn=query_fn,
        predicate_fn=predicate_fn,
        shape=(ell, ell),
        row_query_fn=row_query_fn,
        col_query_fn=col_query_fn,
        metadata={"kind": "random-rect", "seed": seed},
    )


def constant_predicate_toy(
    r_row: int, q: int, seed: int, value: int, name: str
) -> VerifierSpec:
    """Grid toy whose predicate is identically ``value`` (0 or 1)."""
    pred = Predicate.constant(q, value)
    return permuted_grid_toy(r_row, 0, 0, q, seed, pred, name=name)
