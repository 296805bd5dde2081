"""End-to-end machinery: exhaustive acceptance, the low-rank acceptance
refuter, membership decisions from guessed factorizations, and rigidity
verdicts on accepted proofs.

The refuter computes a verifier's exact acceptance probability on a proof
given only as a low-rank factorization: per shared-coin value it assembles
one left/right factor pair per query slot (rows of the left factor are the
factorization rows selected by the row-component map; columns of the right
factor likewise), turns each parity check into a rank-3 pair, and feeds the
predicate's Walsh-Hadamard table to the low-rank counting backend.  The
result must equal plain emulation of the product proof, exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from rectpcp.core import (
    GuardViolation,
    VerifierSpec,
    check_rop,
    emulate,
)
from rectpcp.f2 import BitMatrix, BitVector, affine_to_rank3, matmul
from rectpcp.lowrank import acceptance_probability, fourier
from rectpcp.rigidity import distance_to_rank

DECIDE_FACTOR_BITS = 16


def fnp_machine(v: VerifierSpec, proof: Sequence[int]) -> bool:
    """Accept exactly when every coin sequence accepts the proof."""
    return emulate(v, proof) == 1


def _component_maps(v: VerifierSpec):
    """Per-slot row/column component maps from the declared or derived view."""
    if v.shape is None:
        raise GuardViolation("refuter needs a matrix-shaped proof")
    n_cols = v.shape[1]
    part = v.partition

    def row_components(row: int, shared: int) -> tuple[int, ...]:
        if v.row_query_fn is not None:
            return tuple(v.row_query_fn(row, shared))
        srow, scol = part.split_shared(shared)
        locs = v.query_fn(part.join(row, 0, srow, scol))
        return tuple(loc // n_cols for loc in locs)

    def col_components(col: int, shared: int) -> tuple[int, ...]:
        if v.col_query_fn is not None:
            return tuple(v.col_query_fn(col, shared))
        srow, scol = part.split_shared(shared)
        locs = v.query_fn(part.join(0, col, srow, scol))
        return tuple(loc % n_cols for loc in locs)

    return row_components, col_components


def refuter_acceptance(
    v: VerifierSpec, p_mat: BitMatrix, q_mat: BitMatrix, verify_rop: bool = True
) -> Fraction:
    """Exact acceptance probability of the proof p_mat * q_mat, computed
    without materializing per-coin reads.

    Requires a rectangular verifier with oblivious predicates whose shared
    coins are exactly the predicate-choosing coins, binary coins, and equal
    row/column part widths.
    """
    part = v.partition
    if not part.is_binary:
        raise GuardViolation("refuter expects binary coins")
    if v.shape is None or v.shape[0] != v.shape[1]:
        raise GuardViolation("refuter expects a square proof matrix")
    ell = v.shape[0]
    if p_mat.n_rows != ell or q_mat.n_cols != ell:
        raise GuardViolation("factor shapes disagree with the proof matrix")
    if p_mat.n_cols != q_mat.n_rows:
        raise GuardViolation("inner factor dimensions differ")
    if len(part.row) != len(part.col):
        raise GuardViolation("row and column coin widths differ")
    if v.q + v.p > 20:
        raise GuardViolation("reads+parities exceed the decomposition guard")
    if verify_rop:
        res = check_rop(v)
        if not res:
            raise GuardViolation(
                f"predicate is not randomness-oblivious: {res.detail}"
            )

    row_components, col_components = _component_maps(v)
    r_half = len(part.row)
    size_half = part.size_row
    qt = q_mat.transpose()
    total = Fraction(0)
    for shared in range(part.size_shared):
        srow, scol = part.split_shared(shared)
        pred = v.predicate_fn(part.join(0, 0, srow, scol))
        row_maps = [row_components(row, shared) for row in range(size_half)]
        col_maps = [col_components(col, shared) for col in range(size_half)]
        lefts = []
        rights = []
        for k in range(v.q):
            lefts.append(
                BitMatrix(
                    size_half,
                    p_mat.n_cols,
                    tuple(p_mat.rows[row_maps[row][k]] for row in range(size_half)),
                )
            )
            rights.append(
                BitMatrix(
                    size_half,
                    q_mat.n_rows,
                    tuple(qt.rows[col_maps[col][k]] for col in range(size_half)),
                ).transpose()
            )
        for j, checkj in enumerate(pred.parity_checks):
            u = BitVector(r_half, checkj.mask & (size_half - 1))
            w = BitVector(r_half, checkj.mask >> r_half)
            a_j, b_j = affine_to_rank3(r_half, u, w, checkj.const)
            lefts.append(a_j)
            rights.append(b_j)
        table = fourier(pred.truth_table_bits())
        total += acceptance_probability(table, lefts, rights)
    return total / part.size_shared


@dataclass
class DecisionReport:
    accepted: bool
    witness: Optional[tuple[BitMatrix, BitMatrix]]
    best_probability: Fraction
    tried: int

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "best_probability": str(self.best_probability),
            "tried": self.tried,
            "witness_p": list(self.witness[0].rows) if self.witness else None,
            "witness_q": list(self.witness[1].rows) if self.witness else None,
        }


def decide(
    v: VerifierSpec,
    s: Fraction,
    rho: int,
    search: str = "exhaustive",
    budget: int = 1000,
    seed: int = 0,
) -> DecisionReport:
    """Accept when some guessed factorization reaches acceptance >= s."""
    if v.shape is None or v.shape[0] != v.shape[1]:
        raise GuardViolation("decision procedure expects a square proof matrix")
    ell = v.shape[0]
    best = Fraction(0)
    best_pair = None
    tried = 0

    def consider(p_mat: BitMatrix, q_mat: BitMatrix):
        nonlocal best, best_pair, tried
        tried += 1
        prob = refuter_acceptance(v, p_mat, q_mat, verify_rop=False)
        if prob > best or best_pair is None:
            best, best_pair = prob, (p_mat, q_mat)
        return prob

    if search == "exhaustive":
        if ell * rho > DECIDE_FACTOR_BITS:
            raise GuardViolation(
                f"exhaustive mode needs factor payloads of at most "
                f"{DECIDE_FACTOR_BITS} bits"
            )
        for p_bits in range(1 << (ell * rho)):
            p_mat = _unpack(p_bits, ell, rho)
            for q_bits in range(1 << (rho * ell)):
                q_mat = _unpack(q_bits, rho, ell)
                if consider(p_mat, q_mat) >= s:
                    return DecisionReport(True, (p_mat, q_mat), best, tried)
    elif search == "seeded":
        import random

        rng = random.Random(seed)
        for _ in range(budget):
            p_mat = BitMatrix.random(ell, rho, rng)
            q_mat = BitMatrix.random(rho, ell, rng)
            if consider(p_mat, q_mat) >= s:
                return DecisionReport(True, (p_mat, q_mat), best, tried)
    else:
        raise ValueError(f"unknown search mode {search!r}")
    return DecisionReport(False, best_pair, best, tried)


def _unpack(bits: int, rows: int, cols: int) -> BitMatrix:
    mask = (1 << cols) - 1
    return BitMatrix(
        rows, cols, tuple((bits >> (i * cols)) & mask for i in range(rows))
    )


@dataclass
class ExtractionEntry:
    proof_rows: tuple[int, ...]
    distance: int
    threshold: Fraction
    rigid: bool


@dataclass
class ExtractionReport:
    """Accepted proofs with exact rigidity verdicts and the implied dichotomy."""

    ell: int
    rho: int
    threshold: Fraction
    entries: list[ExtractionEntry] = field(default_factory=list)

    @property
    def any_non_rigid(self) -> bool:
        return any(not e.rigid for e in self.entries)

    @property
    def all_rigid(self) -> bool:
        return all(e.rigid for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "rho": self.rho,
            "threshold": str(self.threshold),
            "accepted": len(self.entries),
            "non_rigid": sum(1 for e in self.entries if not e.rigid),
            "entries": [
                {
                    "proof_rows": list(e.proof_rows),
                    "distance": e.distance,
                    "rigid": e.rigid,
                }
                for e in self.entries
            ],
        }


def rigid_extract(v: VerifierSpec, rho: int, s: Optional[Fraction] = None) -> ExtractionReport:
    """Enumerate all proofs, keep the perfectly accepted ones, and measure
    each one's exact distance to the rank-<=rho matrices against the
    threshold (1-s)/q * ell^2."""
    if v.shape is None or v.shape[0] != v.shape[1]:
        raise GuardViolation("extraction expects a square proof matrix")
    ell = v.shape[0]
    if ell > 4:
        raise GuardViolation("extraction enumerates proofs; needs ell <= 4")
    if s is None:
        s = v.soundness
    if s is None:
        raise ValueError("no soundness value declared or supplied")
    threshold = (1 - s) / v.q * ell * ell
    report = ExtractionReport(ell=ell, rho=rho, threshold=threshold)
    n_cells = ell * ell
    for bits in range(1 << n_cells):
        proof = [(bits >> i) & 1 for i in range(n_cells)]
        if not fnp_machine(v, proof):
            continue
        mat = _unpack(bits, ell, ell)
        dist, _, _ = distance_to_rank(mat, rho)
        report.entries.append(
            ExtractionEntry(
                proof_rows=mat.rows,
                distance=dist,
                threshold=threshold,
                rigid=Fraction(dist) > threshold,
            )
        )
    return report


@dataclass
class ParameterReport:
    condition1: bool
    condition2: bool
    lhs1: float
    lhs2: float
    rhs: float
    detail: dict

    @property
    def ok(self) -> bool:
        return self.condition1 and self.condition2

    def to_dict(self) -> dict:
        return {
            "condition1": self.condition1,
            "condition2": self.condition2,
            "lhs1": self.lhs1,
            "lhs2": self.lhs2,
            "rhs": self.rhs,
            "detail": self.detail,
        }


def parameter_check(
    n: int,
    r: float,
    q: float,
    p: float,
    tau: Fraction,
    t: float,
    log2_rho: float,
    omega_constant: float = 1.0,
) -> ParameterReport:
    """Evaluate the two budget inequalities of the membership algorithm.

    All asymptotic constants are explicit inputs (default 1); this is a pure
    calculator and never guesses hidden factors.  ``log2_rho`` carries the
    rank in log form so astronomically large ranks stay representable.
    """
    rhs = n - math.log2(n)
    # log2(t + rho) via the max-plus approximation log2(2^a + 2^b).
    log2_t = math.log2(t) if t > 0 else float("-inf")
    hi, lo = max(log2_t, log2_rho), min(log2_t, log2_rho)
    log2_t_plus_rho = hi + math.log2(1 + 2 ** (lo - hi)) if lo - hi > -60 else hi
    lhs1 = float((1 + tau) / 2) * r + log2_t_plus_rho
    log2_qp_rho = math.log2(q + p) + log2_rho if q + p > 0 else log2_rho
    lhs2 = q + p + r - omega_constant * ((float(1 - tau) * r) / log2_qp_rho)
    return ParameterReport(
        condition1=lhs1 <= rhs,
        condition2=lhs2 <= rhs,
        lhs1=lhs1,
        lhs2=lhs2,
        rhs=rhs,
        detail={
            "n": n,
            "r": r,
            "q": q,
            "p": p,
            "tau": str(tau),
            "t": t,
            "log2_rho": log2_rho,
            "omega_constant": omega_constant,
        },
    )


@dataclass
class PipelineReport:
    """Refuter run summary: per-shared contributions and the final verdict."""

    name: str
    per_shared: list[str]
    acceptance: Fraction
    emulated: Optional[Fraction]
    threshold: Optional[Fraction]
    decision: Optional[bool]
    timings_ns: dict

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": "rectpcp-pipeline-report-v1",
                "name": self.name,
                "per_shared": self.per_shared,
                "acceptance": str(self.acceptance),
                "emulated": str(self.emulated) if self.emulated is not None else None,
                "threshold": str(self.threshold) if self.threshold is not None else None,
                "decision": self.decision,
                "timings_ns": self.timings_ns,
            },
            indent=2,
        )


def run_pipeline(
    v: VerifierSpec,
    p_mat: BitMatrix,
    q_mat: BitMatrix,
    threshold: Optional[Fraction] = None,
    cross_check: bool = True,
) -> PipelineReport:
    """Refuter acceptance with timing breakdown and optional emulation check."""
    import time

    part = v.partition
    timings = {}
    t0 = time.perf_counter_ns()
    per_shared = []
    for shared in range(part.size_shared):
        srow, scol = part.split_shared(shared)
        sub = _single_shared_view(v, srow, scol)
        per_shared.append(str(refuter_acceptance(sub, p_mat, q_mat, verify_rop=False)))
    acceptance = refuter_acceptance(v, p_mat, q_mat, verify_rop=False)
    timings["refuter_ns"] = time.perf_counter_ns() - t0
    emulated = None
    if cross_check:
        t0 = time.perf_counter_ns()
        proof = matmul(p_mat, q_mat).flatten()
        emulated = emulate(v, proof)
        timings["emulate_ns"] = time.perf_counter_ns() - t0
    decision = None
    if threshold is not None:
        decision = acceptance >= threshold
    return PipelineReport(
        name=v.name,
        per_shared=per_shared,
        acceptance=acceptance,
        emulated=emulated,
        threshold=threshold,
        decision=decision,
        timings_ns=timings,
    )


def _single_shared_view(v: VerifierSpec, srow: int, scol: int) -> VerifierSpec:
    """The verifier restricted to one shared-coin value (for reporting)."""
    from rectpcp.core import RandomnessPartition

    part = v.partition
    new_part = RandomnessPartition(part.row, part.col, (), ())

    def query_fn(r_index: int) -> tuple[int, ...]:
        row, col, _, _ = new_part.split(r_index)
        return v.query_fn(part.join(row, col, srow, scol))

    def predicate_fn(r_index: int):
        row, col, _, _ = new_part.split(r_index)
        return v.predicate_fn(part.join(row, col, srow, scol))

    def row_query_fn(row: int, shared: int):
        if v.row_query_fn is None:
            raise GuardViolation("no declared row map")
        return v.row_query_fn(row, part.shared_index(srow, scol))

    def col_query_fn(col: int, shared: int):
        if v.col_query_fn is None:
            raise GuardViolation("no declared column map")
        return v.col_query_fn(col, part.shared_index(srow, scol))

    return VerifierSpec(
        name=f"{v.name}@shared{part.shared_index(srow, scol)}",
        partition=new_part,
        q=v.q,
        p=v.p,
        proof_len=v.proof_len,
        query_fn=query_fn,
        predicate_fn=predicate_fn,
        shape=v.shape,
        row_query_fn=row_query_fn if v.row_query_fn else None,
        col_query_fn=col_query_fn if v.col_query_fn else None,
    )
