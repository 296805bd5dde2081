"""Verifier abstraction, coin-space partitions, and exhaustive checkers.

A verifier maps each coin sequence to query locations and a decision
predicate; the predicate may additionally read affine parity checks of the
row/column ("oblivious") coins.  The coin space is a product of per-digit
radixes laid out as (row | col | shared.row | shared.col); the all-binary
case is the usual bit string.  A coin sequence is represented by its
little-endian mixed-radix index into that product.

The checkers here are definitions run as programs: full enumeration over
the coin space, exact rational probabilities, first counterexample
reported.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

COIN_SPACE_LIMIT = 1 << 24
PREDICATE_ARITY_LIMIT = 20


class GuardViolation(Exception):
    """An enumeration guard was exceeded; exactness would be lost."""


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def _mixed_split(index: int, radixes: Sequence[int]) -> tuple[int, ...]:
    digits = []
    for r in radixes:
        digits.append(index % r)
        index //= r
    return tuple(digits)


def _mixed_join(digits: Sequence[int], radixes: Sequence[int]) -> int:
    index = 0
    for d, r in zip(reversed(digits), reversed(radixes)):
        index = index * r + d
    return index


@dataclass(frozen=True)
class RandomnessPartition:
    """Radix layout of the coin space: (row | col | shared.row | shared.col).

    Coin indexes are little-endian mixed radix over that concatenation, so
    for all-binary radixes digit i is bit i of the index.  The row and
    column parts must address spaces of equal size.
    """

    row: tuple[int, ...]
    col: tuple[int, ...]
    shared_row: tuple[int, ...]
    shared_col: tuple[int, ...]

    def __post_init__(self) -> None:
        for radix in self.row + self.col + self.shared_row + self.shared_col:
            if radix < 2:
                raise ValueError("radixes must be at least 2")
        if self.size_row != self.size_col:
            raise ValueError(
                f"row and column coin spaces differ: {self.size_row} vs {self.size_col}"
            )

    @classmethod
    def binary(cls, r_row: int, r_col: int, r_shared_row: int, r_shared_col: int):
        return cls((2,) * r_row, (2,) * r_col, (2,) * r_shared_row, (2,) * r_shared_col)

    @property
    def size_row(self) -> int:
        return _prod(self.row)

    @property
    def size_col(self) -> int:
        return _prod(self.col)

    @property
    def size_shared_row(self) -> int:
        return _prod(self.shared_row)

    @property
    def size_shared_col(self) -> int:
        return _prod(self.shared_col)

    @property
    def size_shared(self) -> int:
        return self.size_shared_row * self.size_shared_col

    @property
    def size(self) -> int:
        return self.size_row * self.size_col * self.size_shared

    @property
    def is_binary(self) -> bool:
        return all(
            r == 2 for r in self.row + self.col + self.shared_row + self.shared_col
        )

    @property
    def oblivious_is_binary(self) -> bool:
        return all(r == 2 for r in self.row + self.col)

    @property
    def n_coins(self) -> int:
        """Total coin count in bits; defined for all-binary layouts only."""
        if not self.is_binary:
            raise GuardViolation("bit counts are defined for binary coin spaces")
        return len(self.row) + len(self.col) + len(self.shared_row) + len(self.shared_col)

    @property
    def oblivious_bits(self) -> int:
        if not self.oblivious_is_binary:
            raise GuardViolation("oblivious coins are not binary")
        return len(self.row) + len(self.col)

    @property
    def tau(self) -> Fraction:
        """Shared fraction of the randomness, in bits (binary layouts)."""
        n = self.n_coins
        if n == 0:
            return Fraction(0)
        return Fraction(len(self.shared_row) + len(self.shared_col), n)

    def split(self, index: int) -> tuple[int, int, int, int]:
        """Coin index -> (row, col, shared_row, shared_col) part indexes."""
        sr = self.size_row
        sc = self.size_col
        ssr = self.size_shared_row
        row = index % sr
        index //= sr
        col = index % sc
        index //= sc
        srow = index % ssr
        scol = index // ssr
        return row, col, srow, scol

    def join(self, row: int, col: int, srow: int, scol: int) -> int:
        return row + self.size_row * (
            col + self.size_col * (srow + self.size_shared_row * scol)
        )

    def shared_index(self, srow: int, scol: int) -> int:
        return srow + self.size_shared_row * scol

    def split_shared(self, shared: int) -> tuple[int, int]:
        return shared % self.size_shared_row, shared // self.size_shared_row

    def oblivious_index(self, row: int, col: int) -> int:
        """Row and column parts packed as (row | col) bits for parity checks."""
        return row + self.size_row * col

    def digits(self, index: int) -> tuple[int, ...]:
        radixes = self.row + self.col + self.shared_row + self.shared_col
        return _mixed_split(index, radixes)


@dataclass(frozen=True)
class AffineCheck:
    """Affine function of the oblivious (row|col) coin bits.

    ``mask`` selects bits of the packed (row | col) index; ``const`` is the
    constant term (which is where any dependence on the shared coins gets
    folded).
    """

    mask: int
    const: int

    def evaluate(self, oblivious: int) -> int:
        return ((self.mask & oblivious).bit_count() & 1) ^ self.const


@dataclass(frozen=True)
class Predicate:
    """Decision predicate over read bits plus parity-check bits.

    The truth table is packed into an int: input (y_1, ..., y_a) sits at
    index sum(y_i << (i-1)), read bits first and parity bits after.  ``size``
    is gate-count metadata only.
    """

    n_reads: int
    n_parities: int
    truth_table: int
    parity_checks: tuple[AffineCheck, ...] = ()
    size: int = 0

    def __post_init__(self) -> None:
        arity = self.n_reads + self.n_parities
        if arity > PREDICATE_ARITY_LIMIT:
            raise GuardViolation(
                f"predicate arity {arity} exceeds the guard {PREDICATE_ARITY_LIMIT}"
            )
        if len(self.parity_checks) != self.n_parities:
            raise ValueError("one parity check per parity input required")
        if self.truth_table >> (1 << arity):
            raise ValueError("truth table has bits beyond 2^arity")

    @property
    def arity(self) -> int:
        return self.n_reads + self.n_parities

    @classmethod
    def from_function(
        cls,
        n_reads: int,
        n_parities: int,
        fn: Callable[[int], int],
        parity_checks: tuple[AffineCheck, ...] = (),
        size: int = 0,
    ) -> "Predicate":
        arity = n_reads + n_parities
        if arity > PREDICATE_ARITY_LIMIT:
            raise GuardViolation(
                f"predicate arity {arity} exceeds the guard {PREDICATE_ARITY_LIMIT}"
            )
        tt = 0
        for y in range(1 << arity):
            if fn(y):
                tt |= 1 << y
        return cls(n_reads, n_parities, tt, parity_checks, size)

    @classmethod
    def constant(cls, n_reads: int, value: int) -> "Predicate":
        tt = ((1 << (1 << n_reads)) - 1) if value else 0
        return cls(n_reads, 0, tt)

    def evaluate_index(self, y: int) -> int:
        return (self.truth_table >> y) & 1

    def evaluate(self, reads: Sequence[int], parities: Sequence[int] = ()) -> int:
        y = 0
        for i, b in enumerate(reads):
            if b:
                y |= 1 << i
        for j, b in enumerate(parities):
            if b:
                y |= 1 << (self.n_reads + j)
        return (self.truth_table >> y) & 1

    def parity_values(self, oblivious: int) -> tuple[int, ...]:
        return tuple(c.evaluate(oblivious) for c in self.parity_checks)

    def key(self) -> tuple:
        """Structural identity used by the obliviousness checker."""
        return (self.n_reads, self.n_parities, self.truth_table, self.parity_checks)

    def truth_table_bits(self) -> list[int]:
        return [(self.truth_table >> y) & 1 for y in range(1 << self.arity)]

    def accepting_inputs(self) -> list[int]:
        return [y for y in range(1 << self.arity) if (self.truth_table >> y) & 1]


@dataclass(frozen=True)
class Configuration:
    """A (coin index, query slot) pair."""

    r_index: int
    k: int

    def row_configuration(self, part: RandomnessPartition) -> tuple[int, int, int]:
        row, _, srow, scol = part.split(self.r_index)
        return row, part.shared_index(srow, scol), self.k

    def col_configuration(self, part: RandomnessPartition) -> tuple[int, int, int]:
        _, col, srow, scol = part.split(self.r_index)
        return col, part.shared_index(srow, scol), self.k


# Agents take (part index, full shared index, query slot) and return the
# ordered neighbor entries (part', own shared half', slot') plus the index
# of the input configuration within the list.
Agent = Callable[[int, int, int], tuple[list[tuple[int, int, int]], int]]


@dataclass
class VerifierSpec:
    """A verifier as a queryable object: coins in, (locations, predicate) out.

    ``query_fn`` maps a coin index to the q query locations; ``predicate_fn``
    maps a coin index to the Predicate used on those coins (for verifiers
    with randomness-oblivious predicates it only looks at the shared part,
    which is what check_rop verifies).  ``shape`` gives the matrix view
    (rows, cols) of the proof when one exists; locations are then row-major.
    """

    name: str
    partition: RandomnessPartition
    q: int
    p: int
    proof_len: int
    query_fn: Callable[[int], tuple[int, ...]]
    predicate_fn: Callable[[int], Predicate]
    alphabet_bits: int = 1
    shape: Optional[tuple[int, int]] = None
    row_query_fn: Optional[Callable[[int, int], tuple[int, ...]]] = None
    col_query_fn: Optional[Callable[[int, int], tuple[int, ...]]] = None
    row_agent: Optional[Agent] = None
    col_agent: Optional[Agent] = None
    soundness: Optional[Fraction] = None
    robustness: Optional[Fraction] = None
    smooth: bool = False
    decision_size: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.shape is not None and self.shape[0] * self.shape[1] != self.proof_len:
            raise ValueError("shape does not multiply out to the proof length")

    @property
    def coin_space(self) -> int:
        return self.partition.size

    @property
    def ell(self) -> Optional[int]:
        if self.shape is not None and self.shape[0] == self.shape[1]:
            return self.shape[0]
        return None

    def guard_enumeration(self) -> None:
        if self.coin_space > COIN_SPACE_LIMIT:
            raise GuardViolation(
                f"coin space {self.coin_space} exceeds the enumeration guard"
            )

    def configurations(self):
        for r_index in range(self.coin_space):
            for k in range(self.q):
                yield r_index, k

    def location_of(self, r_index: int, k: int) -> int:
        return self.query_fn(r_index)[k]

    def read_bits(self, proof: Sequence[int], locations: Sequence[int]) -> list[int]:
        bits = []
        for loc in locations:
            sym = proof[loc]
            if self.alphabet_bits == 1:
                bits.append(sym & 1)
            else:
                bits.extend((sym >> t) & 1 for t in range(self.alphabet_bits))
        return bits


def symbols_to_bits(symbols: Sequence[int], alphabet_bits: int) -> list[int]:
    out = []
    for s in symbols:
        out.extend((s >> t) & 1 for t in range(alphabet_bits))
    return out


# ---------------------------------------------------------------------------
# Emulation and property checkers
# ---------------------------------------------------------------------------

def emulate(v: VerifierSpec, proof: Sequence[int]) -> Fraction:
    """Exact acceptance probability of the proof over the full coin space."""
    if len(proof) != v.proof_len:
        raise ValueError(f"proof length {len(proof)} != {v.proof_len}")
    v.guard_enumeration()
    part = v.partition
    accepted = 0
    for r_index in range(v.coin_space):
        pred = v.predicate_fn(r_index)
        reads = v.read_bits(proof, v.query_fn(r_index))
        if pred.n_parities:
            row, col, _, _ = part.split(r_index)
            parities = pred.parity_values(part.oblivious_index(row, col))
        else:
            parities = ()
        accepted += pred.evaluate(reads, parities)
    return Fraction(accepted, v.coin_space)


def measure_smoothness(v: VerifierSpec) -> list[Fraction]:
    """Per-location probability of being hit by a uniform (coins, slot) pair."""
    v.guard_enumeration()
    counts = [0] * v.proof_len
    for r_index in range(v.coin_space):
        for loc in v.query_fn(r_index):
            counts[loc] += 1
    total = v.coin_space * v.q
    return [Fraction(c, total) for c in counts]


def is_smooth(v: VerifierSpec) -> bool:
    qs = measure_smoothness(v)
    return len(set(qs)) <= 1


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    counterexample: Optional[tuple] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_rectangular(v: VerifierSpec) -> CheckResult:
    """Row indexes must not move with the column coins, and vice versa.

    Runs the definition directly: for every (shared, slot), the row
    component of each query must be invariant as the column part sweeps its
    range, and symmetrically.  When row/col query functions are declared
    they are cross-checked against the location map as well.
    """
    if v.shape is None:
        raise GuardViolation("rectangularity needs a matrix-shaped proof")
    v.guard_enumeration()
    part = v.partition
    n_cols = v.shape[1]
    for srow in range(part.size_shared_row):
        for scol in range(part.size_shared_col):
            shared = part.shared_index(srow, scol)
            for row in range(part.size_row):
                baseline = None
                for col in range(part.size_col):
                    r_index = part.join(row, col, srow, scol)
                    rows = tuple(loc // n_cols for loc in v.query_fn(r_index))
                    if baseline is None:
                        baseline = rows
                        if v.row_query_fn is not None:
                            declared = tuple(v.row_query_fn(row, shared))
                            if declared != rows:
                                return CheckResult(
                                    False,
                                    (r_index,),
                                    "declared row query function disagrees with locations",
                                )
                    elif rows != baseline:
                        return CheckResult(
                            False,
                            (row, col, srow, scol),
                            f"row components moved with the column part: {baseline} vs {rows}",
                        )
            for col in range(part.size_col):
                baseline = None
                for row in range(part.size_row):
                    r_index = part.join(row, col, srow, scol)
                    cols = tuple(loc % n_cols for loc in v.query_fn(r_index))
                    if baseline is None:
                        baseline = cols
                        if v.col_query_fn is not None:
                            declared = tuple(v.col_query_fn(col, shared))
                            if declared != cols:
                                return CheckResult(
                                    False,
                                    (r_index,),
                                    "declared column query function disagrees with locations",
                                )
                    elif cols != baseline:
                        return CheckResult(
                            False,
                            (row, col, srow, scol),
                            f"column components moved with the row part: {baseline} vs {cols}",
                        )
    return CheckResult(True)


def check_rop(v: VerifierSpec) -> CheckResult:
    """Predicate and parity-check choices must depend only on shared coins."""
    v.guard_enumeration()
    part = v.partition
    for shared in range(part.size_shared):
        srow, scol = part.split_shared(shared)
        baseline = None
        baseline_obliv = None
        for col in range(part.size_col):
            for row in range(part.size_row):
                r_index = part.join(row, col, srow, scol)
                key = v.predicate_fn(r_index).key()
                if baseline is None:
                    baseline = key
                    baseline_obliv = (row, col)
                elif key != baseline:
                    return CheckResult(
                        False,
                        (shared, baseline_obliv, (row, col)),
                        "predicate or parity checks moved with the oblivious coins",
                    )
    return CheckResult(True)


def check_rnl(
    v: VerifierSpec,
    row_agent: Optional[Agent] = None,
    col_agent: Optional[Agent] = None,
) -> CheckResult:
    """Exhaustive neighbor-listing check.

    For every configuration the zipped agent lists must equal the
    brute-force set of configurations hitting the same location, the order
    must agree across all members of a class, and both agents must report
    the correct self-index.
    """
    row_agent = row_agent or v.row_agent
    col_agent = col_agent or v.col_agent
    if row_agent is None or col_agent is None:
        raise ValueError("verifier carries no neighbor-listing agents")
    v.guard_enumeration()
    part = v.partition

    classes: dict[int, list[tuple[int, int]]] = {}
    for r_index in range(v.coin_space):
        for k, loc in enumerate(v.query_fn(r_index)):
            classes.setdefault(loc, []).append((r_index, k))

    def agent_lists(r_index: int, k: int):
        row, col, srow, scol = part.split(r_index)
        shared = part.shared_index(srow, scol)
        l_row, idx_row = row_agent(row, shared, k)
        l_col, idx_col = col_agent(col, shared, k)
        return l_row, l_col, idx_row, idx_col

    for loc, members in classes.items():
        first = members[0]
        can_row, can_col, idx_row, idx_col = agent_lists(*first)
        if len(can_row) != len(can_col):
            return CheckResult(False, first, "agent lists have different lengths")
        merged = []
        for (r_r, sr_r, k_r), (c_c, sc_c, k_c) in zip(can_row, can_col):
            if k_r != k_c:
                return CheckResult(
                    False, first, "entrywise slot values disagree between agents"
                )
            merged.append((part.join(r_r, c_c, sr_r, sc_c), k_r))
        if len(set(merged)) != len(merged):
            return CheckResult(False, first, "duplicate entries in zipped list")
        if set(merged) != set(members):
            return CheckResult(
                False,
                first,
                f"zipped list differs from the brute-force neighbor set of "
                f"location {loc}",
            )
        for r_index, k in members:
            if (r_index, k) == first:
                l_row, l_col, i_r, i_c = can_row, can_col, idx_row, idx_col
            else:
                l_row, l_col, i_r, i_c = agent_lists(r_index, k)
            if l_row != can_row or l_col != can_col:
                return CheckResult(
                    False,
                    (r_index, k),
                    "list order is not synchronized across neighboring configurations",
                )
            if i_r != i_c:
                return CheckResult(
                    False,
                    (r_index, k),
                    f"agents report different self-indices {i_r} vs {i_c}",
                )
            if not 0 <= i_r < len(merged) or merged[i_r] != (r_index, k):
                return CheckResult(
                    False, (r_index, k), f"self-index {i_r} does not point home"
                )
    return CheckResult(True)


@dataclass(frozen=True)
class RobustDistance:
    distance: Fraction
    satisfiable: bool


def robust_distance(v: VerifierSpec, proof: Sequence[int], r_index: int) -> RobustDistance:
    """Relative distance of (reads, parities) to the nearest accepting input.

    An unsatisfiable predicate reports distance 1 with the flag cleared.
    """
    if v.alphabet_bits != 1:
        raise GuardViolation("robust distance is defined over the Boolean alphabet")
    pred = v.predicate_fn(r_index)
    if pred.arity > PREDICATE_ARITY_LIMIT:
        raise GuardViolation("predicate arity exceeds the enumeration guard")
    part = v.partition
    reads = v.read_bits(proof, v.query_fn(r_index))
    row, col, _, _ = part.split(r_index)
    parities = pred.parity_values(part.oblivious_index(row, col))
    word = 0
    for i, b in enumerate(list(reads) + list(parities)):
        if b:
            word |= 1 << i
    best = None
    for y in pred.accepting_inputs():
        d = (y ^ word).bit_count()
        best = d if best is None else min(best, d)
    if best is None:
        return RobustDistance(Fraction(1), False)
    return RobustDistance(Fraction(best, pred.arity), True)


def robust_soundness_error(
    v: VerifierSpec, proof: Sequence[int], rho: Fraction
) -> Fraction:
    """Fraction of coin sequences whose read word is rho-close to accepted."""
    v.guard_enumeration()
    close = 0
    for r_index in range(v.coin_space):
        if robust_distance(v, proof, r_index).distance <= rho:
            close += 1
    return Fraction(close, v.coin_space)


@dataclass(frozen=True)
class ConfigGraph:
    """Bipartite (coins x slots) -> locations multigraph summary."""

    left_degree: int
    right_degrees: tuple[int, ...]

    @property
    def right_regular(self) -> bool:
        return len(set(self.right_degrees)) <= 1


def config_graph(v: VerifierSpec) -> ConfigGraph:
    if v.proof_len == 0:
        raise ValueError("empty proof")
    v.guard_enumeration()
    degrees = [0] * v.proof_len
    for r_index in range(v.coin_space):
        locs = v.query_fn(r_index)
        if len(locs) != v.q:
            raise ValueError(f"coin {r_index} produced {len(locs)} queries, not {v.q}")
        for loc in locs:
            degrees[loc] += 1
    return ConfigGraph(v.q, tuple(degrees))


# ---------------------------------------------------------------------------
# Explicit-table verifiers
# ---------------------------------------------------------------------------

@dataclass
class TableVerifier:
    """A verifier stored as explicit (locations, predicate) tables."""

    name: str
    partition: RandomnessPartition
    q: int
    p: int
    proof_len: int
    queries: list[tuple[int, ...]]
    predicates: list[Predicate]
    alphabet_bits: int = 1
    shape: Optional[tuple[int, int]] = None
    soundness: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if len(self.queries) != self.partition.size:
            raise ValueError("query table must be total over the coin space")
        if len(self.predicates) != self.partition.size:
            raise ValueError("predicate table must be total over the coin space")
        for locs in self.queries:
            if len(locs) != self.q:
                raise ValueError("every coin sequence must issue exactly q queries")
            for loc in locs:
                if not 0 <= loc < self.proof_len:
                    raise ValueError(f"location {loc} out of range")

    def to_spec(self) -> VerifierSpec:
        return VerifierSpec(
            name=self.name,
            partition=self.partition,
            q=self.q,
            p=self.p,
            proof_len=self.proof_len,
            query_fn=lambda r: self.queries[r],
            predicate_fn=lambda r: self.predicates[r],
            alphabet_bits=self.alphabet_bits,
            shape=self.shape,
            soundness=self.soundness,
        )

    def to_json(self) -> str:
        preds = []
        pred_ids: dict[tuple, int] = {}
        pred_refs = []
        for pred in self.predicates:
            key = pred.key()
            if key not in pred_ids:
                pred_ids[key] = len(preds)
                tt_len = ((1 << pred.arity) + 7) >> 3
                preds.append(
                    {
                        "n_reads": pred.n_reads,
                        "n_parities": pred.n_parities,
                        "truth_table": base64.b64encode(
                            pred.truth_table.to_bytes(tt_len, "little")
                        ).decode(),
                        "parity_checks": [
                            {"mask": c.mask, "const": c.const} for c in pred.parity_checks
                        ],
                        "size": pred.size,
                    }
                )
            pred_refs.append(pred_ids[key])
        query_words = []
        for locs in self.queries:
            query_words.extend(locs)
        query_bytes = b"".join(w.to_bytes(4, "little") for w in query_words)
        doc = {
            "format": "rectpcp-table-verifier",
            "version": 1,
            "name": self.name,
            "partition": {
                "row": list(self.partition.row),
                "col": list(self.partition.col),
                "shared_row": list(self.partition.shared_row),
                "shared_col": list(self.partition.shared_col),
            },
            "q": self.q,
            "p": self.p,
            "proof_len": self.proof_len,
            "alphabet_bits": self.alphabet_bits,
            "shape": list(self.shape) if self.shape else None,
            "soundness": [self.soundness.numerator, self.soundness.denominator]
            if self.soundness is not None
            else None,
            "queries_b64": base64.b64encode(query_bytes).decode(),
            "predicates": preds,
            "predicate_refs": pred_refs,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TableVerifier":
        doc = json.loads(text)
        if doc.get("format") != "rectpcp-table-verifier":
            raise ValueError("not a table-verifier document")
        part = RandomnessPartition(
            tuple(doc["partition"]["row"]),
            tuple(doc["partition"]["col"]),
            tuple(doc["partition"]["shared_row"]),
            tuple(doc["partition"]["shared_col"]),
        )
        q = doc["q"]
        raw = base64.b64decode(doc["queries_b64"])
        words = [
            int.from_bytes(raw[i : i + 4], "little") for i in range(0, len(raw), 4)
        ]
        queries = [
            tuple(words[i * q : (i + 1) * q]) for i in range(part.size)
        ]
        preds = []
        for p in doc["predicates"]:
            tt = int.from_bytes(base64.b64decode(p["truth_table"]), "little")
            preds.append(
                Predicate(
                    p["n_reads"],
                    p["n_parities"],
                    tt,
                    tuple(AffineCheck(c["mask"], c["const"]) for c in p["parity_checks"]),
                    p.get("size", 0),
                )
            )
        predicates = [preds[i] for i in doc["predicate_refs"]]
        soundness = None
        if doc.get("soundness"):
            soundness = Fraction(doc["soundness"][0], doc["soundness"][1])
        return cls(
            name=doc["name"],
            partition=part,
            q=q,
            p=doc["p"],
            proof_len=doc["proof_len"],
            queries=queries,
            predicates=predicates,
            alphabet_bits=doc.get("alphabet_bits", 1),
            shape=tuple(doc["shape"]) if doc.get("shape") else None,
            soundness=soundness,
        )


def tabulate(v: VerifierSpec) -> TableVerifier:
    """Materialize a spec into explicit tables (enumeration guard applies)."""
    v.guard_enumeration()
    return TableVerifier(
        name=v.name,
        partition=v.partition,
        q=v.q,
        p=v.p,
        proof_len=v.proof_len,
        queries=[tuple(v.query_fn(r)) for r in range(v.coin_space)],
        predicates=[v.predicate_fn(r) for r in range(v.coin_space)],
        alphabet_bits=v.alphabet_bits,
        shape=v.shape,
        soundness=v.soundness,
    )
