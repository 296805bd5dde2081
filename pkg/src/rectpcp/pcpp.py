"""Proximity verifiers for circuit valuation, with a Hadamard-based default.

The verifier gets a constraint system explicitly, oracle access to the
claimed input bits, and oracle access to a proof consisting of the linear-
functions encoding of a satisfying wire assignment together with the
encoding of its outer product.  Per coin sequence it runs linearity tests
on both parts, a tensor-consistency test, a random combination of the
constraints evaluated through the encodings, and an input-consistency probe
via self-correction.

Coins index a seeded bank of precomputed test tuples: the verifier is
deterministic given its construction seed, completeness is exact, and the
declared proximity/soundness constants are validated empirically by the
test suite rather than asymptotically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from rectpcp.core import GuardViolation, Predicate

MAX_WIRES = 20
MAX_MATERIALIZED_WIRES = 4


class ConstraintError(Exception):
    pass


@dataclass(frozen=True)
class QuadraticSystem:
    """Constraints of the form z^T Q z + <L, z> + c = 0 over F2 wires.

    ``quad`` masks index flattened wire pairs (i * n_wires + j); ``lin``
    masks index wires.  The first ``n_inputs`` wires are the statement bits.
    """

    n_wires: int
    n_inputs: int
    constraints: tuple[tuple[int, int, int], ...]  # (quad mask, lin mask, const)
    extend_fn: Optional[Callable[[int], int]] = None

    def __post_init__(self) -> None:
        if self.n_wires > MAX_WIRES:
            raise GuardViolation(f"{self.n_wires} wires exceed the guard {MAX_WIRES}")
        if self.n_inputs > self.n_wires:
            raise ConstraintError("more inputs than wires")

    def outer_mask(self, z: int) -> int:
        w = self.n_wires
        out = 0
        for i in range(w):
            if (z >> i) & 1:
                out |= z << (i * w)
        return out

    def satisfied(self, z: int) -> bool:
        zz = self.outer_mask(z)
        for quad, lin, c in self.constraints:
            val = ((quad & zz).bit_count() + (lin & z).bit_count() + c) & 1
            if val:
                return False
        return True

    def extend(self, input_bits: int) -> int:
        """Wire assignment extending the given inputs, when one is known."""
        if self.extend_fn is None:
            raise ConstraintError("no wire-extension rule attached")
        return self.extend_fn(input_bits)

    def satisfying_inputs(self) -> list[int]:
        """Input patterns that extend to satisfying wire assignments."""
        out = []
        for x in range(1 << self.n_inputs):
            try:
                z = self.extend(x)
            except ConstraintError:
                raise
            if self.satisfied(z):
                out.append(x)
        return out


def linear_system(n_inputs: int, equations: Sequence[tuple[int, int]]) -> QuadraticSystem:
    """Purely linear constraints (<L, z> + c = 0) over the input wires alone."""
    constraints = tuple((0, lin, c) for lin, c in equations)
    return QuadraticSystem(
        n_wires=n_inputs,
        n_inputs=n_inputs,
        constraints=constraints,
        extend_fn=lambda x: x,
    )


def system_from_truth_table(truth_table: int, n_inputs: int) -> QuadraticSystem:
    """Constraint system accepting exactly the truth table's 1-inputs.

    Builds the algebraic normal form; monomials of degree three or more get
    chained product wires.  The final constraint pins the ANF sum to 1.
    """
    n = 1 << n_inputs
    # Moebius transform: ANF coefficients over subsets.
    coeffs = [(truth_table >> y) & 1 for y in range(n)]
    step = 1
    while step < n:
        for y in range(n):
            if y & step:
                coeffs[y] ^= coeffs[y ^ step]
        step <<= 1
    monomials = [s for s in range(n) if coeffs[s]]

    wires = n_inputs
    constraints: list[tuple[int, int, int]] = []
    chain_defs: list[tuple[int, int, int]] = []  # (new wire, factor wire a, factor wire b)
    mono_wire: dict[int, int] = {}

    def wire_for(mono: int) -> int:
        """Wire index whose value is the product of the monomial's variables."""
        nonlocal wires
        deg = mono.bit_count()
        if deg == 1:
            return mono.bit_length() - 1
        if mono in mono_wire:
            return mono_wire[mono]
        low = mono & -mono
        rest = mono ^ low
        a = wire_for(rest)
        b = low.bit_length() - 1
        new = wires
        wires += 1
        if new >= MAX_WIRES:
            raise GuardViolation("ANF expansion exceeds the wire guard")
        chain_defs.append((new, a, b))
        mono_wire[mono] = new
        return new

    lin_final = 0
    const_final = 1  # require ANF sum == 1
    quad_final = 0
    w_bound = MAX_WIRES

    deferred: list[int] = []
    for mono in monomials:
        deg = mono.bit_count()
        if deg == 0:
            const_final ^= 1
        elif deg == 1:
            lin_final ^= mono
        elif deg == 2:
            deferred.append(mono)
        else:
            lin_final ^= 1 << wire_for(mono)

    n_wires = wires

    def pair_mask(i: int, j: int) -> int:
        return 1 << (i * n_wires + j)

    for mono in deferred:
        i = (mono & -mono).bit_length() - 1
        j = (mono ^ (mono & -mono)).bit_length() - 1
        quad_final |= pair_mask(i, j)
    for new, a, b in chain_defs:
        constraints.append((pair_mask(a, b), 1 << new, 0))
    constraints.append((quad_final, lin_final, const_final))

    def extend(x: int) -> int:
        z = x
        for new, a, b in chain_defs:
            if ((z >> a) & 1) and ((z >> b) & 1):
                z |= 1 << new
        return z

    return QuadraticSystem(
        n_wires=n_wires,
        n_inputs=n_inputs,
        constraints=tuple(constraints),
        extend_fn=extend,
    )


@dataclass
class PCPPVerifier:
    """A proximity verifier: queries carry an oracle tag.

    ``query_fn`` maps a coin index to ((tag, location), ...) with tag 0 for
    the input oracle and 1 for the proof oracle.  ``predicate_fn`` returns
    the decision predicate over the answers in slot order.
    """

    name: str
    n_coins: int
    q: int
    input_len: int
    proof_len: int
    proximity: Fraction
    soundness: Fraction
    query_fn: Callable[[int], tuple[tuple[int, int], ...]]
    predicate_fn: Callable[[int], Predicate]
    honest_proof: Callable[[Sequence[int]], list[int]]
    decision_size: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def coin_space(self) -> int:
        return 1 << self.n_coins

    def accepts(self, input_bits: Sequence[int], proof: Sequence[int]) -> Fraction:
        """Exact acceptance probability over the coin bank."""
        if len(input_bits) != self.input_len or len(proof) != self.proof_len:
            raise ValueError("oracle lengths disagree with the verifier")
        good = 0
        for r in range(self.coin_space):
            reads = []
            for tag, loc in self.query_fn(r):
                reads.append(proof[loc] if tag else input_bits[loc])
            good += self.predicate_fn(r).evaluate(reads)
        return Fraction(good, self.coin_space)


@dataclass(frozen=True)
class _TestTuple:
    a1: int
    a2: int
    b1: int
    b2: int
    a3: int
    a4: int
    agg_quad: int
    agg_lin: int
    agg_const: int
    i_y: int
    a5: int


def hadamard_pcpp(
    system: QuadraticSystem,
    bank_bits: int = 10,
    seed: int = 0,
    proximity: Fraction = Fraction(1, 4),
    soundness: Fraction = Fraction(3, 4),
) -> PCPPVerifier:
    """Proximity verifier from the quadratic encoding of a wire assignment.

    Proof layout: 2^w linear-encoding cells (cell a holds <a, z>) followed
    by 2^(w*w) outer-product cells (cell B holds z^T B z).  Each coin indexes
    a precomputed test tuple and runs five checks: two linearity triples, a
    tensor-consistency probe, one random constraint combination, and one
    input-consistency probe.  The query count is fixed by the construction
    and does not grow with the circuit.
    """
    w = system.n_wires
    n_y = system.n_inputs
    if n_y == 0:
        raise ConstraintError("need at least one input bit")
    f_len = 1 << w
    g_len = 1 << (w * w)
    rng = random.Random(seed)
    n_constraints = len(system.constraints)
    bank: list[_TestTuple] = []
    for _ in range(1 << bank_bits):
        mask = rng.getrandbits(n_constraints) if n_constraints else 0
        agg_q = agg_l = agg_c = 0
        mm = mask
        while mm:
            i = (mm & -mm).bit_length() - 1
            qd, ln, c = system.constraints[i]
            agg_q ^= qd
            agg_l ^= ln
            agg_c ^= c
            mm &= mm - 1
        bank.append(
            _TestTuple(
                a1=rng.getrandbits(w),
                a2=rng.getrandbits(w),
                b1=rng.getrandbits(w * w),
                b2=rng.getrandbits(w * w),
                a3=rng.getrandbits(w),
                a4=rng.getrandbits(w),
                agg_quad=agg_q,
                agg_lin=agg_l,
                agg_const=agg_c,
                i_y=rng.randrange(n_y),
                a5=rng.getrandbits(w),
            )
        )

    def outer_pair_mask(a: int, b: int) -> int:
        out = 0
        for i in range(w):
            if (a >> i) & 1:
                out |= b << (i * w)
        return out

    def query_fn(r: int) -> tuple[tuple[int, int], ...]:
        t = bank[r]
        f = lambda a: (1, a)
        g = lambda b: (1, f_len + b)
        return (
            f(t.a1),
            f(t.a2),
            f(t.a1 ^ t.a2),
            g(t.b1),
            g(t.b2),
            g(t.b1 ^ t.b2),
            f(t.a3),
            f(t.a4),
            g(outer_pair_mask(t.a3, t.a4)),
            g(t.agg_quad),
            f(t.agg_lin),
            f((1 << t.i_y) ^ t.a5),
            f(t.a5),
            (0, t.i_y),
        )

    q = 14

    def check(y: int, agg_const: int) -> int:
        bit = lambda i: (y >> i) & 1
        if bit(0) ^ bit(1) ^ bit(2):
            return 0
        if bit(3) ^ bit(4) ^ bit(5):
            return 0
        if (bit(6) & bit(7)) ^ bit(8):
            return 0
        if bit(9) ^ bit(10) ^ agg_const:
            return 0
        if bit(11) ^ bit(12) ^ bit(13):
            return 0
        return 1

    preds = [
        Predicate.from_function(q, 0, lambda y, c=c: check(y, c), size=5 * q)
        for c in (0, 1)
    ]

    def predicate_fn(r: int) -> Predicate:
        return preds[bank[r].agg_const]

    def honest_proof(input_bits: Sequence[int]) -> list[int]:
        if w > MAX_MATERIALIZED_WIRES:
            raise GuardViolation(
                f"materializing the outer-product table needs w <= "
                f"{MAX_MATERIALIZED_WIRES}"
            )
        x = 0
        for i, b in enumerate(input_bits[:n_y]):
            if b:
                x |= 1 << i
        z = system.extend(x)
        zz = system.outer_mask(z)
        proof = [ (a & z).bit_count() & 1 for a in range(f_len) ]
        proof.extend((b & zz).bit_count() & 1 for b in range(g_len))
        return proof

    return PCPPVerifier(
        name=f"hadamard-w{w}",
        n_coins=bank_bits,
        q=q,
        input_len=n_y,
        proof_len=f_len + g_len,
        proximity=Fraction(proximity),
        soundness=Fraction(soundness),
        query_fn=query_fn,
        predicate_fn=predicate_fn,
        honest_proof=honest_proof,
        decision_size=5 * q,
        metadata={"wires": w, "constraints": n_constraints, "seed": seed,
                  "bank_bits": bank_bits},
    )
