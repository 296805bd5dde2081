"""Small finite fields and direction sets of verified bias.

Fields of order up to 256 (prime or prime power) are built as explicit
add/mul tables and their axioms are checked exhaustively at construction.

A direction set lives in {1} x F^(m-1): the first coordinate is pinned, so
bias is measured against the additive characters of the free coordinates.
Character sums are evaluated exactly: over characteristic 2 they are signed
counts, over characteristic 3 the squared magnitude of a Z[omega] sum is an
integer quadratic form in the residue counts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

BIAS_UNIVERSE_LIMIT = 10 ** 6


class FieldError(Exception):
    pass


class UnsupportedField(FieldError):
    pass


class BiasBudgetExhausted(Exception):
    """Greedy growth hit the candidate budget before reaching the target."""


def _factor_prime_power(n: int) -> tuple[int, int]:
    if n < 2:
        raise FieldError("field order must be at least 2")
    for p in range(2, n + 1):
        if n % p == 0:
            k = 0
            m = n
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise FieldError(f"{n} is not a prime power")
            return p, k
    raise FieldError(f"{n} is not a prime power")


def _poly_mul_mod(a: int, b: int, modulus: tuple[int, ...], p: int, k: int) -> int:
    # Polynomials as base-p digit strings packed into ints (digit i = coeff of X^i).
    da = _digits(a, p, 2 * k)
    db = _digits(b, p, 2 * k)
    prod = [0] * (2 * k)
    for i, ca in enumerate(da):
        if ca == 0:
            continue
        for j, cb in enumerate(db):
            if cb:
                prod[i + j] = (prod[i + j] + ca * cb) % p
    for i in range(2 * k - 1, k - 1, -1):
        c = prod[i]
        if c == 0:
            continue
        prod[i] = 0
        for j, mc in enumerate(modulus[:-1]):
            prod[i - k + j] = (prod[i - k + j] - c * mc) % p
    return _undigits(prod[:k], p)


def _digits(x: int, p: int, width: int) -> list[int]:
    out = []
    for _ in range(width):
        out.append(x % p)
        x //= p
    return out


def _undigits(ds: Sequence[int], p: int) -> int:
    x = 0
    for d in reversed(ds):
        x = x * p + d
    return x


def _find_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Monic irreducible polynomial of degree k over F_p, as a coeff tuple."""
    if k == 1:
        return (0, 1)
    count = p ** k
    for tail in range(count):
        coeffs = tuple(_digits(tail, p, k)) + (1,)
        if _is_irreducible(coeffs, p, k):
            return coeffs
    raise FieldError("no irreducible polynomial found")  # pragma: no cover


def _is_irreducible(coeffs: tuple[int, ...], p: int, k: int) -> bool:
    # Trial division by all monic polynomials of degree 1..k//2.
    for deg in range(1, k // 2 + 1):
        for tail in range(p ** deg):
            div = tuple(_digits(tail, p, deg)) + (1,)
            if _poly_divides(div, coeffs, p):
                return False
    return True


def _poly_divides(div: tuple[int, ...], poly: tuple[int, ...], p: int) -> bool:
    rem = list(poly)
    dd = len(div) - 1
    for i in range(len(rem) - 1, dd - 1, -1):
        c = rem[i]
        if c == 0:
            continue
        for j in range(dd + 1):
            rem[i - dd + j] = (rem[i - dd + j] - c * div[j]) % p
    return not any(rem)


_field_cache: dict[int, "FiniteField"] = {}


@dataclass(frozen=True, eq=False)
class FiniteField:
    """Table-backed field of order p^k <= 256, axioms checked exhaustively."""

    order: int
    char: int
    degree: int
    add_table: tuple[tuple[int, ...], ...]
    mul_table: tuple[tuple[int, ...], ...]
    inv_table: tuple[int, ...]
    neg_table: tuple[int, ...]
    trace_table: tuple[int, ...]

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.inv_table[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def trace(self, a: int) -> int:
        """F_p-linear trace down to the prime subfield, as 0..char-1."""
        return self.trace_table[a]

    def vector_add(self, xs: Sequence[int], ys: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.add(a, b) for a, b in zip(xs, ys))

    def scalar_mul(self, t: int, xs: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.mul(t, a) for a in xs)

    def dot(self, xs: Sequence[int], ys: Sequence[int]) -> int:
        acc = 0
        for a, b in zip(xs, ys):
            acc = self.add(acc, self.mul(a, b))
        return acc


def finite_field(order: int) -> FiniteField:
    """Construct (and cache) the field of the given order."""
    if order in _field_cache:
        return _field_cache[order]
    if order > 256:
        raise UnsupportedField("fields beyond order 256 are out of range")
    p, k = _factor_prime_power(order)
    n = order
    if k == 1:
        add = np.fromfunction(lambda a, b: (a + b) % p, (n, n), dtype=np.int64)
        mul = np.fromfunction(lambda a, b: (a * b) % p, (n, n), dtype=np.int64)
    else:
        modulus = _find_irreducible(p, k)
        add = np.zeros((n, n), dtype=np.int64)
        mul = np.zeros((n, n), dtype=np.int64)
        for a in range(n):
            da = _digits(a, p, k)
            for b in range(n):
                db = _digits(b, p, k)
                add[a, b] = _undigits([(x + y) % p for x, y in zip(da, db)], p)
                mul[a, b] = _poly_mul_mod(a, b, modulus, p, k)
    add = add.astype(np.int16)
    mul = mul.astype(np.int16)
    _verify_field_axioms(add, mul, n)
    neg = tuple(int(np.where(add[a] == 0)[0][0]) for a in range(n))
    inv = [0] * n
    for a in range(1, n):
        inv[a] = int(np.where(mul[a] == 1)[0][0])
    trace = []
    for a in range(n):
        t = 0
        x = a
        for _ in range(k):
            t = int(add[t, x])
            y = x
            for _ in range(p - 1):
                y = int(mul[y, x])
            x = y  # x^p
        trace.append(t)
    add_rows = tuple(tuple(int(v) for v in row) for row in add)
    mul_rows = tuple(tuple(int(v) for v in row) for row in mul)
    field = FiniteField(n, p, k, add_rows, mul_rows, tuple(inv), neg, tuple(trace))
    _field_cache[order] = field
    return field


def _verify_field_axioms(add: np.ndarray, mul: np.ndarray, n: int) -> None:
    idx = np.arange(n)
    if not np.array_equal(add, add.T) or not np.array_equal(mul, mul.T):
        raise FieldError("commutativity fails")
    if not np.array_equal(add[0], idx) or not np.array_equal(mul[1], idx):
        raise FieldError("identities fail")
    if not np.array_equal(mul[0], np.zeros(n, dtype=mul.dtype)):
        raise FieldError("zero absorption fails")
    # Associativity: T[T[a,b],c] == T[a,T[b,c]] via fancy indexing.
    for table in (add, mul):
        left = table[table]            # [a,b,c] -> T[T[a,b],c]
        right = table[:, table]        # [a,b,c] -> T[a,T[b,c]]
        if not np.array_equal(left, right):
            raise FieldError("associativity fails")
    # Distributivity: a*(b+c) == a*b + a*c.
    lhs = mul[:, add]                  # [a,b,c] -> mul[a, add[b,c]]
    rhs = add[mul[:, :, None], mul[:, None, :]]
    if not np.array_equal(lhs, rhs):
        raise FieldError("distributivity fails")
    for a in range(1, n):
        if 1 not in mul[a]:
            raise FieldError(f"{a} has no inverse")


# ---------------------------------------------------------------------------
# Direction sets with verified bias
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BiasedSet:
    """Directions in {1} x F^(m-1) whose free-coordinate bias is certified.

    ``elements`` may repeat (padding keeps the size a power of two so the
    index digit splits cleanly between the shared coin halves); the bias is
    verified on the multiset.  ``verified_bias_sq`` is the exact squared
    bias, a rational; the contract is verified_bias_sq <= lambda^2.
    """

    field_order: int
    dimension: int
    lam: Fraction
    elements: tuple[tuple[int, ...], ...]
    verified_bias_sq: Fraction

    def __post_init__(self) -> None:
        for y in self.elements:
            if len(y) != self.dimension:
                raise ValueError("element dimension mismatch")
            if y[0] != 1:
                raise ValueError("all directions must have first coordinate 1")
        if self.verified_bias_sq > self.lam * self.lam:
            raise ValueError("verified bias exceeds the target")

    def __len__(self) -> int:
        return len(self.elements)


def _characters(field: FiniteField, free_dim: int):
    """All nontrivial characters of F^free_dim, as coefficient tuples."""
    n = field.order
    total = n ** free_dim
    for a_idx in range(1, total):
        yield tuple(_digits(a_idx, n, free_dim))


def _char_residue(field: FiniteField, a: tuple[int, ...], free: tuple[int, ...]) -> int:
    """Trace of <a, free> down to Z_char; the character is omega^residue."""
    return field.trace(field.dot(a, free))


def exact_bias_sq(field: FiniteField, elements: Sequence[tuple[int, ...]]) -> Fraction:
    """Exact squared bias of a multiset of directions over the free coordinates.

    Only characteristics 2 and 3 admit an exact rational form; other
    characteristics raise UnsupportedField.
    """
    if not elements:
        raise ValueError("empty direction set")
    free_dim = len(elements[0]) - 1
    if field.order ** (free_dim + 1) > BIAS_UNIVERSE_LIMIT:
        raise ValueError("universe exceeds the exact-bias guard")
    p = field.char
    if p not in (2, 3):
        raise UnsupportedField(
            "exact bias verification covers characteristics 2 and 3"
        )
    size = len(elements)
    worst = Fraction(0)
    frees = [tuple(y[1:]) for y in elements]
    for a in _characters(field, free_dim):
        counts = [0] * p
        for f in frees:
            counts[_char_residue(field, a, f)] += 1
        if p == 2:
            mag_sq = (counts[0] - counts[1]) ** 2
        else:
            c0, c1, c2 = counts
            mag_sq = c0 * c0 + c1 * c1 + c2 * c2 - c0 * c1 - c1 * c2 - c0 * c2
        worst = max(worst, Fraction(mag_sq, size * size))
    return worst


def _next_pow2(x: int) -> int:
    return 1 << (x - 1).bit_length() if x > 1 else 1


def build_biased_set(
    field: FiniteField,
    m: int,
    lam: Fraction,
    seed: int = 0,
    budget: int = 4096,
    pad_to_pow2: bool = True,
) -> BiasedSet:
    """Greedy seeded direction set with exactly verified bias at most lam.

    Candidates are drawn from {1} x F^(m-1).  After each greedy extension
    the set is padded (by repetition) to a power-of-two size and the padded
    multiset's exact bias is tested; the verified object is what callers
    index into.
    """
    lam = Fraction(lam)
    if m < 2:
        raise ValueError("need at least one free coordinate")
    if field.order ** m > BIAS_UNIVERSE_LIMIT:
        raise ValueError("universe exceeds the exact-bias guard")
    rng = random.Random(seed)
    n = field.order
    universe = [
        (1,) + tuple(_digits(i, n, m - 1)) for i in range(n ** (m - 1))
    ]
    chars = list(_characters(field, m - 1))
    p = field.char
    if p not in (2, 3):
        raise UnsupportedField(
            "exact bias verification covers characteristics 2 and 3"
        )
    # residue[a][candidate] tables let greedy evaluation stay incremental.
    residues = [
        [_char_residue(field, a, y[1:]) for y in universe] for a in chars
    ]
    counts = [[0] * p for _ in chars]
    chosen: list[int] = []

    def mag_sq(c: list[int]) -> int:
        if p == 2:
            return (c[0] - c[1]) ** 2
        return (
            c[0] * c[0] + c[1] * c[1] + c[2] * c[2]
            - c[0] * c[1] - c[1] * c[2] - c[0] * c[2]
        )

    def padded(members: list[int]) -> list[int]:
        if not pad_to_pow2 or not members:
            return list(members)
        target = _next_pow2(len(members))
        out = list(members)
        i = 0
        while len(out) < target:
            out.append(members[i % len(members)])
            i += 1
        return out

    lam_sq = lam * lam
    attempts = 0
    while attempts < budget:
        pad = padded(chosen)
        if pad:
            pad_counts = [[0] * p for _ in chars]
            for idx in pad:
                for ai in range(len(chars)):
                    pad_counts[ai][residues[ai][idx]] += 1
            worst = max(
                Fraction(mag_sq(c), len(pad) * len(pad)) for c in pad_counts
            )
            if worst <= lam_sq:
                elements = tuple(universe[i] for i in pad)
                return BiasedSet(field.order, m, lam, elements, worst)
        # Greedy step: the candidate minimizing the worst post-add magnitude.
        sample = rng.sample(range(len(universe)), min(len(universe), 64))
        best_idx, best_score = None, None
        for cand in sample:
            score = 0
            for ai in range(len(chars)):
                c = list(counts[ai])
                c[residues[ai][cand]] += 1
                score = max(score, mag_sq(c))
            if best_score is None or score < best_score:
                best_idx, best_score = cand, score
        chosen.append(best_idx)
        for ai in range(len(chars)):
            counts[ai][residues[ai][best_idx]] += 1
        attempts += 1
    raise BiasBudgetExhausted(
        f"could not certify bias <= {lam} within {budget} extensions"
    )
