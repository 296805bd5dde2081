"""Concrete verifiers: the linearity tester and the line-based query pattern.

The linearity tester reads a function table at x, y, x+y and accepts when
the three values XOR to zero; splitting each of x and y into halves makes
it perfectly rectangular.

The line pattern queries four lines' worth of points per coin sequence: a
first-axis-parallel line, a pseudorandom line with direction drawn from a
small-bias set, and the cyclic shift of both.  Its coin space is laid out
so that neighbor listing is rectangular: given a target point, every
(direction index, shift bit, line-type bit) triple determines a unique
position parameter, and each agent can reconstruct its own coordinate
slice of the implied intercept.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

from rectpcp.core import (
    COIN_SPACE_LIMIT,
    GuardViolation,
    Predicate,
    RandomnessPartition,
    VerifierSpec,
)
from rectpcp.fields import BiasedSet, FiniteField

# ---------------------------------------------------------------------------
# Linearity tester
# ---------------------------------------------------------------------------


def blr_verifier(m: int) -> VerifierSpec:
    """Three-query linearity tester on f: {0,1}^m -> {0,1}, m even.

    The proof is the function table arranged as a 2^(m/2) x 2^(m/2) matrix:
    a point's row is its low half, its column the high half.  Coins are a
    pair (x, y); the row part carries both low halves, the column part both
    high halves, and nothing is shared.
    """
    if m % 2 or not 2 <= m <= 20:
        raise ValueError("m must be even with 2 <= m <= 20")
    h = m // 2
    ell = 1 << h
    low_mask = ell - 1
    part = RandomnessPartition.binary(m, m, 0, 0)

    def split_parts(r_index: int) -> tuple[int, int]:
        row, col, _, _ = part.split(r_index)
        x = (row & low_mask) | ((col & low_mask) << h)
        y = ((row >> h) & low_mask) | (((col >> h) & low_mask) << h)
        return x, y

    def loc(z: int) -> int:
        return (z & low_mask) * ell + (z >> h)

    def query_fn(r_index: int) -> tuple[int, ...]:
        x, y = split_parts(r_index)
        return (loc(x), loc(y), loc(x ^ y))

    def row_query_fn(row: int, shared: int) -> tuple[int, ...]:
        xl = row & low_mask
        yl = row >> h
        return (xl, yl, xl ^ yl)

    def col_query_fn(col: int, shared: int) -> tuple[int, ...]:
        xh = col & low_mask
        yh = col >> h
        return (xh, yh, xh ^ yh)

    pred = Predicate.from_function(3, 0, lambda v: 1 if (v ^ (v >> 1) ^ (v >> 2)) & 1 == 0 else 0)

    return VerifierSpec(
        name=f"blr-m{m}",
        partition=part,
        q=3,
        p=0,
        proof_len=ell * ell,
        query_fn=query_fn,
        predicate_fn=lambda r: pred,
        shape=(ell, ell),
        row_query_fn=row_query_fn,
        col_query_fn=col_query_fn,
        decision_size=3,
        metadata={"kind": "blr", "m": m},
    )


def blr_proof_from_function(m: int, f: Callable[[int], int]) -> list[int]:
    """Function table laid out in the tester's matrix order."""
    h = m // 2
    ell = 1 << h
    low_mask = ell - 1
    proof = [0] * (ell * ell)
    for z in range(1 << m):
        proof[(z & low_mask) * ell + (z >> h)] = f(z) & 1
    return proof


def linear_function(m: int, a: int, c: int = 0) -> Callable[[int], int]:
    return lambda z: ((z & a).bit_count() & 1) ^ c


# ---------------------------------------------------------------------------
# Line-based query pattern
# ---------------------------------------------------------------------------


def _field_radixes(field: FiniteField) -> tuple[int, ...]:
    """Coin digits for one field element: bits when the order is a power of two."""
    n = field.order
    if n & (n - 1) == 0:
        return (2,) * (n.bit_length() - 1)
    return (n,)


def _decode_group(digits: Sequence[int], radixes: Sequence[int]) -> int:
    value = 0
    for d, r in zip(reversed(digits), reversed(radixes)):
        value = value * r + d
    return value


def _encode_group(value: int, radixes: Sequence[int]) -> list[int]:
    out = []
    for r in radixes:
        out.append(value % r)
        value //= r
    return out


@dataclass(frozen=True)
class LineQuery:
    """Query index decomposition: (shift bit, line-type bit, position)."""

    b1: int
    b2: int
    t: int


class LinePattern:
    """Internal geometry shared by the verifier and its listing agents."""

    def __init__(self, field: FiniteField, m: int, biased: BiasedSet):
        if m % 2 == 0:
            raise ValueError("m must be odd")
        if m < 7:
            raise ValueError(
                "m must be at least 7: smaller odd m leaves the row or column "
                "coordinate ranges empty"
            )
        if biased.field_order != field.order or biased.dimension != m:
            raise ValueError("direction set does not match the field and dimension")
        self.field = field
        self.m = m
        self.biased = biased
        self.n_dirs = len(biased)
        # 1-based coordinate classes; coordinate 1 is pinned to zero.
        self.row_coords = list(range(3, (m - 1) // 2 + 1))
        self.col_coords = list(range((m + 5) // 2, m))
        self.shared_row_coords = [2, (m + 1) // 2]
        self.shared_col_coords = [(m + 3) // 2, m]
        fr = _field_radixes(field)
        self.coord_radixes = fr
        # Direction-index digits, split near the midpoint across the halves.
        if self.n_dirs & (self.n_dirs - 1) == 0 and self.n_dirs > 1:
            b = self.n_dirs.bit_length() - 1
            h = (b + 1) // 2
            self.dir_radixes_row: tuple[int, ...] = (2,) * h
            self.dir_radixes_col: tuple[int, ...] = (2,) * (b - h)
        elif self.n_dirs == 1:
            self.dir_radixes_row = ()
            self.dir_radixes_col = ()
        else:
            self.dir_radixes_row = (self.n_dirs,)
            self.dir_radixes_col = ()
        self.partition = RandomnessPartition(
            row=fr * len(self.row_coords),
            col=fr * len(self.col_coords),
            shared_row=fr * len(self.shared_row_coords) + self.dir_radixes_row,
            shared_col=fr * len(self.shared_col_coords) + self.dir_radixes_col,
        )
        self.q = 4 * field.order
        self.proof_len = field.order ** m
        self.e1 = (1,) + (0,) * (m - 1)

        self.size_dir_row = 1
        for r in self.dir_radixes_row:
            self.size_dir_row *= r

    # -- coin decoding ------------------------------------------------------
    # Digit groups per coordinate span [field order] exactly, so part
    # indexes decompose as base-order integers with the direction digits on
    # top; all conversions below are plain mixed-base arithmetic.

    def _coords_from_part(self, index: int, coords: list[int]) -> dict[int, int]:
        n = self.field.order
        out = {}
        for c in coords:
            out[c] = index % n
            index //= n
        return out

    def _shared_decode(self, shared: int) -> tuple[dict[int, int], int]:
        part = self.partition
        srow = shared % part.size_shared_row
        scol = shared // part.size_shared_row
        n = self.field.order
        coords = {}
        for c in self.shared_row_coords:
            coords[c] = srow % n
            srow //= n
        dir_low = srow
        for c in self.shared_col_coords:
            coords[c] = scol % n
            scol //= n
        dir_high = scol
        return coords, dir_low + self.size_dir_row * dir_high

    def _shared_row_encode(self, coords: dict[int, int], e_y: int) -> int:
        n = self.field.order
        srow = e_y % self.size_dir_row
        for c in reversed(self.shared_row_coords):
            srow = srow * n + coords[c]
        return srow

    def _shared_col_encode(self, coords: dict[int, int], e_y: int) -> int:
        n = self.field.order
        scol = e_y // self.size_dir_row
        for c in reversed(self.shared_col_coords):
            scol = scol * n + coords[c]
        return scol

    def _part_encode(self, coords: dict[int, int], coord_list: list[int]) -> int:
        n = self.field.order
        index = 0
        for c in reversed(coord_list):
            index = index * n + coords[c]
        return index

    def intercept(self, r_index: int) -> tuple[tuple[int, ...], int]:
        """Coin index -> (the point x with x_1 = 0, direction index)."""
        row, col, srow, scol = self.partition.split(r_index)
        coords = self._coords_from_part(row, self.row_coords)
        coords.update(self._coords_from_part(col, self.col_coords))
        sh_coords, e_y = self._shared_decode(self.partition.shared_index(srow, scol))
        coords.update(sh_coords)
        x = [0] * self.m
        for c, val in coords.items():
            x[c - 1] = val
        return tuple(x), e_y

    # -- geometry -----------------------------------------------------------

    def key_of(self, k: int) -> LineQuery:
        f = self.field.order
        return LineQuery(b1=k // (2 * f), b2=(k // f) % 2, t=k % f)

    def key_index(self, b1: int, b2: int, t: int) -> int:
        f = self.field.order
        return b1 * 2 * f + b2 * f + t

    def direction(self, b2: int, e_y: int) -> tuple[int, ...]:
        return self.e1 if b2 == 0 else self.biased.elements[e_y]

    def point_on_line(self, x: Sequence[int], e_y: int, k: int) -> tuple[int, ...]:
        kq = self.key_of(k)
        y = self.direction(kq.b2, e_y)
        fld = self.field
        z = tuple(fld.add(a, fld.mul(kq.t, b)) for a, b in zip(x, y))
        if kq.b1:
            z = z[1:] + z[:1]
        return z

    def point_index(self, z: Sequence[int]) -> int:
        idx = 0
        for v in reversed(z):
            idx = idx * self.field.order + v
        return idx


def line_query_pattern(
    field: FiniteField,
    m: int,
    biased: BiasedSet,
    alphabet_bits: int = 1,
) -> VerifierSpec:
    """Query pattern of the line verifier; the predicate is pluggable and
    defaults to the tautology (downstream property checks are query-only).
    """
    pat = LinePattern(field, m, biased)
    if pat.partition.size > COIN_SPACE_LIMIT:
        raise GuardViolation("coin space exceeds the enumeration budget")

    def query_fn(r_index: int) -> tuple[int, ...]:
        x, e_y = pat.intercept(r_index)
        return tuple(
            pat.point_index(pat.point_on_line(x, e_y, k)) for k in range(pat.q)
        )

    n_read_bits = pat.q * alphabet_bits
    if n_read_bits <= 20:
        taut = Predicate.constant(n_read_bits, 1)

        def predicate_fn(r_index: int) -> Predicate:
            return taut

    else:
        def predicate_fn(r_index: int) -> Predicate:
            raise GuardViolation(
                "tautology predicate table too large; plug a real predicate"
            )

    spec = VerifierSpec(
        name=f"line-F{field.order}-m{m}",
        partition=pat.partition,
        q=pat.q,
        p=0,
        proof_len=pat.proof_len,
        query_fn=query_fn,
        predicate_fn=predicate_fn,
        alphabet_bits=alphabet_bits,
        shape=None,
        metadata={
            "kind": "line",
            "field": field.order,
            "m": m,
            "directions": len(biased),
            "_pattern": pat,
        },
    )
    row_agent, col_agent = line_rnl_agents(spec, pat)
    spec.row_agent = row_agent
    spec.col_agent = col_agent
    return spec


def line_rnl_agents(spec: VerifierSpec, pat: Optional[LinePattern] = None):
    """Row and column neighbor-listing agents for a line-pattern verifier.

    Both agents enumerate every (direction index, shift bit, line-type bit)
    triple; the target point forces a unique position parameter in each, so
    the lists have length 4 * |directions| for every configuration, are
    sorted by (direction index, query slot), and the implied intercept's
    row (resp. column) coordinates are computable from the agent's own
    side of the coins.
    """
    if pat is None:
        pat = spec.metadata.get("_pattern")
    if pat is None:
        raise ValueError("line pattern object unavailable")
    fld = pat.field
    m = pat.m
    row_own = pat.row_coords + pat.shared_row_coords
    col_own = pat.col_coords + pat.shared_col_coords

    def _known_z(coords: dict[int, int], e_y: int, k: int):
        kq = pat.key_of(k)
        y = pat.direction(kq.b2, e_y)
        z = {1: fld.mul(kq.t, y[0])}
        for c, xv in coords.items():
            z[c] = fld.add(xv, fld.mul(kq.t, y[c - 1]))
        return z, kq.b1

    # The listed entries depend only on the shift bit and the agent's view
    # of the queried point, so they are computed once per such anchor.
    def _entry_builder(own_coords, encode_entry):
        cache: dict[tuple, tuple] = {}

        def build(z: dict[int, int], b1: int):
            key = (b1,) + tuple(sorted(z.items()))
            hit = cache.get(key)
            if hit is not None:
                return hit

            def z_at(i: int) -> int:
                return z[(i - 1) % m + 1]

            raw = []
            for e2 in range(pat.n_dirs):
                for b1p in (0, 1):
                    d = b1 - b1p
                    w1 = z_at(1 + d)
                    for b2p in (0, 1):
                        yp = pat.direction(b2p, e2)
                        tp = fld.div(w1, yp[0])
                        xp = {
                            i: fld.sub(z_at(i + d), fld.mul(tp, yp[i - 1]))
                            for i in own_coords
                        }
                        raw.append((e2, pat.key_index(b1p, b2p, tp), xp))
            raw.sort(key=lambda e: (e[0], e[1]))
            entries = [encode_entry(e2, kp, xp) for e2, kp, xp in raw]
            positions = {(e2, kp): pos for pos, (e2, kp, _) in enumerate(raw)}
            result = (entries, positions)
            cache[key] = result
            return result

        return build

    def _row_entry(e2: int, kp: int, xp: dict[int, int]) -> tuple[int, int, int]:
        return (
            pat._part_encode(xp, pat.row_coords),
            pat._shared_row_encode(xp, e2),
            kp,
        )

    def _col_entry(e2: int, kp: int, xp: dict[int, int]) -> tuple[int, int, int]:
        return (
            pat._part_encode(xp, pat.col_coords),
            pat._shared_col_encode(xp, e2),
            kp,
        )

    build_row = _entry_builder(row_own, _row_entry)
    build_col = _entry_builder(col_own, _col_entry)

    @lru_cache(maxsize=None)
    def row_agent(row_idx: int, shared: int, k: int):
        coords = pat._coords_from_part(row_idx, pat.row_coords)
        sh_coords, e_y = pat._shared_decode(shared)
        coords.update(sh_coords)
        z, b1 = _known_z(coords, e_y, k)
        entries, positions = build_row(z, b1)
        return entries, positions[(e_y, k)]

    @lru_cache(maxsize=None)
    def col_agent(col_idx: int, shared: int, k: int):
        coords = pat._coords_from_part(col_idx, pat.col_coords)
        sh_coords, e_y = pat._shared_decode(shared)
        coords.update(sh_coords)
        z, b1 = _known_z(coords, e_y, k)
        entries, positions = build_col(z, b1)
        return entries, positions[(e_y, k)]

    return row_agent, col_agent
