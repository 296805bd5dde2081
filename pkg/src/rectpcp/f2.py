"""Bit-packed linear algebra over F2.

Matrices and vectors store their bits in Python integers (bit ``j`` of a
row is entry ``j``, least significant bit first), which gives word-level
XOR/AND/popcount for free.  External formats are byte oriented; the
internal word size is an implementation detail.

All values are immutable after construction and every operation is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np


class F2Error(Exception):
    """Base class for errors raised by the F2 kernels."""


class DimensionMismatch(F2Error):
    pass


class DecodeFailure(F2Error):
    """A word outside the code's image was passed to decode."""


def _parity(x: int) -> int:
    return x.bit_count() & 1


@dataclass(frozen=True)
class BitVector:
    """An F2 vector of ``length`` bits packed into an int."""

    length: int
    bits: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits >> self.length:
            raise ValueError("padding bits beyond length must be zero")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        value = 0
        n = 0
        for b in bits:
            if b:
                value |= 1 << n
            n += 1
        return cls(n, value)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __iter__(self):
        return ((self.bits >> i) & 1 for i in range(self.length))

    def weight(self) -> int:
        return self.bits.bit_count()

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise DimensionMismatch("vector lengths differ")
        return BitVector(self.length, self.bits ^ other.bits)

    def dot(self, other: "BitVector") -> int:
        if self.length != other.length:
            raise DimensionMismatch("vector lengths differ")
        return _parity(self.bits & other.bits)


@dataclass(frozen=True)
class BitMatrix:
    """A bit-packed F2 matrix, rows stored as ints (LSB = column 0)."""

    n_rows: int
    n_cols: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.n_rows:
            raise ValueError("row payload length mismatch")
        for r in self.rows:
            if r >> self.n_cols:
                raise ValueError("padding bits beyond n_cols must be zero")

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BitMatrix":
        return cls(n_rows, n_cols, (0,) * n_rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def ones(cls, n_rows: int, n_cols: int) -> "BitMatrix":
        full = (1 << n_cols) - 1
        return cls(n_rows, n_cols, (full,) * n_rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "BitMatrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else 0
        packed = []
        for row in rows:
            if len(row) != n_cols:
                raise ValueError("ragged rows")
            v = 0
            for j, b in enumerate(row):
                if b:
                    v |= 1 << j
            packed.append(v)
        return cls(n_rows, n_cols, tuple(packed))

    @classmethod
    def from_row_ints(cls, n_cols: int, rows: Iterable[int]) -> "BitMatrix":
        packed = tuple(rows)
        return cls(len(packed), n_cols, packed)

    @classmethod
    def random(cls, n_rows: int, n_cols: int, rng) -> "BitMatrix":
        return cls(
            n_rows,
            n_cols,
            tuple(rng.getrandbits(n_cols) if n_cols else 0 for _ in range(n_rows)),
        )

    def get(self, i: int, j: int) -> int:
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise IndexError((i, j))
        return (self.rows[i] >> j) & 1

    def row(self, i: int) -> int:
        return self.rows[i]

    def column(self, j: int) -> int:
        if not 0 <= j < self.n_cols:
            raise IndexError(j)
        v = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                v |= 1 << i
        return v

    def transpose(self) -> "BitMatrix":
        return BitMatrix(
            self.n_cols, self.n_rows, tuple(self.column(j) for j in range(self.n_cols))
        )

    def weight(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if (self.n_rows, self.n_cols) != (other.n_rows, other.n_cols):
            raise DimensionMismatch("shapes differ")
        return BitMatrix(
            self.n_rows, self.n_cols, tuple(a ^ b for a, b in zip(self.rows, other.rows))
        )

    def hstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.n_rows != other.n_rows:
            raise DimensionMismatch("row counts differ")
        return BitMatrix(
            self.n_rows,
            self.n_cols + other.n_cols,
            tuple(a | (b << self.n_cols) for a, b in zip(self.rows, other.rows)),
        )

    def vstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.n_cols != other.n_cols:
            raise DimensionMismatch("column counts differ")
        return BitMatrix(self.n_rows + other.n_rows, self.n_cols, self.rows + other.rows)

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.n_cols)] for r in self.rows]

    def flatten(self) -> list[int]:
        """Row-major entry list."""
        out = []
        for r in self.rows:
            out.extend((r >> j) & 1 for j in range(self.n_cols))
        return out


def matmul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """F2 matrix product: each result row is the XOR of selected b-rows."""
    if a.n_cols != b.n_rows:
        raise DimensionMismatch(
            f"inner dimensions differ: {a.n_cols} vs {b.n_rows}"
        )
    out = []
    for row in a.rows:
        acc = 0
        r = row
        while r:
            k = (r & -r).bit_length() - 1
            acc ^= b.rows[k]
            r &= r - 1
        out.append(acc)
    return BitMatrix(a.n_rows, b.n_cols, tuple(out))


def mat_vec(a: BitMatrix, v: BitVector) -> BitVector:
    if a.n_cols != v.length:
        raise DimensionMismatch("matrix/vector sizes differ")
    bits = 0
    for i, row in enumerate(a.rows):
        if _parity(row & v.bits):
            bits |= 1 << i
    return BitVector(a.n_rows, bits)


def vec_mat(v: BitVector, a: BitMatrix) -> BitVector:
    """Row vector times matrix (the encoder's orientation)."""
    if v.length != a.n_rows:
        raise DimensionMismatch("vector/matrix sizes differ")
    acc = 0
    r = v.bits
    while r:
        k = (r & -r).bit_length() - 1
        acc ^= a.rows[k]
        r &= r - 1
    return BitVector(a.n_cols, acc)


def rank(a: BitMatrix) -> int:
    """F2 row rank by Gaussian elimination on a copy; the input is untouched."""
    rows = list(a.rows)
    rk = 0
    for col in range(a.n_cols):
        bit = 1 << col
        pivot = None
        for i in range(rk, len(rows)):
            if rows[i] & bit:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rk], rows[pivot] = rows[pivot], rows[rk]
        for i in range(len(rows)):
            if i != rk and rows[i] & bit:
                rows[i] ^= rows[rk]
        rk += 1
        if rk == len(rows):
            break
    return rk


def row_space(a: BitMatrix) -> list[int]:
    """All 2^rank row-span vectors as ints (small matrices only)."""
    basis = []
    for row in a.rows:
        v = row
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    span = [0]
    for b in basis:
        span.extend(s ^ b for s in span)
    return span


def hamming_distance(a: BitMatrix, b: BitMatrix) -> int:
    """Number of differing entries (absolute count)."""
    if (a.n_rows, a.n_cols) != (b.n_rows, b.n_cols):
        raise DimensionMismatch("shapes differ")
    return sum((x ^ y).bit_count() for x, y in zip(a.rows, b.rows))


def relative_distance(a: BitMatrix, b: BitMatrix):
    from fractions import Fraction

    return Fraction(hamming_distance(a, b), a.n_rows * a.n_cols)


AFFINE_RANK3_MAX_DIM = 24


def affine_to_rank3(m: int, u: BitVector, v: BitVector, b: int) -> tuple[BitMatrix, BitMatrix]:
    """Factor the affine form <x,u> + <y,v> + b as a rank-<=3 product A*B.

    A is 2^m x 3 (columns: the <x,u> enumeration, all-ones, b*all-ones) and
    B is 3 x 2^m (rows: all-ones, the <y,v> enumeration, all-ones), with
    x, y enumerated in standard binary order (index bit i = coordinate i).
    """
    if u.length != m or v.length != m:
        raise DimensionMismatch("u and v must have length m")
    if m > AFFINE_RANK3_MAX_DIM:
        raise ValueError(f"m={m} exceeds the size guard {AFFINE_RANK3_MAX_DIM}")
    size = 1 << m
    const_cols = 0b110 if b else 0b010
    a_rows = tuple(_parity(x & u.bits) | const_cols for x in range(size))
    full = (1 << size) - 1
    row_uv = 0
    for y in range(size):
        if _parity(y & v.bits):
            row_uv |= 1 << y
    a = BitMatrix(size, 3, a_rows)
    bm = BitMatrix(3, size, (full, row_uv, full))
    return a, bm


@dataclass(frozen=True)
class LinearCode:
    """A binary linear code given by its generator, with verified distance.

    The constructor checks that the generator has full rank, that the
    claimed minimum distance is the true minimum codeword weight
    (exhaustive scan, message length <= 20), and, when ``systematic_prefix``
    is set, that the first ``msg_len`` columns form the identity.
    """

    msg_len: int
    block_len: int
    generator: BitMatrix
    systematic_prefix: bool
    min_distance: int

    MAX_VERIFY_MSG_LEN = 20

    def __post_init__(self) -> None:
        g = self.generator
        if (g.n_rows, g.n_cols) != (self.msg_len, self.block_len):
            raise DimensionMismatch("generator shape disagrees with code parameters")
        if rank(g) != self.msg_len:
            raise ValueError("generator does not have full rank")
        if self.msg_len > self.MAX_VERIFY_MSG_LEN:
            raise ValueError(
                f"msg_len={self.msg_len} exceeds the exhaustive-verification guard"
            )
        if self.systematic_prefix:
            prefix_mask = (1 << self.msg_len) - 1
            for i in range(self.msg_len):
                if g.rows[i] & prefix_mask != 1 << i:
                    raise ValueError("systematic prefix is not the identity")
        true_d = min(
            (w for w in self._codeword_weights() if w > 0), default=0
        )
        if true_d != self.min_distance:
            raise ValueError(
                f"claimed min_distance {self.min_distance} but true distance is {true_d}"
            )

    def _codeword_weights(self):
        for msg in range(1 << self.msg_len):
            yield self._encode_int(msg).bit_count()

    def _encode_int(self, msg: int) -> int:
        acc = 0
        r = msg
        while r:
            k = (r & -r).bit_length() - 1
            acc ^= self.generator.rows[k]
            r &= r - 1
        return acc

    def codewords(self) -> list[int]:
        return [self._encode_int(m) for m in range(1 << self.msg_len)]


def make_code(generator: BitMatrix, systematic: bool = False) -> LinearCode:
    """Build a LinearCode, measuring the true minimum distance."""
    d = min(
        (w.bit_count() for w in _span_nonzero(generator)), default=0
    )
    return LinearCode(
        msg_len=generator.n_rows,
        block_len=generator.n_cols,
        generator=generator,
        systematic_prefix=systematic,
        min_distance=d,
    )


def _span_nonzero(g: BitMatrix):
    for msg in range(1, 1 << g.n_rows):
        acc = 0
        r = msg
        while r:
            k = (r & -r).bit_length() - 1
            acc ^= g.rows[k]
            r &= r - 1
        yield acc


def random_systematic_code(
    msg_len: int, block_len: int, seed: int, min_distance: int = 1, attempts: int = 1000
) -> LinearCode:
    """Seeded random systematic code with exhaustively verified distance.

    Retries fresh parity parts until the measured minimum distance reaches
    ``min_distance``.
    """
    import random as _random

    if block_len < msg_len:
        raise ValueError("block_len must be at least msg_len")
    rng = _random.Random(seed)
    tail = block_len - msg_len
    for _ in range(attempts):
        rows = tuple(
            (1 << i) | (rng.getrandbits(tail) << msg_len) if tail else (1 << i)
            for i in range(msg_len)
        )
        g = BitMatrix(msg_len, block_len, rows)
        code = make_code(g, systematic=True)
        if code.min_distance >= min_distance:
            return code
    raise ValueError(
        f"no systematic {msg_len}->{block_len} code of distance {min_distance} "
        f"found in {attempts} attempts"
    )


def encode(code: LinearCode, msg: BitVector) -> BitVector:
    if msg.length != code.msg_len:
        raise DimensionMismatch("message length differs from code dimension")
    return BitVector(code.block_len, code._encode_int(msg.bits))


def is_codeword(code: LinearCode, word: BitVector) -> bool:
    if word.length != code.block_len:
        raise DimensionMismatch("word length differs from block length")
    return _decode_int(code, word.bits) is not None


def decode(code: LinearCode, word: BitVector) -> BitVector:
    """Invert encode on valid codewords; raise DecodeFailure otherwise.

    Noisy decoding is deliberately not provided: only exact codewords are
    ever decoded by the callers.
    """
    if word.length != code.block_len:
        raise DimensionMismatch("word length differs from block length")
    msg = _decode_int(code, word.bits)
    if msg is None:
        raise DecodeFailure("word is not in the code")
    return BitVector(code.msg_len, msg)


def _decode_int(code: LinearCode, word: int) -> int | None:
    if code.systematic_prefix:
        msg = word & ((1 << code.msg_len) - 1)
        return msg if code._encode_int(msg) == word else None
    # Row-reduce [G | I] once per call; codes are tiny so this is fine.
    rows = [
        code.generator.rows[i] | (1 << (code.block_len + i))
        for i in range(code.msg_len)
    ]
    residue = word
    msg = 0
    for col in range(code.block_len):
        bit = 1 << col
        pivot = None
        for i, r in enumerate(rows):
            if r & bit:
                pivot = i
                break
        if pivot is None:
            continue
        prow = rows.pop(pivot)
        rows = [r ^ prow if r & bit else r for r in rows]
        if residue & bit:
            residue ^= prow & ((1 << code.block_len) - 1)
            msg ^= prow >> code.block_len
    return msg if residue == 0 else None


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def matrix_to_text(a: BitMatrix) -> str:
    lines = [f"{a.n_rows} {a.n_cols}"]
    for r in a.rows:
        lines.append("".join(str((r >> j) & 1) for j in range(a.n_cols)))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> BitMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("first line must be 'rows cols'")
    n_rows, n_cols = int(head[0]), int(head[1])
    if len(lines) - 1 != n_rows:
        raise ValueError(f"expected {n_rows} rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        ln = ln.strip()
        if len(ln) != n_cols or set(ln) - {"0", "1"}:
            raise ValueError(f"bad row {ln!r}")
        v = 0
        for j, ch in enumerate(ln):
            if ch == "1":
                v |= 1 << j
        rows.append(v)
    return BitMatrix(n_rows, n_cols, tuple(rows))


def matrix_to_bytes(a: BitMatrix) -> bytes:
    """Binary format: 8-byte little-endian rows and cols, then packed rows.

    Each row is padded to a whole number of bytes; bit j of a row lives in
    byte j//8 at position j%8.
    """
    out = bytearray()
    out += a.n_rows.to_bytes(8, "little")
    out += a.n_cols.to_bytes(8, "little")
    row_bytes = (a.n_cols + 7) // 8
    for r in a.rows:
        out += r.to_bytes(row_bytes, "little")
    return bytes(out)


def matrix_from_bytes(data: bytes) -> BitMatrix:
    if len(data) < 16:
        raise ValueError("truncated matrix payload")
    n_rows = int.from_bytes(data[:8], "little")
    n_cols = int.from_bytes(data[8:16], "little")
    row_bytes = (n_cols + 7) // 8
    if len(data) != 16 + n_rows * row_bytes:
        raise ValueError("matrix payload size mismatch")
    rows = []
    for i in range(n_rows):
        chunk = data[16 + i * row_bytes : 16 + (i + 1) * row_bytes]
        v = int.from_bytes(chunk, "little")
        if v >> n_cols:
            raise ValueError("nonzero padding bits in row payload")
        rows.append(v)
    return BitMatrix(n_rows, n_cols, tuple(rows))


def matrix_to_numpy(a: BitMatrix) -> np.ndarray:
    out = np.zeros((a.n_rows, a.n_cols), dtype=np.uint8)
    for i, r in enumerate(a.rows):
        for j in range(a.n_cols):
            out[i, j] = (r >> j) & 1
    return out
