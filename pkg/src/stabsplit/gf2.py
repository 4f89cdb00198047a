"""Bit-packed GF(2) helpers.

Pauli rows are Python ints. Two layouts are used:

* split: separate ``x`` and ``z`` ints, bit ``q`` belongs to qubit ``q``;
* interleaved ("key"): bit ``2q`` is ``x_q`` and bit ``2q + 1`` is ``z_q``.

The interleaved layout makes the lowest set bit the pivot of choice for
"lowest qubit first, X before Z", and lets products, commutation checks and
restrictions run as a handful of whole-word operations.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

_SPREAD = np.array(
    [sum(((b >> i) & 1) << (2 * i) for i in range(8)) for b in range(256)],
    dtype=np.uint16,
)
# byte of a key -> (4 x bits, 4 z bits)
_COMPACT_X = np.array(
    [sum(((b >> (2 * i)) & 1) << i for i in range(4)) for b in range(256)],
    dtype=np.uint8,
)
_COMPACT_Z = np.array(
    [sum(((b >> (2 * i + 1)) & 1) << i for i in range(4)) for b in range(256)],
    dtype=np.uint8,
)


def even_mask(n: int) -> int:
    """Mask with bits 0, 2, ..., 2n-2 set."""
    return int("01" * n, 2) if n else 0


def spread(mask: int, n: int) -> int:
    """Move bit ``q`` of ``mask`` to bit ``2q``."""
    if n == 0 or mask == 0:
        return 0
    nbytes = (n + 7) // 8
    raw = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8)
    return int.from_bytes(_SPREAD[raw].astype("<u2").tobytes(), "little")


def interleave(x: int, z: int, n: int) -> int:
    return spread(x, n) | (spread(z, n) << 1)


def deinterleave(key: int, n: int) -> tuple[int, int]:
    if n == 0 or key == 0:
        return 0, 0
    nbytes = (2 * n + 7) // 8
    nbytes += nbytes % 2
    raw = np.frombuffer(key.to_bytes(nbytes, "little"), dtype=np.uint8)
    xs = _COMPACT_X[raw]
    zs = _COMPACT_Z[raw]
    x = int.from_bytes((xs[0::2] | (xs[1::2] << 4)).astype(np.uint8).tobytes(), "little")
    z = int.from_bytes((zs[0::2] | (zs[1::2] << 4)).astype(np.uint8).tobytes(), "little")
    return x, z


def qubit_mask(qubits: Iterable[int]) -> int:
    m = 0
    for q in qubits:
        m |= 1 << q
    return m


def key_mask(qubits: Iterable[int]) -> int:
    """Interleaved mask covering both bits of every listed qubit."""
    m = 0
    for q in qubits:
        m |= 3 << (2 * q)
    return m


def swap_pairs(key: int, even: int) -> int:
    """Exchange the x and z bit of every qubit (symplectic dual of a row)."""
    return ((key & even) << 1) | ((key >> 1) & even)


def key_commutator(k1: int, k2: int, even: int) -> int:
    """Symplectic product of two interleaved rows (0 commute, 1 anticommute)."""
    return ((((k1 >> 1) & k2) ^ ((k2 >> 1) & k1)) & even).bit_count() & 1


def key_product_phase(k1: int, k2: int, even: int) -> int:
    """Phase exponent picked up when reordering ``Z^z1 X^x2`` (always 0 or 2)."""
    return 2 * ((((k1 >> 1) & k2) & even).bit_count() & 1)


def _pack(rows: Sequence[int], nbits: int) -> np.ndarray:
    words = max(1, (nbits + 63) // 64)
    buf = b"".join(r.to_bytes(8 * words, "little") for r in rows)
    return np.frombuffer(buf, dtype="<u8").reshape(len(rows), words).copy()


def rank(rows: Sequence[int], columns: int | None = None) -> int:
    """Rank of a list of bit rows over GF(2).

    ``columns`` restricts elimination to the set bits of that mask (bits
    outside it must already be zero); otherwise every bit is a candidate.
    The rows are packed into 64-bit words and eliminated column by column,
    one vectorized XOR over all rows per pivot.
    """
    rows = [r for r in rows if r]
    if not rows:
        return 0
    width = max(r.bit_length() for r in rows)
    if len(rows) <= 300:
        return len(Echelon.from_rows(rows).pivots)
    mat = _pack(rows, width)
    if columns is None:
        columns = (1 << width) - 1
    m = mat.shape[0]
    r = 0
    col = columns
    while col and r < m:
        low = col & -col
        bit = low.bit_length() - 1
        col ^= low
        w, b = divmod(bit, 64)
        hits = np.flatnonzero((mat[r:, w] >> np.uint64(b)) & np.uint64(1))
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            mat[[r, p]] = mat[[p, r]]
        rest = r + hits[1:]
        if rest.size:
            mat[rest] ^= mat[r]
        r += 1
    return r


class Echelon:
    """Incremental row echelon form with lowest-set-bit pivots.

    Each stored row carries an opaque payload combined with ``combine`` on
    every XOR, which is how callers track exact Pauli phases alongside the
    bit rows.
    """

    __slots__ = ("pivots", "_combine")

    def __init__(self, combine=None):
        self.pivots: dict[int, tuple[int, object]] = {}
        self._combine = combine

    @classmethod
    def from_rows(cls, rows: Iterable[int]) -> "Echelon":
        ech = cls()
        for r in rows:
            ech.insert(r)
        return ech

    def reduce(self, row: int, payload=None) -> tuple[int, object]:
        pivots = self.pivots
        combine = self._combine
        while row:
            low = row & -row
            hit = pivots.get(low)
            if hit is None:
                break
            prow, ppay = hit
            if combine is not None:
                payload = combine(row, payload, prow, ppay)
            row ^= prow
        return row, payload

    def reduce_fully(self, row: int, payload=None) -> tuple[int, object]:
        """Clear every pivot bit of ``row`` (not just the leading ones)."""
        pivots = self.pivots
        combine = self._combine
        for low, (prow, ppay) in sorted(pivots.items()):
            if row & low:
                if combine is not None:
                    payload = combine(row, payload, prow, ppay)
                row ^= prow
        return row, payload

    def insert(self, row: int, payload=None) -> tuple[int, object] | None:
        """Reduce and store ``row``; return the residue if it was dependent."""
        red, pay = self.reduce(row, payload)
        if red:
            self.pivots[red & -red] = (red, pay)
            return None
        return red, pay

    def contains(self, row: int) -> bool:
        return self.reduce(row)[0] == 0

    def __len__(self) -> int:
        return len(self.pivots)


def nullspace(constraints: Sequence[int], domain: int) -> list[int]:
    """Basis of ``{v within domain : popcount(v & c) even for every c}``."""
    ech = Echelon()
    for c in constraints:
        c &= domain
        red, _ = ech.reduce(c)
        if red:
            ech.pivots[red & -red] = (red, None)
    # back-substitute so each row holds exactly one pivot bit
    items = sorted(ech.pivots.items(), reverse=True)
    reduced: dict[int, int] = {}
    for low, (row, _) in items:
        for plow, prow in reduced.items():
            if row & plow:
                row ^= prow
        reduced[low] = row
    pivot_bits = 0
    for low in reduced:
        pivot_bits |= low
    basis = []
    free = domain & ~pivot_bits
    while free:
        f = free & -free
        free ^= f
        v = f
        for low, row in reduced.items():
            if row & f:
                v |= low
        basis.append(v)
    return basis


def solve(rows: Sequence[int], rhs: Sequence[int], nbits: int) -> int | None:
    """One solution ``v`` of ``popcount(row_i & v) % 2 == rhs_i``, or ``None``.

    Free variables are set to zero.
    """
    aug = 1 << nbits
    ech = Echelon()
    for r, b in zip(rows, rhs):
        red, _ = ech.reduce(r | (aug if b else 0))
        if red == aug:
            return None
        if red:
            ech.pivots[red & -red] = (red, None)
    v = 0
    for low, (row, _) in sorted(ech.pivots.items(), reverse=True):
        # row = pivot + higher variable bits (+ rhs); higher ones are decided
        rest = row & ~low & (aug - 1)
        bit = ((row >> nbits) & 1) ^ ((rest & v).bit_count() & 1)
        if bit:
            v |= low
    return v
