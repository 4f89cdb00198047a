"""Stabilizer groups: validated generator lists with a canonical echelon basis."""

from __future__ import annotations

import enum
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import gf2
from .pauli import DimensionError, PauliOperator, QubitSet


class InvalidGroupError(ValueError):
    """Generators do not form a valid stabilizer group.

    ``index`` points at the first offending generator when known.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class ContradictionError(InvalidGroupError):
    """The generated group would contain ``-I``."""


class Membership(enum.Enum):
    NOT_MEMBER = "not_member"
    MEMBER_PLUS = "member_plus"
    MEMBER_MINUS = "member_minus"


def _row_combiner(even: int):
    def combine(row, phase, prow, pphase):
        return phase + pphase + gf2.key_product_phase(row, prow, even)

    return combine


def _full_combiner(even: int):
    """Combine payloads ``(full_key, phase)`` while eliminating on masked keys."""

    def combine(row, payload, prow, ppayload):
        k1, ph1 = payload
        k2, ph2 = ppayload
        return k1 ^ k2, ph1 + ph2 + gf2.key_product_phase(k1, k2, even)

    return combine


def _hermitian_phase(key: int, even: int, sign_bit: int = 0) -> int:
    return (((key >> 1) & key & even).bit_count() + 2 * sign_bit) % 4


def _rref(rows: Sequence[tuple[int, int]], even: int) -> list[tuple[int, int]]:
    """Reduced row echelon form, rows sorted by pivot (lowest qubit, X before Z).

    Phases are carried exactly through every row product.
    """
    ech = gf2.Echelon(_row_combiner(even))
    for key, phase in rows:
        ech.insert(key, phase)
    items = sorted(ech.pivots.items())
    keys = [r for _, (r, _) in items]
    phases = [p for _, (_, p) in items]
    lows = [low for low, _ in items]
    for i in range(len(keys) - 1, -1, -1):
        low = lows[i]
        ki, pi = keys[i], phases[i]
        for j in range(i):
            kj = keys[j]
            if kj & low:
                phases[j] = phases[j] + pi + gf2.key_product_phase(kj, ki, even)
                keys[j] = kj ^ ki
    return [(k, p % 4) for k, p in zip(keys, phases)]


class StabilizerGroup:
    """Independent, pairwise commuting, real-sign Pauli generators.

    ``generators`` keeps the order it was given; ``canonical_basis`` is the
    reduced echelon form, which depends only on the group itself (and its
    signs), so two generator lists for the same group compare equal.

    In phase-agnostic mode every generator is normalized to ``+`` sign and
    membership never reports a sign mismatch.
    """

    __slots__ = ("n", "generators", "phase_agnostic", "_rows", "_even", "__dict__")

    def __init__(
        self,
        n: int,
        generators: Iterable[PauliOperator] = (),
        *,
        phase_agnostic: bool = False,
        _trusted: bool = False,
    ):
        self.n = n
        self._even = gf2.even_mask(n)
        gens = list(generators)
        for i, g in enumerate(gens):
            if g.n != n:
                raise DimensionError(f"generator {i} acts on {g.n} qubits, expected {n}")
            if not g.is_hermitian():
                raise InvalidGroupError(f"generator {g} does not have a real sign", i)
        if phase_agnostic:
            gens = [g if g.sign == 1 else g.with_sign(1) for g in gens]
        self.generators: tuple[PauliOperator, ...] = tuple(gens)
        self.phase_agnostic = phase_agnostic
        self._rows = [(g.key, g.phase) for g in gens]
        if not _trusted:
            self._validate()

    def _validate(self) -> None:
        even = self._even
        rows = self._rows
        for i, (ki, _) in enumerate(rows):
            for j in range(i):
                if gf2.key_commutator(ki, rows[j][0], even):
                    raise InvalidGroupError(
                        f"generators {j} and {i} anticommute", i
                    )
        if len(rows) > self.n:
            raise InvalidGroupError(f"{len(rows)} generators exceed {self.n} qubits", self.n)
        ech = gf2.Echelon()
        for i, (k, _) in enumerate(rows):
            if k == 0 or ech.insert(k) is not None:
                raise InvalidGroupError(f"generator {i} is dependent on earlier ones", i)

    @classmethod
    def from_rows(
        cls, n: int, rows: Iterable[tuple[int, int]], *, phase_agnostic: bool = False
    ) -> "StabilizerGroup":
        """Trusted constructor from ``(key, phase)`` rows (no validation)."""
        gens = [PauliOperator.from_key(n, k, p) for k, p in rows]
        return cls(n, gens, phase_agnostic=phase_agnostic, _trusted=True)

    @classmethod
    def from_labels(cls, labels: Iterable[str], **kw) -> "StabilizerGroup":
        from .codec import parse_pauli

        gens = [parse_pauli(s) for s in labels]
        if not gens:
            raise ValueError("use StabilizerGroup(n) for the trivial group")
        return cls(gens[0].n, gens, **kw)

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def is_maximal(self) -> bool:
        return self.rank == self.n

    @property
    def rows(self) -> list[tuple[int, int]]:
        return list(self._rows)

    @cached_property
    def canonical_rows(self) -> tuple[tuple[int, int], ...]:
        rows = _rref(self._rows, self._even)
        if self.phase_agnostic:
            rows = [(k, _hermitian_phase(k, self._even)) for k, _ in rows]
        return tuple(rows)

    @cached_property
    def canonical_basis(self) -> tuple[PauliOperator, ...]:
        return tuple(PauliOperator.from_key(self.n, k, p) for k, p in self.canonical_rows)

    @cached_property
    def _echelon(self) -> gf2.Echelon:
        ech = gf2.Echelon(_row_combiner(self._even))
        for k, p in self.canonical_rows:
            ech.pivots[k & -k] = (k, p)
        return ech

    def contains(self, p: PauliOperator) -> Membership:
        return contains(self, p)

    def phase_free(self) -> "StabilizerGroup":
        if self.phase_agnostic:
            return self
        return StabilizerGroup(self.n, self.generators, phase_agnostic=True, _trusted=True)

    def elements(self) -> Iterator[PauliOperator]:
        """All ``2**rank`` group elements with exact signs (small groups only)."""
        if self.rank > 20:
            raise ValueError("refusing to enumerate more than 2**20 elements")
        even = self._even
        rows = self._rows
        for mask in range(1 << len(rows)):
            key, ph = 0, 0
            for i, (k, p) in enumerate(rows):
                if (mask >> i) & 1:
                    ph += p + gf2.key_product_phase(key, k, even)
                    key ^= k
            yield PauliOperator.from_key(self.n, key, ph)

    def __len__(self) -> int:
        return self.rank

    def __iter__(self) -> Iterator[PauliOperator]:
        return iter(self.generators)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StabilizerGroup):
            return NotImplemented
        if self.n != other.n:
            return False
        if self.phase_agnostic or other.phase_agnostic:
            return [k for k, _ in self.canonical_rows] == [k for k, _ in other.canonical_rows]
        return self.canonical_rows == other.canonical_rows

    def __hash__(self) -> int:
        return hash((self.n, tuple(k for k, _ in self.canonical_rows)))

    def __repr__(self) -> str:
        body = ", ".join(str(g) for g in self.generators)
        return f"StabilizerGroup(n={self.n}, <{body}>)"


def echelon_form(gens: Sequence[PauliOperator]) -> tuple[list[PauliOperator], int]:
    """Canonical reduced echelon basis of the span of ``gens`` and its rank.

    Basis phases are exact products of input generators (taken in row order).
    """
    if not gens:
        return [], 0
    n = gens[0].n
    for g in gens:
        if g.n != n:
            raise DimensionError("generators act on different numbers of qubits")
    rows = _rref([(g.key, g.phase) for g in gens], gf2.even_mask(n))
    basis = [PauliOperator.from_key(n, k, p) for k, p in rows]
    return basis, len(basis)


def contains(S: StabilizerGroup, p: PauliOperator) -> Membership:
    if p.n != S.n:
        raise DimensionError(f"{p.n}-qubit operator tested against {S.n}-qubit group")
    red, phase = S._echelon.reduce(p.key, p.phase)
    if red:
        return Membership.NOT_MEMBER
    if S.phase_agnostic:
        return Membership.MEMBER_PLUS
    phase %= 4
    if phase == 0:
        return Membership.MEMBER_PLUS
    if phase == 2:
        return Membership.MEMBER_MINUS
    return Membership.NOT_MEMBER


def group_product(G1: StabilizerGroup, G2: StabilizerGroup) -> StabilizerGroup:
    """Group generated by the union of two stabilizer groups."""
    if G1.n != G2.n:
        raise DimensionError(f"{G1.n}-qubit group times {G2.n}-qubit group")
    n = G1.n
    even = gf2.even_mask(n)
    for k2, _ in G2._rows:
        for k1, _ in G1._rows:
            if gf2.key_commutator(k1, k2, even):
                raise InvalidGroupError("union of generators is not abelian")
    agnostic = G1.phase_agnostic or G2.phase_agnostic
    ech = gf2.Echelon(_row_combiner(even))
    kept = []
    for g, (k, p) in zip(G1.generators + G2.generators, G1._rows + G2._rows):
        residue = ech.insert(k, p)
        if residue is None:
            kept.append(g)
        elif not agnostic and residue[1] % 4 != 0:
            raise ContradictionError("product group contains -I")
    return StabilizerGroup(n, kept, phase_agnostic=agnostic, _trusted=True)


def kernel_rows(
    rows: Sequence[tuple[int, int]], mask: int, even: int
) -> tuple[list[tuple[int, int]], int]:
    """Products of ``rows`` whose bits vanish under ``mask``.

    Returns an independent generating set of that subgroup, with exact
    phases, and the rank of the masked rows.
    """
    ech = gf2.Echelon(_full_combiner(even))
    kernel = []
    for k, p in rows:
        residue = ech.insert(k & mask, (k, p))
        if residue is not None:
            full, ph = residue[1]
            kernel.append((full, ph % 4))
    return kernel, len(ech)


def subgroup_trivial_on(S: StabilizerGroup, qubits: "Iterable[int] | QubitSet") -> StabilizerGroup:
    """Subgroup of elements of ``S`` acting as identity on ``qubits``."""
    qs = QubitSet.of(qubits).check(S.n)
    kernel, _ = kernel_rows(S._rows, qs.key_mask, S._even)
    return StabilizerGroup.from_rows(S.n, kernel, phase_agnostic=S.phase_agnostic)


# --- random generation ----------------------------------------------------


def random_stabilizer(n: int, seed: int, *, gates: int | None = None) -> StabilizerGroup:
    """Random maximal group: ``2 n^2`` random Clifford conjugations of ``<Z_1..Z_n>``.

    The tableau is stored column-wise (one int per qubit over all generators)
    so each gate is a few whole-register bit operations.
    """
    if n < 1:
        raise ValueError("random_stabilizer needs n >= 1")
    rng = np.random.default_rng(seed)
    count = 2 * n * n if gates is None else gates
    full = (1 << n) - 1
    xc = [0] * n
    zc = [1 << q for q in range(n)]
    r = 0
    kinds = rng.integers(0, 6, size=count)
    a_s = rng.integers(0, n, size=count)
    offs = rng.integers(1, max(n, 2), size=count)
    for kind, a, off in zip(kinds.tolist(), a_s.tolist(), offs.tolist()):
        if kind >= 4 and n > 1:
            # CNOT a -> b
            b = (a + off) % n
            xa, za, xb, zb = xc[a], zc[a], xc[b], zc[b]
            r ^= xa & zb & (full ^ xb ^ za)
            xc[b] = xb ^ xa
            zc[a] = za ^ zb
        elif kind == 0 or (kind >= 4):
            r ^= xc[a] & zc[a]
            xc[a], zc[a] = zc[a], xc[a]
        elif kind == 1:
            r ^= xc[a] & zc[a]
            zc[a] ^= xc[a]
        elif kind == 2:
            r ^= zc[a]
        else:
            r ^= xc[a]
    xs = _transpose(xc, n)
    zs = _transpose(zc, n)
    gens = []
    for i in range(n):
        x, z = xs[i], zs[i]
        gens.append(PauliOperator(n, x, z, (x & z).bit_count() + 2 * ((r >> i) & 1)))
    return StabilizerGroup(n, gens, _trusted=True)


def _transpose(cols: list[int], n: int) -> list[int]:
    nbytes = (n + 7) // 8
    buf = b"".join(c.to_bytes(nbytes, "little") for c in cols)
    bits = np.unpackbits(
        np.frombuffer(buf, dtype=np.uint8).reshape(n, nbytes), axis=1, bitorder="little"
    )[:, :n]
    packed = np.packbits(bits.T, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]
