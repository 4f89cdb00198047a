"""Bipartite structure of stabilizer groups: local subgroups and entanglement."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from . import gf2
from .group import StabilizerGroup, group_product, kernel_rows
from .pauli import DimensionError, PauliOperator, QubitSet


@dataclass(frozen=True)
class Bipartition:
    n: int
    a: QubitSet
    b: QubitSet

    def __init__(self, n: int, a: Iterable[int], b: Iterable[int] | None = None):
        a = QubitSet.of(a).check(n)
        if b is None:
            b = QubitSet(tuple(q for q in range(n) if q not in a))
        b = QubitSet.of(b).check(n)
        if a.mask & b.mask:
            raise ValueError(f"blocks overlap on qubits {sorted((a & b).indices)}")
        if (a.mask | b.mask) != (1 << n) - 1:
            missing = sorted(set(range(n)) - set(a) - set(b))
            raise ValueError(f"qubits {missing} belong to neither block")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def swapped(self) -> "Bipartition":
        return Bipartition(self.n, self.b, self.a)

    def is_local(self, p: PauliOperator) -> bool:
        """Whether ``p`` acts trivially on A or on B."""
        support = p.x | p.z
        return not (support & self.a.mask) or not (support & self.b.mask)


class EntanglementRank(NamedTuple):
    e_ab: int
    entropy_ebits: float


@dataclass(frozen=True)
class EntanglementDecomposition:
    s_a: StabilizerGroup
    s_b: StabilizerGroup
    s_ab: StabilizerGroup
    e_ab: int

    @property
    def s_loc(self) -> StabilizerGroup:
        return group_product(self.s_a, self.s_b)


@dataclass(frozen=True)
class CenterPairForm:
    center: list[PauliOperator] = field(default_factory=list)
    pairs: list[tuple[PauliOperator, PauliOperator]] = field(default_factory=list)

    @property
    def operators(self) -> list[PauliOperator]:
        out = list(self.center)
        for g, gbar in self.pairs:
            out.extend((g, gbar))
        return out


def _check(S: StabilizerGroup, part: Bipartition) -> None:
    if S.n != part.n:
        raise DimensionError(f"{S.n}-qubit group with a {part.n}-qubit partition")


def local_subgroup(S: StabilizerGroup, part: Bipartition) -> tuple[StabilizerGroup, StabilizerGroup]:
    """``(S_A, S_B)``: elements of ``S`` acting trivially on B, respectively A."""
    _check(S, part)
    even = S._even
    ka, _ = kernel_rows(S._rows, part.b.key_mask, even)
    kb, _ = kernel_rows(S._rows, part.a.key_mask, even)
    agn = S.phase_agnostic
    return (
        StabilizerGroup.from_rows(S.n, ka, phase_agnostic=agn),
        StabilizerGroup.from_rows(S.n, kb, phase_agnostic=agn),
    )


def entanglement_rank(S: StabilizerGroup, part: Bipartition) -> EntanglementRank:
    """``e_AB = rank(S) - rank(S_A S_B)``, and half of it in ebits.

    ``rank(S_A) = rank(S) - rank(S|_B)`` (kernel of restriction to B), so
    ``e_AB = rank(S|_A) + rank(S|_B) - rank(S)``. For a maximal group this
    collapses to ``2 (rank(S|_X) - |X|)`` for either side X, and only the
    smaller side is eliminated.
    """
    _check(S, part)
    e = e_from_keys([k for k, _ in S._rows], part)
    return EntanglementRank(e, e / 2)


def e_from_keys(keys: Sequence[int], part: Bipartition) -> int:
    """Entanglement rank of the group generated by independent commuting ``keys``."""
    if len(keys) == part.n:
        side = part.a if len(part.a) <= len(part.b) else part.b
        m = side.key_mask
        return 2 * (gf2.rank([k & m for k in keys], m) - len(side))
    ma, mb = part.a.key_mask, part.b.key_mask
    ra = gf2.rank([k & ma for k in keys], ma)
    rb = gf2.rank([k & mb for k in keys], mb)
    return ra + rb - len(keys)


def decompose(S: StabilizerGroup, part: Bipartition) -> EntanglementDecomposition:
    """Split ``S = S_A . S_B . S_AB``.

    ``S_AB`` is built by walking the canonical basis of ``S`` and keeping the
    elements that are independent of ``S_A S_B`` and of those already kept.
    """
    s_a, s_b = local_subgroup(S, part)
    ech = gf2.Echelon()
    for k, _ in s_a._rows + s_b._rows:
        ech.insert(k)
    ab_rows = []
    for k, p in S.canonical_rows:
        if ech.insert(k) is None:
            ab_rows.append((k, p))
    s_ab = StabilizerGroup.from_rows(S.n, ab_rows, phase_agnostic=S.phase_agnostic)
    return EntanglementDecomposition(s_a, s_b, s_ab, len(ab_rows))


def commutation_matrix(ops: Sequence[PauliOperator], qubits: QubitSet | None = None) -> list[int]:
    """Rows of the GF(2) matrix of pairwise symplectic products (bit j of row i).

    With ``qubits``, operators are first restricted to those qubits.
    """
    if not ops:
        return []
    n = ops[0].n
    even = gf2.even_mask(n)
    mask = qubits.key_mask if qubits is not None else (1 << (2 * n)) - 1
    keys = [op.key & mask for op in ops]
    duals = [gf2.swap_pairs(k, even) for k in keys]
    rows = []
    for ki in keys:
        row = 0
        for j, dj in enumerate(duals):
            if (ki & dj).bit_count() & 1:
                row |= 1 << j
        rows.append(row)
    return rows


def pair_count(H: StabilizerGroup, part: Bipartition) -> int:
    """Number of locally anticommuting pairs of ``H`` across ``part``.

    Half the GF(2) rank of the commutation matrix of the generators
    restricted to A. Restrictions to A and to B give the same matrix because
    the full generators commute.
    """
    _check(H, part)
    C = commutation_matrix(H.generators, part.a)
    r = gf2.rank(C)
    assert r % 2 == 0, "alternating matrix with odd rank"
    return r // 2


def center_and_pairs(ops: Sequence[PauliOperator]) -> CenterPairForm:
    """Symplectic Gram-Schmidt: split ``span(ops)`` into a center and hyperbolic pairs.

    Walking the list in order, the first operator that anticommutes with the
    current head closes a pair; every remaining operator is then corrected by
    the pair so it commutes with both members. Operators that commute with
    everything left are central. Output signs are normalized to ``+``.

    Raises:
        ValueError: if ``ops`` are dependent.
    """
    if not ops:
        return CenterPairForm()
    n = ops[0].n
    even = gf2.even_mask(n)
    if gf2.rank([op.key for op in ops]) != len(ops):
        raise ValueError("center_and_pairs needs independent operators")
    work = [op.key for op in ops]
    center: list[int] = []
    pairs: list[tuple[int, int]] = []
    while work:
        a = work.pop(0)
        j = next((i for i, k in enumerate(work) if gf2.key_commutator(a, k, even)), None)
        if j is None:
            center.append(a)
            continue
        b = work.pop(j)
        fixed = []
        for c in work:
            if gf2.key_commutator(c, b, even):
                c ^= a
            if gf2.key_commutator(c, a, even):
                c ^= b
            fixed.append(c)
        work = fixed
        pairs.append((a, b))

    def op(key: int) -> PauliOperator:
        return PauliOperator.from_key(n, key, ((key >> 1) & key & even).bit_count())

    return CenterPairForm([op(k) for k in center], [(op(a), op(b)) for a, b in pairs])
