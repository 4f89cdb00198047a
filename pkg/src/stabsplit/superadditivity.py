"""Strong super-additivity of the entanglement of formation for stabilizer states.

For a pure stabilizer state split four ways (A1, A2, B1, B2), tracing out
``part2 = A2 B2`` by measuring a complete set of {A,B}-local commuting Paulis
on part2 leaves an ensemble of pure stabilizer states on ``part1 = A1 B1``
sharing one stabilizer group ``S^M_1`` up to phases; its entanglement
``e1 = e_AB(S^M_1)`` bounds ``2 E_f`` of the reduced state. The measurement
operators are chosen so that ``e1 + e2 <= e_AB(S)``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import gf2
from .bipartite import (
    Bipartition,
    center_and_pairs,
    decompose,
    e_from_keys,
    entanglement_rank,
    pair_count,
)
from .group import InvalidGroupError, StabilizerGroup, kernel_rows
from .measurement import (
    build_trace_out_plan,
    commutant_extension,
    complete_isotropic,
    measure_rows,
    trace_out,
)
from .pauli import DimensionError, PauliOperator, QubitSet

log = logging.getLogger(__name__)

PART1 = "part1"
PART2 = "part2"


@dataclass(frozen=True)
class FourWayPartition:
    n: int
    a1: QubitSet
    a2: QubitSet
    b1: QubitSet
    b2: QubitSet

    def __init__(self, n, a1, a2, b1, b2):
        blocks = [QubitSet.of(b).check(n) for b in (a1, a2, b1, b2)]
        seen = 0
        for blk in blocks:
            if blk.mask & seen:
                raise ValueError("four-way blocks overlap")
            seen |= blk.mask
        if seen != (1 << n) - 1:
            raise ValueError("four-way blocks do not cover every qubit")
        object.__setattr__(self, "n", n)
        for name, blk in zip(("a1", "a2", "b1", "b2"), blocks):
            object.__setattr__(self, name, blk)

    @property
    def a(self) -> QubitSet:
        return self.a1 | self.a2

    @property
    def b(self) -> QubitSet:
        return self.b1 | self.b2

    @property
    def part1(self) -> QubitSet:
        return self.a1 | self.b1

    @property
    def part2(self) -> QubitSet:
        return self.a2 | self.b2

    @property
    def bipartition(self) -> Bipartition:
        return Bipartition(self.n, self.a, self.b)

    def kept_bipartition(self, traced: str) -> Bipartition:
        """{A,B} split of the kept qubits, indices renumbered within ``kept``."""
        kept = self.part1 if traced == PART2 else self.part2
        a_side = self.a1 if traced == PART2 else self.a2
        pos = {q: i for i, q in enumerate(kept)}
        a = [pos[q] for q in a_side]
        return Bipartition(len(kept), a)

    def spec(self) -> str:
        return ";".join(
            f"{name}={','.join(str(q) for q in blk)}"
            for name, blk in zip(("A1", "A2", "B1", "B2"), (self.a1, self.a2, self.b1, self.b2))
        )


@dataclass(frozen=True)
class LocalRefinement:
    s1: StabilizerGroup
    s2: StabilizerGroup
    s12: StabilizerGroup

    @property
    def ranks(self) -> tuple[int, int, int]:
        return self.s1.rank, self.s2.rank, self.s12.rank


@dataclass(frozen=True)
class CodeProjector:
    """The normalized projector ``2**-n * sum_{g in H} g``."""

    h: StabilizerGroup


class CompletionError(RuntimeError):
    """No maximal extension with ``e_AB = 2p`` was found."""

    def __init__(self, message: str, trace: Sequence[str] = ()):
        super().__init__(message)
        self.trace = list(trace)


def _side(fw: FourWayPartition, side: str) -> QubitSet:
    if side == "A":
        return fw.a
    if side == "B":
        return fw.b
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


def refine_local(s_local: StabilizerGroup, fw: FourWayPartition, side: str) -> LocalRefinement:
    """``S_side = S^1 . S^2 . S^12`` with respect to part1/part2."""
    region = _side(fw, side)
    outside = ~region.mask & ((1 << fw.n) - 1)
    for g in s_local.generators:
        if (g.x | g.z) & outside:
            raise ValueError(f"generator {g} is not supported inside side {side}")
    even = s_local._even
    agn = s_local.phase_agnostic
    k1, _ = kernel_rows(s_local._rows, fw.part2.key_mask, even)
    k2, _ = kernel_rows(s_local._rows, fw.part1.key_mask, even)
    ech = gf2.Echelon.from_rows(k for k, _ in k1 + k2)
    k12 = [(k, p) for k, p in s_local.canonical_rows if ech.insert(k) is None]
    mk = lambda rows: StabilizerGroup.from_rows(fw.n, rows, phase_agnostic=agn)  # noqa: E731
    return LocalRefinement(mk(k1), mk(k2), mk(k12))


def project(g: PauliOperator, qubits: QubitSet) -> PauliOperator:
    """Keep the tensor factors on ``qubits``, identity elsewhere, sign ``+``."""
    m = qubits.mask
    x, z = g.x & m, g.z & m
    return PauliOperator(g.n, x, z, (x & z).bit_count())


def project_p2(g: PauliOperator, fw: FourWayPartition) -> PauliOperator:
    return project(g, fw.part2)


@dataclass
class SideSelection:
    """Measurement operators chosen on one traced side (e.g. A2)."""

    side: str
    qubits: QubitSet
    pairs: list[tuple[PauliOperator, PauliOperator]]
    center: list[PauliOperator]
    local_generators: list[PauliOperator]
    completion: list[PauliOperator]
    refinement_ranks: tuple[int, int, int]
    reducing_count: int

    @property
    def p(self) -> int:
        return len(self.pairs)

    @property
    def ops(self) -> list[PauliOperator]:
        return [gbar for _, gbar in self.pairs] + self.local_generators + self.center + self.completion


@dataclass
class MeasurementSelection:
    traced: str
    a_side: SideSelection
    b_side: SideSelection

    @property
    def ops(self) -> list[PauliOperator]:
        return self.a_side.ops + self.b_side.ops

    @property
    def reducing_count(self) -> tuple[int, int]:
        return self.a_side.reducing_count, self.b_side.reducing_count


def _plus(n: int, key: int, even: int) -> PauliOperator:
    return PauliOperator.from_key(n, key, ((key >> 1) & key & even).bit_count())


def _side_local(rows, fw: FourWayPartition, side: str, even: int):
    other = fw.b if side == "A" else fw.a
    kernel, _ = kernel_rows(rows, other.key_mask, even)
    return StabilizerGroup.from_rows(fw.n, kernel, phase_agnostic=True)


def _select_side(
    S: StabilizerGroup,
    s_local: StabilizerGroup,
    fw: FourWayPartition,
    side: str,
    traced: str,
) -> SideSelection:
    n = S.n
    even = S._even
    region = _side(fw, side)
    traced_set = fw.part2 if traced == PART2 else fw.part1
    side_traced = region & traced_set
    ref = refine_local(s_local, fw, side)
    # s_keep acts only on the kept part, s_trace only on the traced part
    if traced == PART2:
        s_keep, s_trace, s_mixed = ref.s1, ref.s2, ref.s12
    else:
        s_keep, s_trace, s_mixed = ref.s2, ref.s1, ref.s12
    images = [project(g, traced_set) for g in s_mixed.generators]
    if gf2.rank([g.key for g in images]) != len(images):
        raise AssertionError("projections of the straddling subgroup are dependent")
    form = center_and_pairs(images)

    # measure each gbar_j in turn and watch the refinement move
    rows = S.rows
    keep_rank, trace_rank = s_keep.rank, s_trace.rank
    for _, gbar in form.pairs:
        rows = measure_rows(rows, gbar.key, even, n)
        r = refine_local(_side_local(rows, fw, side, even), fw, side)
        new_keep, new_trace = (r.s1.rank, r.s2.rank) if traced == PART2 else (r.s2.rank, r.s1.rank)
        if new_keep != keep_rank + 1 or new_trace != trace_rank + 1:
            raise AssertionError(
                f"measuring {gbar} moved refinement ranks "
                f"({keep_rank},{trace_rank}) -> ({new_keep},{new_trace})"
            )
        keep_rank, trace_rank = new_keep, new_trace

    local_gens = [g.with_sign(1) for g in s_trace.generators]
    seed = [gbar for _, gbar in form.pairs] + local_gens + list(form.center)
    keys = [g.key for g in seed]
    full = complete_isotropic(keys, side_traced, [side_traced.key_mask], even)
    completion = [_plus(n, k, even) for k in full[len(keys):]]
    ops = seed + completion
    if len(ops) != len(side_traced):
        raise AssertionError(
            f"{len(ops)} operators selected for {len(side_traced)} qubits on side {side}"
        )
    for i, a in enumerate(ops):
        for b in ops[:i]:
            if gf2.key_commutator(a.key, b.key, even):
                raise AssertionError(f"selected operators {b} and {a} anticommute")
    if gf2.rank([op.key for op in ops]) != len(ops):
        raise AssertionError("selected operators are dependent")
    reducing = len(side_traced) - s_trace.rank - len(form.pairs)
    return SideSelection(
        side=side,
        qubits=side_traced,
        pairs=list(form.pairs),
        center=list(form.center),
        local_generators=local_gens,
        completion=completion,
        refinement_ranks=ref.ranks,
        reducing_count=reducing,
    )


def select_measurement_ops(
    S: StabilizerGroup, fw: FourWayPartition, traced: str = PART2
) -> MeasurementSelection:
    """Measurement operators for tracing out ``traced``: A-side list then B-side list.

    Per side: the second member of each anticommuting pair of the projected
    straddling subgroup, the local generators living on the traced part, the
    center of the projection, and a greedy commuting completion.
    """
    if traced not in (PART1, PART2):
        raise ValueError(f"traced must be {PART1!r} or {PART2!r}")
    if S.n != fw.n:
        raise DimensionError(f"{S.n}-qubit group with a {fw.n}-qubit partition")
    if not S.is_maximal:
        raise ValueError("select_measurement_ops needs a maximal group")
    dec = decompose(S.phase_free(), fw.bipartition)
    a_sel = _select_side(S, dec.s_a, fw, "A", traced)
    b_sel = _select_side(S, dec.s_b, fw, "B", traced)
    return MeasurementSelection(traced, a_sel, b_sel)


def _count_drops(S: StabilizerGroup, ops: Sequence[PauliOperator], part: Bipartition):
    """Measure ``ops`` in order; return (#measurements that lowered e_AB, final e_AB)."""
    rows = S.rows
    even = S._even
    e = entanglement_rank(S, part).e_ab
    drops = 0
    for op in ops:
        rows = measure_rows(rows, op.key, even, S.n)
        e_new = e_from_keys([k for k, _ in rows], part)
        if e_new > e:
            raise AssertionError(f"local measurement of {op} raised e_AB {e} -> {e_new}")
        if e_new < e:
            drops += 1
        e = e_new
    return drops, e


@dataclass
class TraceResult:
    traced: str
    selection: MeasurementSelection
    group: StabilizerGroup
    e: int
    drops_a_first: int
    drops_b_first: int
    e_full: int


def trace_side(S: StabilizerGroup, fw: FourWayPartition, traced: str) -> TraceResult:
    sel = select_measurement_ops(S, fw, traced)
    traced_set = fw.part2 if traced == PART2 else fw.part1
    plan = build_trace_out_plan(S, fw.bipartition, traced_set, sel.ops)
    reduced = trace_out(S, plan)
    e = entanglement_rank(reduced, fw.kept_bipartition(traced)).e_ab
    part = fw.bipartition
    _, e_full = _count_drops(S, sel.ops, part)
    drops_a, _ = _count_drops(S, sel.a_side.ops, part)
    drops_b, _ = _count_drops(S, sel.b_side.ops, part)
    return TraceResult(traced, sel, reduced, e, drops_a, drops_b, e_full)


@dataclass
class SsaReport:
    e_global: int
    e1: int
    e2: int
    n_a2: int
    n_b2: int
    n_a1: int
    n_b1: int
    p_a: int
    p_b: int
    ranks: dict
    bounds: dict
    checks: dict
    holds: bool
    ops: dict = field(default_factory=dict)
    mixture: int | None = None
    traces: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def all_checks(self) -> bool:
        return all(self.checks.values())

    def to_dict(self, explain: bool = False) -> dict:
        out = {
            "e_global": self.e_global,
            "e1": self.e1,
            "e2": self.e2,
            "n_a2": self.n_a2,
            "n_b2": self.n_b2,
            "n_a1": self.n_a1,
            "n_b1": self.n_b1,
            "p_a": self.p_a,
            "p_b": self.p_b,
            "ranks": dict(self.ranks),
            "bounds": dict(self.bounds),
            "checks": dict(self.checks),
            "holds": self.holds,
        }
        if self.mixture is not None:
            out["mixture"] = self.mixture
        if explain:
            out["ops"] = {k: list(v) for k, v in self.ops.items()}
        return out


def verify_ssa(S: StabilizerGroup, fw: FourWayPartition) -> SsaReport:
    """Run the construction for both traced halves and check every step of the bound."""
    if not S.is_maximal:
        raise ValueError("verify_ssa needs a maximal (pure-state) group")
    if S.n != fw.n:
        raise DimensionError(f"{S.n}-qubit group with a {fw.n}-qubit partition")
    part = fw.bipartition
    e = entanglement_rank(S, part).e_ab
    dec = decompose(S.phase_free(), part)
    ra1, ra2, ra12 = refine_local(dec.s_a, fw, "A").ranks
    rb1, rb2, rb12 = refine_local(dec.s_b, fw, "B").ranks
    t2 = trace_side(S, fw, PART2)
    t1 = trace_side(S, fw, PART1)
    n1, n2 = len(fw.part1), len(fw.part2)
    n_a2, n_b2 = t2.selection.reducing_count
    n_a1, n_b1 = t1.selection.reducing_count
    p_a, p_b = t2.selection.a_side.p, t2.selection.b_side.p
    p_a1, p_b1 = t1.selection.a_side.p, t1.selection.b_side.p

    e1_bound = e - n2 + ra2 + rb2 + (ra12 + rb12) / 2
    e2_bound = e - n1 + ra1 + rb1 + (ra12 + rb12) / 2
    n2_lower = (n2 - ra2 - rb2 - (ra12 + rb12) / 2) / 2
    n1_lower = (n1 - ra1 - rb1 - (ra12 + rb12) / 2) / 2
    ranks = {
        "s_a": dec.s_a.rank,
        "s_b": dec.s_b.rank,
        "s_ab": dec.s_ab.rank,
        "s_a1": ra1,
        "s_a2": ra2,
        "s_a12": ra12,
        "s_b1": rb1,
        "s_b2": rb2,
        "s_b12": rb12,
    }
    bounds = {
        "e1_bound": e1_bound,
        "e2_bound": e2_bound,
        "n_part2_lower": n2_lower,
        "n_part1_lower": n1_lower,
        "reductions_a2": t2.drops_a_first,
        "reductions_b2": t2.drops_b_first,
        "reductions_a1": t1.drops_a_first,
        "reductions_b1": t1.drops_b_first,
    }
    checks = {
        "pairs_a_le_half_straddling": 2 * p_a <= ra12,
        "pairs_b_le_half_straddling": 2 * p_b <= rb12,
        "pairs_independent_of_cut": p_a == p_a1 and p_b == p_b1,
        "n_a2_lower": 2 * n_a2 >= 2 * (len(fw.a2) - ra2) - ra12,
        "n_b2_lower": 2 * n_b2 >= 2 * (len(fw.b2) - rb2) - rb12,
        "n_a1_lower": 2 * n_a1 >= 2 * (len(fw.a1) - ra1) - ra12,
        "n_b1_lower": 2 * n_b1 >= 2 * (len(fw.b1) - rb1) - rb12,
        "achieved_a2": t2.drops_a_first >= n_a2,
        "achieved_b2": t2.drops_b_first >= n_b2,
        "achieved_a1": t1.drops_a_first >= n_a1,
        "achieved_b1": t1.drops_b_first >= n_b1,
        "max_ge_mean_part2": max(n_a2, n_b2) >= n2_lower,
        "max_ge_mean_part1": max(n_a1, n_b1) >= n1_lower,
        "e1_le_e_minus_2n": t2.e <= e - 2 * max(n_a2, n_b2),
        "e2_le_e_minus_2n": t1.e <= e - 2 * max(n_a1, n_b1),
        "e1_bound": t2.e <= e1_bound,
        "e2_bound": t1.e <= e2_bound,
        "branch_e_matches_full_e": t2.e == t2.e_full and t1.e == t1.e_full,
        "refinement_a_ranks": ra1 + ra2 + ra12 == dec.s_a.rank,
        "refinement_b_ranks": rb1 + rb2 + rb12 == dec.s_b.rank,
        "local_rank_accounting": dec.s_a.rank + dec.s_b.rank == S.n - e,
        "e_even": e % 2 == 0 and t1.e % 2 == 0 and t2.e % 2 == 0,
    }
    holds = t1.e + t2.e <= e
    report = SsaReport(
        e_global=e,
        e1=t2.e,
        e2=t1.e,
        n_a2=n_a2,
        n_b2=n_b2,
        n_a1=n_a1,
        n_b1=n_b1,
        p_a=p_a,
        p_b=p_b,
        ranks=ranks,
        bounds=bounds,
        checks=checks,
        holds=holds,
        ops={
            PART2: [str(op) for op in t2.selection.ops],
            PART1: [str(op) for op in t1.selection.ops],
        },
        traces={PART2: t2, PART1: t1},
    )
    if not holds or not report.all_checks:
        failed = [k for k, v in checks.items() if not v]
        log.error(
            "super-additivity check failed (holds=%s, failed=%s) for partition %s",
            holds,
            failed,
            fw.spec(),
        )
    return report


def verify_ssa_mixed(
    cps: Sequence[tuple[float, StabilizerGroup]], fw: FourWayPartition
) -> SsaReport:
    """Mixtures of pure stabilizer states sharing one group up to signs."""
    if not cps:
        raise ValueError("empty mixture")
    weights = [w for w, _ in cps]
    if any(w <= 0 for w in weights):
        raise ValueError("mixture weights must be positive")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError(f"mixture weights sum to {sum(weights)}, not 1")
    shared = cps[0][1].phase_free()
    for _, g in cps[1:]:
        if g.phase_free() != shared:
            raise InvalidGroupError("mixture components differ beyond generator signs")
    report = verify_ssa(shared, fw)
    report.mixture = len(cps)
    return report


# --- code projectors ------------------------------------------------------


def _local_candidates(n: int, region: QubitSet) -> Iterable[int]:
    qs = list(region)
    for letters in itertools.product(range(4), repeat=len(qs)):
        key = 0
        for q, v in zip(qs, letters):
            key |= v << (2 * q)
        if key:
            yield key


def _exhaustive_completion(keys: list[int], part: Bipartition, n: int, even: int):
    """Depth-first search over {A,B}-local additions (small n only)."""
    cands = list(_local_candidates(n, part.a)) + list(_local_candidates(n, part.b))

    def extend(cur: list[int]):
        if len(cur) == n:
            return cur
        span = gf2.Echelon.from_rows(cur)
        for c in cands:
            if any(gf2.key_commutator(c, k, even) for k in cur) or span.contains(c):
                continue
            found = extend(cur + [c])
            if found is not None:
                return found
            return None
        return None

    return extend(list(keys))


def complete_to_maximal(H: StabilizerGroup, part: Bipartition) -> StabilizerGroup:
    """Maximal group containing ``H`` whose entanglement is ``2 * pair_count(H)``.

    Only {A,B}-local operators are added while possible: a local operator that
    commutes with the group adds a zero row and column to the restricted
    commutation matrix, so the pair count, and with it the final ``e_AB``,
    cannot change.
    """
    if H.n != part.n:
        raise DimensionError(f"{H.n}-qubit group with a {part.n}-qubit partition")
    n = H.n
    even = H._even
    p = pair_count(H, part)
    keys = [k for k, _ in H._rows]
    trace = []
    full = complete_isotropic(keys, range(n), [part.a.key_mask, part.b.key_mask], even)
    trace.append(f"local greedy added {len(full) - len(keys)} operators")
    while len(full) < n:
        v = commutant_extension(full, (1 << (2 * n)) - 1, even)
        if v is None:
            break
        trace.append(f"non-local fallback added {_plus(n, v, even)}")
        full.append(v)
    added = [_plus(n, k, even) for k in full[len(keys):]]
    witness = StabilizerGroup(n, list(H.generators) + added, phase_agnostic=H.phase_agnostic, _trusted=True)
    if witness.is_maximal and entanglement_rank(witness, part).e_ab == 2 * p:
        return witness
    trace.append(f"greedy completion reached e_AB != {2 * p}")
    if n <= 8:
        found = _exhaustive_completion(keys, part, n, even)
        if found is not None:
            added = [_plus(n, k, even) for k in found[len(keys):]]
            witness = StabilizerGroup(n, list(H.generators) + added, phase_agnostic=H.phase_agnostic, _trusted=True)
            if entanglement_rank(witness, part).e_ab == 2 * p:
                return witness
        trace.append("exhaustive local search failed")
    raise CompletionError(f"could not complete to a maximal group with e_AB = {2 * p}", trace)


def ef_code_projector(cp: CodeProjector | StabilizerGroup, part: Bipartition):
    """``(p, witness)``: E_f of the code projector in ebits, and the optimal ensemble's group."""
    h = cp.h if isinstance(cp, CodeProjector) else cp
    p = pair_count(h, part)
    witness = complete_to_maximal(h, part)
    return p, witness
