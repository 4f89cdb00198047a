"""Pauli measurements on stabilizer groups and measurement-based partial traces."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .bipartite import Bipartition
from .group import Membership, StabilizerGroup, contains, kernel_rows
from .pauli import DimensionError, PauliOperator, QubitSet, restrict

BRANCH_AGNOSTIC = "branch_agnostic"
SAMPLED = "sampled"


class OutcomeKind(enum.Enum):
    DETERMINISTIC_PLUS = "deterministic_plus"
    DETERMINISTIC_MINUS = "deterministic_minus"
    RANDOM = "random"


@dataclass(frozen=True)
class MeasurementOutcome:
    kind: OutcomeKind
    post_group: StabilizerGroup
    value: int = 1


class PlanError(ValueError):
    """A trace-out plan violates its invariants."""


@dataclass(frozen=True)
class TraceOutPlan:
    partition: Bipartition
    traced: QubitSet
    kept: QubitSet
    ops: tuple[PauliOperator, ...]

    @property
    def n(self) -> int:
        return self.partition.n

    def validate(self) -> None:
        _check_ops(self.ops, self.partition, self.traced)
        if len(self.ops) != len(self.traced):
            raise PlanError(f"{len(self.ops)} operators for {len(self.traced)} traced qubits")


def _sign_bit(seed) -> int:
    entropy = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
    return int(gen.integers(0, 2))


def measure(
    S: StabilizerGroup,
    M: PauliOperator,
    mode: str = BRANCH_AGNOSTIC,
    seed=None,
) -> MeasurementOutcome:
    """Measure the Hermitian Pauli ``M`` on the state (or code) stabilized by ``S``.

    If ``M`` anticommutes with some generator, the first such generator is
    multiplied into the other anticommuting ones and then replaced by ``+M``
    (``-M`` on a sampled ``-1`` outcome). ``seed`` may be an int or a tuple
    such as ``(run_seed, measurement_index)``.
    """
    if M.n != S.n:
        raise DimensionError(f"{M.n}-qubit measurement on a {S.n}-qubit group")
    if not M.is_hermitian():
        raise ValueError(f"measured operator {M} is not Hermitian")
    if mode not in (BRANCH_AGNOSTIC, SAMPLED):
        raise ValueError(f"unknown measurement mode {mode!r}")
    if mode == SAMPLED and seed is None:
        raise ValueError("sampled mode needs a seed")
    even = S._even
    key = M.key
    rows = S._rows
    anti = [i for i, (k, _) in enumerate(rows) if gf2.key_commutator(k, key, even)]
    if not anti:
        member = contains(S, M)
        if member is Membership.MEMBER_PLUS:
            return MeasurementOutcome(OutcomeKind.DETERMINISTIC_PLUS, S, 1)
        if member is Membership.MEMBER_MINUS:
            return MeasurementOutcome(OutcomeKind.DETERMINISTIC_MINUS, S, -1)
        # M lies outside the span of a non-maximal group: it joins the group
        flip = _sign_bit(seed) if mode == SAMPLED else 0
        signed = M if flip == 0 else -M
        post = StabilizerGroup.from_rows(
            S.n, rows + [(key, signed.phase)], phase_agnostic=S.phase_agnostic
        )
        kind = OutcomeKind.RANDOM if mode == SAMPLED else OutcomeKind.DETERMINISTIC_PLUS
        return MeasurementOutcome(kind, post, -1 if flip else 1)
    flip = _sign_bit(seed) if mode == SAMPLED else 0
    new_rows = _replace_anticommuting(rows, anti, key, (M.phase + 2 * flip) % 4, even)
    post = StabilizerGroup.from_rows(S.n, new_rows, phase_agnostic=S.phase_agnostic)
    return MeasurementOutcome(OutcomeKind.RANDOM, post, -1 if flip else 1)


def _replace_anticommuting(rows, anti, key, phase, even):
    first = anti[0]
    k1, p1 = rows[first]
    out = list(rows)
    for j in anti[1:]:
        kj, pj = out[j]
        out[j] = (kj ^ k1, (pj + p1 + gf2.key_product_phase(kj, k1, even)) % 4)
    out[first] = (key, phase)
    return out


def measure_rows(rows, key: int, even: int, n: int) -> list[tuple[int, int]]:
    """Branch-agnostic measurement on raw ``(key, phase)`` rows.

    Commuting operators outside the span are appended; members leave the rows
    unchanged. Used by the decomposition code, which only cares about the
    group up to phases.
    """
    anti = [i for i, (k, _) in enumerate(rows) if gf2.key_commutator(k, key, even)]
    phase = ((key >> 1) & key & even).bit_count() % 4
    if anti:
        return _replace_anticommuting(rows, anti, key, phase, even)
    if len(rows) == n:
        return list(rows)
    ech = gf2.Echelon.from_rows(k for k, _ in rows)
    if ech.contains(key):
        return list(rows)
    return list(rows) + [(key, phase)]


def _check_ops(ops: Sequence[PauliOperator], part: Bipartition, traced: QubitSet) -> None:
    n = part.n
    even = gf2.even_mask(n)
    ech = gf2.Echelon()
    for i, op in enumerate(ops):
        if op.n != n:
            raise PlanError(f"operator {i} acts on {op.n} qubits, expected {n}")
        support = op.x | op.z
        if support & ~traced.mask:
            raise PlanError(f"operator {op} reaches outside the traced qubits")
        if not part.is_local(op):
            raise PlanError(f"operator {op} is not local for the bipartition")
        for j in range(i):
            if gf2.key_commutator(op.key, ops[j].key, even):
                raise PlanError(f"operators {ops[j]} and {op} anticommute")
        if op.is_identity() or ech.insert(op.key) is not None:
            raise PlanError(f"operator {op} is dependent on earlier operators")


def commutant_extension(keys: Sequence[int], region: int, even: int) -> int | None:
    """An operator supported on ``region`` (a key mask) that commutes with
    every row in ``keys`` and lies outside their span, or ``None``."""
    constraints = [gf2.swap_pairs(k, even) & region for k in keys]
    span = gf2.Echelon.from_rows(keys)
    for v in gf2.nullspace(constraints, region):
        if not span.contains(v):
            return v
    return None


def complete_isotropic(
    keys: list[int], qubits: Iterable[int], regions: Sequence[int], even: int
) -> list[int]:
    """Greedily extend commuting independent ``keys`` on ``qubits``.

    Single-qubit Z, then X, in ascending qubit order; then commutant
    elements per region until nothing commutes and stays independent.
    """
    keys = list(keys)
    span = gf2.Echelon.from_rows(keys)
    for q in qubits:
        for cand in (2 << (2 * q), 1 << (2 * q)):
            if any(gf2.key_commutator(cand, k, even) for k in keys):
                continue
            if span.insert(cand) is None:
                keys.append(cand)
                break
    for region in regions:
        while True:
            v = commutant_extension(keys, region, even)
            if v is None:
                break
            keys.append(v)
    return keys


def build_trace_out_plan(
    S: StabilizerGroup,
    part: Bipartition,
    traced: Iterable[int] | QubitSet,
    seed_ops: Sequence[PauliOperator] = (),
) -> TraceOutPlan:
    """Complete ``seed_ops`` to a full commuting, {A,B}-local set on ``traced``."""
    if S.n != part.n:
        raise DimensionError(f"{S.n}-qubit group with a {part.n}-qubit partition")
    traced = QubitSet.of(traced).check(S.n)
    kept = QubitSet(tuple(q for q in range(S.n) if q not in traced))
    seeds = tuple(op.with_sign(1) for op in seed_ops)
    _check_ops(seeds, part, traced)
    even = S._even
    regions = [(traced & part.a).key_mask, (traced & part.b).key_mask]
    keys = complete_isotropic([op.key for op in seeds], traced, regions, even)
    ops = seeds + tuple(
        PauliOperator.from_key(S.n, k, ((k >> 1) & k & even).bit_count())
        for k in keys[len(seeds):]
    )
    plan = TraceOutPlan(part, traced, kept, ops)
    if len(ops) != len(traced):
        raise AssertionError("no complete local commuting set found; this is a bug")
    plan.validate()
    return plan


def reduce_to_kept(
    rows: Sequence[tuple[int, int]], n: int, traced: QubitSet, kept: QubitSet
) -> StabilizerGroup:
    """Elements trivial on ``traced``, restricted to ``kept`` (phase-agnostic)."""
    even = gf2.even_mask(n)
    kernel, _ = kernel_rows(rows, traced.key_mask, even)
    gens = [restrict(PauliOperator.from_key(n, k, p), kept) for k, p in kernel]
    return StabilizerGroup(len(kept), gens, phase_agnostic=True, _trusted=True)


def trace_out(S: StabilizerGroup, plan: TraceOutPlan) -> StabilizerGroup:
    """Common stabilizer group (up to phases) of the branch states on the kept qubits."""
    if plan.n != S.n:
        raise DimensionError(f"plan for {plan.n} qubits applied to {S.n}-qubit group")
    rows = post_measurement_rows(S, plan.ops)
    out = reduce_to_kept(rows, S.n, plan.traced, plan.kept)
    if S.is_maximal and out.rank != len(plan.kept):
        raise AssertionError("branch states are not pure; plan is incomplete")
    return out


def post_measurement_rows(S: StabilizerGroup, ops: Iterable[PauliOperator]):
    rows = S.rows
    even = S._even
    for op in ops:
        rows = measure_rows(rows, op.key, even, S.n)
    return rows
