import numpy as np
import pytest

from stabsplit import (
    Bipartition,
    OutcomeKind,
    PauliOperator,
    QubitSet,
    StabilizerGroup,
    build_trace_out_plan,
    entanglement_rank,
    measure,
    random_stabilizer,
    trace_out,
)
from stabsplit.codec import format_pauli
from stabsplit.measurement import BRANCH_AGNOSTIC, SAMPLED, PlanError
from stabsplit.oracle import apply_pauli, branch_states, reduced_density_matrix, statevector
from stabsplit.oracle import _gauge

from conftest import G, P, bip, random_bipartition

BELL = ("XX", "ZZ")
TWO_BELL = ("XIXI", "ZIZI", "IXIX", "IZIZ")


class TestMeasure:
    def test_one_side_of_bell_pair(self):
        S = G(*BELL)
        out = measure(S, P("ZI"))
        assert out.kind is OutcomeKind.RANDOM
        assert out.post_group.phase_free() == G("ZI", "ZZ", phase_agnostic=True)
        assert entanglement_rank(S, bip(2, [0])).e_ab == 2
        assert entanglement_rank(out.post_group, bip(2, [0])).e_ab == 0

    def test_deterministic_member(self):
        S = G(*BELL)
        out = measure(S, P("ZZ"))
        assert out.kind is OutcomeKind.DETERMINISTIC_PLUS and out.value == 1
        assert out.post_group == S

    def test_deterministic_sign_member(self):
        out = measure(G(*BELL), P("-ZZ"))
        assert out.kind is OutcomeKind.DETERMINISTIC_MINUS and out.value == -1

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError):
            measure(G(*BELL), P("+iZZ"))

    def test_sampled_needs_seed_and_is_deterministic(self):
        S = random_stabilizer(6, 1)
        M = P("ZIIIII")
        with pytest.raises(ValueError):
            measure(S, M, SAMPLED)
        outs = {measure(S, M, SAMPLED, seed=(3, i)).value for i in range(40)}
        assert outs == {1, -1} or measure(S, M).kind is not OutcomeKind.RANDOM
        assert measure(S, M, SAMPLED, seed=5) == measure(S, M, SAMPLED, seed=5)

    def test_non_maximal_commuting_nonmember_joins(self):
        out = measure(G("ZZ"), P("ZI"))
        assert out.post_group.rank == 2

    @pytest.mark.parametrize("seed", range(25))
    def test_dense_consistency(self, seed):
        rnd = np.random.default_rng(seed)
        n = int(rnd.integers(1, 7))
        S = random_stabilizer(n, seed)
        x, z = int(rnd.integers(0, 1 << n)), int(rnd.integers(0, 1 << n))
        M = PauliOperator(n, x, z, (x & z).bit_count())
        psi = statevector(S)
        out = measure(S, M, SAMPLED, seed=seed)
        proj = (psi + out.value * apply_pauli(M, psi)) / 2
        norm = np.linalg.norm(proj)
        if out.kind is OutcomeKind.RANDOM:
            assert norm**2 == pytest.approx(0.5)
        else:
            assert norm**2 == pytest.approx(1.0)
        assert np.allclose(_gauge(proj / norm), statevector(out.post_group))


class TestPlan:
    def test_greedy_z_first(self):
        plan = build_trace_out_plan(G(*BELL), bip(2, [0]), [1])
        assert [format_pauli(o) for o in plan.ops] == ["+IZ"]

    def test_seed_forces_skipping(self):
        plan = build_trace_out_plan(G(*BELL), bip(2, [0]), [0, 1], [P("XI")])
        assert [format_pauli(o) for o in plan.ops] == ["+XI", "+IZ"]

    @pytest.mark.parametrize(
        "seed_ops",
        [["XX"], ["ZI"], ["XIII", "ZIII"], ["ZIII", "ZIII"]],
        ids=["non-local", "outside-traced", "anticommuting", "dependent"],
    )
    def test_rejections(self, seed_ops):
        S = G(*TWO_BELL)
        traced = [0, 1]
        seeds = [P(s if len(s) == 4 else s + "II") for s in seed_ops]
        with pytest.raises(PlanError):
            build_trace_out_plan(S, bip(4, [0, 2]), [1, 3] if seed_ops == ["ZI"] else traced, seeds)

    @pytest.mark.parametrize("seed", range(15))
    def test_plan_is_complete_local_and_commuting(self, seed):
        rnd = np.random.default_rng(seed)
        n = int(rnd.integers(2, 14))
        S = random_stabilizer(n, seed)
        part = random_bipartition(n, rnd)
        traced = [q for q in range(n) if rnd.random() < 0.5]
        plan = build_trace_out_plan(S, part, traced)
        assert len(plan.ops) == len(traced)
        for op in plan.ops:
            assert part.is_local(op)
            assert not (op.x | op.z) & ~QubitSet(tuple(traced)).mask


class TestTraceOut:
    def test_bell(self):
        S = G(*BELL)
        plan = build_trace_out_plan(S, bip(2, [0]), [1])
        red = trace_out(S, plan)
        assert red.n == 1 and red == G("Z", phase_agnostic=True)
        assert entanglement_rank(red, bip(1, [0])).e_ab == 0

    def test_two_bell_pairs_leaves_one_pair(self):
        S = G(*TWO_BELL)
        plan = build_trace_out_plan(S, bip(4, [0, 1]), [1, 3], [P("IZII"), P("IIIZ")])
        red = trace_out(S, plan)
        assert red == G("XX", "ZZ", phase_agnostic=True)
        assert entanglement_rank(red, bip(2, [0])).e_ab == 2
        psi = statevector(S)
        rho = reduced_density_matrix(psi, [0, 2])
        bell = statevector(G(*BELL))
        assert np.allclose(rho, np.outer(bell, bell.conj()))

    def test_product_state(self):
        S = G("ZIII", "IZII", "IIZI", "IIIZ")
        plan = build_trace_out_plan(S, bip(4, [0, 1]), [0, 3])
        assert entanglement_rank(trace_out(S, plan), bip(2, [0])).e_ab == 0

    @pytest.mark.parametrize("seed", range(12))
    def test_branches_share_group_and_reconstruct(self, seed):
        rnd = np.random.default_rng(100 + seed)
        n = int(rnd.integers(2, 9))
        S = random_stabilizer(n, seed)
        part = random_bipartition(n, rnd)
        traced = QubitSet(tuple(q for q in range(n) if rnd.random() < 0.5))
        kept = [q for q in range(n) if q not in traced]
        plan = build_trace_out_plan(S, part, traced)
        red = trace_out(S, plan)
        psi = statevector(S)
        branches = branch_states(psi, plan.ops, traced)
        probs = [p for p, _ in branches]
        assert np.allclose(probs, probs[0])
        mix = sum(p * np.outer(v, v.conj()) for p, v in branches)
        assert np.abs(mix - reduced_density_matrix(psi, kept)).max() < 1e-10
        if kept:
            for _, v in branches:
                for g in red.generators:
                    assert abs(abs(np.vdot(v, apply_pauli(g, v))) - 1) < 1e-9


def test_branch_agnostic_mode_name():
    assert BRANCH_AGNOSTIC != SAMPLED
