import json

import numpy as np
import pytest

from stabsplit import (
    Bipartition,
    CodeProjector,
    FourWayPartition,
    InvalidGroupError,
    complete_to_maximal,
    ef_code_projector,
    entanglement_rank,
    pair_count,
    project_p2,
    random_stabilizer,
    refine_local,
    select_measurement_ops,
    verify_ssa,
    verify_ssa_mixed,
)
from stabsplit.codec import format_pauli
from stabsplit.oracle import code_projector_matrix, mixture_matrix, witness_decomposition
from stabsplit.superadditivity import PART1, PART2

from conftest import G, P, bip, random_fourway

TWO_BELL = ("XIXI", "ZIZI", "IXIX", "IZIZ")
GHZ4 = ("XXXX", "ZZII", "IZZI", "IIZZ")
PRODUCT4 = ("ZIII", "IZII", "IIZI", "IIIZ")
FW4 = FourWayPartition(4, [0], [1], [2], [3])


def strs(ops):
    return [format_pauli(o) for o in ops]


class TestRefineLocal:
    fw = FourWayPartition(4, [0], [1], [2], [3])

    def test_split_generators(self):
        r = refine_local(G("ZIII", "IZII"), self.fw, "A")
        assert r.ranks == (1, 1, 0)
        assert strs(r.s1.generators) == ["+ZIII"] and strs(r.s2.generators) == ["+IZII"]

    def test_straddling(self):
        r = refine_local(G("ZZII"), self.fw, "A")
        assert r.ranks == (0, 0, 1)

    def test_trivial(self):
        assert refine_local(_trivial(4), self.fw, "A").ranks == (0, 0, 0)

    def test_outside_side_rejected(self):
        with pytest.raises(ValueError):
            refine_local(G("IIZI"), self.fw, "A")


def _trivial(n):
    from stabsplit import StabilizerGroup

    return StabilizerGroup(n, [])


class TestProjectP2:
    def test_examples(self):
        fw = FourWayPartition(2, [0], [1], [], [])
        assert format_pauli(project_p2(P("XZ"), fw)) == "+IZ"
        assert project_p2(P("XI"), fw).is_identity()
        assert format_pauli(project_p2(P("-IY"), fw)) == "+IY"


class TestSelection:
    def test_two_bell_pairs(self):
        sel = select_measurement_ops(G(*TWO_BELL), FW4, PART2)
        assert sel.a_side.p == 0
        assert strs(sel.a_side.ops) == ["+IZII"]
        assert sel.reducing_count[0] == 1

    def test_product_state(self):
        sel = select_measurement_ops(G(*PRODUCT4), FW4, PART2)
        assert sel.reducing_count == (0, 0)

    def test_ghz(self):
        sel = select_measurement_ops(G(*GHZ4), FW4, PART2)
        assert sel.a_side.p == 0
        assert strs(sel.a_side.center) == ["+IZII"]
        assert sel.reducing_count[0] == 1

    @pytest.mark.parametrize("seed", range(20))
    def test_ops_are_local_and_inside_traced(self, seed):
        rnd = np.random.default_rng(seed)
        n = int(rnd.integers(4, 16))
        S = random_stabilizer(n, seed)
        fw = random_fourway(n, rnd)
        for traced, region in ((PART2, fw.part2), (PART1, fw.part1)):
            sel = select_measurement_ops(S, fw, traced)
            for op in sel.ops:
                assert fw.bipartition.is_local(op)
                assert not (op.x | op.z) & ~region.mask


class TestVerifySsa:
    def test_two_bell_pairs_saturate(self):
        r = verify_ssa(G(*TWO_BELL), FW4)
        assert (r.e_global, r.e1, r.e2, r.holds) == (4, 2, 2, True)
        assert r.all_checks

    def test_ghz(self):
        r = verify_ssa(G(*GHZ4), FW4)
        assert (r.e_global, r.e1, r.e2, r.holds) == (2, 0, 0, True)
        assert r.all_checks

    def test_product(self):
        r = verify_ssa(G(*PRODUCT4), FW4)
        assert (r.e_global, r.e1, r.e2) == (0, 0, 0) and r.holds

    def test_non_maximal_rejected(self):
        with pytest.raises(ValueError):
            verify_ssa(G("ZZII"), FW4)

    def test_json_keys_and_stability(self):
        r = verify_ssa(G(*TWO_BELL), FW4)
        d = r.to_dict()
        for key in ("e_global", "e1", "e2", "n_a2", "n_b2", "p_a", "p_b", "ranks", "bounds", "holds"):
            assert key in d
        assert json.dumps(d) == json.dumps(verify_ssa(G(*TWO_BELL), FW4).to_dict())
        assert "ops" in r.to_dict(explain=True) and "ops" not in d

    @pytest.mark.parametrize("seed", range(60))
    def test_random(self, seed):
        rnd = np.random.default_rng(seed)
        n = int(rnd.integers(4, 20))
        r = verify_ssa(random_stabilizer(n, seed), random_fourway(n, rnd))
        assert r.holds and r.all_checks, r.checks

    def test_traced_result_independent_of_signs(self):
        S = random_stabilizer(8, 4)
        flipped = S.__class__(8, [-g if i % 2 else g for i, g in enumerate(S.generators)])
        fw = random_fourway(8, np.random.default_rng(4))
        assert verify_ssa(S, fw).to_dict() == verify_ssa(flipped, fw).to_dict()


class TestVerifySsaMixed:
    def test_single_state(self):
        S = random_stabilizer(6, 2)
        fw = random_fourway(6, np.random.default_rng(2))
        mixed = verify_ssa_mixed([(1.0, S)], fw).to_dict()
        mixed.pop("mixture")
        assert mixed == verify_ssa(S, fw).to_dict()

    def test_bell_projector_mixture(self):
        a = G("XIXI", "ZIZI", "IZII", "IIIZ")
        b = G("-XIXI", "ZIZI", "IZII", "IIIZ")
        r = verify_ssa_mixed([(0.5, a), (0.5, b)], FW4)
        assert r.holds and r.mixture == 2

    def test_bad_weights(self):
        S = G(*TWO_BELL)
        with pytest.raises(ValueError):
            verify_ssa_mixed([(0.5, S), (0.6, S)], FW4)

    def test_groups_must_match_up_to_signs(self):
        with pytest.raises(InvalidGroupError):
            verify_ssa_mixed([(0.5, G(*TWO_BELL)), (0.5, G(*GHZ4))], FW4)


class TestCodeProjector:
    def test_bell_projector(self):
        p, w = ef_code_projector(CodeProjector(G("XX", "ZZ")), bip(2, [0]))
        assert p == 1 and w == G("XX", "ZZ")

    def test_classical_correlation(self):
        p, w = ef_code_projector(G("ZZ"), bip(2, [0]))
        assert p == 0 and w == G("ZZ", "ZI")
        assert entanglement_rank(w, bip(2, [0])).e_ab == 0

    def test_bell_times_mixed(self):
        H = G("XXI", "ZZI")
        p, w = ef_code_projector(H, Bipartition(3, [0], [1, 2]))
        assert p == 1 and w == G("XXI", "ZZI", "IIZ")
        assert entanglement_rank(w, bip(3, [0])).e_ab == 2
        ens = witness_decomposition(H, w)
        assert np.abs(mixture_matrix(ens) - code_projector_matrix(H)).max() < 1e-12

    @pytest.mark.parametrize(
        "gens, n, expected", [(("ZZ",), 2, ("ZZ", "ZI")), (("XX", "ZZ"), 2, ("XX", "ZZ")), ((), 1, ("Z",))]
    )
    def test_complete_to_maximal(self, gens, n, expected):
        from stabsplit import StabilizerGroup

        H = StabilizerGroup(n, [P(s) for s in gens])
        assert complete_to_maximal(H, bip(n, [0])) == G(*expected)

    @pytest.mark.parametrize("seed", range(30))
    def test_witness_contains_h_and_has_e_2p(self, seed):
        rnd = np.random.default_rng(seed)
        n = int(rnd.integers(1, 10))
        S = random_stabilizer(n, seed)
        H = S.__class__(n, S.generators[: int(rnd.integers(0, n + 1))])
        part = Bipartition(n, [q for q in range(n) if rnd.random() < 0.5])
        p, w = ef_code_projector(H, part)
        assert p == pair_count(H, part)
        assert w.is_maximal and entanglement_rank(w, part).e_ab == 2 * p
        for g in H.generators:
            assert w.contains(g).name == "MEMBER_PLUS"
