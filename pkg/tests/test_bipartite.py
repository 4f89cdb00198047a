import numpy as np
import pytest
from hypothesis import given, strategies as st

from stabsplit import (
    Bipartition,
    center_and_pairs,
    decompose,
    entanglement_rank,
    local_subgroup,
    pair_count,
    random_stabilizer,
    symplectic_product,
)
from stabsplit.bipartite import commutation_matrix
from stabsplit.codec import format_pauli
from stabsplit.oracle import schmidt_entropy, statevector
from stabsplit.pauli import restrict

from conftest import G, P, bip

BELL = ("XX", "ZZ")
GHZ3 = ("XXX", "ZZI", "IZZ")
TWO_BELL = ("XIXI", "ZIZI", "IXIX", "IZIZ")


def labels(group):
    return sorted(format_pauli(g) for g in group.elements() if not g.is_identity())


class TestBipartition:
    def test_b_defaults_to_complement(self):
        assert Bipartition(4, [0, 2]).b.indices == (1, 3)

    @pytest.mark.parametrize("a, b", [([0], [0, 1]), ([0], [1]), ([0, 3], [1, 2])])
    def test_invalid(self, a, b):
        with pytest.raises((ValueError, IndexError)):
            Bipartition(3, a, b)


class TestLocalSubgroup:
    def test_bell_has_no_local_elements(self):
        s_a, s_b = local_subgroup(G(*BELL), bip(2, [0]))
        assert s_a.rank == s_b.rank == 0

    def test_product_state(self):
        s_a, s_b = local_subgroup(G("ZI", "IZ"), bip(2, [0]))
        assert labels(s_a) == ["+ZI"] and labels(s_b) == ["+IZ"]

    def test_ghz_brute_force(self):
        S = G(*GHZ3)
        s_a, s_b = local_subgroup(S, bip(3, [0]))
        brute_b = [format_pauli(g) for g in S.elements() if not g.is_identity() and not (g.x | g.z) & 1]
        brute_a = [format_pauli(g) for g in S.elements() if not g.is_identity() and not (g.x | g.z) & 0b110]
        assert labels(s_a) == sorted(brute_a) == []
        assert labels(s_b) == sorted(brute_b) == ["+IZZ"]


class TestEntanglementRank:
    @pytest.mark.parametrize(
        "gens, a, e",
        [(BELL, [0], 2), (("ZI", "IZ"), [0], 0), (GHZ3, [0], 2), (TWO_BELL, [0, 1], 4), (TWO_BELL, [0, 2], 0)],
    )
    def test_examples_against_oracle(self, gens, a, e):
        S = G(*gens)
        part = bip(S.n, a)
        r = entanglement_rank(S, part)
        assert r.e_ab == e and r.entropy_ebits == e / 2
        assert schmidt_entropy(statevector(S), part) == pytest.approx(e / 2, abs=1e-9)

    @given(st.integers(1, 60), st.integers(0, 2**32), st.data())
    def test_symmetric_and_bounded(self, n, seed, data):
        S = random_stabilizer(n, seed)
        a = data.draw(st.sets(st.integers(0, n - 1)))
        part = Bipartition(n, a)
        e = entanglement_rank(S, part).e_ab
        assert e == entanglement_rank(S, part.swapped()).e_ab
        assert e % 2 == 0 and e <= 2 * min(len(part.a), len(part.b))

    def test_degenerate_partition(self):
        S = random_stabilizer(5, 3)
        assert entanglement_rank(S, bip(5, [])).e_ab == 0


class TestDecompose:
    def test_bell(self):
        d = decompose(G(*BELL), bip(2, [0]))
        assert d.s_ab == G(*BELL) and d.e_ab == 2

    def test_two_bell_pairs(self):
        d = decompose(G(*TWO_BELL), bip(4, [0, 1]))
        assert d.s_ab.rank == 4 and d.e_ab == 4

    def test_product(self):
        assert decompose(G("ZI", "IZ"), bip(2, [0])).s_ab.rank == 0

    @pytest.mark.parametrize("seed", range(10))
    def test_rank_accounting(self, seed):
        rnd = np.random.default_rng(seed)
        n = int(rnd.integers(2, 20))
        S = random_stabilizer(n, seed)
        part = Bipartition(n, [q for q in range(n) if rnd.random() < 0.5])
        d = decompose(S, part)
        assert d.s_a.rank + d.s_b.rank + d.s_ab.rank == n
        assert d.s_ab.rank == d.e_ab
        for g in d.s_a.generators:
            assert S.contains(g).name != "NOT_MEMBER"


class TestPairCount:
    def test_bell_commutation_matrix(self):
        H = G(*BELL)
        assert commutation_matrix(H.generators, bip(2, [0]).a) == [0b10, 0b01]
        assert pair_count(H, bip(2, [0])) == 1

    @pytest.mark.parametrize("gens", [("ZZ",), ("ZI", "IZ")])
    def test_zero(self, gens):
        assert pair_count(G(*gens), bip(2, [0])) == 0

    @pytest.mark.parametrize("seed", range(8))
    def test_same_from_either_side_and_basis_free(self, seed):
        rnd = np.random.default_rng(seed)
        n = int(rnd.integers(2, 10))
        S = random_stabilizer(n, seed)
        k = int(rnd.integers(0, n + 1))
        H = S.__class__(n, S.generators[:k])
        part = Bipartition(n, [q for q in range(n) if rnd.random() < 0.5])
        p = pair_count(H, part)
        assert p == pair_count(H, part.swapped())
        assert p == pair_count(S.__class__(n, H.canonical_basis), part)

    def test_maximal_group_pair_count_is_half_e(self):
        for seed in range(20):
            S = random_stabilizer(7, seed)
            part = bip(7, [0, 2, 5])
            assert 2 * pair_count(S, part) == entanglement_rank(S, part).e_ab


class TestCenterAndPairs:
    def test_single_pair(self):
        cp = center_and_pairs([P("X"), P("Z")])
        assert cp.center == [] and [(str(a), str(b)) for a, b in cp.pairs] == [("+X", "+Z")]

    def test_all_central(self):
        cp = center_and_pairs([P("ZI"), P("IZ")])
        assert sorted(map(str, cp.center)) == ["+IZ", "+ZI"] and cp.pairs == []

    def test_mixed(self):
        cp = center_and_pairs([P("XI"), P("ZI"), P("IZ")])
        assert list(map(str, cp.center)) == ["+IZ"]
        assert [(str(a), str(b)) for a, b in cp.pairs] == [("+XI", "+ZI")]

    def test_dependent_input(self):
        with pytest.raises(ValueError):
            center_and_pairs([P("ZI"), P("IZ"), P("ZZ")])

    @pytest.mark.parametrize("seed", range(10))
    def test_canonical_commutation_structure(self, seed):
        rnd = np.random.default_rng(seed)
        n = 6
        S = random_stabilizer(n, seed)
        qs = [q for q in range(n) if rnd.random() < 0.5] or [0]
        ops = [restrict(g, qs) for g in S.generators]
        from stabsplit.gf2 import Echelon

        indep, ech = [], Echelon()
        for op in ops:
            if not op.is_identity() and ech.insert(op.key) is None:
                indep.append(op)
        cp = center_and_pairs(indep)
        assert len(cp.center) + 2 * len(cp.pairs) == len(indep)
        for c in cp.center:
            assert all(symplectic_product(c, o) == 0 for o in cp.operators)
        for i, (a, b) in enumerate(cp.pairs):
            assert symplectic_product(a, b) == 1
            for j, (c, d) in enumerate(cp.pairs):
                if i != j:
                    assert symplectic_product(a, c) == symplectic_product(a, d) == 0
                    assert symplectic_product(b, c) == symplectic_product(b, d) == 0
