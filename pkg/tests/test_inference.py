import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from generators import random_network
from tvdiam.errors import CliqueNotFound, FactorTooLarge, UnknownVariable, ValidationError
from tvdiam.inference import (
    conditional_table,
    joint_marginal,
    junction_tree,
    moralize,
    mutual_information,
    triangulate,
)
from tvdiam.model import DiscreteVariable, make_network

seeds = st.integers(0, 2**32 - 1)


def _nx(g, nodes):
    out = nx.Graph(list(g.edges))
    out.add_nodes_from(nodes)
    return out


class TestGraphs:
    def test_moralize_marries_coparents(self, asia):
        m = moralize(asia.dag)
        assert m.has_edge("lung", "tub")
        assert m.has_edge("bronc", "either")
        assert len(m.edges) == 8 + 2

    def test_asia_elimination_order_and_fill(self, asia):
        tri, order = triangulate(moralize(asia.dag))
        assert order[:5] == ("asia", "tub", "xray", "dysp", "smoke")
        extra = set(tri.edges) - set(moralize(asia.dag).edges)
        assert extra == {("lung", "bronc")}

    @pytest.mark.parametrize("heuristic", ["min-fill", "min-degree"])
    @settings(max_examples=40, deadline=None)
    @given(seed=seeds)
    def test_triangulation_is_chordal(self, heuristic, seed):
        bn = random_network(np.random.default_rng(seed), n=8, max_levels=2, p_edge=0.4)
        mg = moralize(bn.dag)
        tri, order = triangulate(mg, heuristic)
        assert sorted(order) == sorted(bn.names)
        assert nx.is_chordal(_nx(tri, bn.names))
        assert set(mg.edges) <= set(tri.edges)

    def test_unknown_heuristic(self, asia):
        with pytest.raises(ValidationError):
            triangulate(moralize(asia.dag), "random")


class TestJunctionTree:
    @settings(max_examples=60, deadline=None)
    @given(seed=seeds)
    def test_structure(self, seed):
        bn = random_network(np.random.default_rng(seed), n=int(seed % 8) + 1, max_levels=2, p_edge=0.45)
        jt = junction_tree(bn)
        tri, _ = triangulate(moralize(bn.dag))
        g = _nx(tri, bn.names)
        assert {frozenset(c) for c in nx.find_cliques(g)} == set(jt.cliques)
        assert len(set(jt.cliques)) == len(jt.cliques)
        # every CPT family sits inside some clique
        for n in bn.names:
            fam = {n, *bn.parents(n)}
            assert any(fam <= c for c in jt.cliques)
        # cliques holding a variable form a connected subtree
        tree = nx.Graph(jt.tree_edges)
        tree.add_nodes_from(range(len(jt)))
        assert nx.is_forest(tree)
        for n in bn.names:
            holders = jt.containing(n)
            assert nx.is_connected(tree.subgraph(holders))
        for i in range(1, len(jt)):
            if jt.parents[i] is not None:
                assert jt.separators[i] <= jt.cliques[jt.parents[i]]
                assert jt.separators[i] == jt.cliques[i] & jt.cliques[jt.parents[i]]

    def test_asia_tree_shape(self, asia):
        jt = junction_tree(asia)
        assert jt.label(0) == "asia,tub"
        xray = jt.find({"either", "xray"})
        assert jt.cliques[jt.parents[xray]] == frozenset({"tub", "lung", "either"})
        assert jt.find("smoke,lung,bronc") == jt.find({"bronc", "lung", "smoke"})
        assert jt.path(0, xray) == [0, jt.parents[xray], xray]
        with pytest.raises(CliqueNotFound):
            jt.find({"asia", "xray"})
        with pytest.raises(CliqueNotFound):
            jt.find(99)


class TestVariableElimination:
    @settings(max_examples=60, deadline=None)
    @given(seed=seeds, data=st.data())
    def test_marginals_match_enumeration(self, seed, data):
        rng = np.random.default_rng(seed)
        bn = random_network(rng, n=int(rng.integers(1, 7)), max_levels=3)
        joint = oracles.full_joint(bn)
        scope = data.draw(st.lists(st.sampled_from(bn.names), unique=True, max_size=3))
        got = joint_marginal(bn, scope).values
        want = oracles.marginal(bn, joint, scope) if scope else np.array(1.0)
        np.testing.assert_allclose(got, want, atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds)
    def test_conditional_tables_match_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        bn = random_network(rng, n=5, max_levels=3, zeros=0.3)
        names = list(bn.names)
        rng.shuffle(names)
        targets, givens = names[:2], names[2:4]
        joint = oracles.full_joint(bn)
        cpt = conditional_table(bn, targets, givens)
        np.testing.assert_allclose(cpt.table, oracles.conditional(bn, joint, targets, givens), atol=1e-10)
        mass = oracles.marginal(bn, joint, givens).ravel()
        assert list(cpt.flagged_rows) == [i for i, m in enumerate(mass) if m <= 0]

    def test_compound_child_naming(self, asia):
        cpt = conditional_table(asia, ["lung", "either"], ["smoke"])
        assert cpt.child.name == "(lung,either)"
        assert cpt.child.levels == ("yes,yes", "yes,no", "no,yes", "no,no")

    def test_zero_mass_rows_flagged(self, asia):
        cpt = conditional_table(asia, ["xray"], ["lung", "either"])
        # lung = yes forces either = yes
        assert cpt.flagged_rows == (1,)
        np.testing.assert_allclose(cpt.table[1], [0.5, 0.5])

    def test_guardrail(self, asia):
        with pytest.raises(FactorTooLarge):
            joint_marginal(asia, ["asia", "xray", "dysp"], max_states=4)
        assert joint_marginal(asia, ["asia"], max_states=4).values.sum() == pytest.approx(1.0)

    def test_bad_queries(self, asia):
        with pytest.raises(ValidationError):
            conditional_table(asia, ["lung"], ["lung"])
        with pytest.raises(ValidationError):
            joint_marginal(asia, ["lung", "lung"])
        with pytest.raises(UnknownVariable):
            joint_marginal(asia, ["nope"])


class TestMutualInformation:
    def test_independent_is_zero(self):
        a, b = DiscreteVariable("a", "xy"), DiscreteVariable("b", "xy")
        bn = make_network([a, b], {"a": ((), [[0.3, 0.7]]), "b": ((), [[0.6, 0.4]])})
        assert mutual_information(bn, "a", "b") == pytest.approx(0.0, abs=1e-15)

    def test_deterministic_copy_is_entropy(self):
        a, b = DiscreteVariable("a", "xy"), DiscreteVariable("b", "xy")
        bn = make_network([a, b], {"a": ((), [[0.5, 0.5]]), "b": (("a",), [[1, 0], [0, 1]])})
        assert mutual_information(bn, "a", "b") == pytest.approx(np.log(2), abs=1e-15)

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds)
    def test_symmetric_nonnegative_and_matches_oracle(self, seed):
        rng = np.random.default_rng(seed)
        bn = random_network(rng, n=5, max_levels=3, zeros=0.2)
        x, y = rng.choice(bn.names, 2, replace=False)
        mi = mutual_information(bn, x, y)
        assert mi >= -1e-15
        assert mi == pytest.approx(mutual_information(bn, y, x), abs=1e-12)
        assert mi == pytest.approx(oracles.mutual_information(bn, oracles.full_joint(bn), x, y), abs=1e-10)

    def test_same_variable(self, asia):
        with pytest.raises(ValidationError):
            mutual_information(asia, "lung", "lung")
