import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_network
from tvdiam import datasets
from tvdiam.errors import BadContext, NonConsecutiveOrdinal, NotAParent, RowSumViolation, TooFewLevels, ValidationError
from tvdiam.model import build_network
from tvdiam.refinement import (
    amalgamate_levels,
    asymmetry_scan,
    csi_index,
    partial_index,
    suggest_amalgamation,
)
from tvdiam.sensitivity import contexts, edge_strength
from tvdiam.variation import upper_diameter

seeds = st.integers(0, 2**32 - 1)


class TestAmalgamation:
    def test_merged_level_and_own_cpt(self, growth):
        rep = amalgamate_levels(growth, "EMP12", "50-249", "10-49")
        var = rep.network.variable("EMP12")
        assert var.levels == ("10-49+50-249", ">250")
        assert var.ordinal
        np.testing.assert_allclose(rep.network.cpt("EMP12").table, [[2 / 3, 1 / 3]])
        np.testing.assert_allclose(rep.network.cpt("GROWTH").table[:2],
                                   [[0.5855, 0.4145], [0.513, 0.487]])

    def test_ordinal_needs_consecutive(self, growth):
        with pytest.raises(NonConsecutiveOrdinal):
            amalgamate_levels(growth, "EMP12", "10-49", ">250")

    def test_binary_cannot_merge(self, growth):
        with pytest.raises(TooFewLevels):
            amalgamate_levels(growth, "INPD", "yes", "no")

    def test_same_level(self, growth):
        with pytest.raises(ValidationError):
            amalgamate_levels(growth, "EMP12", "10-49", "10-49")

    def test_suggestions(self, growth):
        s = suggest_amalgamation(growth, "EMP12")
        assert [c.levels for c in s] == [("50-249", ">250"), ("10-49", "50-249")]
        assert s[0].score == pytest.approx(0.033, abs=1e-9)
        assert s[1].score == pytest.approx(0.088, abs=1e-9)
        assert s[0].diameter_drop == pytest.approx(0.167 - 0.153, abs=1e-9)

    @settings(max_examples=80, deadline=None)
    @given(seed=seeds)
    def test_children_never_grow_and_network_stays_valid(self, seed):
        rng = np.random.default_rng(seed)
        bn = random_network(rng, n=5, max_levels=4, p_edge=0.6)
        wide = [v for v in bn.variables if v.cardinality >= 3 and bn.children(v.name)]
        if not wide:
            return
        v = wide[0]
        a = int(rng.integers(0, v.cardinality - 1))
        b = a + 1 if v.ordinal else int(rng.choice([k for k in range(v.cardinality) if k != a]))
        rep = amalgamate_levels(bn, v.name, a, b)
        for ch in rep.children:
            assert ch.after <= ch.before + 1e-12
        rebuilt = build_network(rep.network.variables, rep.network.dag.edges,
                                [c.__class__(c.child, c.parents, c.table) for c in rep.network.cpts],
                                name=rep.network.name)
        assert rebuilt == rep.network
        assert rep.network.variable(v.name).cardinality == v.cardinality - 1


class TestIndices:
    def test_sole_parent_equals_diameter(self, asia):
        assert csi_index(asia, "xray", "either") == upper_diameter(asia.cpt("xray")).value

    def test_binary_partial_equals_csi(self, asia):
        ctx = {"either": "yes"}
        assert partial_index(asia, "dysp", "bronc", ctx)[0] == csi_index(asia, "dysp", "bronc", ctx)

    def test_witness_levels(self, csi):
        assert partial_index(csi, "Xi", "Xk", {"Xj": "high"}) == (pytest.approx(0.15), ("medium", "low"))

    def test_errors(self, csi):
        with pytest.raises(NotAParent):
            csi_index(csi, "Xi", "Xi", {})
        with pytest.raises(BadContext):
            csi_index(csi, "Xi", "Xj", {})
        with pytest.raises(BadContext):
            csi_index(csi, "Xi", "Xj", {"Xj": "low", "Xk": "low"})

    def test_strict_table_is_rejected(self):
        with pytest.raises(RowSumViolation):
            datasets.csi_example(strict=True)

    @settings(max_examples=60, deadline=None)
    @given(seed=seeds)
    def test_lower_below_upper_and_max_is_edge_strength(self, seed):
        bn = random_network(np.random.default_rng(seed), n=4, max_levels=3, p_edge=0.8)
        for n in bn.names:
            for j in bn.parents(n):
                ups = []
                for ctx in contexts(bn, n, j):
                    up = csi_index(bn, n, j, ctx)
                    assert partial_index(bn, n, j, ctx)[0] <= up + 1e-15
                    ups.append(up)
                assert max(ups) == edge_strength(bn, (j, n)).value

    def test_planted_csi_is_exactly_zero(self, csi):
        for level in ("high", "medium", "low"):
            idx = csi_index(csi, "Xi", "Xj", {"Xk": level})
            rows = csi.cpt("Xi").tensor()[:, ("high", "medium", "low").index(level)]
            assert (idx == 0.0) == all(np.array_equal(rows[0], r) for r in rows)


class TestScan:
    def test_table_findings(self, csi):
        found = asymmetry_scan(csi, "Xi", 0.05)
        keys = [(f.varying, f.context) for f in found]
        assert keys == [("Xj", {"Xk": "high"}), ("Xk", {"Xj": "low"})]
        assert found[0].csi and found[0].csi_index == 0.0
        assert found[1].partial and not found[1].csi
        assert found[1].partial_witness == ("medium", "low")

    def test_threshold_extremes(self, csi, asia):
        assert asymmetry_scan(asia, "dysp", 0.0) == []
        everything = asymmetry_scan(csi, "Xi", 1.0)
        assert len(everything) == 6
        assert [f.index for f in everything] == sorted(f.index for f in everything)

    def test_threshold_range(self, csi):
        with pytest.raises(ValidationError):
            asymmetry_scan(csi, "Xi", 1.5)
