import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_network
from tvdiam.errors import (
    CycleDetected,
    DuplicateName,
    IncompleteAssignment,
    LevelOutOfRange,
    NotAParent,
    ParentMismatch,
    RowSumViolation,
    UnknownVariable,
    ValidationError,
)
from tvdiam.model import Cpt, Dag, DiscreteVariable, build_network, make_network, row_index, sub_cpt

YN = ("yes", "no")


def var(name, levels=YN, **kw):
    return DiscreteVariable(name, levels, **kw)


class TestVariable:
    def test_levels_and_index(self):
        v = var("x", ("a", "b", "c"))
        assert v.cardinality == 3
        assert v.index("b") == 1
        assert v.index(2) == 2

    def test_rejects_duplicate_levels(self):
        with pytest.raises(DuplicateName):
            var("x", ("a", "a"))

    def test_rejects_single_level(self):
        with pytest.raises(ValidationError):
            var("x", ("a",))

    @pytest.mark.parametrize("bad", ["z", 5, -1])
    def test_unknown_level(self, bad):
        with pytest.raises(LevelOutOfRange):
            var("x").index(bad)


class TestCpt:
    def test_row_order_is_mixed_radix_first_parent_major(self):
        a, b, c = var("a"), var("b", ("0", "1", "2")), var("c")
        rows = np.arange(12, dtype=float).reshape(6, 2)
        rows = rows / rows.sum(axis=1, keepdims=True)
        cpt = Cpt(c, [a, b], rows)
        assert row_index(cpt, {"a": "yes", "b": "0"}) == 0
        assert row_index(cpt, {"a": "yes", "b": "2"}) == 2
        assert row_index(cpt, {"a": "no", "b": "1"}) == 4
        assert cpt.row_assignment(4) == {"a": "no", "b": "1"}
        assert cpt.tensor().shape == (2, 3, 2)

    def test_incomplete_assignment(self):
        cpt = Cpt(var("c"), [var("a"), var("b")], [[0.5, 0.5]] * 4)
        with pytest.raises(IncompleteAssignment):
            row_index(cpt, {"a": "yes"})

    def test_row_sum_violation(self):
        with pytest.raises(RowSumViolation) as exc:
            Cpt(var("c"), [var("a")], [[0.5, 0.5], [0.5, 0.4]])
        assert exc.value.row == 1

    def test_negative_entry_rejected(self):
        with pytest.raises(RowSumViolation):
            Cpt(var("c"), [], [[1.1, -0.1]])

    def test_small_deviation_renormalized_with_warning(self):
        cpt = Cpt(var("c"), [], [[0.5, 0.5 + 5e-7]])
        assert cpt.table.sum() == pytest.approx(1.0, abs=1e-15)
        assert len(cpt.warnings) == 1

    def test_renormalization_idempotent(self):
        cpt = Cpt(var("c", ("a", "b", "c")), [], [[0.1, 0.2, 0.7 + 3e-7]])
        again = Cpt(cpt.child, [], cpt.table)
        assert np.array_equal(cpt.table, again.table)
        assert again.warnings == ()

    def test_shape_checked(self):
        with pytest.raises(ValidationError):
            Cpt(var("c"), [var("a")], [[0.5, 0.5]])

    def test_table_is_read_only(self):
        cpt = Cpt(var("c"), [], [[0.5, 0.5]])
        with pytest.raises(ValueError):
            cpt.table[0, 0] = 1.0

    def test_sub_cpt(self):
        a, b, c = var("a"), var("b"), var("c")
        rows = [[0.1, 0.9], [0.2, 0.8], [0.3, 0.7], [0.4, 0.6]]
        cpt = Cpt(c, [a, b], rows)
        sub = sub_cpt(cpt, {"a": "no"})
        assert sub.parent_names == ("b",)
        assert np.array_equal(sub.table, np.array(rows[2:]))
        sub = sub_cpt(cpt, {"b": "yes"})
        assert np.array_equal(sub.table, np.array([rows[0], rows[2]]))
        with pytest.raises(NotAParent):
            sub_cpt(cpt, {"c": "yes"})


class TestDag:
    def test_cycle_detected_with_path(self):
        with pytest.raises(CycleDetected) as exc:
            Dag(("a", "b", "c"), (("a", "b"), ("b", "c"), ("c", "a")))
        path = exc.value.path
        assert path[0] == path[-1] and set(path) == {"a", "b", "c"}

    def test_self_loop_and_unknown(self):
        with pytest.raises(ValidationError):
            Dag(("a",), (("a", "a"),))
        with pytest.raises(UnknownVariable):
            Dag(("a",), (("a", "b"),))

    def test_relations(self):
        d = Dag(("a", "b", "c", "d"), (("a", "c"), ("b", "c"), ("c", "d")))
        assert d.parents("c") == ("a", "b")
        assert d.children("c") == ("d",)
        assert d.roots() == ("a", "b")
        assert d.descendants("a") == {"c", "d"}
        assert d.ancestors(["d"]) == {"a", "b", "c"}
        assert d.topological_order() == ("a", "b", "c", "d")

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_topological_order_respects_edges(self, seed):
        bn = random_network(np.random.default_rng(seed), n=7)
        pos = {n: k for k, n in enumerate(bn.dag.topological_order())}
        assert sorted(pos) == sorted(bn.names)
        assert all(pos[a] < pos[b] for a, b in bn.dag.edges)


class TestBuildNetwork:
    def test_duplicate_variable(self):
        with pytest.raises(DuplicateName):
            make_network([var("a"), var("a")], {"a": ((), [[0.5, 0.5]])})

    def test_missing_cpt(self):
        with pytest.raises(ValidationError):
            make_network([var("a"), var("b")], {"a": ((), [[0.5, 0.5]])})

    def test_edges_must_match_cpt_parents(self):
        a, b = var("a"), var("b")
        cpts = [Cpt(a, [], [[0.5, 0.5]]), Cpt(b, [a], [[0.5, 0.5], [0.1, 0.9]])]
        with pytest.raises(ParentMismatch):
            build_network([a, b], [], cpts)

    def test_cycle_through_cpts(self):
        a, b = var("a"), var("b")
        tables = {"a": (("b",), [[0.5, 0.5]] * 2), "b": (("a",), [[0.5, 0.5]] * 2)}
        with pytest.raises(CycleDetected):
            make_network([a, b], tables)

    def test_canonical_order_and_equality(self, asia):
        assert asia.names == ("asia", "tub", "smoke", "lung", "bronc", "either", "xray", "dysp")
        assert asia.parents("either") == ("lung", "tub")
        assert asia == asia
        assert len(asia) == 8 and "xray" in asia
        with pytest.raises(UnknownVariable):
            asia.cpt("nope")
