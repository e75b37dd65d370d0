import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signedpolar import (
    GraphError,
    beta,
    build_graph,
    community,
    edge_counts,
    indicator_vector,
    largest_component,
    rayleigh_quotient,
    seed_vector,
)
from conftest import make_random_graph, scratch_beta


class TestBuildGraph:
    def test_t3_basics(self, t3):
        assert t3.node_count == 3
        np.testing.assert_allclose(t3.degrees, [2.0, 2.0, 2.0])
        assert t3.total_volume == 6.0
        assert t3.edge_count == 3

    def test_duplicate_pairs_merge_by_sum(self):
        g = build_graph([("a", "b", 1.0), ("b", "a", 1.0)])
        assert g.edge_count == 1
        assert g.edge_w[0] == 2.0
        np.testing.assert_allclose(g.degrees, [2.0, 2.0])

    def test_cancelling_pair_dropped(self):
        g = build_graph([("a", "b", 1.0), ("b", "a", -1.0), ("a", "c", 1.0)])
        assert g.node_count == 3
        assert g.edge_count == 1

    def test_self_loop_rejected_with_label(self):
        with pytest.raises(GraphError, match="'a'"):
            build_graph([("a", "a", 1.0)])

    def test_empty_edge_list(self):
        with pytest.raises(GraphError, match="empty"):
            build_graph([])

    def test_zero_weight_rejected(self):
        with pytest.raises(GraphError):
            build_graph([("a", "b", 0.0)])

    def test_degree_matches_recomputation(self):
        g = make_random_graph(40, 120, seed=1, weighted=True)
        recomputed = np.zeros(g.node_count)
        for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
            recomputed[u] += abs(w)
            recomputed[v] += abs(w)
        np.testing.assert_allclose(g.degrees, recomputed, rtol=1e-14)


class TestEdgeCounts:
    def test_t3_two_vs_one(self, t3):
        c = edge_counts(t3, {0, 1}, {2})
        assert c.pos_across == 1.0
        assert c.neg_in_1 == 0.0 and c.neg_in_2 == 0.0
        assert c.boundary == 0.0
        assert c.neg_across == 1.0

    def test_t3_single_band(self, t3):
        c = edge_counts(t3, {0}, set())
        assert c.boundary == 2.0
        assert (
            c.pos_across == c.neg_in_1 == c.neg_in_2 == c.pos_in_1 == c.pos_in_2
            == c.neg_across == 0.0
        )

    def test_empty_sets_all_zero(self, t3):
        c = edge_counts(t3, set(), set())
        assert all(
            getattr(c, f) == 0.0
            for f in ("pos_across", "neg_in_1", "neg_in_2", "boundary",
                      "pos_in_1", "pos_in_2", "neg_across")
        )

    def test_overlap_rejected(self, t3):
        with pytest.raises(GraphError, match="overlap"):
            edge_counts(t3, {0}, {0})

    def test_fields_account_every_incident_edge(self):
        g = make_random_graph(30, 90, seed=3, weighted=True)
        rng = np.random.default_rng(0)
        for _ in range(20):
            side = rng.integers(-1, 2, size=g.node_count)
            c1 = set(np.flatnonzero(side == 1).tolist())
            c2 = set(np.flatnonzero(side == -1).tolist())
            c = edge_counts(g, c1, c2)
            total = (
                c.pos_across + c.pos_in_1 + c.pos_in_2 + c.neg_across
                + c.neg_in_1 + c.neg_in_2 + c.boundary
            )
            union = c1 | c2
            expected = sum(
                abs(w)
                for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w)
                if u in union or v in union
            )
            assert total == pytest.approx(expected, rel=1e-13)


class TestBeta:
    def test_t3_values(self, t3):
        assert beta(t3, {0, 1}, {2}) == pytest.approx(1.0 / 3.0)
        assert beta(t3, {0}, {2}) == pytest.approx(1.0)

    def test_balanced_split_is_zero(self, balanced_path):
        assert beta(balanced_path, {0, 1}, {2}) == 0.0

    def test_empty_union_rejected(self, t3):
        with pytest.raises(GraphError):
            beta(t3, set(), set())

    def test_matches_scratch_oracle(self):
        g = make_random_graph(25, 60, seed=7, weighted=True)
        rng = np.random.default_rng(1)
        for _ in range(25):
            side = rng.integers(-1, 2, size=g.node_count)
            c1 = np.flatnonzero(side == 1)
            c2 = np.flatnonzero(side == -1)
            if len(c1) + len(c2) == 0:
                continue
            assert beta(g, c1, c2) == pytest.approx(
                scratch_beta(g, c1, c2), rel=1e-13
            )


class TestRayleigh:
    def test_t3_indicator(self, t3):
        assert rayleigh_quotient(t3, np.array([1.0, 1.0, -1.0])) == pytest.approx(
            2.0 / 3.0
        )

    def test_constant_vector_on_positive_graph(self):
        g = build_graph([("a", "b", 1.0), ("b", "c", 2.0)])
        assert rayleigh_quotient(g, np.ones(3)) == pytest.approx(0.0, abs=1e-15)

    def test_zero_vector_rejected(self, t3):
        with pytest.raises(GraphError):
            rayleigh_quotient(t3, np.zeros(3))

    def test_indicator_closed_form_and_sandwich(self):
        # On +-1/0 indicators the quadratic form has the closed form
        # (4*pos_across + 4*neg_in + boundary) / vol and sandwiches the ratio.
        rng = np.random.default_rng(11)
        for trial in range(30):
            g = make_random_graph(20, 50, seed=100 + trial, weighted=trial % 2 == 0)
            side = rng.integers(-1, 2, size=g.node_count)
            c1 = np.flatnonzero(side == 1)
            c2 = np.flatnonzero(side == -1)
            if len(c1) + len(c2) == 0:
                continue
            x = indicator_vector(g, c1, c2)
            r = rayleigh_quotient(g, x)
            cm = community(g, c1, c2)
            closed = (
                4 * cm.counts.pos_across
                + 4 * cm.counts.neg_in_1
                + 4 * cm.counts.neg_in_2
                + cm.counts.boundary
            ) / cm.volume
            assert r == pytest.approx(closed, rel=1e-12)
            assert cm.beta <= r * (1 + 1e-12) + 1e-15
            assert r <= 4 * cm.beta * (1 + 1e-12) + 1e-15


class TestSeedVector:
    def test_t3_two_sided(self, t3):
        s = seed_vector(t3, {0}, {2})
        np.testing.assert_allclose(s.values, [0.5, 0.0, -0.5])
        assert s.support == (0, 2)
        assert t3.degrees @ (s.values**2) == pytest.approx(1.0, abs=1e-10)

    def test_one_sided(self, t3):
        s = seed_vector(t3, {0}, set())
        np.testing.assert_allclose(s.values, [1 / np.sqrt(2), 0.0, 0.0])

    def test_overlap_rejected(self, t3):
        with pytest.raises(GraphError):
            seed_vector(t3, {0}, {0})

    def test_empty_union_rejected(self, t3):
        with pytest.raises(GraphError):
            seed_vector(t3, set(), set())

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=25, deadline=None)
    def test_normalization_property(self, seed):
        rng = np.random.default_rng(seed)
        g = make_random_graph(12, 20, seed=seed % 1000, weighted=True)
        side = rng.integers(-1, 2, size=g.node_count)
        s1 = set(np.flatnonzero(side == 1).tolist())
        s2 = set(np.flatnonzero(side == -1).tolist())
        if not (s1 | s2):
            s1 = {0}
        s = seed_vector(g, s1, s2)
        assert g.degrees @ (s.values**2) == pytest.approx(1.0, abs=1e-10)


class TestLargestComponent:
    def test_keeps_heavier_triangle(self):
        g = build_graph(
            [("a", "b", 5.0), ("b", "c", 5.0), ("a", "c", -5.0),
             ("x", "y", 1.0), ("y", "z", 1.0)]
        )
        sub, dropped_nodes, dropped_edges = largest_component(g)
        assert set(sub.labels) == {"a", "b", "c"}
        assert dropped_nodes == 3 and dropped_edges == 2

    def test_connected_graph_untouched(self, t3):
        sub, dn, de = largest_component(t3)
        assert sub is t3 and dn == 0 and de == 0
