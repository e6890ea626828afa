"""Referral trees, seed policies, and the two sampling modes."""

import numpy as np
import pytest

from rdskit.graph import Graph, load_edge_list
from rdskit.sampling import (
    RdsSample,
    SamplingFailureError,
    SamplingTree,
    SeedPolicy,
    TreeExtinctError,
    complete_ary_tree,
    poisson_tree,
    sample_from_json,
    sample_to_json,
    sample_with_replacement,
    sample_with_replacement_batch,
    sample_without_replacement,
    select_seed,
)


class TestSamplingTree:
    def test_complete_binary(self):
        t = complete_ary_tree(2, 4)
        assert t.n == 15
        assert t.leaves().size == 8
        assert t.max_degree() == 3

    def test_path(self):
        t = complete_ary_tree(1, 5)
        assert t.n == 5
        np.testing.assert_array_equal(t.parent, [-1, 0, 1, 2, 3])

    def test_ternary(self):
        assert complete_ary_tree(3, 3).n == 13

    def test_invariants(self):
        t = complete_ary_tree(3, 4)
        assert t.parent[0] == -1
        assert np.all(t.parent[1:] < np.arange(1, t.n))
        assert np.all(np.diff(t.parent[1:]) >= 0)  # breadth-first order
        d = t.depths()
        assert np.all(np.diff(d) >= 0)

    def test_rejects_non_bfs(self):
        with pytest.raises(ValueError):
            SamplingTree(np.array([-1, 0, 1, 0]))  # parent sequence decreases

    def test_rejects_forward_parent(self):
        with pytest.raises(ValueError):
            SamplingTree(np.array([-1, 2, 1]))


def extinction_probability_oracle(lam, iterations=200):
    """Fixed point of q = exp(lam * (q - 1)) by iteration."""
    q = 0.0
    for _ in range(iterations):
        q = np.exp(lam * (q - 1.0))
    return q


class TestPoissonTree:
    def test_single_root(self):
        t = poisson_tree(np.random.default_rng(0), 2.0, 1)
        assert t.n == 1

    def test_exact_target_size(self):
        rng = np.random.default_rng(1)
        built = 0
        while built < 20:
            try:
                t = poisson_tree(rng, 2.0, 1000)
            except TreeExtinctError:
                continue
            assert t.n == 1000
            built += 1

    def test_extinction_probability_matches_fixed_point(self):
        lam, runs = 2.0, 100_000
        q = extinction_probability_oracle(lam)  # ~0.2032
        rng = np.random.default_rng(7)
        extinct = 0
        for _ in range(runs):
            try:
                poisson_tree(rng, lam, 300)
            except TreeExtinctError:
                extinct += 1
        se = np.sqrt(q * (1 - q) / runs)
        assert abs(extinct / runs - q) <= 3 * se


class TestSeedPolicy:
    def test_parse_and_str(self):
        assert SeedPolicy.parse("uniform") == SeedPolicy("uniform")
        assert SeedPolicy.parse("fixed:7") == SeedPolicy("fixed", 7)
        assert str(SeedPolicy("fixed", 7)) == "fixed:7"

    def test_unknown_policy(self):
        with pytest.raises(ValueError):
            SeedPolicy("preferential")

    def test_fixed_returns_id(self):
        g = Graph.from_edges([(0, 1), (1, 2)])
        assert select_seed(SeedPolicy("fixed", 2), g, np.random.default_rng(0)) == 2

    def test_fixed_out_of_range(self):
        g = Graph.from_edges([(0, 1)])
        with pytest.raises(ValueError):
            select_seed(SeedPolicy("fixed", 7), g, np.random.default_rng(0))

    def test_star_center_degree_proportional(self):
        g = Graph.from_edges([(0, i) for i in range(1, 5)])  # center degree 4, total 8
        rng = np.random.default_rng(11)
        draws = select_seed(SeedPolicy("degree_proportional"), g, rng, size=20_000)
        frac = np.mean(draws == 0)
        se = np.sqrt(0.5 * 0.5 / draws.size)
        assert abs(frac - 0.5) <= 3 * se

    def test_regular_graph_policies_coincide(self):
        g = Graph.from_edges([(0, 1), (1, 2), (0, 2)])
        pi_dp = g.degrees / g.degrees.sum()
        np.testing.assert_allclose(pi_dp, 1 / 3, rtol=0)


def two_node_graph():
    return Graph.from_edges([(0, 1)])


class TestWithReplacement:
    def test_two_node_alternation(self):
        g = two_node_graph()
        y = np.array([0.0, 1.0])
        tree = complete_ary_tree(1, 6)
        s = sample_with_replacement(g, tree, SeedPolicy("fixed", 0), y, rng=np.random.default_rng(0))
        np.testing.assert_array_equal(s.node, [0, 1, 0, 1, 0, 1])
        assert s.replacement_mode == "with"

    def test_triangle_child_frequencies(self):
        g = Graph.from_edges([(0, 1), (1, 2), (0, 2)])
        y = np.zeros(3)
        tree = complete_ary_tree(1, 2)
        rng = np.random.default_rng(5)
        children = []
        for _ in range(5000):
            s = sample_with_replacement(g, tree, SeedPolicy("fixed", 0), y, rng=rng)
            children.append(s.node[1])
        frac = np.mean(np.asarray(children) == 1)
        se = np.sqrt(0.25 / len(children))
        assert abs(frac - 0.5) <= 3 * se

    def test_depth3_marginal_matches_kernel_power(self):
        g = load_edge_list(["0 1", "1 2", "2 3", "0 3", "0 2"])
        y = np.zeros(4)
        seed_probs = g.degrees / g.degrees.sum()
        expected = seed_probs @ np.linalg.matrix_power(g.dense_transition_matrix(), 3)
        tree = complete_ary_tree(1, 4)
        rng = np.random.default_rng(17)
        batch = sample_with_replacement_batch(
            g, tree, SeedPolicy("degree_proportional"), y, rng=rng, n_samples=40_000
        )
        counts = np.bincount(batch.node[:, 3], minlength=4) / len(batch)
        se = np.sqrt(expected * (1 - expected) / len(batch))
        assert np.all(np.abs(counts - expected) <= 4 * se)

    def test_weighted_one_step_frequencies(self):
        g = Graph.from_edges([(0, 1, 3.0), (0, 2, 1.0), (1, 2, 1.0)])
        y = np.zeros(3)
        tree = complete_ary_tree(1, 2)
        rng = np.random.default_rng(23)
        batch = sample_with_replacement_batch(
            g, tree, SeedPolicy("fixed", 0), y, rng=rng, n_samples=20_000
        )
        frac = np.mean(batch.node[:, 1] == 1)
        se = np.sqrt(0.75 * 0.25 / len(batch))
        assert abs(frac - 0.75) <= 3 * se

    def test_batch_rows_are_valid_samples(self):
        g = Graph.from_edges([(0, 1), (1, 2), (0, 2)])
        y = np.array([1.0, 2.0, 3.0])
        tree = complete_ary_tree(2, 3)
        batch = sample_with_replacement_batch(
            g, tree, SeedPolicy("uniform"), y, rng=np.random.default_rng(2), n_samples=10
        )
        s = batch.sample(3)
        np.testing.assert_array_equal(s.y, y[s.node])
        np.testing.assert_array_equal(s.deg, g.degrees[s.node])


class TestWithoutReplacement:
    def test_complete_graph_always_succeeds(self):
        g = Graph.from_edges([(i, j) for i in range(5) for j in range(i + 1, 5)])
        y = np.zeros(5)
        rng = np.random.default_rng(3)
        for _ in range(20):
            s = sample_without_replacement(g, SeedPolicy("uniform"), 2.0, 5, 100, y, rng=rng)
            assert sorted(s.node.tolist()) == [0, 1, 2, 3, 4]

    def test_target_one_is_just_the_seed(self):
        g = two_node_graph()
        s = sample_without_replacement(
            g, SeedPolicy("fixed", 1), 2.0, 1, 0, np.zeros(2), rng=np.random.default_rng(0)
        )
        assert s.n == 1
        assert s.node[0] == 1

    def test_path_center_recruits_both_ends(self):
        g = load_edge_list(["0 1", "1 2"])
        s = sample_without_replacement(
            g, SeedPolicy("fixed", 1), 50.0, 3, 0, np.zeros(3), rng=np.random.default_rng(4)
        )
        assert s.node[0] == 1
        assert sorted(s.node[1:].tolist()) == [0, 2]
        assert s.tree.out_degrees()[0] == 2

    def test_distinct_and_adjacent(self):
        rng = np.random.default_rng(9)
        g = Graph.from_edges(
            [(i, j) for i in range(12) for j in range(i + 1, 12) if (i + j) % 3 != 0],
        )
        y = np.zeros(g.n_nodes)
        for _ in range(25):
            s = sample_without_replacement(g, SeedPolicy("uniform"), 1.5, 8, 100, y, rng=rng)
            assert len(set(s.node.tolist())) == s.n
            for t in range(1, s.n):
                i, j = s.node[s.tree.parent[t]], s.node[t]
                assert g.transition_prob(int(i), int(j)) > 0

    def test_failure_after_max_restarts(self):
        g = load_edge_list(["0 1", "1 2"])
        with pytest.raises(SamplingFailureError):
            # lam tiny: recruitment dies essentially immediately, every time
            sample_without_replacement(
                g, SeedPolicy("uniform"), 1e-9, 3, 5, np.zeros(3), rng=np.random.default_rng(0)
            )

    def test_restart_count_recorded(self):
        g = load_edge_list(["0 1", "1 2", "2 3", "3 4"])
        rng = np.random.default_rng(21)
        counts = []
        for _ in range(200):
            try:
                s = sample_without_replacement(
                    g, SeedPolicy("uniform"), 0.8, 4, 50, np.zeros(5), rng=rng
                )
                counts.append(s.restart_count)
            except SamplingFailureError:
                pass
        assert max(counts) > 0  # restarts do happen at lam < 1

    def test_weighted_recruitment_prefers_heavy_edges(self):
        g = Graph.from_edges([(0, 1, 9.0), (0, 2, 1.0), (1, 2, 1.0)])
        rng = np.random.default_rng(31)
        first = []
        for _ in range(4000):
            s = sample_without_replacement(
                g, SeedPolicy("fixed", 0), 1e6, 2, 0, np.zeros(3), rng=rng
            )
            first.append(s.node[1])
        frac = np.mean(np.asarray(first) == 1)
        se = np.sqrt(0.9 * 0.1 / len(first))
        assert abs(frac - 0.9) <= 4 * se


class TestReproducibilityAndSerialization:
    def test_identical_seed_identical_sample(self):
        g = Graph.from_edges([(i, (i + 1) % 10) for i in range(10)] + [(0, 5)])
        y = np.arange(10, dtype=float)
        for mode in ("with", "without"):
            outs = []
            for _ in range(2):
                rng = np.random.default_rng(77)
                if mode == "with":
                    s = sample_with_replacement(
                        g, complete_ary_tree(2, 3), SeedPolicy("degree_proportional"), y, rng=rng
                    )
                else:
                    s = sample_without_replacement(
                        g, SeedPolicy("degree_proportional"), 2.0, 6, 100, y, rng=rng
                    )
                outs.append(sample_to_json(s))
            assert outs[0] == outs[1]

    def test_json_round_trip(self):
        g = Graph.from_edges([(0, 1, 2.0), (1, 2), (0, 2)])
        labels = __import__("rdskit").BlockAssignment([0, 1, 1])
        s = sample_with_replacement(
            g,
            complete_ary_tree(2, 2),
            SeedPolicy("uniform"),
            np.array([0.5, 1.0, 0.0]),
            labels=labels,
            rng=np.random.default_rng(5),
        )
        s2 = sample_from_json(sample_to_json(s))
        assert s2.tree == s.tree
        np.testing.assert_array_equal(s2.node, s.node)
        np.testing.assert_array_equal(s2.y, s.y)
        np.testing.assert_array_equal(s2.deg, s.deg)
        np.testing.assert_array_equal(s2.block, s.block)
        assert sample_to_json(s2) == sample_to_json(s)

    def test_sample_validation(self):
        tree = complete_ary_tree(1, 2)
        with pytest.raises(ValueError, match="positive degree"):
            RdsSample(tree=tree, node=[0, 1], y=[0.0, 1.0], deg=[1.0, 0.0])
