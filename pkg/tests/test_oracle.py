"""Exact enumeration oracles and the two-state tree chain."""

import numpy as np
import pytest

from rdskit.estimators import ipw, sample_mean, vh
from rdskit.graph import Graph, load_edge_list, stationary_distribution
from rdskit.oracle import (
    enumerate_walks,
    exact_moments,
    tree_chain_moments,
    tree_pair_distances,
    zeta,
)
from rdskit.sampling import (
    SamplingTree,
    SeedPolicy,
    complete_ary_tree,
    sample_with_replacement_batch,
)


def star_tree():
    return SamplingTree(np.array([-1, 0, 0], dtype=np.int64))


class TestEnumerateWalks:
    def test_single_node_tree_is_seed_dist(self):
        g = load_edge_list(["0 1", "1 2"])
        seed = np.array([0.2, 0.5, 0.3])
        dist = enumerate_walks(g, SamplingTree(np.array([-1])), seed)
        assert dist.assignments.shape == (3, 1)
        np.testing.assert_allclose(np.sort(dist.probs), np.sort(seed), rtol=0)

    def test_two_node_forced_alternation(self):
        g = Graph.from_edges([(0, 1)])
        dist = enumerate_walks(g, complete_ary_tree(1, 3), np.array([0.6, 0.4]))
        assert dist.assignments.shape == (2, 3)
        np.testing.assert_array_equal(np.sort(dist.probs), [0.4, 0.6])

    def test_triangle_star_tree(self):
        g = Graph.from_edges([(0, 1), (1, 2), (0, 2)])
        dist = enumerate_walks(g, star_tree(), np.full(3, 1 / 3))
        assert dist.probs.size == 12  # 3 seeds x 2 x 2 neighbor choices
        np.testing.assert_allclose(dist.probs, 1 / 3 * 0.25, rtol=0, atol=1e-15)

    def test_probabilities_sum_to_one(self):
        g = load_edge_list(["0 1 2.0", "1 2", "0 2 0.5", "2 3"])
        dist = enumerate_walks(g, complete_ary_tree(2, 2), stationary_distribution(g))
        assert abs(dist.probs.sum() - 1.0) < 1e-12

    def test_size_guard(self):
        g = Graph.from_edges([(i, j) for i in range(10) for j in range(i + 1, 10)])
        with pytest.raises(ValueError, match="cap"):
            enumerate_walks(g, complete_ary_tree(2, 3), np.full(10, 0.1))


class TestExactMoments:
    def test_sample_mean_stationary_expectation(self):
        g = load_edge_list(["0 1", "1 2", "2 3", "0 3", "0 2"])
        y = np.array([1.0, 0.0, 1.0, 0.5])
        pi = stationary_distribution(g)
        mean, _ = exact_moments(g, complete_ary_tree(1, 3), y, pi, sample_mean)
        assert mean == pytest.approx(float(pi @ y), abs=1e-12)

    def test_ipw_unbiased_for_mu_true(self):
        g = load_edge_list(["0 1", "1 2", "0 2", "2 3"])
        y = np.array([0.0, 1.0, 1.0, 0.0])
        dbar = g.degrees.mean()
        mean, _ = exact_moments(
            g, complete_ary_tree(1, 3), y, stationary_distribution(g), lambda s: ipw(s, dbar)
        )
        assert mean == pytest.approx(float(y.mean()), abs=1e-12)

    def test_constant_outcome_zero_variance(self):
        g = Graph.from_edges([(0, 1), (1, 2), (0, 2)])
        _, var = exact_moments(
            g, star_tree(), np.full(3, 2.5), np.full(3, 1 / 3), sample_mean
        )
        assert abs(var) < 1e-24

    def test_monte_carlo_agreement(self):
        g = load_edge_list(["0 1", "1 2", "0 2", "2 3", "1 3"])
        y = np.array([1.0, 0.0, 1.0, 0.0])
        pi = stationary_distribution(g)
        tree = complete_ary_tree(1, 3)
        e_exact, v_exact = exact_moments(g, tree, y, pi, vh)
        m = 100_000
        batch = sample_with_replacement_batch(
            g, tree, SeedPolicy("stationary"), y, rng=np.random.default_rng(20), n_samples=m
        )
        values = np.array([vh(batch.sample(r)) for r in range(m)])
        assert abs(values.mean() - e_exact) <= 4 * np.sqrt(v_exact / m)


def chain_enumeration_oracle(p, tree):
    """Exhaustive +-1 chain law: covariances and average variances."""
    n = tree.n
    signs = 1 - 2 * ((np.arange(2**n)[:, None] >> np.arange(n)) & 1)
    flips = signs[:, 1:] != signs[:, tree.parent[1:]]
    probs = 0.5 * np.prod(np.where(flips, p, 1 - p), axis=1)
    cov = (signs * probs[:, None]).T @ signs  # E[s_i s_j]; means are zero
    leaves = tree.leaves()
    var_leaf = float(np.mean(cov[np.ix_(leaves, leaves)]))
    var_all = float(np.mean(cov))
    return cov, var_leaf, var_all


class TestTreeChainMoments:
    def test_zero_distance_unit_covariance(self):
        m = tree_chain_moments(0.1, complete_ary_tree(2, 3))
        np.testing.assert_allclose(np.diag(m.pairwise_cov), 1.0, rtol=0)

    def test_theta_power_hand_value(self):
        tree = complete_ary_tree(1, 3)  # path: ends at distance 2
        m = tree_chain_moments(0.1, tree)
        assert m.pairwise_cov[0, 2] == pytest.approx(0.64, abs=1e-15)

    def test_root_leaf_covariance_exact_power(self):
        tree = complete_ary_tree(2, 5)
        for p in (0.05, 0.1, 0.2):
            m = tree_chain_moments(p, tree)
            leaf = tree.leaves()[0]
            assert m.pairwise_cov[0, leaf] == (1 - 2 * p) ** 4

    def test_matches_exhaustive_enumeration(self):
        rng = np.random.default_rng(31)
        for p in (0.05, 0.1, 0.2):
            for n in (2, 7, 12, 16):
                draws = np.array([rng.integers(0, t) for t in range(1, n)], dtype=np.int64)
                tree = SamplingTree(np.concatenate([[-1], np.sort(draws)])) if n > 1 else SamplingTree(np.array([-1]))
                m = tree_chain_moments(p, tree)
                cov, var_leaf, var_all = chain_enumeration_oracle(p, tree)
                np.testing.assert_allclose(m.pairwise_cov, cov, atol=1e-10, rtol=0)
                assert m.var_leaf_average == pytest.approx(var_leaf, abs=1e-10)
                assert m.var_node_average == pytest.approx(var_all, abs=1e-10)

    def test_leaf_average_variance_lower_bound(self):
        # complete binary tree: leaf-average variance >= theta^(2 log2 n)
        p = 0.05
        theta = 1 - 2 * p
        for levels in (4, 6, 8):
            tree = complete_ary_tree(2, levels)
            m = tree_chain_moments(p, tree)
            depth = levels - 1
            assert m.var_leaf_average >= theta ** (2 * depth)

    def test_invalid_p(self):
        with pytest.raises(ValueError):
            tree_chain_moments(0.6, complete_ary_tree(2, 2))
        with pytest.raises(ValueError):
            tree_chain_moments(0.0, complete_ary_tree(2, 2))


class TestZeta:
    def test_values(self):
        assert zeta(0.05) == pytest.approx(np.log2(2 * 0.81), abs=1e-12)
        assert zeta(0.05) == pytest.approx(0.696, abs=5e-4)

    def test_positive_iff_condition(self):
        assert zeta(0.05) > 0
        assert zeta(0.1) > 0
        assert zeta(0.25) < 0  # 2*(0.5)^2 = 0.5 < 1
        assert zeta(0.14644660940672627) == pytest.approx(0.0, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            zeta(0.0)
        with pytest.raises(ValueError):
            zeta(0.5)


class TestTreeDistances:
    def test_path_distances(self):
        tree = complete_ary_tree(1, 4)
        d = tree_pair_distances(tree)
        np.testing.assert_array_equal(d[0], [0, 1, 2, 3])

    def test_siblings_distance_two(self):
        tree = complete_ary_tree(2, 2)
        d = tree_pair_distances(tree)
        assert d[1, 2] == 2.0
