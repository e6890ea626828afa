"""Brute-force exact distributions for tiny instances.

Two oracles:

* full enumeration of every node assignment of a tree-indexed walk on a
  small graph, giving exact estimator expectations and variances;
* closed-form moments of the two-state (+1/-1) tree-indexed chain with
  flip probability p: covariances are theta^distance with theta = 1 - 2p,
  so averages over node sets have exactly computable variances.

Estimators enter as opaque callbacks over a realized sample; the oracle
never reimplements estimator math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .graph import Graph
from .sampling import RdsSample, SamplingTree

ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class WalkDistribution:
    """Exact joint law of a tree-indexed walk: assignments and probabilities."""

    assignments: np.ndarray  # (n_outcomes, tree size) node ids
    probs: np.ndarray

    def __post_init__(self):
        total = self.probs.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")


def enumerate_walks(g: Graph, tree: SamplingTree, seed_dist) -> WalkDistribution:
    """All positive-probability assignments of nodes to tree positions.

    Probability of an assignment x is seed_dist[x_0] times the product of
    kernel entries along tree edges.  Guarded at N^n <= 1e6 outcomes.
    """
    n, size = g.n_nodes, tree.n
    if n**size > ENUMERATION_CAP:
        raise ValueError(f"N^n = {n}^{size} exceeds enumeration cap {ENUMERATION_CAP}")
    seed = np.asarray(seed_dist, dtype=np.float64)
    if seed.shape != (n,) or abs(seed.sum() - 1.0) > 1e-12 or np.any(seed < 0):
        raise ValueError("seed_dist must be a probability vector over nodes")
    kernel = g.dense_transition_matrix()
    total = n**size
    idx = np.arange(total)
    assign = np.empty((total, size), dtype=np.int64)
    for t in range(size):
        assign[:, t] = (idx // n ** (size - 1 - t)) % n
    probs = seed[assign[:, 0]].copy()
    for t in range(1, size):
        probs *= kernel[assign[:, tree.parent[t]], assign[:, t]]
    keep = probs > 0
    return WalkDistribution(assignments=assign[keep], probs=probs[keep])


def exact_moments(g, tree, y, seed_dist, estimator, labels=None):
    """Exact (expectation, variance) of an estimator callback over the walk law.

    ``estimator`` maps a realized :class:`RdsSample` to a float; ``labels``
    optionally attaches block memberships for block-aware estimators.
    """
    dist = enumerate_walks(g, tree, seed_dist)
    y = np.asarray(y, dtype=np.float64)
    values = np.empty(dist.probs.size)
    for r, x in enumerate(dist.assignments):
        s = RdsSample(
            tree=tree,
            node=x,
            y=y[x],
            deg=g.degrees[x],
            block=None if labels is None else labels.labels[x],
            replacement_mode="with",
        )
        values[r] = estimator(s)
    mean = float(np.dot(dist.probs, values))
    var = float(np.dot(dist.probs, (values - mean) ** 2))
    return mean, var


def zeta(p) -> float:
    """Variance-decay exponent log2(2 * (1-2p)^2) of the two-state tree chain.

    Positive exactly when 2*(1-2p)^2 > 1, the regime where the plain
    chain average on complete binary trees decays slower than 1/n.
    """
    p = float(p)
    if not 0 < p < 0.5:
        raise ValueError(f"flip probability must be in (0, 1/2), got {p}")
    return math.log2(2.0 * (1.0 - 2.0 * p) ** 2)


@dataclass(frozen=True)
class TreeChainMoments:
    """Exact moments of the +1/-1 tree chain started from its symmetric law."""

    theta: float  # second eigenvalue 1 - 2p
    pairwise_cov: np.ndarray  # theta^(tree distance)
    var_leaf_average: float
    var_node_average: float


def tree_pair_distances(tree: SamplingTree) -> np.ndarray:
    """All-pairs path distances within a tree (integer matrix)."""
    n = tree.n
    if n == 1:
        return np.zeros((1, 1), dtype=np.int64)
    rows = np.concatenate([np.arange(1, n), tree.parent[1:]])
    cols = np.concatenate([tree.parent[1:], np.arange(1, n)])
    adj = csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
    return shortest_path(adj, method="D", unweighted=True).astype(np.int64)


def tree_chain_moments(p, tree: SamplingTree) -> TreeChainMoments:
    """Covariance structure of the flip-p chain on a tree.

    For positions at tree distance eta, Cov = theta^eta with
    theta = 1 - 2p; variances of the leaf average and the all-node
    average follow by summing covariances.
    """
    p = float(p)
    if not 0 < p < 0.5:
        raise ValueError(f"flip probability must be in (0, 1/2), got {p}")
    theta = 1.0 - 2.0 * p
    dist = tree_pair_distances(tree)
    # scalar-float power table so Cov(root, leaf) equals theta**depth to the ulp
    powers = np.array([theta**k for k in range(int(dist.max()) + 1)])
    cov = powers[dist]
    leaves = tree.leaves()
    var_leaf = float(cov[np.ix_(leaves, leaves)].mean())
    var_all = float(cov.mean())
    return TreeChainMoments(
        theta=theta,
        pairwise_cov=cov,
        var_leaf_average=var_leaf,
        var_node_average=var_all,
    )
