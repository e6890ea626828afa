"""Population-level block quantities and graph diagnostics.

For a blockmodel affinity matrix B these are the exact counterparts of
the sample-side block estimates: the normalized affinity Q = B/m, the
block transition matrix P_B (row normalization of B), its stationary law
pi_B = row sums of Q, block mean expected degrees, and the block
proportions alpha_k, which algebraically reduce to N_k / N.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dcsbm import _check_affinity
from .graph import BlockAssignment, DegenerateNodeError, Graph


@dataclass(frozen=True)
class PopulationBlockModel:
    """Exact block-level quantities implied by (B, block sizes)."""

    q: np.ndarray  # B / m
    p_b: np.ndarray  # row-normalized B
    pi_b: np.ndarray  # stationary law of p_b (row sums of q)
    mean_block_degree: np.ndarray  # B_k* / N_k
    alpha: np.ndarray  # (pi_b / mean_block_degree) normalized = N_k / N


def population_model(affinity, block_sizes) -> PopulationBlockModel:
    b = _check_affinity(affinity)
    sizes = np.asarray(block_sizes, dtype=np.int64)
    if sizes.size != b.shape[0] or np.any(sizes <= 0):
        raise ValueError("block_sizes must be positive and match the affinity matrix")
    m = b.sum()
    q = b / m
    row = b.sum(axis=1)
    p_b = b / row[:, None]
    pi_b = q.sum(axis=1)
    mean_block_degree = row / sizes
    w = pi_b / mean_block_degree
    alpha = w / w.sum()
    return PopulationBlockModel(
        q=q, p_b=p_b, pi_b=pi_b, mean_block_degree=mean_block_degree, alpha=alpha
    )


def node_block_transition(g: Graph, labels: BlockAssignment, i) -> np.ndarray:
    """Probability that a walk step from node i lands in each block."""
    ids, w = g.neighbors(i)
    if g.degrees[i] <= 0:
        raise DegenerateNodeError(f"node {i} is isolated")
    out = np.bincount(labels.labels[ids], weights=w, minlength=labels.k)
    return out / g.degrees[i]


def _all_node_block_transitions(g, labels):
    rows = np.repeat(np.arange(g.n_nodes), np.diff(g.indptr))
    mass = np.zeros((g.n_nodes, labels.k))
    np.add.at(mass, (rows, labels.labels[g.indices]), g.weights)
    return mass / g.degrees[:, None]


@dataclass(frozen=True)
class ConcentrationReport:
    """How tightly per-node block transitions sit around the population ones."""

    max_abs_relative_deviation: float
    reference: float  # sqrt(log n / n)
    ratio: float
    n_nodes: int

    def to_dict(self):
        return {
            "max_abs_relative_deviation": self.max_abs_relative_deviation,
            "reference_sqrt_log_n_over_n": self.reference,
            "ratio": self.ratio,
            "n_nodes": self.n_nodes,
        }


def empirical_block_affinity(g: Graph, labels: BlockAssignment) -> np.ndarray:
    """Block-aggregated adjacency weight; an unbiased estimate of the
    blockmodel affinity matrix (cross-block edges counted once per
    direction, self-loops once)."""
    rows = np.repeat(np.arange(g.n_nodes), np.diff(g.indptr))
    m = np.zeros((labels.k, labels.k))
    np.add.at(m, (labels.labels[rows], labels.labels[g.indices]), g.weights)
    return m


def transition_concentration(g: Graph, labels: BlockAssignment, affinity) -> ConcentrationReport:
    """Max over nodes and blocks of |p_uv(i) / p_uv - 1|, diagnostic only.

    On dense generated graphs the ratio to sqrt(log n / n) stays modest;
    on sparse graphs deviations are reported without any asserted bound.
    """
    b = _check_affinity(affinity)
    if np.any(g.degrees <= 0):
        raise DegenerateNodeError("graph has isolated nodes; take the LCC first")
    p_node = _all_node_block_transitions(g, labels)
    p_pop = b / b.sum(axis=1)[:, None]
    dev = np.abs(p_node / p_pop[labels.labels] - 1.0)
    n = g.n_nodes
    ref = float(np.sqrt(np.log(n) / n))
    worst = float(dev.max())
    return ConcentrationReport(
        max_abs_relative_deviation=worst,
        reference=ref,
        ratio=worst / ref,
        n_nodes=n,
    )
