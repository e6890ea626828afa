"""Referral trees and tree-indexed sampling on a graph.

Two sampling modes:

* with replacement: every non-root tree position draws its node from the
  walk kernel row of its parent's node, independently (repeats allowed);
* without replacement: breadth-first recruitment where each participant
  draws a Poisson coupon count and recruits that many distinct,
  not-yet-recruited neighbors (weight-proportional), restarting from a
  fresh seed if the process dies before reaching the target size.

Samples serialize to a small JSON document so estimation can run without
the graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .graph import DegenerateNodeError, DisconnectedGraphError, Graph, stationary_distribution


class TreeExtinctError(RuntimeError):
    """Branching-process growth died before reaching the target size."""


class SamplingFailureError(RuntimeError):
    """Recruitment failed to reach the target size within max_restarts."""


@dataclass(frozen=True)
class SamplingTree:
    """Rooted referral tree stored as a parent array in breadth-first order.

    ``parent[0] == -1`` marks the root; ``parent[t] < t`` for t >= 1, and
    the parent sequence is non-decreasing (breadth-first recruitment
    order).
    """

    parent: np.ndarray

    def __post_init__(self):
        parent = np.asarray(self.parent, dtype=np.int64)
        if parent.ndim != 1 or parent.size == 0:
            raise ValueError("parent must be a non-empty 1-d array")
        if parent[0] != -1:
            raise ValueError("parent[0] must be the root sentinel -1")
        if parent.size > 1:
            body = parent[1:]
            if np.any(body < 0) or np.any(body >= np.arange(1, parent.size)):
                raise ValueError("parent[t] must satisfy 0 <= parent[t] < t")
            if np.any(np.diff(body) < 0):
                raise ValueError("parents must be non-decreasing (breadth-first order)")
        object.__setattr__(self, "parent", parent)
        self.parent.setflags(write=False)

    @property
    def n(self):
        return int(self.parent.size)

    def depths(self):
        d = np.zeros(self.n, dtype=np.int64)
        for t in range(1, self.n):
            d[t] = d[self.parent[t]] + 1
        return d

    def levels(self):
        """Contiguous (start, stop) index ranges per depth."""
        d = self.depths()
        bounds = np.searchsorted(d, np.arange(d[-1] + 2))
        return [(int(bounds[i]), int(bounds[i + 1])) for i in range(len(bounds) - 1)]

    def out_degrees(self):
        return np.bincount(self.parent[1:], minlength=self.n) if self.n > 1 else np.zeros(1, dtype=np.int64)

    def max_degree(self):
        """Maximum tree degree (children plus one for the parent edge)."""
        out = self.out_degrees()
        deg = out + (np.arange(self.n) > 0)
        return int(deg.max())

    def leaves(self):
        return np.flatnonzero(self.out_degrees() == 0)

    def __eq__(self, other):
        if not isinstance(other, SamplingTree):
            return NotImplemented
        return np.array_equal(self.parent, other.parent)


def complete_ary_tree(arity, levels):
    """Full tree: every node in the first levels-1 levels has `arity` children.

    arity 1 yields a path (single referral chain); size is
    (arity^levels - 1) / (arity - 1) for arity > 1, else `levels`.
    """
    arity, levels = int(arity), int(levels)
    if arity < 1 or levels < 1:
        raise ValueError("arity and levels must be >= 1")
    parents = [np.array([-1], dtype=np.int64)]
    start, width = 0, 1
    for _ in range(levels - 1):
        parents.append(np.repeat(np.arange(start, start + width, dtype=np.int64), arity))
        start += width
        width *= arity
    return SamplingTree(np.concatenate(parents))


def poisson_tree(rng, lam, n_target):
    """Breadth-first branching-process tree with Poisson(lam) offspring.

    Growth stops exactly at ``n_target`` (excess children of the last
    frontier nodes are discarded).  Raises :class:`TreeExtinctError` if
    the process dies first; callers restart with the same rng stream.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    n_target = int(n_target)
    if n_target < 1:
        raise ValueError("n_target must be >= 1")
    parent = [np.array([-1], dtype=np.int64)]
    total = 1
    frontier = np.array([0], dtype=np.int64)
    while total < n_target:
        counts = rng.poisson(lam, size=frontier.size)
        children = np.repeat(frontier, counts)
        if children.size == 0:
            raise TreeExtinctError(f"referral tree died at size {total} < {n_target}")
        children = children[: n_target - total]
        parent.append(children)
        frontier = np.arange(total, total + children.size, dtype=np.int64)
        total += children.size
    return SamplingTree(np.concatenate(parent))


_POLICIES = ("degree_proportional", "uniform", "fixed", "stationary")


@dataclass(frozen=True)
class SeedPolicy:
    """How the root participant is drawn.

    degree_proportional: probability d_i / sum d; uniform: 1/n;
    fixed: a given node id; stationary: the walk's stationary law
    (coincides with degree_proportional since both are degree-weighted,
    but validates connectivity).
    """

    kind: str = "degree_proportional"
    node: int | None = None

    def __post_init__(self):
        if self.kind not in _POLICIES:
            raise ValueError(f"unknown seed policy {self.kind!r}")
        if self.kind == "fixed" and (self.node is None or self.node < 0):
            raise ValueError("fixed seed policy needs a non-negative node id")
        if self.kind != "fixed" and self.node is not None:
            raise ValueError(f"{self.kind} policy takes no node id")

    @classmethod
    def parse(cls, text):
        """Parse 'degree_proportional' | 'uniform' | 'stationary' | 'fixed:ID'."""
        if text.startswith("fixed:"):
            return cls("fixed", int(text.split(":", 1)[1]))
        return cls(text)

    def __str__(self):
        return f"fixed:{self.node}" if self.kind == "fixed" else self.kind


def select_seed(policy: SeedPolicy, g: Graph, rng, size=None):
    """Draw seed node(s) per the policy.  ``size=None`` returns a scalar id."""
    m = 1 if size is None else int(size)
    if policy.kind == "fixed":
        if policy.node >= g.n_nodes:
            raise ValueError(f"fixed seed {policy.node} not in graph of size {g.n_nodes}")
        out = np.full(m, policy.node, dtype=np.int64)
    elif policy.kind == "uniform":
        out = rng.integers(0, g.n_nodes, size=m)
    elif policy.kind == "stationary":
        out = rng.choice(g.n_nodes, size=m, p=stationary_distribution(g))
    else:  # degree_proportional
        d = g.degrees
        total = d.sum()
        if total <= 0:
            raise DegenerateNodeError("graph has no edges")
        out = rng.choice(g.n_nodes, size=m, p=d / total)
    return int(out[0]) if size is None else out.astype(np.int64)


@dataclass(frozen=True)
class RdsSample:
    """A realized referral sample: nodes, outcomes, degrees, optional blocks."""

    tree: SamplingTree
    node: np.ndarray
    y: np.ndarray
    deg: np.ndarray
    block: np.ndarray | None = None
    replacement_mode: str = "with"
    restart_count: int = 0

    def __post_init__(self):
        node = np.asarray(self.node, dtype=np.int64)
        y = np.asarray(self.y, dtype=np.float64)
        deg = np.asarray(self.deg, dtype=np.float64)
        n = self.tree.n
        if not (node.size == y.size == deg.size == n):
            raise ValueError("node, y, deg must all have the tree's length")
        if np.any(deg <= 0):
            raise ValueError("sampled nodes must have positive degree")
        block = self.block
        if block is not None:
            block = np.asarray(block, dtype=np.int64)
            if block.size != n:
                raise ValueError("block must have the tree's length")
        if self.replacement_mode not in ("with", "without"):
            raise ValueError(f"bad replacement_mode {self.replacement_mode!r}")
        object.__setattr__(self, "node", node)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "deg", deg)
        object.__setattr__(self, "block", block)

    @property
    def n(self):
        return self.tree.n


def sample_to_json(s: RdsSample) -> str:
    doc = {
        "format": "rds-sample/1",
        "replacement_mode": s.replacement_mode,
        "restart_count": s.restart_count,
        "tree_parent": s.tree.parent.tolist(),
        "node": s.node.tolist(),
        "y": s.y.tolist(),
        "degree": s.deg.tolist(),
        "block": None if s.block is None else s.block.tolist(),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def sample_from_json(text: str) -> RdsSample:
    doc = json.loads(text)
    if doc.get("format") != "rds-sample/1":
        raise ValueError(f"unsupported sample format {doc.get('format')!r}")
    return RdsSample(
        tree=SamplingTree(np.asarray(doc["tree_parent"], dtype=np.int64)),
        node=np.asarray(doc["node"], dtype=np.int64),
        y=np.asarray(doc["y"], dtype=np.float64),
        deg=np.asarray(doc["degree"], dtype=np.float64),
        block=None if doc["block"] is None else np.asarray(doc["block"], dtype=np.int64),
        replacement_mode=doc["replacement_mode"],
        restart_count=int(doc["restart_count"]),
    )


def _require_walkable(g: Graph):
    if np.any(g.degrees <= 0):
        raise DegenerateNodeError("graph has isolated nodes; take the LCC first")
    if not g.is_connected:
        raise DisconnectedGraphError("sampling needs a connected graph; take the LCC first")


def _walk_step(g: Graph, parents_x, u):
    """Vectorized one-step draws from the kernel rows of ``parents_x``.

    ``u`` holds iid uniforms, one per draw.  Unit-weight graphs use direct
    neighbor indexing; weighted graphs invert per-row cumulative weights.
    """
    lo = g.indptr[parents_x]
    counts = g.indptr[parents_x + 1] - lo
    if g.unit_weights:
        k = np.minimum((u * counts).astype(np.int64), counts - 1)
        return g.indices[lo + k]
    cw = g.row_cum_weights()
    flat = parents_x.ravel()
    out = np.empty(flat.size, dtype=np.int64)
    for a, p in enumerate(flat):
        l, h = g.indptr[p], g.indptr[p + 1]
        pos = l + np.searchsorted(cw[l:h], u.ravel()[a] * g.degrees[p], side="right")
        out[a] = g.indices[min(pos, h - 1)]
    return out.reshape(parents_x.shape)


def _attach(g, tree, x, y, labels, mode, restarts=0):
    return RdsSample(
        tree=tree,
        node=x,
        y=np.asarray(y, dtype=np.float64)[x],
        deg=g.degrees[x],
        block=None if labels is None else labels.labels[x],
        replacement_mode=mode,
        restart_count=restarts,
    )


def sample_with_replacement(g: Graph, tree: SamplingTree, seed: SeedPolicy, y, labels=None, rng=None):
    """Tree-indexed walk: each non-root position draws from its parent's kernel row."""
    _require_walkable(g)
    x = np.empty(tree.n, dtype=np.int64)
    x[0] = select_seed(seed, g, rng)
    for start, stop in tree.levels()[1:]:
        px = x[tree.parent[start:stop]]
        x[start:stop] = _walk_step(g, px, rng.random(stop - start))
    return _attach(g, tree, x, y, labels, "with")


@dataclass(frozen=True)
class RdsSampleBatch:
    """Many with-replacement samples drawn on one shared tree.

    Row r of ``node`` is replicate r's walk; :meth:`sample` materializes a
    single :class:`RdsSample` (array views, cheap).
    """

    tree: SamplingTree
    node: np.ndarray
    y: np.ndarray
    deg: np.ndarray
    block: np.ndarray | None = None

    def __len__(self):
        return self.node.shape[0]

    def sample(self, r) -> RdsSample:
        return RdsSample(
            tree=self.tree,
            node=self.node[r],
            y=self.y[r],
            deg=self.deg[r],
            block=None if self.block is None else self.block[r],
            replacement_mode="with",
        )

    def __iter__(self):
        return (self.sample(r) for r in range(len(self)))


def sample_with_replacement_batch(g, tree, seed, y, labels=None, rng=None, n_samples=1):
    """Draw ``n_samples`` independent with-replacement samples on one tree.

    Same kernel as :func:`sample_with_replacement`, vectorized across
    replicates level by level (a different rng consumption order, so the
    two entry points give different draws for the same seed).
    """
    _require_walkable(g)
    m = int(n_samples)
    x = np.empty((m, tree.n), dtype=np.int64)
    x[:, 0] = select_seed(seed, g, rng, size=m)
    for start, stop in tree.levels()[1:]:
        px = x[:, tree.parent[start:stop]]
        x[:, start:stop] = _walk_step(g, px, rng.random((m, stop - start)))
    return RdsSampleBatch(
        tree=tree,
        node=x,
        y=np.asarray(y, dtype=np.float64)[x],
        deg=g.degrees[x],
        block=None if labels is None else labels.labels[x],
    )


def sample_without_replacement(
    g: Graph,
    seed: SeedPolicy,
    lam,
    n_target,
    max_restarts=100,
    y=None,
    labels=None,
    rng=None,
):
    """Breadth-first recruitment without replacement.

    Participant t draws a coupon count R_t ~ Poisson(lam) and recruits
    min(R_t, #unrecruited neighbors) distinct unrecruited neighbors,
    chosen with probability proportional to edge weight (uniform on
    unweighted graphs).  A run that exhausts its queue before n_target
    restarts from a freshly drawn seed, up to ``max_restarts`` times.
    """
    _require_walkable(g)
    n_target = int(n_target)
    if not 1 <= n_target <= g.n_nodes:
        raise ValueError(f"n_target must be in [1, {g.n_nodes}], got {n_target}")
    if not lam > 0:
        raise ValueError("lam must be positive")
    if y is None:
        raise ValueError("y (outcome array over nodes) is required")

    for attempt in range(int(max_restarts) + 1):
        order, parent = _recruit_once(g, seed, lam, n_target, rng)
        if order is not None:
            tree = SamplingTree(np.asarray(parent, dtype=np.int64))
            return _attach(g, tree, np.asarray(order, dtype=np.int64), y, labels, "without", attempt)
    raise SamplingFailureError(
        f"recruitment failed to reach {n_target} participants after {max_restarts} restarts"
    )


def _recruit_once(g, seed, lam, n_target, rng):
    recruited = np.zeros(g.n_nodes, dtype=bool)
    s0 = select_seed(seed, g, rng)
    recruited[s0] = True
    order = [s0]
    parent = [-1]
    head = 0
    while len(order) < n_target and head < len(order):
        cur = order[head]
        r = int(rng.poisson(lam))
        if r > 0:
            ids, w = g.neighbors(cur)
            avail = ~recruited[ids]
            cand = ids[avail]
            if cand.size:
                # draw a weight-proportional recruitment order, keep the first
                # min(r, all) recruits, then drop any excess beyond the target
                if g.unit_weights:
                    ordered = rng.permutation(cand)
                else:
                    wc = w[avail]
                    ordered = rng.choice(cand, size=cand.size, replace=False, p=wc / wc.sum())
                chosen = ordered[: min(r, cand.size, n_target - len(order))]
                recruited[chosen] = True
                order.extend(int(v) for v in chosen)
                parent.extend([head] * chosen.size)
        head += 1
    if len(order) == n_target:
        return order, parent
    return None, None
