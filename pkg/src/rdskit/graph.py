"""Weighted undirected graphs for referral-walk simulation.

Conventions everything downstream relies on:

* Node ids are dense integers ``0..n_nodes-1``.
* Edges are undirected with positive weight, at most one edge per
  unordered pair; self-loops are allowed.
* A self-loop contributes its weight ONCE to the node degree (many graph
  libraries count it twice).  With this convention ``d_i = sum_j w_ij``
  holds exactly, so the walk kernel ``P_ij = w_ij / d_i`` has the
  degree-proportional distribution ``pi_i = d_i / sum_j d_j`` as its
  exact stationary law on connected graphs.

Graphs are immutable once constructed; build them via :meth:`Graph.from_edges`
or the text loaders.  Immutability makes them safe to share across
concurrent replicate workers.
"""

from __future__ import annotations

from typing import IO, Iterable, Iterator, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class ParseError(ValueError):
    """Malformed edge-list or label input; the message carries the line number."""


class DegenerateNodeError(ValueError):
    """Raised when an operation needs a positive-degree node."""


class DisconnectedGraphError(ValueError):
    """Raised when an operation needs a connected graph (take the LCC first)."""


class Graph:
    """Immutable weighted undirected graph in CSR adjacency form.

    Each undirected edge {i, j} with i != j is stored in both rows; a
    self-loop {i, i} is stored once.  Rows are sorted by neighbor id.
    """

    __slots__ = (
        "_n",
        "_indptr",
        "_indices",
        "_weights",
        "_degrees",
        "_n_edges",
        "_unit_weights",
        "_connected",
        "_cum_weights",
    )

    def __init__(self, n_nodes, indptr, indices, weights, n_edges):
        # Internal constructor; use from_edges() / loaders.
        self._n = int(n_nodes)
        self._indptr = indptr
        self._indices = indices
        self._weights = weights
        self._degrees = np.bincount(
            np.repeat(np.arange(self._n), np.diff(indptr)),
            weights=weights,
            minlength=self._n,
        )
        self._n_edges = int(n_edges)
        self._unit_weights = bool(weights.size == 0 or np.all(weights == 1.0))
        self._connected = None
        self._cum_weights = None
        for arr in (self._indptr, self._indices, self._weights, self._degrees):
            arr.setflags(write=False)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(cls, edges, n_nodes=None):
        """Build a graph from (i, j) or (i, j, w) tuples.

        Duplicate undirected edges (including reversed repeats) are an
        error.  ``n_nodes`` defaults to ``max id + 1``; passing it
        explicitly allows trailing isolated nodes.
        """
        ii, jj, ww = [], [], []
        seen = set()
        for e in edges:
            if len(e) == 2:
                i, j = e
                w = 1.0
            elif len(e) == 3:
                i, j, w = e
            else:
                raise ValueError(f"edge must have 2 or 3 fields, got {e!r}")
            i, j = int(i), int(j)
            w = float(w)
            if i < 0 or j < 0:
                raise ValueError(f"negative node id in edge ({i}, {j})")
            if not (w > 0) or not np.isfinite(w):
                raise ValueError(f"edge ({i}, {j}) has non-positive weight {w}")
            key = (i, j) if i <= j else (j, i)
            if key in seen:
                raise ValueError(f"duplicate undirected edge ({i}, {j})")
            seen.add(key)
            ii.append(i)
            jj.append(j)
            ww.append(w)
        if n_nodes is None:
            if not ii:
                raise ValueError("empty edge set and no explicit n_nodes")
            n_nodes = max(max(ii), max(jj)) + 1
        n_nodes = int(n_nodes)
        if n_nodes <= 0:
            raise ValueError("n_nodes must be positive")
        ia = np.asarray(ii, dtype=np.int64)
        ja = np.asarray(jj, dtype=np.int64)
        wa = np.asarray(ww, dtype=np.float64)
        if ia.size and max(ia.max(), ja.max()) >= n_nodes:
            raise ValueError("edge references node id >= n_nodes")
        return cls._assemble(n_nodes, ia, ja, wa)

    @classmethod
    def _from_pair_arrays(cls, n_nodes, ii, jj, ww=None):
        """Fast path for generators that produce distinct pairs by construction."""
        ii = np.asarray(ii, dtype=np.int64)
        jj = np.asarray(jj, dtype=np.int64)
        if ww is None:
            ww = np.ones(ii.shape[0], dtype=np.float64)
        return cls._assemble(int(n_nodes), ii, jj, np.asarray(ww, dtype=np.float64))

    @classmethod
    def _assemble(cls, n_nodes, ii, jj, ww):
        off = ii != jj
        rows = np.concatenate([ii, jj[off]])
        cols = np.concatenate([jj, ii[off]])
        vals = np.concatenate([ww, ww[off]])
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        indptr = np.zeros(n_nodes + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n_nodes), out=indptr[1:])
        return cls(n_nodes, indptr, cols, vals, ii.shape[0])

    # -- basic accessors ---------------------------------------------------

    @property
    def n_nodes(self):
        return self._n

    @property
    def n_edges(self):
        """Number of undirected edges, self-loops counted once."""
        return self._n_edges

    @property
    def degrees(self):
        """Weighted degrees; read-only array, self-loops counted once."""
        return self._degrees

    @property
    def indptr(self):
        return self._indptr

    @property
    def indices(self):
        return self._indices

    @property
    def weights(self):
        return self._weights

    @property
    def unit_weights(self):
        return self._unit_weights

    def _check_node(self, i):
        if not 0 <= i < self._n:
            raise ValueError(f"node id {i} out of range [0, {self._n})")

    def degree(self, i):
        """Weighted degree of node ``i`` (self-loop weight counted once)."""
        self._check_node(i)
        return float(self._degrees[i])

    def neighbors(self, i):
        """(neighbor ids, weights) views for node ``i``, sorted by id."""
        self._check_node(i)
        lo, hi = self._indptr[i], self._indptr[i + 1]
        return self._indices[lo:hi], self._weights[lo:hi]

    def transition_prob(self, i, j):
        """One-step walk probability ``w_ij / d_i``."""
        self._check_node(i)
        self._check_node(j)
        d = self._degrees[i]
        if d <= 0:
            raise DegenerateNodeError(f"node {i} is isolated (degree 0)")
        ids, w = self.neighbors(i)
        pos = np.searchsorted(ids, j)
        if pos < ids.size and ids[pos] == j:
            return float(w[pos] / d)
        return 0.0

    def dense_transition_matrix(self):
        """Full N x N walk kernel; only sensible for small graphs."""
        if np.any(self._degrees <= 0):
            raise DegenerateNodeError("graph has isolated nodes")
        p = np.zeros((self._n, self._n))
        for i in range(self._n):
            ids, w = self.neighbors(i)
            p[i, ids] = w / self._degrees[i]
        return p

    def row_cum_weights(self):
        """Per-row cumulative weights, cached; used for weighted neighbor draws."""
        if self._cum_weights is None:
            cw = np.empty_like(self._weights)
            for i in range(self._n):
                lo, hi = self._indptr[i], self._indptr[i + 1]
                np.cumsum(self._weights[lo:hi], out=cw[lo:hi])
            cw.setflags(write=False)
            self._cum_weights = cw  # lazy cache; graph stays logically immutable
        return self._cum_weights

    @property
    def is_connected(self):
        if self._connected is None:
            if self._n == 1:
                conn = True
            else:
                ncomp, _ = connected_components(self._scipy_csr(), directed=False)
                conn = ncomp == 1
            self._connected = bool(conn)
        return self._connected

    def _scipy_csr(self):
        return csr_matrix(
            (self._weights, self._indices, self._indptr), shape=(self._n, self._n)
        )

    def edge_iter(self):
        """Yield (i, j, w) with i <= j, each undirected edge once."""
        for i in range(self._n):
            lo, hi = self._indptr[i], self._indptr[i + 1]
            for k in range(lo, hi):
                j = int(self._indices[k])
                if i <= j:
                    yield i, j, float(self._weights[k])

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._n == other._n
            and np.array_equal(self._indptr, other._indptr)
            and np.array_equal(self._indices, other._indices)
            and np.array_equal(self._weights, other._weights)
        )

    def __hash__(self):
        return hash((self._n, self._n_edges))

    def __repr__(self):
        return f"Graph(n_nodes={self._n}, n_edges={self._n_edges})"


class BlockAssignment:
    """Node-to-block labels 0..k-1 for all nodes of a graph."""

    __slots__ = ("_labels", "_k", "_sizes")

    def __init__(self, labels, k=None):
        labels = np.asarray(labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a non-empty 1-d array")
        if k is None:
            k = int(labels.max()) + 1
        k = int(k)
        if k < 1:
            raise ValueError("k must be >= 1")
        if labels.min() < 0 or labels.max() >= k:
            raise ValueError("labels must lie in [0, k)")
        self._labels = labels
        self._k = k
        self._sizes = np.bincount(labels, minlength=k)
        self._labels.setflags(write=False)
        self._sizes.setflags(write=False)

    @property
    def labels(self):
        return self._labels

    @property
    def k(self):
        return self._k

    @property
    def n_nodes(self):
        return int(self._labels.size)

    @property
    def block_sizes(self):
        return self._sizes

    def members(self, block):
        if not 0 <= block < self._k:
            raise ValueError(f"block {block} out of range [0, {self._k})")
        return np.flatnonzero(self._labels == block)

    def restrict(self, node_map):
        """Labels for the subgraph described by an old->new node map.

        ``node_map[old] = new`` with -1 for dropped nodes, as returned by
        :func:`largest_connected_component`.
        """
        node_map = np.asarray(node_map)
        kept = np.flatnonzero(node_map >= 0)
        new_labels = np.empty(kept.size, dtype=np.int64)
        new_labels[node_map[kept]] = self._labels[kept]
        return BlockAssignment(new_labels, k=self._k)

    def __eq__(self, other):
        if not isinstance(other, BlockAssignment):
            return NotImplemented
        return self._k == other._k and np.array_equal(self._labels, other._labels)

    def __repr__(self):
        return f"BlockAssignment(n_nodes={self._labels.size}, k={self._k})"


def stationary_distribution(g: Graph):
    """Stationary law of the walk: ``pi_i = d_i / sum_j d_j``.

    Requires a connected graph with positive degrees; callers holding a
    possibly disconnected graph should take the LCC first.
    """
    if np.any(g.degrees <= 0):
        raise DegenerateNodeError("graph has isolated nodes")
    if not g.is_connected:
        raise DisconnectedGraphError(
            "stationary distribution needs a connected graph; take the LCC first"
        )
    return g.degrees / g.degrees.sum()


def largest_connected_component(g: Graph):
    """Restrict to the largest connected component.

    Returns ``(subgraph, node_map)`` where ``node_map[old] = new`` and -1
    marks dropped nodes.  Ties between equal-size components go to the one
    containing the smallest original node id.  Kept nodes are renumbered
    in increasing original-id order, so a connected input maps to itself.
    """
    ncomp, comp = connected_components(g._scipy_csr(), directed=False)
    sizes = np.bincount(comp, minlength=ncomp)
    best = sizes.max()
    # candidate components in order of their smallest member id
    first_member = np.full(ncomp, g.n_nodes, dtype=np.int64)
    np.minimum.at(first_member, comp, np.arange(g.n_nodes))
    winners = np.flatnonzero(sizes == best)
    chosen = winners[np.argmin(first_member[winners])]

    keep = comp == chosen
    node_map = np.full(g.n_nodes, -1, dtype=np.int64)
    node_map[keep] = np.arange(int(best))

    rows = np.repeat(np.arange(g.n_nodes), np.diff(g.indptr))
    mask = keep[rows] & (rows <= g.indices)  # each undirected edge once
    ii = node_map[rows[mask]]
    jj = node_map[g.indices[mask]]
    ww = g.weights[mask]
    sub = Graph._from_pair_arrays(int(best), ii, jj, ww)
    return sub, node_map


Lines = Union[IO[str], Iterable[str], Sequence[str]]


def _iter_fields(lines: Lines) -> Iterator[tuple[int, list[str]]]:
    for ln, raw in enumerate(lines, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        yield ln, text.split()


def load_edge_list(lines: Lines, n_nodes=None) -> Graph:
    """Parse edge-list text: ``i j`` or ``i j w`` per line, '#' comments.

    Ids are 0-based; the optional weight must be positive and defaults
    to 1.  ``i j`` and ``j i`` count as the same edge; repeating one is a
    parse error.  ``n_nodes`` defaults to ``max id + 1``.
    """
    edges = []
    seen = set()
    max_id = -1
    for ln, fields in _iter_fields(lines):
        if len(fields) not in (2, 3):
            raise ParseError(f"line {ln}: expected 'i j' or 'i j w', got {fields!r}")
        try:
            i, j = int(fields[0]), int(fields[1])
            w = float(fields[2]) if len(fields) == 3 else 1.0
        except ValueError as exc:
            raise ParseError(f"line {ln}: {exc}") from None
        if i < 0 or j < 0:
            raise ParseError(f"line {ln}: negative node id")
        if not (w > 0) or not np.isfinite(w):
            raise ParseError(f"line {ln}: weight must be positive, got {w}")
        key = (i, j) if i <= j else (j, i)
        if key in seen:
            raise ParseError(f"line {ln}: duplicate undirected edge ({i}, {j})")
        seen.add(key)
        edges.append((i, j, w))
        max_id = max(max_id, i, j)
    if not edges and n_nodes is None:
        raise ParseError("empty edge list")
    if n_nodes is not None and max_id >= int(n_nodes):
        raise ParseError(f"edge references node id {max_id} >= n_nodes {n_nodes}")
    return Graph.from_edges(edges, n_nodes=n_nodes)


def load_labels(lines: Lines, n_nodes: int) -> BlockAssignment:
    """Parse label text: ``i k`` per line, one line per node, '#' comments."""
    labels = np.full(int(n_nodes), -1, dtype=np.int64)
    for ln, fields in _iter_fields(lines):
        if len(fields) != 2:
            raise ParseError(f"line {ln}: expected 'i k', got {fields!r}")
        try:
            i, k = int(fields[0]), int(fields[1])
        except ValueError as exc:
            raise ParseError(f"line {ln}: {exc}") from None
        if not 0 <= i < n_nodes:
            raise ParseError(f"line {ln}: node id {i} out of range [0, {n_nodes})")
        if k < 0:
            raise ParseError(f"line {ln}: block label {k} out of range (negative)")
        if labels[i] >= 0:
            raise ParseError(f"line {ln}: node {i} labeled twice")
        labels[i] = k
    missing = np.flatnonzero(labels < 0)
    if missing.size:
        raise ParseError(f"node {int(missing[0])} has no label")
    return BlockAssignment(labels)
