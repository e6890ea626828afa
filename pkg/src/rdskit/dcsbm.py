"""Degree-corrected blockmodel parameterization and random graph generation.

The model: nodes are partitioned into blocks; every unordered pair {i, j}
(self-pairs included) is an edge independently with probability
``theta_i * theta_j * B[z(i), z(j)]``, clamped to 1 if the product
exceeds it.  ``B`` is symmetric positive and, with the per-block
convention ``sum_{i in block k} theta_i = 1``, ``B[u, v]`` is the expected
number of edges between blocks u != v and ``1'B1 / n`` the expected mean
degree (self-loops counted once).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import BlockAssignment, Graph

_THETA_SUM_TOL = 1e-9

# Heuristic pass/fail cutoffs for the consistency-assumption report.  The
# report never blocks execution; these only decide which warnings appear.
_LINEAR_BLOCK_MIN_RATIO = 0.05
_DENSE_MIN_AFFINITY_RATIO = 0.01
_HOMOGENEITY_MAX_SPREAD = 10.0
_MAX_TREE_DEGREE = 12

# auto method: sparse skipping below this per-pair probability cap,
# dense Bernoulli above (or for tiny block pairs where it is free).
_SPARSE_PROB_CUTOFF = 0.25
_SPARSE_MIN_PAIRS = 4096
_DENSE_ROW_CHUNK = 256


def contiguous_labels(block_sizes) -> BlockAssignment:
    """Canonical labels: block 0 first, then block 1, and so on."""
    sizes = np.asarray(block_sizes, dtype=np.int64)
    return BlockAssignment(np.repeat(np.arange(sizes.size), sizes), k=sizes.size)


def _check_affinity(b):
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("affinity matrix must be square")
    if not np.all(b > 0):
        raise ValueError("affinity matrix entries must be positive")
    if not np.allclose(b, b.T, rtol=1e-12, atol=0):
        raise ValueError("affinity matrix must be symmetric")
    return b


@dataclass(frozen=True)
class DcsbmParams:
    """Blockmodel parameters: block sizes, affinity matrix B, degree weights theta.

    ``theta`` is indexed by node id under the contiguous-label convention
    (block 0 first); :func:`generate` revalidates the per-block theta sums
    against whatever labels it is given.
    """

    block_sizes: np.ndarray
    affinity: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        sizes = np.asarray(self.block_sizes, dtype=np.int64)
        if sizes.ndim != 1 or sizes.size == 0 or np.any(sizes <= 0):
            raise ValueError("block_sizes must be positive integers")
        b = _check_affinity(self.affinity)
        if b.shape[0] != sizes.size:
            raise ValueError("affinity shape does not match number of blocks")
        theta = np.asarray(self.theta, dtype=np.float64)
        if theta.shape != (int(sizes.sum()),):
            raise ValueError("theta length must equal the number of nodes")
        if not np.all(theta > 0):
            raise ValueError("theta entries must be positive")
        _validate_theta_sums(theta, contiguous_labels(sizes))
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "affinity", b)
        object.__setattr__(self, "theta", theta)

    @property
    def k(self):
        return int(self.block_sizes.size)

    @property
    def n_nodes(self):
        return int(self.block_sizes.sum())

    @property
    def total_affinity(self):
        """m = 1'B1, twice the expected number of edges up to self-loop terms."""
        return float(self.affinity.sum())

    @property
    def mean_degree(self):
        return self.total_affinity / self.n_nodes


def _validate_theta_sums(theta, labels: BlockAssignment):
    sums = np.bincount(labels.labels, weights=theta, minlength=labels.k)
    if np.any(np.abs(sums - 1.0) > _THETA_SUM_TOL):
        bad = int(np.argmax(np.abs(sums - 1.0)))
        raise ValueError(
            f"theta must sum to 1 within each block; block {bad} sums to {sums[bad]!r}"
        )


def scale_to_mean_degree(b_rel, block_sizes, target_mean_degree):
    """Scale a relative affinity matrix so the expected mean degree matches.

    The total expected degree is ``1'B1``, so the scale factor is
    ``n * target / 1'B_rel 1``.
    """
    b_rel = _check_affinity(b_rel)
    if not target_mean_degree > 0:
        raise ValueError("target_mean_degree must be positive")
    n = int(np.asarray(block_sizes, dtype=np.int64).sum())
    return b_rel * (n * float(target_mean_degree) / b_rel.sum())


def homogeneous_theta(block_sizes):
    """Equal theta within each block: theta_i = 1 / N_k."""
    sizes = np.asarray(block_sizes, dtype=np.int64)
    return np.repeat(1.0 / sizes, sizes)


def powerlaw_theta(block_sizes, exponent, rng):
    """Heavy-tailed theta draws, renormalized to sum to 1 per block.

    Weights are ``(1 - u)^(-exponent)`` with u uniform on [0, 1); exponent 0
    reproduces the homogeneous case.
    """
    exponent = float(exponent)
    if not math.isfinite(exponent) or exponent < 0:
        raise ValueError(f"exponent must be finite and >= 0, got {exponent}")
    sizes = np.asarray(block_sizes, dtype=np.int64)
    n = int(sizes.sum())
    w = (1.0 - rng.random(n)) ** (-exponent)
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("exponent produces zero or non-finite weights")
    theta = np.empty(n)
    start = 0
    for size in sizes:
        stop = start + int(size)
        theta[start:stop] = w[start:stop] / w[start:stop].sum()
        start = stop
    return theta


def expected_degree(params: DcsbmParams, labels: BlockAssignment, i):
    """E[d_i] = theta_i * sum_v B[z(i), v]."""
    return float(params.theta[i] * params.affinity[labels.labels[i], :].sum())


@dataclass(frozen=True)
class GenerationResult:
    """A generated graph plus generation metadata."""

    graph: Graph
    clamped_pairs: int  # pairs whose theta*theta*B exceeded 1
    methods: tuple  # per block pair (u, v, "dense"|"sparse")


def generate(params: DcsbmParams, labels: BlockAssignment, rng, method="auto"):
    """Draw a graph from the blockmodel.

    ``method`` is "dense" (per-pair Bernoulli), "sparse" (geometric
    skipping over the linearized pair space with per-pair acceptance;
    identical in distribution, efficient when edge probabilities are
    small), or "auto" to pick per block pair.  Output is bit-reproducible
    for a fixed rng seed and method.
    """
    if method not in ("auto", "dense", "sparse"):
        raise ValueError(f"unknown generation method {method!r}")
    if labels.n_nodes != params.n_nodes or labels.k != params.k:
        raise ValueError("labels do not match params dimensions")
    if not np.array_equal(labels.block_sizes, params.block_sizes):
        raise ValueError("label block sizes do not match params.block_sizes")
    _validate_theta_sums(params.theta, labels)

    theta = params.theta
    b = params.affinity
    k = params.k
    members = [labels.members(u) for u in range(k)]
    theta_max = np.array([theta[m].max() for m in members])

    rows_out, cols_out = [], []
    clamped = 0
    methods = []
    for u in range(k):
        for v in range(u, k):
            mu, mv = members[u], members[v]
            n_pairs = (
                mu.size * (mu.size + 1) // 2 if u == v else mu.size * mv.size
            )
            p_cap = float(theta_max[u] * theta_max[v] * b[u, v])
            use_sparse = method == "sparse" or (
                method == "auto"
                and p_cap <= _SPARSE_PROB_CUTOFF
                and n_pairs >= _SPARSE_MIN_PAIRS
            )
            if use_sparse:
                ii, jj, nclamp = _generate_pair_sparse(
                    rng, theta, b[u, v], mu, mv, u == v, n_pairs, p_cap
                )
                methods.append((u, v, "sparse"))
            else:
                ii, jj, nclamp = _generate_pair_dense(rng, theta, b[u, v], mu, mv, u == v)
                methods.append((u, v, "dense"))
            clamped += nclamp
            rows_out.append(ii)
            cols_out.append(jj)

    ii = np.concatenate(rows_out) if rows_out else np.empty(0, dtype=np.int64)
    jj = np.concatenate(cols_out) if cols_out else np.empty(0, dtype=np.int64)
    graph = Graph._from_pair_arrays(params.n_nodes, ii, jj)
    return GenerationResult(graph=graph, clamped_pairs=int(clamped), methods=tuple(methods))


def _generate_pair_dense(rng, theta, b_uv, mu, mv, same_block):
    """Per-pair Bernoulli draws, chunked by rows of the block pair."""
    th_u = theta[mu]
    th_v = theta[mv]
    rows, cols = [], []
    clamped = 0
    for lo in range(0, mu.size, _DENSE_ROW_CHUNK):
        hi = min(lo + _DENSE_ROW_CHUNK, mu.size)
        p = np.outer(th_u[lo:hi], th_v) * b_uv
        if same_block:
            # keep j >= i only (self-pairs included on the diagonal)
            mask = np.arange(mv.size)[None, :] >= np.arange(lo, hi)[:, None]
            p = np.where(mask, p, 0.0)
        clamped += int(np.count_nonzero(p > 1.0))
        hit = rng.random(p.shape) < p
        r, c = np.nonzero(hit)
        rows.append(mu[r + lo])
        cols.append(mv[c])
    return (
        np.concatenate(rows) if rows else np.empty(0, dtype=np.int64),
        np.concatenate(cols) if cols else np.empty(0, dtype=np.int64),
        clamped,
    )


def _bernoulli_positions(rng, p, n_trials):
    """Indices of successes among n_trials iid Bernoulli(p), via geometric gaps."""
    if n_trials <= 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(n_trials, dtype=np.int64)
    out = []
    pos = -1
    est = int(n_trials * p * 1.1) + 16
    while True:
        gaps = rng.geometric(p, size=est)
        cand = pos + np.cumsum(gaps)
        inside = cand[cand < n_trials]
        out.append(inside)
        if inside.size < cand.size:
            break
        pos = int(cand[-1])
        est = max(int((n_trials - pos) * p * 1.1) + 16, 64)
    return np.concatenate(out).astype(np.int64, copy=False)


def _triangle_unrank(t, m):
    """Invert row-major upper-triangle (with diagonal) linear indices."""
    t = np.asarray(t, dtype=np.int64)
    # row r starts at offset r*m - r*(r-1)/2; solve the quadratic, then fix
    # float rounding with a couple of integer adjustment steps.
    r = ((2 * m + 1) - np.sqrt((2 * m + 1) ** 2 - 8.0 * t)) / 2.0
    r = np.floor(r).astype(np.int64)
    r = np.clip(r, 0, m - 1)
    start = r * m - r * (r - 1) // 2
    too_far = start > t
    while np.any(too_far):
        r[too_far] -= 1
        start = r * m - r * (r - 1) // 2
        too_far = start > t
    next_start = (r + 1) * m - (r + 1) * r // 2
    too_near = t >= next_start
    while np.any(too_near):
        r[too_near] += 1
        start = r * m - r * (r - 1) // 2
        next_start = (r + 1) * m - (r + 1) * r // 2
        too_near = t >= next_start
    c = r + (t - start)
    return r, c


def _generate_pair_sparse(rng, theta, b_uv, mu, mv, same_block, n_pairs, p_cap):
    """Skip through the linearized pair space at rate p_cap, then thin.

    Candidates arrive at probability min(p_cap, 1); each is kept with
    probability min(p_ij, 1)/min(p_cap, 1), which reproduces independent
    Bernoulli(min(p_ij, 1)) draws exactly.
    """
    p_skip = min(p_cap, 1.0)
    pos = _bernoulli_positions(rng, p_skip, n_pairs)
    if same_block:
        r, c = _triangle_unrank(pos, mu.size)
        ii, jj = mu[r], mu[c]
    else:
        ii, jj = mu[pos // mv.size], mv[pos % mv.size]
    p_act = theta[ii] * theta[jj] * b_uv
    clamped = int(np.count_nonzero(p_act > 1.0)) if p_cap > 1.0 else 0
    if p_cap > 1.0 or theta[mu].min() < theta[mu].max() or theta[mv].min() < theta[mv].max():
        keep = rng.random(pos.size) < np.minimum(p_act, 1.0) / p_skip
        ii, jj = ii[keep], jj[keep]
    return ii, jj, clamped


@dataclass(frozen=True)
class AssumptionReport:
    """Measured consistency-assumption diagnostics; warnings only.

    Covers: (a) linear-sized blocks, (b) dense graph, (c) degree
    homogeneity, (d) bounded outcomes, (e) limited referrals.
    """

    block_ratio_min: float
    block_ratio_max: float
    linear_blocks_ok: bool
    affinity_ratio_min: float
    affinity_ratio_max: float
    dense_ok: bool
    theta_scaled_min: float
    theta_scaled_max: float
    homogeneity_ok: bool
    y_min: float | None
    y_max: float | None
    bounded_ok: bool | None
    tree_max_degree: int | None
    limited_referrals_ok: bool | None
    warnings: tuple = field(default_factory=tuple)

    def to_dict(self):
        return {
            "block_ratio": [self.block_ratio_min, self.block_ratio_max],
            "linear_blocks_ok": self.linear_blocks_ok,
            "affinity_over_n2": [self.affinity_ratio_min, self.affinity_ratio_max],
            "dense_ok": self.dense_ok,
            "theta_times_n": [self.theta_scaled_min, self.theta_scaled_max],
            "homogeneity_ok": self.homogeneity_ok,
            "y_range": None if self.y_min is None else [self.y_min, self.y_max],
            "bounded_ok": self.bounded_ok,
            "tree_max_degree": self.tree_max_degree,
            "limited_referrals_ok": self.limited_referrals_ok,
            "warnings": list(self.warnings),
        }


def check_assumptions(params: DcsbmParams, labels: BlockAssignment, y=None, tree=None):
    """Measure how far a configuration sits from the consistency assumptions.

    Purely descriptive: returns measured ratios plus heuristic pass flags
    and never raises.  Realistic sparse configurations are expected to
    fail the dense check; the estimators still behave well there.
    """
    n = params.n_nodes
    ratios = params.block_sizes / n
    aff_ratio = params.affinity / float(n) ** 2
    theta_scaled = params.theta * n
    warnings = []

    linear_ok = bool(ratios.min() >= _LINEAR_BLOCK_MIN_RATIO)
    if not linear_ok:
        warnings.append(
            f"smallest block is {ratios.min():.4f} of the population; "
            "linear-sized-blocks assumption looks violated"
        )
    dense_ok = bool(aff_ratio.min() >= _DENSE_MIN_AFFINITY_RATIO)
    if not dense_ok:
        warnings.append(
            f"min affinity/n^2 is {aff_ratio.min():.3g}; the graph is sparse "
            "(mean degree grows slower than n). Estimates remain usable."
        )
    spread = float(theta_scaled.max() / theta_scaled.min())
    homog_ok = bool(spread <= _HOMOGENEITY_MAX_SPREAD)
    if not homog_ok:
        warnings.append(f"theta spread max/min = {spread:.3g} exceeds {_HOMOGENEITY_MAX_SPREAD}")

    y_min = y_max = None
    bounded_ok = None
    if y is not None:
        ya = np.asarray(y, dtype=np.float64)
        y_min, y_max = float(ya.min()), float(ya.max())
        bounded_ok = bool(np.all(np.isfinite(ya)) and y_min >= 0)
        if not bounded_ok:
            warnings.append("outcome values must be finite and non-negative")

    tree_deg = None
    limited_ok = None
    if tree is not None:
        tree_deg = int(tree.max_degree())
        limited_ok = bool(tree_deg <= _MAX_TREE_DEGREE)
        if not limited_ok:
            warnings.append(f"referral tree degree {tree_deg} exceeds {_MAX_TREE_DEGREE}")

    return AssumptionReport(
        block_ratio_min=float(ratios.min()),
        block_ratio_max=float(ratios.max()),
        linear_blocks_ok=linear_ok,
        affinity_ratio_min=float(aff_ratio.min()),
        affinity_ratio_max=float(aff_ratio.max()),
        dense_ok=dense_ok,
        theta_scaled_min=float(theta_scaled.min()),
        theta_scaled_max=float(theta_scaled.max()),
        homogeneity_ok=homog_ok,
        y_min=y_min,
        y_max=y_max,
        bounded_ok=bounded_ok,
        tree_max_degree=tree_deg,
        limited_referrals_ok=limited_ok,
        warnings=tuple(warnings),
    )


def params_from_config(doc, rng=None):
    """Build DcsbmParams from a JSON-style configuration document.

    Schema: ``{"k", "block_sizes", "b_rel", "target_mean_degree",
    "theta_mode"}`` where theta_mode is "homogeneous", {"mode":
    "powerlaw", "exponent": g} (needs rng), or {"mode": "explicit",
    "theta": [...]}.
    """
    try:
        k = int(doc["k"])
        sizes = np.asarray(doc["block_sizes"], dtype=np.int64)
        b_rel = np.asarray(doc["b_rel"], dtype=np.float64)
        target = float(doc["target_mean_degree"])
    except KeyError as exc:
        raise ValueError(f"network config missing field {exc}") from None
    if sizes.size != k:
        raise ValueError("block_sizes length does not match k")
    mode = doc.get("theta_mode", "homogeneous")
    if mode == "homogeneous":
        theta = homogeneous_theta(sizes)
    elif isinstance(mode, dict) and mode.get("mode") == "powerlaw":
        if rng is None:
            raise ValueError("powerlaw theta_mode needs an rng")
        theta = powerlaw_theta(sizes, mode["exponent"], rng)
    elif isinstance(mode, dict) and mode.get("mode") == "explicit":
        theta = np.asarray(mode["theta"], dtype=np.float64)
    else:
        raise ValueError(f"unknown theta_mode {mode!r}")
    return DcsbmParams(
        block_sizes=sizes,
        affinity=scale_to_mean_degree(b_rel, sizes, target),
        theta=theta,
    )


def params_to_config(params: DcsbmParams):
    """Exact serialization of DcsbmParams (round-trips through params_from_config)."""
    return {
        "k": params.k,
        "block_sizes": params.block_sizes.tolist(),
        "b_rel": params.affinity.tolist(),
        "target_mean_degree": params.mean_degree,
        "theta_mode": {"mode": "explicit", "theta": params.theta.tolist()},
    }
