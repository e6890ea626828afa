"""Monte Carlo harness: replicated sampling experiments over generated networks.

One experiment draws G networks, takes each network's largest connected
component, realizes an outcome variable, draws M referral samples per
network, evaluates a set of estimators on every sample, and aggregates
per (network, estimator): absolute bias, standard deviation, and RMSE
over the M replicates (population convention, ddof=0, so
RMSE^2 = bias^2 + sd^2 exactly).

Every random stream is derived from (master seed, purpose, indices), so
reports are byte-identical regardless of worker count or scheduling.
"""

from __future__ import annotations

import dataclasses
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import estimators as est
from .dcsbm import DcsbmParams, contiguous_labels, generate, homogeneous_theta, powerlaw_theta, scale_to_mean_degree
from .graph import ParseError, _iter_fields, largest_connected_component, load_edge_list, load_labels
from .oracle import zeta
from .sampling import (
    RdsSample,
    SamplingFailureError,
    SeedPolicy,
    TreeExtinctError,
    complete_ary_tree,
    poisson_tree,
    sample_with_replacement,
    sample_with_replacement_batch,
    sample_without_replacement,
)

ESTIMATOR_NAMES = ("mean", "ipw", "vh", "ps")

# spawn-key stream tags: one tag per purpose keeps replicate streams
# independent and reproducible under any parallel schedule
_STREAM_NETWORK = 1
_STREAM_OUTCOME = 2
_STREAM_SAMPLE = 3
_STREAM_SCALING_NET = 4
_STREAM_SCALING_REP = 5


def _rng(master_seed, *key):
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=tuple(key)))


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class DcsbmNetwork:
    """Generated-network spec: two-parameter relative affinity plus scale."""

    n_nodes: int
    b_rel: tuple  # K x K nested tuples, symmetric positive
    target_mean_degree: float
    block_proportions: tuple | None = None  # defaults to equal blocks
    theta_mode: str = "homogeneous"  # or "powerlaw"
    theta_exponent: float = 0.0
    method: str = "auto"

    @property
    def k(self):
        return len(self.b_rel)

    def block_sizes(self):
        props = self.block_proportions
        if props is None:
            props = [1.0 / self.k] * self.k
        props = np.asarray(props, dtype=np.float64)
        sizes = np.floor(props / props.sum() * self.n_nodes).astype(np.int64)
        for i in range(int(self.n_nodes - sizes.sum())):
            sizes[i % self.k] += 1
        return sizes

    def build_params(self, rng) -> DcsbmParams:
        sizes = self.block_sizes()
        b = scale_to_mean_degree(np.asarray(self.b_rel), sizes, self.target_mean_degree)
        if self.theta_mode == "homogeneous":
            theta = homogeneous_theta(sizes)
        elif self.theta_mode == "powerlaw":
            theta = powerlaw_theta(sizes, self.theta_exponent, rng)
        else:
            raise ValueError(f"unknown theta_mode {self.theta_mode!r}")
        return DcsbmParams(block_sizes=sizes, affinity=b, theta=theta)


def bottleneck_b_rel(strength):
    """Two-block relative affinity [[p, q], [q, p]] with p - q = strength, p + q = 1."""
    strength = float(strength)
    p = (1.0 + strength) / 2.0
    if not 0.5 <= p < 1.0:
        raise ValueError(f"bottleneck strength must be in [0, 1), got {strength}")
    q = 1.0 - p
    return ((p, q), (q, p))


@dataclass(frozen=True)
class ExternalNetwork:
    """Edge-list + label files standing in for a real study network."""

    edges_path: str
    labels_path: str


@dataclass(frozen=True)
class OutcomeConfig:
    """How node outcomes arise: a block indicator, per-block Bernoulli draws,
    or an external per-node value file."""

    kind: str = "block_indicator"
    means: tuple | None = None  # per-block Bernoulli means
    path: str | None = None
    block: int = 0  # indicator block

    def __post_init__(self):
        if self.kind not in ("block_indicator", "bernoulli", "file"):
            raise ValueError(f"unknown outcome kind {self.kind!r}")
        if self.kind == "bernoulli" and not self.means:
            raise ValueError("bernoulli outcome needs per-block means")
        if self.kind == "file" and not self.path:
            raise ValueError("file outcome needs a path")


def alignment_means(alignment):
    """Two-block Bernoulli means ((1+a)/2, (1-a)/2); a=1 is the block indicator."""
    a = float(alignment)
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"alignment must be in [0, 1], got {a}")
    return ((1.0 + a) / 2.0, (1.0 - a) / 2.0)


@dataclass(frozen=True)
class SamplingConfig:
    mode: str = "without"  # "without": recruitment; "with": tree-indexed walk
    lam: float = 2.0
    n_target: int = 1000
    seed_policy: str = "degree_proportional"
    max_restarts: int = 100
    tree_arity: int | None = None  # with-replacement: fixed complete tree
    tree_levels: int | None = None  # (otherwise a Poisson(lam) tree per replicate)

    def __post_init__(self):
        if self.mode not in ("without", "with"):
            raise ValueError(f"unknown sampling mode {self.mode!r}")
        SeedPolicy.parse(self.seed_policy)


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int
    network: DcsbmNetwork | ExternalNetwork
    outcome: OutcomeConfig
    sampling: SamplingConfig
    n_networks: int = 1
    n_samples: int = 1
    estimators: tuple = ESTIMATOR_NAMES
    smoothing: float = est.DEFAULT_SMOOTHING

    def __post_init__(self):
        if self.n_networks < 1 or self.n_samples < 1:
            raise ValueError("replication counts must be >= 1")
        for name in self.estimators:
            if name not in ESTIMATOR_NAMES:
                raise ValueError(f"unknown estimator {name!r}; known: {ESTIMATOR_NAMES}")


def config_to_doc(config: ExperimentConfig) -> dict:
    doc = dataclasses.asdict(config)
    doc["network"]["type"] = "dcsbm" if isinstance(config.network, DcsbmNetwork) else "external"
    # JSON-native types throughout, so report metadata round-trips exactly
    return json.loads(json.dumps(doc))


def config_from_doc(doc: dict) -> ExperimentConfig:
    """Validate and build an ExperimentConfig from a JSON document."""
    try:
        net_doc = dict(doc["network"])
        net_type = net_doc.pop("type", "dcsbm")
        if net_type == "dcsbm":
            if "bottleneck" in net_doc:
                net_doc["b_rel"] = bottleneck_b_rel(net_doc.pop("bottleneck"))
            net_doc["b_rel"] = tuple(tuple(row) for row in net_doc["b_rel"])
            if net_doc.get("block_proportions") is not None:
                net_doc["block_proportions"] = tuple(net_doc["block_proportions"])
            network = DcsbmNetwork(**net_doc)
        elif net_type == "external":
            network = ExternalNetwork(**net_doc)
        else:
            raise ValueError(f"unknown network type {net_type!r}")
        out_doc = dict(doc.get("outcome", {}))
        if "alignment" in out_doc:
            out_doc["means"] = alignment_means(out_doc.pop("alignment"))
            out_doc["kind"] = "bernoulli"
        if out_doc.get("means") is not None:
            out_doc["means"] = tuple(out_doc["means"])
        outcome = OutcomeConfig(**out_doc)
        sampling = SamplingConfig(**doc.get("sampling", {}))
        return ExperimentConfig(
            master_seed=int(doc["master_seed"]),
            network=network,
            outcome=outcome,
            sampling=sampling,
            n_networks=int(doc.get("n_networks", 1)),
            n_samples=int(doc.get("n_samples", 1)),
            estimators=tuple(doc.get("estimators", ESTIMATOR_NAMES)),
            smoothing=float(doc.get("smoothing", est.DEFAULT_SMOOTHING)),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"invalid experiment config: {exc}") from exc


# --------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class ReportRow:
    network_id: int
    axis_value: float | None
    estimator: str
    abs_bias: float
    sd: float
    rmse: float
    mu_true: float
    failures: int


CSV_HEADER = "network_id,axis_value,estimator,abs_bias,sd,rmse,mu_true,failures"


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple
    metadata: dict = field(default_factory=dict)


def write_report(report: ExperimentReport, path, fmt="csv"):
    """Write the report; csv format also writes a JSON twin next to it.

    The twin carries the full config and seed, so a CSV is always
    accompanied by everything needed to regenerate it.
    """
    path = Path(path)
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in report.rows:
            axis = "" if r.axis_value is None else repr(float(r.axis_value))
            lines.append(
                f"{r.network_id},{axis},{r.estimator},{float(r.abs_bias)!r},"
                f"{float(r.sd)!r},{float(r.rmse)!r},{float(r.mu_true)!r},{r.failures}"
            )
        _write_text(path, "\n".join(lines) + "\n")
        _write_text(path.with_suffix(".json"), _report_json(report))
    elif fmt == "json":
        _write_text(path, _report_json(report))
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return path


def _write_text(path, text):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def _report_json(report):
    doc = {"metadata": report.metadata, "rows": [dataclasses.asdict(r) for r in report.rows]}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def read_report(path) -> ExperimentReport:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    rows = tuple(ReportRow(**r) for r in doc["rows"])
    return ExperimentReport(rows=rows, metadata=doc["metadata"])


# --------------------------------------------------------------------------
# running


def _load_outcome_file(path, n_nodes):
    values = np.full(int(n_nodes), np.nan)
    with open(path, "r", encoding="utf-8") as fh:
        for ln, fields in _iter_fields(fh):
            if len(fields) != 2:
                raise ParseError(f"line {ln}: expected 'i y', got {fields!r}")
            i = int(fields[0])
            if not 0 <= i < n_nodes:
                raise ParseError(f"line {ln}: node id {i} out of range")
            values[i] = float(fields[1])
    if np.any(np.isnan(values)):
        raise ParseError("outcome file misses values for some nodes")
    return values


def _realize_network(config: ExperimentConfig, g_idx):
    """Generate (or load) one network, restrict to its LCC, realize outcomes."""
    rng_net = _rng(config.master_seed, _STREAM_NETWORK, g_idx)
    meta = {}
    if isinstance(config.network, DcsbmNetwork):
        params = config.network.build_params(rng_net)
        labels_full = contiguous_labels(params.block_sizes)
        gen = generate(params, labels_full, rng_net, method=config.network.method)
        full, k = gen.graph, params.k
        meta["clamped_pairs"] = gen.clamped_pairs
    else:
        with open(config.network.edges_path, "r", encoding="utf-8") as fh:
            full = load_edge_list(fh)
        with open(config.network.labels_path, "r", encoding="utf-8") as fh:
            labels_full = load_labels(fh, full.n_nodes)
        k = labels_full.k
    lcc, node_map = largest_connected_component(full)
    labels = labels_full.restrict(node_map)
    meta["n_full"] = full.n_nodes
    meta["n_lcc"] = lcc.n_nodes

    rng_y = _rng(config.master_seed, _STREAM_OUTCOME, g_idx)
    oc = config.outcome
    if oc.kind == "block_indicator":
        y = (labels.labels == oc.block).astype(np.float64)
    elif oc.kind == "bernoulli":
        means = np.asarray(oc.means, dtype=np.float64)
        if means.size != k:
            raise ValueError(f"outcome means length {means.size} != k={k}")
        # threshold shared uniforms so sweeps over means stay coupled
        y = (rng_y.random(lcc.n_nodes) < means[labels.labels]).astype(np.float64)
    else:
        y_full = _load_outcome_file(oc.path, full.n_nodes)
        kept = np.flatnonzero(node_map >= 0)
        y = np.empty(lcc.n_nodes)
        y[node_map[kept]] = y_full[kept]
    return lcc, labels, y, meta


@dataclass(frozen=True)
class _EvalContext:
    mean_degree: float
    k: int
    smoothing: float


def evaluate_estimator(name, s: RdsSample, ctx: _EvalContext):
    if name == "mean":
        return est.sample_mean(s), False
    if name == "ipw":
        return est.ipw(s, ctx.mean_degree), False
    if name == "vh":
        return est.vh(s), False
    if name == "ps":
        r = est.ps(s, ctx.k, smoothing=ctx.smoothing)
        return r.estimate, bool(r.diagnostics["smoothing_applied"])
    raise ValueError(f"unknown estimator {name!r}")


def _draw_sample(config: ExperimentConfig, lcc, labels, y, rng):
    sc = config.sampling
    policy = SeedPolicy.parse(sc.seed_policy)
    if sc.mode == "without":
        return sample_without_replacement(
            lcc, policy, sc.lam, sc.n_target, sc.max_restarts, y, labels, rng
        )
    if sc.tree_arity is not None:
        tree = complete_ary_tree(sc.tree_arity, sc.tree_levels)
    else:
        tree = None
        for _ in range(sc.max_restarts + 1):
            try:
                tree = poisson_tree(rng, sc.lam, sc.n_target)
                break
            except TreeExtinctError:
                continue
        if tree is None:
            raise SamplingFailureError(
                f"referral tree died {sc.max_restarts + 1} times before reaching {sc.n_target}"
            )
    return sample_with_replacement(lcc, tree, policy, y, labels, rng)


def _summarize(values, mu_true):
    values = np.asarray(values, dtype=np.float64)
    mean = values.mean()
    abs_bias = abs(mean - mu_true)
    sd = float(np.sqrt(np.mean((values - mean) ** 2)))  # population convention
    rmse = float(np.sqrt(np.mean((values - mu_true) ** 2)))
    return float(abs_bias), sd, rmse


def _run_network(args):
    config, g_idx, axis_value = args
    lcc, labels, y, meta = _realize_network(config, g_idx)
    mu_true = float(y.mean())
    ctx = _EvalContext(
        mean_degree=float(lcc.degrees.mean()), k=labels.k, smoothing=config.smoothing
    )
    values = {name: [] for name in config.estimators}
    failures = 0
    restarts = 0
    smoothed = 0
    for r in range(config.n_samples):
        rng_r = _rng(config.master_seed, _STREAM_SAMPLE, g_idx, r)
        try:
            s = _draw_sample(config, lcc, labels, y, rng_r)
        except SamplingFailureError:
            failures += 1
            continue
        restarts += s.restart_count
        for name in config.estimators:
            v, sm = evaluate_estimator(name, s, ctx)
            values[name].append(v)
            smoothed += int(sm)
    rows = []
    for name in config.estimators:
        if values[name]:
            abs_bias, sd, rmse = _summarize(values[name], mu_true)
        else:
            abs_bias = sd = rmse = float("nan")
        rows.append(
            ReportRow(
                network_id=g_idx,
                axis_value=axis_value,
                estimator=name,
                abs_bias=abs_bias,
                sd=sd,
                rmse=rmse,
                mu_true=mu_true,
                failures=failures,
            )
        )
    meta.update(
        {
            "network_id": g_idx,
            "mu_true": mu_true,
            "mean_degree_lcc": ctx.mean_degree,
            "failures": failures,
            "restarts_total": restarts,
            "smoothing_applied_count": smoothed,
        }
    )
    return g_idx, rows, meta


def _map_networks(tasks, threads):
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(tasks) <= 1:
        results = [_run_network(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
            results = list(pool.map(_run_network, tasks))
    results.sort(key=lambda r: r[0])
    return results


def run(config: ExperimentConfig, threads=1, axis_value=None) -> ExperimentReport:
    """Run one experiment: G networks x M replicate samples, aggregated."""
    tasks = [(config, g, axis_value) for g in range(config.n_networks)]
    results = _map_networks(tasks, threads)
    rows = []
    net_meta = []
    for _, r_rows, meta in results:
        rows.extend(r_rows)
        net_meta.append(meta)
    metadata = {
        "config": config_to_doc(config),
        "master_seed": config.master_seed,
        "variance_convention": "population",
        "networks": net_meta,
    }
    return ExperimentReport(rows=tuple(rows), metadata=metadata)


_SWEEP_AXES = ("bottleneck", "alignment", "density", "network_size", "sample_size")


def _apply_axis(config: ExperimentConfig, axis, value):
    if axis == "bottleneck":
        network = dataclasses.replace(config.network, b_rel=bottleneck_b_rel(value))
        return dataclasses.replace(config, network=network)
    if axis == "alignment":
        outcome = OutcomeConfig(kind="bernoulli", means=alignment_means(value))
        return dataclasses.replace(config, outcome=outcome)
    if axis == "density":
        network = dataclasses.replace(config.network, target_mean_degree=float(value))
        return dataclasses.replace(config, network=network)
    if axis == "network_size":
        n = int(value)
        # keep density comparable across sizes: mean degree floor(sqrt(n)/3)
        network = dataclasses.replace(
            config.network, n_nodes=n, target_mean_degree=float(int(np.sqrt(n) / 3))
        )
        return dataclasses.replace(config, network=network)
    if axis == "sample_size":
        sampling = dataclasses.replace(config.sampling, n_target=int(value))
        return dataclasses.replace(config, sampling=sampling)
    raise ValueError(f"unknown sweep axis {axis!r}; known: {_SWEEP_AXES}")


def sweep(config: ExperimentConfig, axis, values, threads=1) -> ExperimentReport:
    """One run per axis value, sharing the master seed so only the swept
    factor differs between points wherever the streams allow."""
    all_rows = []
    point_meta = []
    for value in values:
        cfg = _apply_axis(config, axis, value)
        rep = run(cfg, threads=threads, axis_value=float(value))
        all_rows.extend(rep.rows)
        point_meta.append({"axis_value": float(value), "networks": rep.metadata["networks"]})
    metadata = {
        "config": config_to_doc(config),
        "master_seed": config.master_seed,
        "variance_convention": "population",
        "sweep_axis": axis,
        "sweep_values": [float(v) for v in values],
        "points": point_meta,
    }
    return ExperimentReport(rows=tuple(all_rows), metadata=metadata)


# --------------------------------------------------------------------------
# variance-scaling study


@dataclass(frozen=True)
class ScalingStudyResult:
    report: ExperimentReport
    slopes: dict  # estimator -> (slope, stderr) of log Var vs log n
    zeta: float
    predicted_vh_slope: float


def _fit_loglog(ns, variances):
    x = np.log(np.asarray(ns, dtype=np.float64))
    yv = np.log(np.asarray(variances, dtype=np.float64))
    xc = x - x.mean()
    slope = float(np.dot(xc, yv - yv.mean()) / np.dot(xc, xc))
    resid = yv - (yv.mean() + slope * xc)
    dof = max(len(ns) - 2, 1)
    stderr = float(np.sqrt(np.sum(resid**2) / dof / np.dot(xc, xc)))
    return slope, stderr


def variance_scaling_study(
    p,
    tree_sizes,
    n_nodes,
    replicates,
    master_seed,
    mean_degree=100.0,
    estimators=("vh", "ps"),
    smoothing=est.DEFAULT_SMOOTHING,
) -> ScalingStudyResult:
    """How estimator variance decays with sample size on complete binary trees.

    A single two-block network (block flip probability p) is held fixed;
    for each tree size n, `replicates` independent with-replacement
    samples are drawn with fresh degree-proportional seeds and the
    replicate variance of each estimator is recorded.  Requires the
    slow-mixing regime 2*(1-2p)^2 > 1, where the plain-average variance
    provably decays slower than 1/n with exponent 1 - zeta.
    """
    z = zeta(p)  # also validates p in (0, 1/2)
    if z <= 0:
        raise ValueError(
            f"flip probability p={p} violates the precondition 2*(1-2p)^2 > 1 "
            f"(got 2*(1-2p)^2 = {2 * (1 - 2 * p) ** 2:.6g}); the slow-decay "
            "regime needs p small enough"
        )
    sizes = [int(n) for n in tree_sizes]
    for n in sizes:
        levels = int(np.log2(n + 1))
        if 2**levels - 1 != n:
            raise ValueError(f"tree size {n} is not a complete binary tree size (2^L - 1)")

    rng_net = _rng(master_seed, _STREAM_SCALING_NET)
    network = DcsbmNetwork(
        n_nodes=int(n_nodes),
        b_rel=((1.0 - p, p), (p, 1.0 - p)),
        target_mean_degree=float(mean_degree),
    )
    params = network.build_params(rng_net)
    labels_full = contiguous_labels(params.block_sizes)
    gen = generate(params, labels_full, rng_net)
    lcc, node_map = largest_connected_component(gen.graph)
    labels = labels_full.restrict(node_map)
    y = (labels.labels == 0).astype(np.float64)
    mu_true = float(y.mean())
    ctx = _EvalContext(mean_degree=float(lcc.degrees.mean()), k=labels.k, smoothing=smoothing)
    policy = SeedPolicy("degree_proportional")

    rows = []
    variances = {name: [] for name in estimators}
    for si, n in enumerate(sizes):
        tree = complete_ary_tree(2, int(np.log2(n + 1)))
        rng_s = _rng(master_seed, _STREAM_SCALING_REP, si)
        batch = sample_with_replacement_batch(
            lcc, tree, policy, y, labels, rng_s, n_samples=int(replicates)
        )
        values = {name: np.empty(len(batch)) for name in estimators}
        for r in range(len(batch)):
            s = batch.sample(r)
            for name in estimators:
                values[name][r], _ = evaluate_estimator(name, s, ctx)
        for name in estimators:
            abs_bias, sd, rmse = _summarize(values[name], mu_true)
            variances[name].append(sd**2)
            rows.append(
                ReportRow(
                    network_id=0,
                    axis_value=float(n),
                    estimator=name,
                    abs_bias=abs_bias,
                    sd=sd,
                    rmse=rmse,
                    mu_true=mu_true,
                    failures=0,
                )
            )
    slopes = {name: _fit_loglog(sizes, variances[name]) for name in estimators}
    metadata = {
        "master_seed": int(master_seed),
        "variance_convention": "population",
        "study": "variance_scaling",
        "flip_probability": float(p),
        "zeta": z,
        "predicted_vh_slope": -(1.0 - z),
        "tree_sizes": sizes,
        "n_nodes": int(n_nodes),
        "n_lcc": lcc.n_nodes,
        "mean_degree": float(mean_degree),
        "replicates": int(replicates),
        "slopes": {name: {"slope": s, "stderr": se} for name, (s, se) in slopes.items()},
    }
    return ScalingStudyResult(
        report=ExperimentReport(rows=tuple(rows), metadata=metadata),
        slopes=slopes,
        zeta=z,
        predicted_vh_slope=-(1.0 - z),
    )
