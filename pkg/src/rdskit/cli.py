"""Command-line front end.

Subcommands: generate (network files), sample (one referral sample),
estimate (point estimates from a sample file), experiment / sweep /
scaling (Monte Carlo reports), diagnose (population-level diagnostics).

Exit codes: 0 success, 1 runtime failure (a machine-readable JSON error
record goes to stderr), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import estimators as est
from . import experiments as exp
from .dcsbm import check_assumptions, contiguous_labels, generate, params_from_config
from .graph import largest_connected_component, load_edge_list, load_labels
from .population import empirical_block_affinity, population_model, transition_concentration
from .sampling import sample_from_json, sample_to_json


class _ConfigError(Exception):
    """Bad flags/config discovered before any real work; exits 2."""


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise _ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise _ConfigError(f"invalid JSON in {path}: {exc}") from None


def _open_graph(edges_path, labels_path=None):
    try:
        with open(edges_path, "r", encoding="utf-8") as fh:
            g = load_edge_list(fh)
    except FileNotFoundError:
        raise _ConfigError(f"edge list not found: {edges_path}") from None
    labels = None
    if labels_path is not None:
        try:
            with open(labels_path, "r", encoding="utf-8") as fh:
                labels = load_labels(fh, g.n_nodes)
        except FileNotFoundError:
            raise _ConfigError(f"label file not found: {labels_path}") from None
    return g, labels


def _rng(seed):
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def _write_or_print(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _cmd_generate(args):
    doc = _read_json(args.config)
    rng = _rng(args.seed)
    try:
        params = params_from_config(doc, rng=rng)
    except ValueError as exc:
        raise _ConfigError(str(exc)) from None
    labels = contiguous_labels(params.block_sizes)
    result = generate(params, labels, rng)
    g = result.graph
    prefix = Path(args.out)
    edge_lines = []
    for i, j, w in g.edge_iter():
        edge_lines.append(f"{i} {j}" if w == 1.0 else f"{i} {j} {w!r}")
    edges_path = prefix.with_suffix(".edges")
    labels_path = prefix.with_suffix(".labels")
    edges_path.write_text("\n".join(edge_lines) + "\n", encoding="utf-8")
    labels_path.write_text(
        "\n".join(f"{i} {k}" for i, k in enumerate(labels.labels)) + "\n", encoding="utf-8"
    )
    report = check_assumptions(params, labels)
    meta = {
        "n_nodes": g.n_nodes,
        "n_edges": g.n_edges,
        "clamped_pairs": result.clamped_pairs,
        "seed": int(args.seed),
        "edges_file": str(edges_path),
        "labels_file": str(labels_path),
        "assumptions": report.to_dict(),
    }
    prefix.with_suffix(".meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return 0


def _cmd_sample(args):
    g, labels = _open_graph(args.edges, args.labels)
    lcc, node_map = largest_connected_component(g)
    labels_lcc = labels.restrict(node_map) if labels is not None else None
    if args.outcome is not None:
        y_full = exp._load_outcome_file(args.outcome, g.n_nodes)
        kept = np.flatnonzero(node_map >= 0)
        y = np.empty(lcc.n_nodes)
        y[node_map[kept]] = y_full[kept]
    elif labels_lcc is not None:
        y = (labels_lcc.labels == 0).astype(float)
    else:
        y = np.zeros(lcc.n_nodes)
    rng = _rng(args.seed)
    try:
        exp.SeedPolicy.parse(args.seed_policy)  # validate before work
    except ValueError as exc:
        raise _ConfigError(str(exc)) from None
    cfg = exp.ExperimentConfig(
        master_seed=int(args.seed),
        network=exp.ExternalNetwork(edges_path=args.edges, labels_path=args.labels or ""),
        outcome=exp.OutcomeConfig(),
        sampling=exp.SamplingConfig(
            mode=args.mode,
            lam=args.poisson_mean,
            n_target=args.n,
            seed_policy=args.seed_policy,
            max_restarts=args.max_restarts,
            tree_arity=args.tree_arity,
            tree_levels=args.tree_levels,
        ),
    )
    s = exp._draw_sample(cfg, lcc, labels_lcc, y, rng)
    _write_or_print(sample_to_json(s) + "\n", args.out)
    return 0


def _cmd_estimate(args):
    try:
        s = sample_from_json(Path(args.sample).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise _ConfigError(f"sample file not found: {args.sample}") from None
    except (ValueError, KeyError) as exc:
        raise _ConfigError(f"bad sample file: {exc}") from None
    names = [x.strip() for x in args.estimators.split(",") if x.strip()]
    out = {"n": s.n, "replacement_mode": s.replacement_mode, "estimates": {}, "diagnostics": {}}
    for name in names:
        if name == "mean":
            out["estimates"]["mean"] = est.sample_mean(s)
        elif name == "vh":
            out["estimates"]["vh"] = est.vh(s)
        elif name == "ipw":
            if args.mean_degree is None:
                raise _ConfigError("ipw needs --mean-degree (a population quantity)")
            out["estimates"]["ipw"] = est.ipw(s, args.mean_degree)
        elif name == "ps":
            if s.block is None:
                raise _ConfigError("ps needs block labels in the sample")
            k = args.k if args.k is not None else int(s.block.max()) + 1
            r = est.ps(s, k, smoothing=args.smoothing)
            out["estimates"]["ps"] = r.estimate
            out["diagnostics"]["ps"] = r.diagnostics
            out["block_summary"] = r.summary.to_dict()
        else:
            raise _ConfigError(f"unknown estimator {name!r}")
    _write_or_print(json.dumps(out, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def _cmd_experiment(args):
    doc = _read_json(args.config)
    doc["master_seed"] = int(args.seed)
    try:
        config = exp.config_from_doc(doc)
    except ValueError as exc:
        raise _ConfigError(str(exc)) from None
    report = exp.run(config, threads=args.threads)
    exp.write_report(report, args.out, fmt=args.format)
    return 0


def _cmd_sweep(args):
    doc = _read_json(args.config)
    doc["master_seed"] = int(args.seed)
    try:
        config = exp.config_from_doc(doc)
        values = [float(v) for v in args.values.split(",")]
    except ValueError as exc:
        raise _ConfigError(str(exc)) from None
    if args.axis not in exp._SWEEP_AXES:
        raise _ConfigError(f"unknown axis {args.axis!r}; known: {exp._SWEEP_AXES}")
    report = exp.sweep(config, args.axis, values, threads=args.threads)
    exp.write_report(report, args.out, fmt=args.format)
    return 0


def _cmd_scaling(args):
    try:
        sizes = [int(v) for v in args.sizes.split(",")]
    except ValueError as exc:
        raise _ConfigError(str(exc)) from None
    result = exp.variance_scaling_study(
        p=args.p,
        tree_sizes=sizes,
        n_nodes=args.n_nodes,
        replicates=args.replicates,
        master_seed=int(args.seed),
        mean_degree=args.mean_degree,
    )
    exp.write_report(result.report, args.out, fmt=args.format)
    return 0


def _cmd_diagnose(args):
    g, labels = _open_graph(args.edges, args.labels)
    if labels is None:
        raise _ConfigError("diagnose needs --labels")
    lcc, node_map = largest_connected_component(g)
    labels = labels.restrict(node_map)
    if args.affinity is not None:
        b = np.asarray(_read_json(args.affinity), dtype=np.float64)
    else:
        b = empirical_block_affinity(lcc, labels)
    pop = population_model(b, labels.block_sizes)
    conc = transition_concentration(lcc, labels, b)
    out = {
        "n_nodes": lcc.n_nodes,
        "affinity_source": "file" if args.affinity else "empirical",
        "population": {
            "q": pop.q.tolist(),
            "p_b": pop.p_b.tolist(),
            "pi_b": pop.pi_b.tolist(),
            "mean_block_degree": pop.mean_block_degree.tolist(),
            "alpha": pop.alpha.tolist(),
        },
        "transition_concentration": conc.to_dict(),
    }
    _write_or_print(json.dumps(out, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rdskit",
        description="Referral-chain sampling simulation and estimation on block-structured networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a blockmodel network to edge/label files")
    p.add_argument("--config", required=True, help="JSON network config (k, block_sizes, b_rel, target_mean_degree, theta_mode)")
    p.add_argument("--seed", required=True, type=int, help="master rng seed")
    p.add_argument("--out", required=True, help="output prefix; writes .edges, .labels, .meta.json")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("sample", help="draw one referral sample from a network file")
    p.add_argument("--edges", required=True, help="edge-list file ('i j' or 'i j w' per line)")
    p.add_argument("--labels", help="label file ('i k' per line)")
    p.add_argument("--outcome", help="per-node outcome file ('i y'); default: block-0 indicator")
    p.add_argument("--mode", choices=["without", "with"], default="without")
    p.add_argument("--poisson-mean", type=float, default=2.0, help="coupon count mean")
    p.add_argument("--n", required=True, type=int, help="target sample size")
    p.add_argument("--seed-policy", default="degree_proportional",
                   help="degree_proportional | uniform | stationary | fixed:ID")
    p.add_argument("--max-restarts", type=int, default=100)
    p.add_argument("--tree-arity", type=int, help="with-replacement: complete tree arity")
    p.add_argument("--tree-levels", type=int, help="with-replacement: complete tree levels")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", help="output sample JSON (default stdout)")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("estimate", help="compute estimates from a sample JSON file")
    p.add_argument("--sample", required=True, help="sample JSON from the sample command")
    p.add_argument("--estimators", default="mean,vh,ps", help="comma list: mean,ipw,vh,ps")
    p.add_argument("--mean-degree", type=float, help="true mean degree (needed for ipw)")
    p.add_argument("--k", type=int, help="number of blocks (default: inferred from sample)")
    p.add_argument("--smoothing", type=float, default=est.DEFAULT_SMOOTHING)
    p.add_argument("--out", help="output JSON (default stdout)")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("experiment", help="run a replicated sampling experiment")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("sweep", help="run an experiment over values of one factor")
    p.add_argument("--config", required=True)
    p.add_argument("--axis", required=True,
                   help="bottleneck | alignment | density | network_size | sample_size")
    p.add_argument("--values", required=True, help="comma list of axis values")
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("scaling", help="variance decay vs sample size on complete binary trees")
    p.add_argument("--p", required=True, type=float, help="block flip probability, needs 2*(1-2p)^2 > 1")
    p.add_argument("--sizes", default="63,127,255,511,1023", help="comma list of tree sizes (2^L - 1)")
    p.add_argument("--n-nodes", type=int, default=20000)
    p.add_argument("--mean-degree", type=float, default=100.0)
    p.add_argument("--replicates", type=int, default=2000)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=_cmd_scaling)

    p = sub.add_parser("diagnose", help="population-level block diagnostics for a network")
    p.add_argument("--edges", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--affinity", help="JSON K x K affinity matrix (default: empirical)")
    p.add_argument("--out", help="output JSON (default stdout)")
    p.set_defaults(func=_cmd_diagnose)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _ConfigError as exc:
        sys.stderr.write(f"rdskit: {exc}\n")
        return 2
    except Exception as exc:  # runtime failure: machine-readable record
        record = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
