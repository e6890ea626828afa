"""Acceptance suite: one test per criterion, printing a pass/fail line each.

Run with ``pytest -s tests/test_acceptance.py`` to see all lines; any
failed criterion also fails its test.  All randomized criteria use master
seed 0.
"""

import time

import numpy as np
import pytest

import rdskit as rk
from rdskit import experiments as exp

SEED = 0


def report(num, desc, ok, extra=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:02d} [{status}] {desc}{extra}")
    assert ok, f"criterion {num} failed: {desc}{extra}"


def test_01_population_identity():
    t0 = time.time()
    rng = np.random.default_rng(SEED)
    worst_alpha = worst_stat = 0.0
    for _ in range(100):
        k = int(rng.integers(1, 6))
        base = rng.uniform(0.1, 3.0, (k, k))
        b = base + base.T
        sizes = rng.integers(1, 1000, k)
        pop = rk.population_model(b, sizes)
        worst_alpha = max(worst_alpha, float(np.max(np.abs(pop.alpha - sizes / sizes.sum()))))
        worst_stat = max(worst_stat, float(np.max(np.abs(pop.pi_b @ pop.p_b - pop.pi_b))))
    elapsed = time.time() - t0
    report(
        1,
        "population identity: alpha_k = N_k/N and pi_B P_B = pi_B within 1e-12",
        worst_alpha < 1e-12 and worst_stat < 1e-12 and elapsed < 1.0,
        f" (max dev {max(worst_alpha, worst_stat):.2e}, {elapsed:.2f}s)",
    )


def _random_fuzz_sample(rng, k):
    n = int(rng.integers(2, 25))
    draws = np.array([rng.integers(0, t) for t in range(1, n)], dtype=np.int64)
    tree = rk.SamplingTree(np.concatenate([[-1], np.sort(draws)]))
    return rk.RdsSample(
        tree=tree,
        node=rng.integers(0, 10_000, n),
        y=rng.normal(size=n),
        deg=rng.integers(1, 12, n).astype(float),
        block=rng.integers(0, k, n),
    )


def test_02_single_block_collapse():
    t0 = time.time()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(1000):
        s = _random_fuzz_sample(rng, k=1)
        worst = max(worst, abs(rk.ps(s, 1).estimate - rk.vh(s)))
    elapsed = time.time() - t0
    report(
        2,
        "K=1 collapse: |PS - VH| < 1e-12 on 1000 fuzzed samples",
        worst < 1e-12 and elapsed < 5.0,
        f" (max dev {worst:.2e}, {elapsed:.2f}s)",
    )


def test_03_ipw_unbiasedness():
    t0 = time.time()
    graphs = [
        rk.load_edge_list(["0 1", "1 2", "0 2"]),  # triangle
        rk.load_edge_list(["0 1", "1 2"]),  # path
        rk.load_edge_list(["0 1", "1 2", "2 3", "0 3", "0 2"]),  # 4-cycle + chord
        rk.load_edge_list(["0 1", "0 2", "0 3", "0 4", "1 2", "3 4"]),  # two fans
        rk.load_edge_list(["0 1 2.0", "1 2 0.5", "0 2 1.0", "2 3 1.5"]),  # weighted
        rk.load_edge_list(["0 0", "0 1", "1 2", "2 3", "3 4", "4 5", "0 5"]),  # self-loop ring
    ]
    tree = rk.complete_ary_tree(1, 3)
    m = 100_000
    exact_ok = mc_ok = True
    worst_exact = 0.0
    rng = np.random.default_rng(SEED)
    for g in graphs:
        y = rng.random(g.n_nodes)
        mu_true = float(y.mean())
        dbar = float(g.degrees.mean())
        pi = rk.stationary_distribution(g)
        e, v = rk.exact_moments(g, tree, y, pi, lambda s: rk.ipw(s, dbar))
        worst_exact = max(worst_exact, abs(e - mu_true))
        exact_ok &= abs(e - mu_true) < 1e-12
        batch = rk.sample_with_replacement_batch(
            g, tree, rk.SeedPolicy("stationary"), y, rng=rng, n_samples=m
        )
        values = np.array([rk.ipw(batch.sample(r), dbar) for r in range(m)])
        mc_ok &= abs(values.mean() - e) <= 4 * np.sqrt(v / m)
    elapsed = time.time() - t0
    report(
        3,
        "IPW unbiasedness: exact expectation = mu_true (1e-12), Monte Carlo within 4 sigma",
        exact_ok and mc_ok and elapsed < 30.0,
        f" (max exact dev {worst_exact:.2e}, {elapsed:.1f}s)",
    )


def test_04_pi_hat_closed_form():
    t0 = time.time()
    exact_ok = True
    for p in (0.05, 0.1, 0.3):
        out = rk.pi_hat([[1 - p, p], [p, 1 - p]])
        exact_ok &= out[0] == 0.5 and out[1] == 0.5
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(200):
        k = int(rng.integers(1, 6))
        base = rng.uniform(0.05, 2.0, (k, k))
        q = base + base.T
        got = rk.pi_hat(q / q.sum(axis=1, keepdims=True))
        worst = max(worst, float(np.max(np.abs(got - q.sum(axis=1) / q.sum()))))
    elapsed = time.time() - t0
    report(
        4,
        "pi_hat closed form: symmetric two-block gives exactly (1/2, 1/2); "
        "row-normalized symmetric Q recovers row sums within 1e-10",
        exact_ok and worst < 1e-10 and elapsed < 1.0,
        f" (max dev {worst:.2e}, {elapsed:.2f}s)",
    )


def _bottleneck_config(means=None):
    outcome = (
        exp.OutcomeConfig(kind="block_indicator")
        if means is None
        else exp.OutcomeConfig(kind="bernoulli", means=means)
    )
    return exp.ExperimentConfig(
        master_seed=SEED,
        network=exp.DcsbmNetwork(
            n_nodes=2000, b_rel=exp.bottleneck_b_rel(0.9), target_mean_degree=50.0
        ),
        outcome=outcome,
        sampling=exp.SamplingConfig(
            mode="without", lam=2.0, n_target=300, seed_policy="degree_proportional"
        ),
        n_networks=20,
        n_samples=100,
        estimators=("vh", "ps"),
    )


def _rmse_by_network(report_rows, name):
    return np.array(
        [r.rmse for r in sorted(report_rows, key=lambda r: r.network_id) if r.estimator == name]
    )


def test_05_bottleneck_benefit():
    t0 = time.time()
    rep = exp.run(_bottleneck_config(), threads=4)
    vh_rmse = _rmse_by_network(rep.rows, "vh")
    ps_rmse = _rmse_by_network(rep.rows, "ps")
    frac_better = float(np.mean(ps_rmse < vh_rmse))
    median_ok = float(np.median(ps_rmse)) < float(np.median(vh_rmse))
    elapsed = time.time() - t0
    report(
        5,
        "bottleneck benefit: median RMSE(PS) < median RMSE(VH), PS better on >= 80% of networks",
        median_ok and frac_better >= 0.8 and elapsed < 300.0,
        f" (medians PS {np.median(ps_rmse):.3f} vs VH {np.median(vh_rmse):.3f}, "
        f"PS better on {100 * frac_better:.0f}%, {elapsed:.0f}s)",
    )


def test_06_alignment_zero_equivalence():
    # Known calibration defect at this desk scale: the bottleneck leaves the
    # minority block ~80 of 300 samples, so PS structurally carries 40-50%
    # more pooled RMSE than VH when the outcome has no block signal (see
    # decisions ledger). Asserted as stated rather than loosened.
    t0 = time.time()
    rep = exp.run(_bottleneck_config(means=(0.5, 0.5)), threads=4)
    vh_rmse = _rmse_by_network(rep.rows, "vh")
    ps_rmse = _rmse_by_network(rep.rows, "ps")
    pooled_vh = float(np.sqrt(np.mean(vh_rmse**2)))
    pooled_ps = float(np.sqrt(np.mean(ps_rmse**2)))
    rel = abs(pooled_ps - pooled_vh) / pooled_vh
    elapsed = time.time() - t0
    report(
        6,
        "alignment zero: pooled RMSE of PS within 20% of VH",
        rel < 0.2 and elapsed < 300.0,
        f" (pooled PS {pooled_ps:.4f}, VH {pooled_vh:.4f}, rel diff {100 * rel:.1f}%, {elapsed:.0f}s)",
    )


def test_07_variance_scaling():
    t0 = time.time()
    with pytest.raises(ValueError, match=r"2\*\(1-2p\)\^2 > 1"):
        exp.variance_scaling_study(
            p=0.25, tree_sizes=[63, 127], n_nodes=2000, replicates=10, master_seed=SEED
        )
    result = exp.variance_scaling_study(
        p=0.05,
        tree_sizes=[63, 127, 255, 511, 1023],
        n_nodes=20000,
        replicates=2000,
        master_seed=SEED,
        mean_degree=100.0,
    )
    vh_slope = result.slopes["vh"][0]
    ps_slope = result.slopes["ps"][0]
    zeta_ok = abs(result.zeta - 0.696) < 5e-4
    elapsed = time.time() - t0
    # Known calibration defect: a faithful run of this pinned protocol
    # centers the PS fit at -0.84 (see decisions ledger); asserted as
    # stated anyway rather than loosened.
    report(
        7,
        "variance scaling: zeta ~ 0.696, VH slope > -0.7, PS slope <= -0.85, "
        "p = 0.25 rejected",
        zeta_ok and vh_slope > -0.7 and ps_slope <= -0.85 and elapsed < 600.0,
        f" (VH {vh_slope:.3f}, predicted {result.predicted_vh_slope:.3f}; "
        f"PS {ps_slope:.3f}; {elapsed:.0f}s)",
    )


def _chain_enumeration(p, tree):
    n = tree.n
    signs = 1 - 2 * ((np.arange(2**n)[:, None] >> np.arange(n)) & 1)
    flips = signs[:, 1:] != signs[:, tree.parent[1:]]
    probs = 0.5 * np.prod(np.where(flips, p, 1 - p), axis=1)
    return (signs * probs[:, None]).T @ signs


def test_08_tree_chain_covariance():
    t0 = time.time()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    exact_ok = True
    for p in (0.05, 0.1, 0.2):
        for n in (3, 8, 13, 16):
            draws = np.array([rng.integers(0, t) for t in range(1, n)], dtype=np.int64)
            tree = rk.SamplingTree(np.concatenate([[-1], np.sort(draws)]))
            m = rk.tree_chain_moments(p, tree)
            worst = max(worst, float(np.max(np.abs(m.pairwise_cov - _chain_enumeration(p, tree)))))
        # complete binary tree: root-to-leaf covariance is exactly theta^depth
        tree = rk.complete_ary_tree(2, 5)
        m = rk.tree_chain_moments(p, tree)
        leaf = tree.leaves()[-1]
        exact_ok &= m.pairwise_cov[0, leaf] == (1 - 2 * p) ** 4
    elapsed = time.time() - t0
    report(
        8,
        "tree-chain covariance: matches exhaustive enumeration within 1e-10; "
        "Cov(root, leaf) = (1-2p)^depth exactly",
        worst < 1e-10 and exact_ok and elapsed < 10.0,
        f" (max dev {worst:.2e}, {elapsed:.1f}s)",
    )


def test_09_range_affine_fuzz():
    t0 = time.time()
    rng = np.random.default_rng(SEED)
    range_ok = affine_ok = alpha_ok = rows_ok = True
    for _ in range(10_000):
        k = int(rng.integers(1, 4))
        s = _random_fuzz_sample(rng, k)
        a, b = float(rng.uniform(-3, 3)), float(rng.normal())
        shifted = rk.RdsSample(
            tree=s.tree, node=s.node, y=a * s.y + b, deg=s.deg, block=s.block
        )
        lo, hi = s.y.min(), s.y.max()
        ps_res = rk.ps(s, k, smoothing=0.5)
        summary = ps_res.summary
        idx = summary.pi_index
        alpha_ok &= abs(summary.alpha_hat[idx].sum() - 1.0) < 1e-12
        rows_ok &= bool(
            np.all(np.abs(summary.p_hat[np.ix_(idx, idx)].sum(axis=1) - 1.0) < 1e-12)
        )
        for f in (rk.sample_mean, rk.vh, lambda t: rk.ps(t, k, smoothing=0.5).estimate):
            v = f(s)
            range_ok &= lo - 1e-12 <= v <= hi + 1e-12
            affine_ok &= abs(f(shifted) - (a * v + b)) < 1e-10
    elapsed = time.time() - t0
    report(
        9,
        "range/affine fuzz on 1e4 samples: estimates inside [min Y, max Y], affine "
        "equivariance 1e-10, sum(alpha)=1, transition rows sum to 1",
        range_ok and affine_ok and alpha_ok and rows_ok and elapsed < 10.0,
        f" ({elapsed:.1f}s)",
    )


def test_10_determinism_across_threads(tmp_path):
    config = exp.ExperimentConfig(
        master_seed=SEED,
        network=exp.DcsbmNetwork(
            n_nodes=400, b_rel=exp.bottleneck_b_rel(0.8), target_mean_degree=12.0
        ),
        outcome=exp.OutcomeConfig(kind="block_indicator"),
        sampling=exp.SamplingConfig(mode="without", lam=2.0, n_target=80),
        n_networks=6,
        n_samples=10,
    )
    paths = {}
    for threads in (1, 8):
        path = tmp_path / f"t{threads}.csv"
        exp.write_report(exp.run(config, threads=threads), path)
        paths[threads] = path.read_bytes()
    report(
        10,
        "determinism: fixed seed gives byte-identical CSV at --threads 1 and 8",
        paths[1] == paths[8],
    )


def test_11_transition_concentration():
    t0 = time.time()
    n = 1000
    sizes = [n // 2, n // 2]
    # per-pair probabilities 0.25 within / 0.35 across blocks
    b = np.array([[0.25, 0.35], [0.35, 0.25]]) * (n / 2) ** 2
    params = rk.DcsbmParams(block_sizes=sizes, affinity=b, theta=rk.homogeneous_theta(sizes))
    labels = rk.contiguous_labels(sizes)
    worst = 0.0
    for seed in range(5):
        rng = np.random.default_rng(np.random.SeedSequence(SEED, spawn_key=(seed,)))
        res = rk.generate(params, labels, rng)
        conc = rk.transition_concentration(res.graph, labels, b)
        worst = max(worst, conc.ratio)
    elapsed = time.time() - t0
    report(
        11,
        "transition concentration: max |p_uv(i)/p_uv - 1| / sqrt(log n / n) < 10 on 5 seeds",
        worst < 10.0 and elapsed < 60.0,
        f" (worst ratio {worst:.2f}, {elapsed:.1f}s)",
    )
