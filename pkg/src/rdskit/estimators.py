"""Point estimators for referral samples.

All estimators are pure functions of a realized :class:`RdsSample`.

* sample mean: plain average of the outcomes (biased toward high-degree
  nodes under a degree-weighted walk);
* inverse-probability weighting: degree-weighted average that needs the
  true mean degree, unbiased under a stationary walk;
* VH: the classic 1/degree-weighted average with harmonic-mean-degree
  normalization, no population knowledge needed;
* PS: post-stratified combination of block-wise VH estimates, with block
  weights built from the estimated block-to-block referral transition
  matrix's approximate equilibrium and block harmonic mean degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sampling import RdsSample

DEFAULT_SMOOTHING = 0.5


class UndefinedTransitionError(ValueError):
    """A needed referral-transition row has no observations and smoothing is off."""


class UndefinedPiError(ValueError):
    """The equilibrium closed form divides by a zero transition entry."""


class EmptyBlockError(ValueError):
    """Requested block-wise quantity for a block with no samples."""


def sample_mean(s: RdsSample) -> float:
    return float(np.mean(s.y))


def harmonic_mean_degree(s: RdsSample) -> float:
    """Harmonic mean of the observed degrees: n / sum(1/d)."""
    if np.any(s.deg <= 0):
        raise ValueError("degrees must be positive")
    return float(s.n / np.sum(1.0 / s.deg))


def ipw(s: RdsSample, mean_degree) -> float:
    """Degree-weighted average scaled by the true mean degree.

    ``mean_degree`` is a population quantity; when it is exact this is
    unbiased under a stationary walk.
    """
    if np.any(s.deg <= 0):
        raise ValueError("degrees must be positive")
    return float(mean_degree / s.n * np.sum(s.y / s.deg))


def _weighted_by_inverse_degree(y, deg):
    inv = 1.0 / deg
    return float(np.sum(y * inv) / np.sum(inv))


def vh(s: RdsSample) -> float:
    """1/degree-weighted outcome average (harmonic-normalized)."""
    if np.any(s.deg <= 0):
        raise ValueError("degrees must be positive")
    return _weighted_by_inverse_degree(s.y, s.deg)


@dataclass
class BlockSummary:
    """Block-level view of a sample, filled in stages.

    ``referrals[u, v]`` counts parent-in-u, child-in-v referral edges;
    the root contributes to ``n_k`` but to no referral.  ``q_hat`` is
    referrals/n (sums to (n-1)/n).  ``p_hat`` is the row-normalized
    transition matrix over the pi index set (NaN elsewhere), ``pi_hat``
    the raw closed-form equilibrium (not renormalized), and ``alpha_hat``
    the block-proportion weights used by the PS estimator.
    """

    k: int
    n: int
    n_k: np.ndarray
    n_from: np.ndarray
    referrals: np.ndarray
    q_hat: np.ndarray
    observed: np.ndarray  # blocks with at least one sample
    pi_index: np.ndarray | None = None  # observed blocks with referral contact
    seed_only: np.ndarray | None = None  # observed but no referral contact (dropped)
    p_hat: np.ndarray | None = None
    pi_hat: np.ndarray | None = None
    h_block: np.ndarray | None = None
    mu_block: np.ndarray | None = None
    alpha_hat: np.ndarray | None = None
    smoothing_applied: bool = False

    def to_dict(self):
        def arr(a):
            return None if a is None else np.asarray(a).tolist()

        return {
            "k": self.k,
            "n": self.n,
            "n_k": arr(self.n_k),
            "n_from": arr(self.n_from),
            "referrals": arr(self.referrals),
            "q_hat": arr(self.q_hat),
            "observed": arr(self.observed.astype(int)),
            "pi_index": arr(self.pi_index),
            "seed_only": arr(self.seed_only),
            "p_hat": arr(self.p_hat),
            "pi_hat": arr(self.pi_hat),
            "h_block": arr(self.h_block),
            "mu_block": arr(self.mu_block),
            "alpha_hat": arr(self.alpha_hat),
            "smoothing_applied": self.smoothing_applied,
        }


@dataclass(frozen=True)
class EstimateResult:
    """A named point estimate plus diagnostics."""

    name: str
    estimate: float
    diagnostics: dict = field(default_factory=dict)
    summary: BlockSummary | None = None


def block_counts(s: RdsSample, k) -> BlockSummary:
    """Per-block sample and referral counts (the raw material for PS)."""
    if s.block is None:
        raise ValueError("sample has no block labels")
    k = int(k)
    z = s.block
    if z.min() < 0 or z.max() >= k:
        raise ValueError(f"sample blocks must lie in [0, {k})")
    n = s.n
    n_k = np.bincount(z, minlength=k)
    referrals = np.zeros((k, k), dtype=np.int64)
    if n > 1:
        zu = z[s.tree.parent[1:]]
        zv = z[1:]
        referrals = np.bincount(zu * k + zv, minlength=k * k).reshape(k, k)
    return BlockSummary(
        k=k,
        n=n,
        n_k=n_k,
        n_from=referrals.sum(axis=1),
        referrals=referrals,
        q_hat=referrals / n,
        observed=n_k > 0,
    )


def block_transition(bs: BlockSummary, smoothing=0.0):
    """Row-normalized referral transitions over the pi index set.

    The index set is the observed blocks that touch at least one referral
    (a block seen only as an isolated seed carries no transition
    information and is dropped with a flag).  If any restricted count is
    zero, ``smoothing`` > 0 is added to every restricted cell before
    normalizing -- every entry appears as a denominator in the
    equilibrium closed form, so a single zero makes it undefined.  With
    smoothing off, an all-zero row raises :class:`UndefinedTransitionError`.

    Returns the restricted matrix and stores it (NaN-padded to k x k) on
    the summary.
    """
    touched = (bs.n_from > 0) | (bs.referrals.sum(axis=0) > 0)
    index = np.flatnonzero(bs.observed & touched)
    bs.pi_index = index
    bs.seed_only = np.flatnonzero(bs.observed & ~touched)
    if index.size == 0:
        raise UndefinedTransitionError("no referrals observed; cannot estimate transitions")
    sub = bs.referrals[np.ix_(index, index)].astype(np.float64)
    if np.any(sub == 0):
        if smoothing > 0:
            sub = sub + float(smoothing)
            bs.smoothing_applied = True
        elif np.any(sub.sum(axis=1) == 0):
            bad = index[int(np.argmin(sub.sum(axis=1)))]
            raise UndefinedTransitionError(
                f"block {bad} has samples but no outgoing referrals; "
                "enable smoothing to define its transition row"
            )
    rows = sub.sum(axis=1)
    p_sub = sub / rows[:, None]
    bs.p_hat = np.full((bs.k, bs.k), np.nan)
    bs.p_hat[np.ix_(index, index)] = p_sub
    return p_sub


def pi_hat(p) -> np.ndarray:
    """Closed-form approximate equilibrium of a transition matrix.

    ``pi_k = 1 / sum_v p[k, v] / p[v, k]``.  This reproduces the exact
    stationary law when ``p`` is the row normalization of a symmetric
    matrix; it is reported raw (entries need not sum to 1 in general).
    """
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError("transition matrix must be square")
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise UndefinedPiError(
            "equilibrium closed form needs strictly positive transition entries; "
            "apply smoothing to the referral counts"
        )
    return 1.0 / (p / p.T).sum(axis=1)


def equilibrium_eigen(p) -> np.ndarray:
    """Stationary law via the left unit eigenvector; diagnostic companion to pi_hat."""
    p = np.asarray(p, dtype=np.float64)
    vals, vecs = np.linalg.eig(p.T)
    lead = np.argmin(np.abs(vals - 1.0))
    v = np.real(vecs[:, lead])
    v = np.abs(v)
    return v / v.sum()


def blockwise_vh(s: RdsSample, block) -> tuple[float, float]:
    """(harmonic mean degree, VH average) within one block."""
    if s.block is None:
        raise ValueError("sample has no block labels")
    mask = s.block == block
    if not np.any(mask):
        raise EmptyBlockError(f"block {block} has no samples")
    deg = s.deg[mask]
    inv = 1.0 / deg
    h = float(mask.sum() / inv.sum())
    mu = float(np.sum(s.y[mask] * inv) / inv.sum())
    return h, mu


def ps(s: RdsSample, k, smoothing=DEFAULT_SMOOTHING) -> EstimateResult:
    """Post-stratified estimator: sum_k alpha_k * mu_k over observed blocks.

    ``alpha_k`` is proportional to ``pi_k / H_k`` (estimated equilibrium
    over block harmonic mean degree), normalized over the blocks in the
    pi index set.  Unobserved population blocks contribute nothing and
    are flagged.  With one block this collapses exactly to VH.
    """
    if s.n < 2:
        raise ValueError("PS needs at least 2 samples (one referral)")
    bs = block_counts(s, k)
    p_sub = block_transition(bs, smoothing=smoothing)
    index = bs.pi_index
    pv = pi_hat(p_sub)
    bs.pi_hat = np.full(bs.k, np.nan)
    bs.pi_hat[index] = pv

    bs.h_block = np.full(bs.k, np.nan)
    bs.mu_block = np.full(bs.k, np.nan)
    for b in np.flatnonzero(bs.observed):
        bs.h_block[b], bs.mu_block[b] = blockwise_vh(s, b)

    weights = pv / bs.h_block[index]
    alpha = weights / weights.sum()
    bs.alpha_hat = np.full(bs.k, np.nan)
    bs.alpha_hat[index] = alpha

    estimate = float(np.sum(alpha * bs.mu_block[index]))
    diagnostics = {
        "dropped_blocks": np.flatnonzero(~bs.observed).tolist(),
        "seed_only_blocks": bs.seed_only.tolist(),
        "smoothing_applied": bs.smoothing_applied,
        "smoothing": float(smoothing),
    }
    return EstimateResult(name="ps", estimate=estimate, diagnostics=diagnostics, summary=bs)
