"""Dual-branch token selection.

Global branch: keep upper IQR outliers of the deep-layer CLS attention.
Local branch: sample without replacement from the low-layer CLS attention,
with the sample count set by the sub-image's information density.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import check_attention_vector, quantile
from .errors import InsufficientSupportError


@dataclass(frozen=True)
class SelectionConfig:
    iqr_factor: float = 1.5
    min_retained: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.iqr_factor <= 0:
            raise ValueError(f"iqr_factor must be > 0, got {self.iqr_factor}")
        if self.min_retained < 1:
            raise ValueError(f"min_retained must be >= 1, got {self.min_retained}")


@dataclass(frozen=True)
class SelectionResult:
    """Index sets from both branches plus their sorted, deduplicated union."""

    global_indices: np.ndarray
    local_indices: np.ndarray
    merged_indices: np.ndarray


def global_select(attn_deep, cfg=SelectionConfig()):
    """Indices whose deep-layer attention exceeds the IQR upper fence.

    Fence = Q3 + iqr_factor * (Q3 - Q1). Only upper outliers are kept; tokens
    below the lower fence carry no global information worth preserving.
    """
    scores = check_attention_vector(attn_deep, "attn_deep")
    q1 = quantile(scores, 0.25)
    q3 = quantile(scores, 0.75)
    fence = q3 + cfg.iqr_factor * (q3 - q1)
    return np.flatnonzero(scores > fence)


def local_sample_count(density, n_tokens):
    """Discretize the sampling ratio: m = round(density * N), half away from zero."""
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    if n_tokens < 1:
        raise ValueError(f"n_tokens must be >= 1, got {n_tokens}")
    m = math.floor(density * n_tokens + 0.5)
    return min(max(m, 0), n_tokens)


def local_select(attn_low, m, cfg=SelectionConfig(), rng=None):
    """Sample m distinct indices without replacement, weighted by attention.

    Sequential renormalized draws: at every step the remaining scores are
    renormalized and one index is drawn, so each draw uses the attention
    score as its selection probability verbatim. Zero-score tokens are never
    drawn; if fewer than m scores are positive the call fails rather than
    padding silently.

    Deterministic for a fixed cfg.seed (when rng is not supplied). Returns a
    sorted index array.
    """
    scores = check_attention_vector(attn_low, "attn_low")
    n = scores.size
    if not 0 <= m <= n:
        raise ValueError(f"m must be in [0, {n}], got {m}")
    if m == 0:
        return np.empty(0, dtype=np.intp)
    support = int(np.count_nonzero(scores > 0))
    if support < m:
        raise InsufficientSupportError(m, support)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    weights = scores.copy()
    chosen = np.empty(m, dtype=np.intp)
    for t in range(m):
        cum = np.cumsum(weights)
        u = rng.random() * cum[-1]
        idx = int(np.searchsorted(cum, u, side="right"))
        idx = min(idx, n - 1)  # guard against u landing exactly on cum[-1]
        chosen[t] = idx
        weights[idx] = 0.0
    chosen.sort()
    return chosen


def merge_indices(global_indices, local_indices, attn_low, cfg=SelectionConfig()):
    """Union both branches, deduplicate and sort.

    If the union is smaller than cfg.min_retained, the highest-attention
    tokens (ties broken by lowest index) are added so downstream consumers
    never see an empty token sequence.
    """
    merged = np.union1d(
        np.asarray(global_indices, dtype=np.intp),
        np.asarray(local_indices, dtype=np.intp),
    )
    scores = check_attention_vector(attn_low, "attn_low")
    want = min(cfg.min_retained, scores.size)
    if merged.size < want:
        # Stable argsort on negated scores ranks by score desc, then index asc.
        by_score = np.argsort(-scores, kind="stable")
        have = set(merged.tolist())
        extra = [i for i in by_score[:want] if i not in have]
        merged = np.sort(np.concatenate([merged, np.asarray(extra[: want - merged.size], dtype=np.intp)]))
    return merged


def select_tokens(attn_deep, attn_low, density, cfg=SelectionConfig(), rng=None):
    """Run both branches and merge; convenience wrapper used by the pipeline."""
    scores = check_attention_vector(attn_low, "attn_low")
    gi = global_select(attn_deep, cfg)
    m = local_sample_count(density, scores.size)
    li = local_select(attn_low, m, cfg, rng=rng)
    merged = merge_indices(gi, li, attn_low, cfg)
    return SelectionResult(global_indices=gi, local_indices=li, merged_indices=merged)
