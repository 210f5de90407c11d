"""Token aggregation: retained tokens absorb their nearest neighbors.

Each retained token is grouped with its knn_k most similar tokens (cosine
similarity of deep-layer attention keys) and replaced by the attention-
weighted sum of the group, so unretained content is folded in rather than
dropped.
"""

from dataclasses import dataclass

import numpy as np

from .core import as_matrix, check_attention_vector, normalize_rows, similarity_matrix
from .errors import EmptyRetentionError, NeighborCountExceedsTokensError


@dataclass(frozen=True)
class AggregationConfig:
    """knn_k counts neighbors, not counting the retained token itself.

    include_self=True adds the retained token to its own group; excluding it
    (the literal neighbor-only reading) replaces a retained token purely by
    its neighbors, which discards exactly the content selection tried to
    keep, so inclusion is the default. normalize_weights rescales the group's
    attention weights to sum to one, keeping outputs on the input scale.
    """

    knn_k: int = 3
    include_self: bool = True
    normalize_weights: bool = True

    def __post_init__(self):
        if self.knn_k < 0:
            raise ValueError(f"knn_k must be >= 0, got {self.knn_k}")


def aggregate(tokens, keys_deep, attn_deep, retained, cfg=AggregationConfig()):
    """Weighted-sum merge of each retained token's neighbor group.

    Returns a |retained| x D matrix, rows ordered by ascending retained index.
    Neighbors are drawn from all N tokens; groups may overlap. Ties in
    similarity break toward the lowest index.
    """
    y = as_matrix(tokens)
    weights_full = check_attention_vector(attn_deep, "attn_deep")
    n = y.shape[0]
    retained = np.sort(np.asarray(retained, dtype=np.intp))
    if retained.size == 0:
        raise EmptyRetentionError("retained index set is empty")
    if retained.size and (retained[0] < 0 or retained[-1] >= n):
        raise IndexError(f"retained indices out of range [0, {n})")
    if cfg.knn_k > n - 1:
        raise NeighborCountExceedsTokensError(
            f"knn_k={cfg.knn_k} but only {n - 1} candidate neighbors exist"
        )

    sim = similarity_matrix(normalize_rows(keys_deep))
    out = np.empty((retained.size, y.shape[1]), dtype=np.float64)
    for row, l in enumerate(retained):
        if cfg.knn_k > 0:
            sims = sim[l].copy()
            sims[l] = -np.inf  # neighbors are other tokens
            order = np.argsort(-sims, kind="stable")
            group = order[: cfg.knn_k]
        else:
            group = np.empty(0, dtype=np.intp)
        if cfg.include_self:
            group = np.concatenate([[l], group])
        if group.size == 0:
            raise ValueError("empty aggregation group: knn_k=0 with include_self=False")
        w = weights_full[group]
        if cfg.normalize_weights:
            total = w.sum()
            w = w / total if total > 0 else np.full(group.size, 1.0 / group.size)
        out[row] = w @ y[group]
    return out
