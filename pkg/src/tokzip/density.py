"""Information-density calculation from patch-patch key similarity.

A token counts as redundant when strictly more than ``limit_k`` other tokens
have cosine similarity strictly above ``alpha`` with it. The density of a
sub-image is the fraction of non-redundant tokens and later doubles as its
local-branch sampling ratio.
"""

from dataclasses import dataclass

import numpy as np

from .core import normalize_rows, similarity_matrix


@dataclass(frozen=True)
class DensityConfig:
    """Similarity threshold and peer-count limit for redundancy detection.

    count_self toggles whether a token's own (always 1.0) self-similarity is
    counted among its similar peers. The shipped default excludes it: a token
    being similar to itself says nothing about repetitiveness. Setting it to
    True reproduces the literal j=1..N inner-loop count.
    """

    alpha: float = 0.7
    limit_k: int = 50
    count_self: bool = False

    def __post_init__(self):
        if not -1.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (-1, 1), got {self.alpha}")
        if self.limit_k < 0:
            raise ValueError(f"limit_k must be >= 0, got {self.limit_k}")


@dataclass(frozen=True)
class DensityReport:
    n_redundant: int
    redundancy: float
    density: float
    redundant_mask: np.ndarray  # bool, length N

    def __post_init__(self):
        assert self.n_redundant == int(np.sum(self.redundant_mask))
        assert 0.0 <= self.redundancy <= 1.0
        assert 0.0 <= self.density <= 1.0


def compute_density(keys, cfg=DensityConfig()):
    """Count similar peers per token and report redundancy r and density d = 1 - r.

    Comparisons are strict ("> alpha", "> limit_k") exactly as stated.
    """
    kn = normalize_rows(keys)
    n = kn.shape[0]
    sim = similarity_matrix(kn)
    similar = sim > cfg.alpha
    if not cfg.count_self:
        np.fill_diagonal(similar, False)
    peer_counts = similar.sum(axis=1)
    redundant = peer_counts > cfg.limit_k
    n_red = int(redundant.sum())
    r = n_red / n
    return DensityReport(
        n_redundant=n_red,
        redundancy=r,
        density=1.0 - r,
        redundant_mask=redundant,
    )
