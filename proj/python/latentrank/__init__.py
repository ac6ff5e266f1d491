"""Bayesian rank-based hypothesis tests with latent normal data augmentation."""

from ._core import (
    LatentRankError,
    __version__,
    cli,
    kruskal_rho_to_rhos,
    kruskal_rhos_to_rho,
    matched_rank_biserial,
    midranks,
    rank_biserial,
    ranksum,
    signedrank,
    spearman,
    spearman_rho,
    ttest_log_bf10,
)

__all__ = [
    "LatentRankError",
    "__version__",
    "cli",
    "kruskal_rho_to_rhos",
    "kruskal_rhos_to_rho",
    "matched_rank_biserial",
    "midranks",
    "rank_biserial",
    "ranksum",
    "signedrank",
    "spearman",
    "spearman_rho",
    "ttest_log_bf10",
]
