"""Two-sided Wilcoxon rank-sum test (normal approximation with tie correction)."""
from __future__ import annotations

import numpy as np
from scipy.stats import norm, rankdata

BETTER, WORSE, SAME = "+", "-", "≈"


def rank_sum_z(a, b) -> float:
    """Standardised rank sum of ``a``; 0 when every value is tied."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = a.shape[0], b.shape[0]
    n = n1 + n2
    ranks = rankdata(np.concatenate([a, b]))
    r1 = ranks[:n1].sum()
    mu = n1 * (n + 1) / 2.0
    _, counts = np.unique(np.concatenate([a, b]), return_counts=True)
    tie = np.sum(counts**3 - counts) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie)
    if var <= 0:
        return 0.0
    return float((r1 - mu) / np.sqrt(var))


def wilcoxon_rank_sum(sample_a, sample_b, alpha: float = 0.05, lower_is_better: bool = True):
    """Compare competitor ``sample_a`` against reference ``sample_b``.

    Returns (verdict, p): '+' when ``a`` is significantly better, '-' when
    significantly worse, '≈' otherwise.
    """
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.shape[0] < 5 or b.shape[0] < 5:
        raise ValueError("each sample needs at least 5 values")
    z = rank_sum_z(a, b)
    p = float(min(1.0, 2.0 * norm.sf(abs(z))))
    if p >= alpha or z == 0.0:
        return SAME, p
    a_lower = z < 0
    return (BETTER if a_lower == lower_is_better else WORSE), p
