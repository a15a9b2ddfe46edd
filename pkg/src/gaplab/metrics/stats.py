"""Mann-Whitney U and Cohen's d.

The U statistic counts pairs where x exceeds y (ties count half). For
pooled sizes up to 20 the two-sided p-value is exact, computed by full
enumeration of the permutation distribution (ties included); larger
samples use the tie-corrected normal approximation with continuity
correction.
"""

import itertools
import math

import numpy as np

EXACT_LIMIT = 20


class UndefinedEffectError(ValueError):
    pass


def _u_statistic(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    greater = (x[:, None] > y[None, :]).sum()
    ties = (x[:, None] == y[None, :]).sum()
    return float(greater) + 0.5 * float(ties)


def mann_whitney_u(x, y):
    """Returns (U, two-sided p). U is the statistic for the first sample."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n1, n2 = len(x), len(y)
    if n1 < 1 or n2 < 1:
        raise ValueError("both samples must be non-empty")
    u = _u_statistic(x, y)

    if n1 + n2 <= EXACT_LIMIT:
        pooled = np.concatenate([x, y])
        idx = range(n1 + n2)
        count_le = 0
        count_ge = 0
        total = 0
        for combo in itertools.combinations(idx, n1):
            mask = np.zeros(n1 + n2, dtype=bool)
            mask[list(combo)] = True
            u_perm = _u_statistic(pooled[mask], pooled[~mask])
            count_le += u_perm <= u + 1e-12
            count_ge += u_perm >= u - 1e-12
            total += 1
        p = 2.0 * min(count_le / total, count_ge / total)
        return u, min(p, 1.0)

    n = n1 + n2
    mu = n1 * n2 / 2.0
    pooled = np.concatenate([x, y])
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float(((tie_counts**3 - tie_counts)).sum()) / (n * (n - 1))
    sigma2 = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if sigma2 <= 0:
        return u, 1.0
    z = (u - mu)
    z = (abs(z) - 0.5) / math.sqrt(sigma2)  # continuity correction toward the mean
    z = max(z, 0.0)
    p = 2.0 * (1.0 - 0.5 * (1.0 + math.erf(z / math.sqrt(2.0))))
    return u, min(p, 1.0)


def cohens_d(x, y):
    """(mean_x - mean_y) / pooled standard deviation."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) < 2 or len(y) < 2:
        raise ValueError("cohens_d needs at least two samples per side")
    n1, n2 = len(x), len(y)
    s1 = x.var(ddof=1)
    s2 = y.var(ddof=1)
    pooled = ((n1 - 1) * s1 + (n2 - 1) * s2) / (n1 + n2 - 2)
    if pooled == 0.0:
        if x.mean() == y.mean():
            return 0.0
        raise UndefinedEffectError("zero pooled variance with unequal means")
    return float((x.mean() - y.mean()) / math.sqrt(pooled))
