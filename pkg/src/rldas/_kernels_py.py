"""Numpy fallback for the compiled kernels in ``_kernels.pyx``."""
import numpy as np


def pairwise_stats(X):
    """Return (mean, max) Euclidean distance over all unordered pairs."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 2:
        return 0.0, 0.0
    iu, ju = np.triu_indices(n, k=1)
    diff = X[iu] - X[ju]
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return float(dist.mean()), float(dist.max())


def crowding_replace(X, cost, F, Cr, U, cu, Fu, Cru):
    """Sequential crowding selection, in place. See the compiled version."""
    m = U.shape[0]
    targets = np.full(m, -1, dtype=np.int64)
    for i in range(m):
        diff = X - U[i]
        j = int(np.argmin(np.einsum("ij,ij->i", diff, diff)))
        if cu[i] < cost[j]:
            X[j] = U[i]
            cost[j] = cu[i]
            F[j] = Fu[i]
            Cr[j] = Cru[i]
            targets[i] = j
    return targets
