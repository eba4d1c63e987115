"""Mutation, crossover and parameter-sampling helpers shared by the DE variants."""
from __future__ import annotations

import numpy as np

_MAX_RETRIES = 50


def pick_distinct(rng: np.random.Generator, high: int, exclude: list, size: int | None = None, p=None) -> np.ndarray:
    """One index per row in [0, high), resampled until it differs from every array in ``exclude``.

    Gives up after a fixed number of retries; with tiny pools a few rows
    may then coincide, which the DE updates tolerate.
    """
    n = size if size is not None else len(exclude[0])
    r = rng.choice(high, size=n, p=p) if p is not None else rng.integers(high, size=n)
    for _ in range(_MAX_RETRIES):
        bad = np.zeros(n, dtype=bool)
        for e in exclude:
            bad |= r == e
        k = int(bad.sum())
        if k == 0:
            break
        r[bad] = rng.choice(high, size=k, p=p) if p is not None else rng.integers(high, size=k)
    return r


def binomial(rng: np.random.Generator, X: np.ndarray, V: np.ndarray, cr) -> np.ndarray:
    n, d = X.shape
    cr = np.broadcast_to(np.asarray(cr, dtype=float), (n,))
    mask = rng.random((n, d)) < cr[:, None]
    jrand = rng.integers(d, size=n)
    mask[np.arange(n), jrand] = True
    return np.where(mask, V, X)


def exponential(rng: np.random.Generator, X: np.ndarray, V: np.ndarray, cr) -> np.ndarray:
    """Exponential crossover: a run of consecutive (cyclic) components from ``V``."""
    n, d = X.shape
    cr = np.broadcast_to(np.asarray(cr, dtype=float), (n,))
    start = rng.integers(d, size=n)
    # length L: 1 + number of leading successes of rand < cr, capped at d
    draws = rng.random((n, d - 1)) < cr[:, None] if d > 1 else np.zeros((n, 0), dtype=bool)
    fails = ~draws
    first_fail = np.where(fails.any(axis=1), fails.argmax(axis=1), d - 1)
    length = 1 + first_fail
    offset = (np.arange(d)[None, :] - start[:, None]) % d
    mask = offset < length[:, None]
    return np.where(mask, V, X)


def sample_shade_params(rng: np.random.Generator, M_F: np.ndarray, M_Cr: np.ndarray, n: int):
    """F from Cauchy(M_F[r], 0.1) regenerated while <= 0 and capped at 1; Cr from N(M_Cr[r], 0.1) clipped to [0, 1]."""
    r = rng.integers(M_F.shape[0], size=n)
    cr = np.clip(rng.normal(M_Cr[r], 0.1), 0.0, 1.0)
    f = M_F[r] + 0.1 * rng.standard_cauchy(n)
    bad = f <= 0
    while bad.any():
        f[bad] = M_F[r[bad]] + 0.1 * rng.standard_cauchy(int(bad.sum()))
        bad = f <= 0
    return np.minimum(f, 1.0), cr, r


def weighted_lehmer(values: np.ndarray, weights: np.ndarray) -> float:
    w = weights / weights.sum()
    den = np.sum(w * values)
    if den == 0:
        return 0.0
    return float(np.sum(w * values**2) / den)


def weighted_mean(values: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sum(weights * values) / weights.sum())


def linear_size(fe: int, max_fes: int, n_max: int, n_min: int) -> int:
    r = min(fe / max_fes, 1.0)
    return int(round(n_max + (n_min - n_max) * r))


def midpoint_repair(X: np.ndarray, V: np.ndarray, lower: float, upper: float) -> np.ndarray:
    V = np.where(V < lower, (X + lower) / 2.0, V)
    return np.where(V > upper, (X + upper) / 2.0, V)


def random_repair(rng: np.random.Generator, V: np.ndarray, lower: float, upper: float) -> np.ndarray:
    out = (V < lower) | (V > upper)
    if out.any():
        V = V.copy()
        V[out] = rng.uniform(lower, upper, size=int(out.sum()))
    return V
