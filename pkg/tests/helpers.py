"""Shared oracles and fixtures for the unit and acceptance tests."""
import itertools
import math

import numpy as np

from rldas.agent import PpoAgent, PpoConfig, Trajectory, policy, ppo_loss
from rldas.features import N_LA


def constant_state_learning(updates=200, episodes=16, lr=1e-3, dim=4, seed=0):
    """Two actions, one constant state; action 0 pays 1, action 1 pays 0.

    Returns the probability of action 0 after each update.
    """
    agent = PpoAgent(dim, 2, PpoConfig(lr=lr), seed=seed)
    la = np.full((1, N_LA), 0.5)
    ah = np.zeros((1, 4, dim))
    rng = np.random.default_rng(seed)
    history = []
    for _ in range(updates):
        trajs = []
        for _ in range(episodes):
            a, lp = agent.act(la, ah, rng)
            r = 1.0 if a[0] == 0 else 0.0
            trajs.append(Trajectory(la.copy(), ah.copy(), a, lp, np.array([r])))
        agent.update(trajs, k_updates=1)
        history.append(float(policy(agent.params, la, ah)[0, 0]))
    return history


def tiny_batch(dim=3, n_actions=3, n=5, seed=0):
    rng = np.random.default_rng(seed)
    return {
        "la": rng.uniform(-1, 1, (n, N_LA)),
        "ah": rng.normal(0, 2, (n, 2 * n_actions, dim)),
        "actions": rng.integers(n_actions, size=n),
        "logp_old": np.log(rng.uniform(0.2, 0.5, n)),
        "returns": rng.uniform(0, 2, n),
        "adv": rng.normal(size=n),
    }


def numeric_grad_errors(params, batch, clip=0.2, h=1e-5):
    """Relative error between analytic and central-difference gradients, per tensor."""
    _, _, grads = ppo_loss(params, batch, clip)
    errors = {}
    for name, p in params.items():
        num = np.zeros_like(p)
        flat = p.reshape(-1)
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + h
            lp = ppo_loss(params, batch, clip, with_grad=False)[0]
            flat[i] = old - h
            lm = ppo_loss(params, batch, clip, with_grad=False)[0]
            flat[i] = old
            num.reshape(-1)[i] = (lp - lm) / (2 * h)
        denom = max(np.linalg.norm(num), np.linalg.norm(grads[name]), 1e-12)
        errors[name] = float(np.linalg.norm(num - grads[name]) / denom)
    return errors


def fdc_oracle(c, d):
    n = len(c)
    mc = sum(c) / n
    md = sum(d) / n
    cov = sum((ci - mc) * (di - md) for ci, di in zip(c, d)) / n
    sc = math.sqrt(sum((ci - mc) ** 2 for ci in c) / n)
    sd = math.sqrt(sum((di - md) ** 2 for di in d) / n)
    return cov / (sc * sd)


def mean_pair_oracle(X):
    pairs = list(itertools.combinations(range(len(X)), 2))
    if not pairs:
        return 0.0
    return sum(math.dist(X[i], X[j]) for i, j in pairs) / len(pairs)


def dispersion_oracle(X, costs):
    k = math.ceil(0.1 * len(X))
    top = sorted(range(len(X)), key=lambda i: (costs[i], i))[:k]
    return mean_pair_oracle([X[i] for i in top]) - mean_pair_oracle(X)


def max_dist_oracle(X, dim):
    best = 0.0
    for i in range(len(X)):
        for j in range(i + 1, len(X)):
            best = max(best, math.dist(X[i], X[j]))
    return best / (200.0 * math.sqrt(dim))


def nsc_oracle(a, b, m):
    n = len(a)
    # segment boundaries of an as-even-as-possible split, larger segments first
    q, r = divmod(n, m)
    bounds, start = [], 0
    for i in range(m):
        size = q + (1 if i < r else 0)
        bounds.append((start, start + size))
        start += size
    ca = [sum(a[s:e]) / (e - s) for s, e in bounds]
    cb = [sum(b[s:e]) / (e - s) for s, e in bounds]
    total = 0.0
    for i in range(m - 1):
        den = cb[i + 1] - cb[i]
        if abs(den) >= 1e-12:
            total += (ca[i + 1] - ca[i]) / den
    return min(total, 0.0)


def anr_oracle(base, probes, eps):
    hits = 0
    for p in probes:
        for i in range(len(base)):
            if abs(base[i] - p[i]) < eps:
                hits += 1
    return hits / (len(base) * len(probes))


def bw_oracle(base, probes):
    n = len(base)
    alpha = beta = 0
    for i in range(n):
        if all(p[i] >= base[i] for p in probes):
            alpha += 1
        if all(p[i] > base[i] for p in probes):
            beta += 1
    return alpha / n, beta / n


# criterion number -> (passed, detail); printed by the terminal summary hook
ACCEPTANCE = {}


def record(n: int, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[n] = (bool(ok), detail)
