"""Population shared by all candidates, plus budget-aware evaluation."""
from __future__ import annotations

import copy
from dataclasses import dataclass

import numpy as np

from ..bench import InstanceSpec, evaluate
from .context import N_MAX, N_MIN, archive_capacity


@dataclass(eq=False)
class PopulationState:
    X: np.ndarray
    costs: np.ndarray
    best_x: np.ndarray
    best_cost: float
    fe_used: int
    max_fes: int

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def remaining(self) -> int:
        return max(self.max_fes - self.fe_used, 0)

    def copy(self) -> "PopulationState":
        return copy.deepcopy(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PopulationState):
            return NotImplemented
        return (
            np.array_equal(self.X, other.X)
            and np.array_equal(self.costs, other.costs)
            and np.array_equal(self.best_x, other.best_x)
            and self.best_cost == other.best_cost
            and self.fe_used == other.fe_used
            and self.max_fes == other.max_fes
        )


def init_population(inst: InstanceSpec, n: int, max_fes: int, rng: np.random.Generator) -> PopulationState:
    """Uniform population in the box, evaluated (``n`` FEs)."""
    if not N_MIN <= n <= N_MAX:
        raise ValueError(f"population size must lie in [{N_MIN}, {N_MAX}]")
    X = rng.uniform(inst.lower, inst.upper, size=(n, inst.dim))
    costs = np.asarray(evaluate(inst, X))
    i = int(np.argmin(costs))
    return PopulationState(X, costs, X[i].copy(), float(costs[i]), n, int(max_fes))


def evaluate_trials(pop: PopulationState, inst: InstanceSpec, U: np.ndarray) -> np.ndarray:
    """Evaluate as many rows of ``U`` as the budget allows.

    Rows past the budget get ``inf``. Consumed FEs and the incumbent are
    updated on ``pop``.
    """
    k = min(U.shape[0], pop.remaining)
    out = np.full(U.shape[0], np.inf)
    if k > 0:
        out[:k] = evaluate(inst, U[:k])
        pop.fe_used += k
        j = int(np.argmin(out[:k]))
        if out[j] < pop.best_cost:
            pop.best_cost = float(out[j])
            pop.best_x = U[j].copy()
    return out


def take(pop: PopulationState, common: dict, idx: np.ndarray) -> None:
    """Keep/reorder individuals ``idx`` together with their per-individual parameters."""
    pop.X = pop.X[idx]
    pop.costs = pop.costs[idx]
    common["S_F"] = common["S_F"][idx]
    common["S_Cr"] = common["S_Cr"][idx]


def sort_population(pop: PopulationState, common: dict) -> None:
    take(pop, common, np.argsort(pop.costs, kind="stable"))


def shrink(pop: PopulationState, common: dict, n: int, candidates: np.ndarray | None = None) -> None:
    """Drop the worst individuals until ``n`` remain, preserving order.

    ``candidates`` restricts which indices may be dropped.
    """
    n = int(np.clip(n, N_MIN, N_MAX))
    excess = pop.n - n
    if excess <= 0:
        return
    pool = np.arange(pop.n) if candidates is None else np.asarray(candidates)
    worst = pool[np.argsort(pop.costs[pool], kind="stable")[::-1][:excess]]
    keep = np.setdiff1d(np.arange(pop.n), worst)
    take(pop, common, keep)
    trim_archive(common, pop.n, None)


def grow(pop: PopulationState, common: dict, n: int, inst: InstanceSpec, rng: np.random.Generator) -> int:
    """Append uniform random individuals up to ``n``; returns FEs spent."""
    n = int(np.clip(n, N_MIN, N_MAX))
    extra = min(n - pop.n, pop.remaining)
    if extra <= 0:
        return 0
    X_new = rng.uniform(inst.lower, inst.upper, size=(extra, inst.dim))
    c_new = evaluate_trials(pop, inst, X_new)
    pop.X = np.vstack([pop.X, X_new])
    pop.costs = np.concatenate([pop.costs, c_new])
    common["S_F"] = np.concatenate([common["S_F"], np.full(extra, 0.5)])
    common["S_Cr"] = np.concatenate([common["S_Cr"], np.full(extra, 0.9)])
    common["archive_capacity"] = archive_capacity(pop.n)
    return extra


def resize_population(pop, common, n, inst, rng) -> int:
    """Shrink (drop worst) or grow (random injection) to ``n``; returns FEs spent."""
    if n < pop.n:
        shrink(pop, common, n)
        return 0
    return grow(pop, common, n, inst, rng)


def trim_archive(common: dict, n: int, rng: np.random.Generator | None) -> None:
    """Cap the archive at floor(2.3 n), dropping random members (oldest if no rng)."""
    cap = archive_capacity(n)
    common["archive_capacity"] = cap
    size = common["archive"].shape[0]
    if size <= cap:
        return
    if rng is None:
        keep = np.arange(size - cap, size)
    else:
        keep = np.sort(rng.choice(size, size=cap, replace=False))
    common["archive"] = common["archive"][keep]
    common["archive_costs"] = common["archive_costs"][keep]


def archive_add(common: dict, X: np.ndarray, costs: np.ndarray, n: int, rng: np.random.Generator) -> None:
    if X.shape[0] == 0:
        return
    common["archive"] = np.vstack([common["archive"], X])
    common["archive_costs"] = np.concatenate([common["archive_costs"], costs])
    trim_archive(common, n, rng)
