"""JDE21: self-adaptive jDE with a big and a small sub-population.

The last ``SMALL_N`` rows of the population form the small sub-population;
the rest is the big one. The big population uses crowding selection (each
trial competes with its nearest neighbour), the small one plain one-to-one
selection and receives a copy of the best individual.
"""
from __future__ import annotations

import numpy as np

from .. import kernels
from ..bench import InstanceSpec
from .context import CR_INIT, F_INIT, N_MAX, N_MIN, AlgorithmId, DeRunState
from .operators import binomial, linear_size, pick_distinct
from .population import PopulationState, evaluate_trials, shrink

SMALL_N = 10
F_LOW_BIG, F_LOW_SMALL, F_SPAN = 0.1, 0.17, 1.1
CR_LOW_BIG, CR_SPAN_BIG = 0.0, 1.1
CR_LOW_SMALL, CR_SPAN_SMALL = 0.1, 0.8


def _stagnant(costs: np.ndarray, best: float, eps: float, my_eqs: float) -> bool:
    eqs = int(np.count_nonzero(np.abs(costs - best) < eps))
    return eqs > 2 and eqs > costs.shape[0] * my_eqs


def _self_adapt(rng, F_old, Cr_old, tau1, tau2, f_low, cr_low, cr_span):
    n = F_old.shape[0]
    F = np.where(rng.random(n) < tau1, f_low + rng.random(n) * F_SPAN, F_old)
    Cr = np.where(rng.random(n) < tau2, cr_low + rng.random(n) * cr_span, Cr_old)
    return F, Cr


def _migration(fe: int, max_fes: int) -> int:
    if fe < max_fes / 3:
        return 1
    if fe < 2 * max_fes / 3:
        return 2
    return 3


class JDE21:
    algorithm = AlgorithmId.JDE21

    def target_size(self, fe: int, max_fes: int) -> int:
        return linear_size(fe, max_fes, N_MAX, N_MIN)

    def _big_trials(self, params, common, pop, inst, rng, n_big):
        X = pop.X
        idx = np.arange(n_big)
        mig = _migration(pop.fe_used, pop.max_fes)
        pool = min(n_big + mig, pop.n)
        r1 = pick_distinct(rng, n_big, [idx])
        r2 = pick_distinct(rng, pool, [idx, r1])
        r3 = pick_distinct(rng, pool, [idx, r1, r2])
        F, Cr = _self_adapt(rng, common["S_F"][:n_big], common["S_Cr"][:n_big],
                            params["tau1"], params["tau2"], F_LOW_BIG, CR_LOW_BIG, CR_SPAN_BIG)
        V = X[r1] + F[:, None] * (X[r2] - X[r3])
        V = np.clip(V, inst.lower, inst.upper)
        return binomial(rng, X[:n_big], V, Cr), F, Cr

    def _small_trials(self, params, common, pop, inst, rng, n_big):
        Xs = pop.X[n_big:]
        m = Xs.shape[0]
        idx = np.arange(m)
        r1 = pick_distinct(rng, m, [idx])
        r2 = pick_distinct(rng, m, [idx, r1])
        r3 = pick_distinct(rng, m, [idx, r1, r2])
        F, Cr = _self_adapt(rng, common["S_F"][n_big:], common["S_Cr"][n_big:],
                            params["tau1"], params["tau2"], F_LOW_SMALL, CR_LOW_SMALL, CR_SPAN_SMALL)
        V = Xs[r1] + F[:, None] * (Xs[r2] - Xs[r3])
        V = np.clip(V, inst.lower, inst.upper)
        return binomial(rng, Xs, V, Cr), F, Cr

    def propose(self, state: DeRunState, pop: PopulationState, inst: InstanceSpec, rng) -> np.ndarray:
        """One trial per individual, index-aligned; nothing is modified."""
        n_big = pop.n - SMALL_N
        Ub, _, _ = self._big_trials(state.params, state.common, pop, inst, rng, n_big)
        Us, _, _ = self._small_trials(state.params, state.common, pop, inst, rng, n_big)
        return np.vstack([Ub, Us])

    def _reinit(self, pop, common, rows, inst, rng) -> None:
        if pop.remaining < rows.shape[0]:
            return
        Xn = rng.uniform(inst.lower, inst.upper, size=(rows.shape[0], inst.dim))
        pop.X[rows] = Xn
        pop.costs[rows] = evaluate_trials(pop, inst, Xn)
        common["S_F"][rows] = F_INIT
        common["S_Cr"][rows] = CR_INIT

    def generation(self, state: DeRunState, pop: PopulationState, inst: InstanceSpec, rng, term_error: float) -> None:
        p, c = state.params, state.common
        n_big = pop.n - SMALL_N

        cbest = float(pop.costs.min())
        if _stagnant(pop.costs[:n_big], cbest, p["eps"], p["my_eqs"]) or p["age"] > p["age_limit"]:
            p["n_big_reset"] += 1
            p["age"] = 0
            self._reinit(pop, c, np.arange(n_big), inst, rng)

        # big population, crowding selection
        U, F, Cr = self._big_trials(p, c, pop, inst, rng, n_big)
        cu = evaluate_trials(pop, inst, U)
        before = float(pop.costs.min())
        X_big, c_big = pop.X[:n_big], pop.costs[:n_big]
        SF_big, SCr_big = c["S_F"][:n_big], c["S_Cr"][:n_big]
        kernels.crowding_replace(X_big, c_big, SF_big, SCr_big, U, cu, F, Cr)
        p["age"] += n_big
        if pop.costs.min() < before:
            p["age"] = 0
        if pop.best_cost < term_error or pop.remaining == 0:
            self._reduce(state, pop)
            return

        # small population
        best_id = int(np.argmin(pop.costs))
        if best_id >= n_big and _stagnant(pop.costs[n_big:], pop.costs[best_id], p["eps"], p["my_eqs"]):
            p["n_small_reset"] += 1
            rows = np.setdiff1d(np.arange(n_big, pop.n), [best_id])
            self._reinit(pop, c, rows, inst, rng)
            best_id = int(np.argmin(pop.costs))
        if best_id < n_big:
            pop.X[n_big] = pop.X[best_id]
            pop.costs[n_big] = pop.costs[best_id]

        for _ in range(n_big // SMALL_N):
            U, F, Cr = self._small_trials(p, c, pop, inst, rng, n_big)
            cu = evaluate_trials(pop, inst, U)
            before = float(pop.costs.min())
            win = np.flatnonzero(cu < pop.costs[n_big:])
            rows = win + n_big
            pop.X[rows] = U[win]
            pop.costs[rows] = cu[win]
            c["S_F"][rows] = F[win]
            c["S_Cr"][rows] = Cr[win]
            p["age"] += SMALL_N
            if pop.costs.min() < before:
                p["age"] = 0
            if pop.best_cost < term_error or pop.remaining == 0:
                break
        self._reduce(state, pop)

    def _reduce(self, state, pop) -> None:
        target = self.target_size(pop.fe_used, pop.max_fes)
        if target < pop.n:
            # only the big sub-population shrinks; the small one keeps its slots
            shrink(pop, state.common, target, candidates=np.arange(pop.n - SMALL_N))
