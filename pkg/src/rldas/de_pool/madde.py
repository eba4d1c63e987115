"""MadDE: multiple adaptation DE.

Three mutation operators are chosen per individual with adaptive
probabilities ``p_m``: current-to-pbest/1 with archive, current-to-rand/1
with archive, and weighted rand-to-qbest/1. A small fraction of trials use
q-best binomial crossover (crossing with a top-q individual instead of the
parent).
"""
from __future__ import annotations

import numpy as np

from ..bench import InstanceSpec
from .context import N_MAX, N_MIN, AlgorithmId, DeRunState
from .operators import (
    binomial,
    linear_size,
    midpoint_repair,
    pick_distinct,
    sample_shade_params,
    weighted_lehmer,
)
from .population import PopulationState, archive_add, evaluate_trials, shrink

P_M_LOW, P_M_HIGH = 0.1, 0.9


class MadDE:
    algorithm = AlgorithmId.MADDE

    def target_size(self, fe: int, max_fes: int) -> int:
        return linear_size(fe, max_fes, N_MAX, N_MIN)

    def _trials(self, params, common, pop: PopulationState, inst: InstanceSpec, rng):
        X, costs = pop.X, pop.costs
        n, _ = X.shape
        idx = np.arange(n)
        fe_r = min(pop.fe_used / pop.max_fes, 1.0)
        p = params["p_best"]
        q = 2.0 * p - p * fe_r
        fa = 0.5 + 0.5 * fe_r
        order = np.argsort(costs, kind="stable")
        A = common["archive"]
        PA = np.vstack([X, A]) if A.shape[0] else X

        F, Cr, mem_idx = sample_shade_params(rng, common["M_F"], common["M_Cr"], n)
        mu = rng.choice(3, size=n, p=params["p_m"])

        pbest = order[rng.integers(max(int(p * n), 2), size=n)]
        qbest = order[rng.integers(max(int(q * n), 2), size=n)]
        r1 = pick_distinct(rng, n, [idx, pbest])
        r2 = pick_distinct(rng, PA.shape[0], [idx, r1, pbest])
        r3 = pick_distinct(rng, n, [idx, r1, qbest])

        Fc = F[:, None]
        V = np.empty_like(X)
        m0, m1, m2 = mu == 0, mu == 1, mu == 2
        # current-to-pbest/1 with archive
        V[m0] = X[m0] + Fc[m0] * (X[pbest[m0]] - X[m0]) + Fc[m0] * (X[r1[m0]] - PA[r2[m0]])
        # current-to-rand/1 with archive
        V[m1] = X[m1] + Fc[m1] * (X[r1[m1]] - PA[r2[m1]])
        # weighted rand-to-qbest/1
        V[m2] = Fc[m2] * X[r1[m2]] + Fc[m2] * fa * (X[qbest[m2]] - X[r3[m2]])
        V = midpoint_repair(X, V, inst.lower, inst.upper)

        # q-best binomial crossover for a small fraction of trials
        base = X.copy()
        qbx = rng.random(n) < params["p_qbx"]
        k = int(qbx.sum())
        if k:
            if A.shape[0]:
                pool_costs = np.concatenate([costs, common["archive_costs"]])
            else:
                pool_costs = costs
            pool_order = np.argsort(pool_costs, kind="stable")
            top = pool_order[: max(int(q * PA.shape[0]), 2)]
            base[qbx] = PA[top[rng.integers(top.shape[0], size=k)]]
        U = binomial(rng, base, V, Cr)
        return U, F, Cr, mu, mem_idx

    def propose(self, state: DeRunState, pop: PopulationState, inst: InstanceSpec, rng) -> np.ndarray:
        return self._trials(state.params, state.common, pop, inst, rng)[0]

    def generation(self, state: DeRunState, pop: PopulationState, inst: InstanceSpec, rng, term_error: float) -> None:
        p, c = state.params, state.common
        U, F, Cr, mu, _ = self._trials(p, c, pop, inst, rng)
        cu = evaluate_trials(pop, inst, U)
        costs = pop.costs
        win = np.flatnonzero(cu < costs)

        df = np.maximum(0.0, costs - cu)
        if win.size:
            archive_add(c, pop.X[win], costs[win], pop.n, rng)
            w = df[win]
            if w.sum() > 0:
                k = c["mem_pos"]
                c["M_F"][k] = weighted_lehmer(F[win], w)
                c["M_Cr"][k] = weighted_lehmer(Cr[win], w)
                c["mem_pos"] = (k + 1) % c["M_F"].shape[0]

        # operator probabilities from mean relative improvement per operator
        rel = np.divide(df, costs, out=np.zeros_like(df), where=costs > 0)
        gain = np.array([rel[mu == i].mean() if np.any(mu == i) else 0.0 for i in range(3)])
        if gain.sum() > 0:
            pm = np.clip(gain / gain.sum(), P_M_LOW, P_M_HIGH)
            p["p_m"] = pm / pm.sum()
        else:
            p["p_m"] = np.full(3, 1.0 / 3.0)

        pop.X[win] = U[win]
        pop.costs[win] = cu[win]
        c["S_F"][win] = F[win]
        c["S_Cr"][win] = Cr[win]
        shrink(pop, c, min(pop.n, self.target_size(pop.fe_used, pop.max_fes)))
