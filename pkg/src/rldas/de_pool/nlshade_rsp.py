"""NL-SHADE-RSP: SHADE with nonlinear population reduction and rank-based selective pressure.

Mutation is current-to-pbest/1 where the second difference vector member is
drawn either rank-proportionally from the population or from the archive
(probability ``p_a``). Each generation uses exponential crossover or
binomial crossover with a budget-scheduled rate, chosen by a fair coin.
"""
from __future__ import annotations

import numpy as np

from ..bench import InstanceSpec
from .context import N_MAX, N_MIN, AlgorithmId, DeRunState
from .operators import (
    binomial,
    exponential,
    pick_distinct,
    random_repair,
    sample_shade_params,
    weighted_lehmer,
)
from .population import PopulationState, archive_add, evaluate_trials, shrink

P_A_LOW, P_A_HIGH = 0.1, 0.9


def nonlinear_size(fe: int, max_fes: int) -> int:
    r = min(fe / max_fes, 1.0)
    return int(round(N_MAX + (N_MIN - N_MAX) * r ** (1.0 - r)))


class NLShadeRSP:
    algorithm = AlgorithmId.NL_SHADE_RSP

    def target_size(self, fe: int, max_fes: int) -> int:
        return nonlinear_size(fe, max_fes)

    def _trials(self, params, common, pop: PopulationState, inst: InstanceSpec, rng):
        X, costs = pop.X, pop.costs
        n, _ = X.shape
        idx = np.arange(n)
        fe_r = min(pop.fe_used / pop.max_fes, 1.0)
        order = np.argsort(costs, kind="stable")
        rank = np.empty(n, dtype=np.int64)
        rank[order] = idx

        F, Cr, _ = sample_shade_params(rng, common["M_F"], common["M_Cr"], n)
        # smaller Cr for better individuals
        Cr = np.sort(Cr)[rank]
        exp_cross = bool(rng.random() < 0.5)

        pb = 0.4 - 0.2 * fe_r
        pbest = order[rng.integers(max(int(pb * n), 2), size=n)]
        r1 = pick_distinct(rng, n, [idx, pbest])
        # rank-based selective pressure for the population member
        pr = np.exp(-(np.arange(n) + 1.0) / n)
        pr /= pr.sum()
        r2 = order[pick_distinct(rng, n, [rank, rank[r1], rank[pbest]], size=n, p=pr)]

        A = common["archive"]
        use_arc = (rng.random(n) < params["p_a"]) & (A.shape[0] > 0)
        x2 = X[r2].copy()
        k = int(use_arc.sum())
        if k:
            x2[use_arc] = A[rng.integers(A.shape[0], size=k)]

        Fc = F[:, None]
        V = X + Fc * (X[pbest] - X) + Fc * (X[r1] - x2)
        if exp_cross:
            U = exponential(rng, X, V, Cr)
        else:
            cr_b = 0.0 if fe_r < 0.5 else 2.0 * (fe_r - 0.5)
            U = binomial(rng, X, V, cr_b)
        U = random_repair(rng, U, inst.lower, inst.upper)
        return U, F, Cr, use_arc, exp_cross

    def propose(self, state: DeRunState, pop: PopulationState, inst: InstanceSpec, rng) -> np.ndarray:
        return self._trials(state.params, state.common, pop, inst, rng)[0]

    def generation(self, state: DeRunState, pop: PopulationState, inst: InstanceSpec, rng, term_error: float) -> None:
        p, c = state.params, state.common
        U, F, Cr, use_arc, exp_cross = self._trials(p, c, pop, inst, rng)
        cu = evaluate_trials(pop, inst, U)
        costs = pop.costs
        win = np.flatnonzero(cu < costs)

        rel = np.divide(costs - cu, costs, out=np.zeros_like(costs), where=costs > 0)
        if win.size:
            archive_add(c, pop.X[win], costs[win], pop.n, rng)
            w = np.abs(costs[win] - cu[win])
            if w.sum() > 0:
                k = c["mem_pos"]
                c["M_F"][k] = 0.5 * (c["M_F"][k] + weighted_lehmer(F[win], w))
                # the binomial rate is scheduled, not sampled, so only exponential generations teach M_Cr
                if exp_cross:
                    c["M_Cr"][k] = 0.5 * (c["M_Cr"][k] + weighted_lehmer(Cr[win], w))
                c["mem_pos"] = (k + 1) % c["M_F"].shape[0]

        # archive usage probability from per-use mean improvement
        n_a = int(use_arc.sum())
        p["n_a"] = n_a
        n = costs.shape[0]
        if 0 < n_a < n:
            gain = np.where(np.isin(np.arange(n), win), rel, 0.0)
            da = gain[use_arc].sum() / n_a
            dp = gain[~use_arc].sum() / (n - n_a)
            if da + dp > 0:
                p["p_a"] = float(np.clip(da / (da + dp), P_A_LOW, P_A_HIGH))

        pop.X[win] = U[win]
        pop.costs[win] = cu[win]
        c["S_F"][win] = F[win]
        if exp_cross:
            c["S_Cr"][win] = Cr[win]
        shrink(pop, c, min(pop.n, self.target_size(pop.fe_used, pop.max_fes)))
