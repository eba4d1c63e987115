"""Interval execution: run whole generations of one backbone for a FE budget."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..bench import InstanceSpec, make_instance
from .context import N_MAX, AlgorithmId, DeRunState, init_context, restore, save_context
from .jde21 import JDE21
from .madde import MadDE
from .nlshade_rsp import NLShadeRSP
from .population import PopulationState, init_population

TERM_ERROR = 1e-8

BACKBONES = {
    AlgorithmId.JDE21: JDE21(),
    AlgorithmId.MADDE: MadDE(),
    AlgorithmId.NL_SHADE_RSP: NLShadeRSP(),
}


def backbone(alg):
    return BACKBONES[AlgorithmId.parse(alg)]


class IntervalResult(NamedTuple):
    pop: PopulationState
    state: DeRunState
    fe_consumed: int
    terminated: bool


def step_interval(
    state: DeRunState,
    pop: PopulationState,
    inst: InstanceSpec,
    delta: int,
    term_error: float = TERM_ERROR,
    rng: np.random.Generator | None = None,
) -> IntervalResult:
    """Run generations of ``state.algorithm`` until at least ``delta`` FEs are spent.

    Stops early when the budget is exhausted or ``best_cost < term_error``
    (``terminated`` is then True). ``pop`` and ``state`` are updated in place.
    """
    if delta < 1:
        raise ValueError("delta must be >= 1")
    if rng is None:
        rng = np.random.default_rng()
    algo = BACKBONES[state.algorithm]
    start = pop.fe_used
    if pop.best_cost < term_error or pop.remaining == 0:
        return IntervalResult(pop, state, 0, True)
    while pop.fe_used - start < delta:
        algo.generation(state, pop, inst, rng, term_error)
        if pop.best_cost < term_error or pop.remaining == 0:
            return IntervalResult(pop, state, pop.fe_used - start, True)
    return IntervalResult(pop, state, pop.fe_used - start, False)


def run_backbone(alg, inst: InstanceSpec, max_fes: int, seed, delta: int = 2500,
                 term_error: float = TERM_ERROR, n_init: int = N_MAX):
    """Run one backbone alone for a whole budget.

    Returns (final PopulationState, trace) where trace rows are
    (fe_used, best_cost) at every interval boundary, starting after init.
    """
    rng = np.random.default_rng(seed)
    pop = init_population(inst, n_init, max_fes, rng)
    ctx = init_context(pop.n, inst.dim, max_fes)
    trace = [(pop.fe_used, pop.best_cost)]
    state = restore(ctx, alg)
    done = pop.best_cost < term_error
    while not done:
        pop, state, _, done = step_interval(state, pop, inst, delta, term_error, rng)
        ctx = save_context(ctx, state)
        trace.append((pop.fe_used, pop.best_cost))
        state = restore(ctx, alg)
    return pop, trace


def trace_csv(trace) -> str:
    lines = ["fe_used,best_cost"]
    lines += [f"{fe},{cost:.17g}" for fe, cost in trace]
    return "\n".join(lines) + "\n"


def run_cli(alg: str, problem_class, dim: int, max_fes: int, seed: int, delta: int = 2500) -> str:
    inst = make_instance(problem_class, dim, seed)
    _, trace = run_backbone(alg, inst, max_fes, seed, delta)
    return trace_csv(trace)
