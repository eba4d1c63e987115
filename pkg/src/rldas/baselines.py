"""Non-learning comparators and the shared episode runner.

All methods run through the same environment loop and seed the initial
population identically for a given seed, so their initial best costs agree.
Baselines never probe (no landscape features are needed to pick actions).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bench import InstanceSpec
from .de_pool import N_ALGORITHMS, AlgorithmId
from .env import EnvConfig, reset

RL_DAS = "RL-DAS"
RAND_DAS = "Rand-DAS"
AS_STAR = "AS*"
BACKBONE_NAMES = tuple(a.label for a in AlgorithmId)


@dataclass
class EpisodeResult:
    method: str
    seed: int
    cost0: float
    final_cost: float
    fe_end: int
    actions: list = field(default_factory=list)
    trace: list = field(default_factory=list)  # (step, action, fe_used, best_cost)

    @property
    def descent(self) -> float:
        """Descent in percent of the run's own initial best cost."""
        if self.cost0 <= 0:
            return 100.0
        return (self.cost0 - self.final_cost) / self.cost0 * 100.0

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "seed": self.seed,
            "cost0": self.cost0,
            "final_cost": self.final_cost,
            "fe_end": self.fe_end,
            "descent": self.descent,
            "actions": list(self.actions),
        }


def _result(method: str, seed: int, ep) -> EpisodeResult:
    trace = [(r.step, r.action, r.fe_used, r.best_cost) for r in ep.records]
    return EpisodeResult(method, int(seed), ep.cost0, ep.pop.best_cost, ep.pop.fe_used,
                         [r.action for r in ep.records], trace)


def run_policy(choose, inst: InstanceSpec, cfg: EnvConfig, seed, method: str = RL_DAS) -> EpisodeResult:
    """Generic loop; ``choose(state, t)`` returns the action for step t."""
    state, ep = reset(inst, cfg, seed)
    while not ep.done:
        state, _, _, _ = ep.step(choose(state, ep.t))
    return _result(method, seed, ep)


def action_rng(seed) -> np.random.Generator:
    """Action stream for random selection, independent of the optimizer stream."""
    return np.random.default_rng([int(seed), 0x5EED])


def run_rand_das(inst: InstanceSpec, cfg: EnvConfig, seed) -> EpisodeResult:
    rng = action_rng(seed)
    cfg = cfg.with_(use_la=False)
    return run_policy(lambda s, t: int(rng.integers(N_ALGORITHMS)), inst, cfg, seed, RAND_DAS)


def run_single(alg, inst: InstanceSpec, cfg: EnvConfig, seed) -> EpisodeResult:
    alg = AlgorithmId.parse(alg)
    cfg = cfg.with_(use_la=False)
    return run_policy(lambda s, t: int(alg), inst, cfg, seed, alg.label)


def run_agent(agent, inst: InstanceSpec, cfg: EnvConfig, seed, greedy: bool = True) -> EpisodeResult:
    rng = action_rng(seed)

    def choose(state, t):
        a, _ = agent.act(state.la[None], state.ah[None], rng, greedy=greedy)
        return int(a[0])

    return run_policy(choose, inst, cfg, seed, RL_DAS)


def as_star(results) -> EpisodeResult:
    """Best backbone result: max descent, then fewer FEs, then lower algorithm index."""
    if isinstance(results, dict):
        by_alg = {AlgorithmId.parse(k): v for k, v in results.items()}
    else:
        by_alg = {AlgorithmId.parse(r.method): r for r in results}
    if set(by_alg) != set(AlgorithmId):
        raise ValueError("AS* needs one result per backbone")
    best = min(by_alg.items(), key=lambda kv: (-kv[1].descent, kv[1].fe_end, int(kv[0])))[1]
    return EpisodeResult(AS_STAR, best.seed, best.cost0, best.final_cost, best.fe_end,
                         list(best.actions), list(best.trace))
