"""Dynamic algorithm selection as an episodic decision process.

One episode optimizes one instance. Every step the agent picks a backbone,
which is warm-started from the context memory and run for one schedule
interval; the next state is then extracted (probe FEs included in the
budget).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .bench import InstanceSpec
from .de_pool import (
    N_ALGORITHMS,
    N_MAX,
    AlgorithmId,
    init_context,
    init_population,
    restore,
    save_context,
    step_interval,
)
from .features import (
    N_LA,
    N_PROBES,
    AhHistory,
    DasState,
    assemble_state,
    best_and_worst,
    extract_la,
    la_from_probes,
    record_shift,
    ProbeResult,
)

REWARD_SCHEMES = ("adjusted", "r1", "r2", "r3", "r4")
R4_THRESHOLD = 0.025


class EpisodeError(RuntimeError):
    pass


@dataclass(frozen=True)
class EnvConfig:
    max_fes: int = 200_000
    delta: int = 2_500
    term_error: float = 1e-8
    reward_scheme: str = "adjusted"
    use_la: bool = True
    use_ah: bool = True
    use_context: bool = True
    n_probes: int = N_PROBES
    n_init: int = N_MAX

    def __post_init__(self):
        if self.reward_scheme not in REWARD_SCHEMES:
            raise ValueError(f"unknown reward scheme {self.reward_scheme!r}")
        if not self.max_fes / 200 <= self.delta <= self.max_fes / 10:
            raise ValueError("delta must lie in [MaxFEs/200, MaxFEs/10]")

    @classmethod
    def for_dim(cls, dim: int, **kw) -> "EnvConfig":
        base = {"max_fes": 200_000, "delta": 2_500} if dim <= 10 else {"max_fes": 1_000_000, "delta": 8_000}
        base.update(kw)
        return cls(**base)

    def with_(self, **kw) -> "EnvConfig":
        return replace(self, **kw)


@dataclass
class StepRecord:
    step: int
    action: int
    adc: float
    fe_used: int
    best_cost: float
    fe_interval: int
    fe_probe: int


@dataclass
class Episode:
    inst: InstanceSpec
    cfg: EnvConfig
    rng: np.random.Generator
    pop: object
    ctx: object
    history: AhHistory
    cost0: float
    state: DasState
    done: bool = False
    t: int = 0
    best_costs: list = field(default_factory=list)
    adcs: list = field(default_factory=list)
    records: list = field(default_factory=list)
    fe_init: int = 0
    fe_probes: int = 0
    fe_intervals: int = 0
    flags: set = field(default_factory=set)

    @property
    def fe_used(self) -> int:
        return self.pop.fe_used

    @property
    def best_cost(self) -> float:
        return self.pop.best_cost

    def _is_done(self) -> bool:
        return self.pop.fe_used >= self.cfg.max_fes or self.pop.best_cost < self.cfg.term_error

    def _observe(self, probe: bool) -> DasState:
        cfg = self.cfg
        if cfg.use_la and probe:
            la, fe = extract_la(self.pop, self.inst, self.ctx, self.rng, self.cost0, cfg.n_probes)
            self.fe_probes += fe
            self.flags |= la.flags
            if self.pop.best_cost < cfg.term_error:
                self.flags.add("terminated_by_probe")
            values = la.values
        elif cfg.use_la:
            empty = ProbeResult([], [], [], 0, False)
            values = la_from_probes(self.pop, self.cost0, empty, self.rng, self.inst.lower, self.inst.upper).values
        else:
            values = np.zeros(N_LA)
        s = assemble_state(values, self.history)
        if not cfg.use_ah:
            s = DasState(s.la, np.zeros_like(s.ah))
        return s

    def step(self, action) -> tuple[DasState, float, bool, dict]:
        if self.done:
            raise EpisodeError("step() called on a finished episode")
        cfg = self.cfg
        alg = AlgorithmId.parse(action)
        if not cfg.use_context:
            self.ctx = init_context(self.pop.n, self.inst.dim, cfg.max_fes)
        best_before, worst_before = best_and_worst(self.pop)
        # baseline is the previous step's best (cost0 at step 0) so probe gains are not lost
        prev = self.best_costs[-1] if self.best_costs else self.cost0
        run_state = restore(self.ctx, alg)
        self.pop, run_state, fe_int, _ = step_interval(
            run_state, self.pop, self.inst, cfg.delta, cfg.term_error, self.rng
        )
        self.ctx = save_context(self.ctx, run_state)
        self.fe_intervals += fe_int
        best_after, worst_after = best_and_worst(self.pop)
        self.history = record_shift(self.history, alg, best_before, best_after, worst_before, worst_after)

        probes_before = self.fe_probes
        self.done = self._is_done()
        self.state = self._observe(probe=not self.done)
        self.done = self._is_done()

        adc = (prev - self.pop.best_cost) / self.cost0 if self.cost0 > 0 else 0.0
        self.adcs.append(adc)
        self.best_costs.append(self.pop.best_cost)
        rec = StepRecord(self.t, int(alg), adc, self.pop.fe_used, self.pop.best_cost,
                         fe_int, self.fe_probes - probes_before)
        self.records.append(rec)
        self.t += 1
        info = {"fe_used": self.pop.fe_used, "best_cost": self.pop.best_cost,
                "fe_interval": fe_int, "fe_probe": rec.fe_probe}
        return self.state, adc, self.done, info

    def rewards(self) -> list:
        if not self.done:
            raise EpisodeError("rewards are defined on finished episodes")
        return finalize_rewards(self.adcs, self.pop.fe_used, self.cfg.max_fes,
                                self.cfg.reward_scheme, [self.cost0] + self.best_costs)

    def descent(self) -> float:
        return descent(self.cost0, self.pop.best_cost)

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "action", "adc", "fe_used", "best_cost"])
        for r in self.records:
            w.writerow([r.step, AlgorithmId(r.action).label, repr(r.adc), r.fe_used, repr(r.best_cost)])
        return buf.getvalue()


def descent(cost0: float, final: float) -> float:
    """Fractional descent of the best cost; 1.0 when the optimum was hit at start."""
    if cost0 <= 0:
        return 1.0
    return (cost0 - final) / cost0


def reset(inst: InstanceSpec, cfg: EnvConfig, seed) -> tuple[DasState, Episode]:
    rng = np.random.default_rng(seed)
    pop = init_population(inst, cfg.n_init, cfg.max_fes, rng)
    ctx = init_context(pop.n, inst.dim, cfg.max_fes)
    ep = Episode(inst, cfg, rng, pop, ctx, AhHistory(inst.dim, N_ALGORITHMS), pop.best_cost, None)
    ep.fe_init = pop.fe_used
    ep.done = ep._is_done()
    ep.state = ep._observe(probe=not ep.done)
    ep.done = ep._is_done()
    return ep.state, ep


def step(ep: Episode, action):
    return ep.step(action)


def finalize_rewards(adcs, fes_end: int, max_fes: int, scheme: str = "adjusted", best_costs=None) -> list:
    """Turn per-step descents into rewards.

    ``best_costs`` is the best-cost trace [c_0, c_1, ..., c_T] (c_0 the
    initial best); it is needed by the relative-descent schemes r2 and r4.
    """
    if fes_end <= 0:
        raise ValueError("fes_end must be positive")
    adcs = [float(a) for a in adcs]
    if scheme == "adjusted":
        k = max_fes / fes_end
        return [a * k for a in adcs]
    if scheme == "r1":
        return list(adcs)
    if scheme == "r3":
        return [1.0 if a > 0 else 0.0 for a in adcs]
    if scheme in ("r2", "r4"):
        if best_costs is None or len(best_costs) != len(adcs) + 1:
            raise ValueError("r2/r4 need the best-cost trace of length T+1")
        rel = []
        for prev, cur in zip(best_costs[:-1], best_costs[1:]):
            rel.append((prev - cur) / prev if prev > 0 else 0.0)
        if scheme == "r2":
            return rel
        return [1.0 if r > R4_THRESHOLD else 0.0 for r in rel]
    raise ValueError(f"unknown reward scheme {scheme!r}")
