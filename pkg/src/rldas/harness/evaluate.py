"""Seeded evaluation of RL-DAS and the comparators, result tables and transfer."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..agent import PpoAgent
from ..baselines import (
    AS_STAR,
    BACKBONE_NAMES,
    RAND_DAS,
    RL_DAS,
    EpisodeResult,
    as_star,
    run_agent,
    run_rand_das,
    run_single,
)
from ..bench import InstanceSet
from ..env import EnvConfig
from .parallel import ordered_map
from .stats import wilcoxon_rank_sum

METHODS = (RL_DAS, RAND_DAS) + BACKBONE_NAMES
TABLE_ORDER = METHODS + (AS_STAR,)


def run_seed(master: int, inst_idx: int, run: int) -> int:
    """Shared by every method for the same (instance, run): equal initial populations."""
    ss = np.random.SeedSequence([int(master), int(inst_idx), int(run), 7])
    return int(ss.generate_state(1, np.uint64)[0] >> 1)


@dataclass
class RunRecord:
    method: str
    instance: int
    problem_class: int
    run: int
    result: EpisodeResult


_CTX = {}


def _init(agent, iset, env_cfg, master):
    _CTX.update(agent=agent, iset=iset, env_cfg=env_cfg, master=master)


def _run_task(task):
    method, i, r = task
    inst = _CTX["iset"].instances[i]
    seed = run_seed(_CTX["master"], i, r)
    cfg = _CTX["env_cfg"]
    if method == RL_DAS:
        return run_agent(_CTX["agent"], inst, cfg, seed)
    if method == RAND_DAS:
        return run_rand_das(inst, cfg, seed)
    return run_single(method, inst, cfg, seed)


def evaluate(agent: PpoAgent | None, iset: InstanceSet, env_cfg: EnvConfig, runs: int, seed: int = 0,
             workers: int = 1, methods=None) -> list:
    """Run every method ``runs`` times per instance; AS* is derived when all backbones ran."""
    methods = tuple(methods) if methods is not None else (METHODS if agent is not None else METHODS[1:])
    tasks = [(m, i, r) for i in range(len(iset.instances)) for r in range(runs) for m in methods]
    results = ordered_map(_run_task, tasks, workers, _init, (agent, iset, env_cfg, seed))
    records = []
    for (m, i, r), res in zip(tasks, results):
        records.append(RunRecord(m, i, iset.instances[i].problem_class, r, res))
    if all(b in methods for b in BACKBONE_NAMES):
        by_key = {}
        for rec in records:
            if rec.method in BACKBONE_NAMES:
                by_key.setdefault((rec.instance, rec.run), {})[rec.method] = rec
        for (i, r), recs in sorted(by_key.items()):
            best = as_star({m: recs[m].result for m in BACKBONE_NAMES})
            records.append(RunRecord(AS_STAR, i, recs[BACKBONE_NAMES[0]].problem_class, r, best))
    return records


def result_table(records, reference: str = RL_DAS, alpha: float = 0.05) -> list:
    """One row per (method, class): cost mean/std, descent, FEs, rank-sum verdict vs the reference."""
    groups = {}
    for rec in records:
        groups.setdefault((rec.method, rec.problem_class), []).append(rec.result)
    rows = []
    methods = [m for m in TABLE_ORDER if any(k[0] == m for k in groups)]
    classes = sorted({k[1] for k in groups})
    for m in methods:
        for c in classes:
            res = groups.get((m, c))
            if not res:
                continue
            costs = np.array([r.final_cost for r in res])
            desc = np.array([r.descent for r in res])
            fes = np.array([r.fe_end for r in res])
            mark, p = "", float("nan")
            ref = groups.get((reference, c))
            if m != reference and ref and len(ref) >= 5 and len(res) >= 5:
                mark, p = wilcoxon_rank_sum(costs, [r.final_cost for r in ref], alpha)
            rows.append({
                "method": m,
                "class": c,
                "n": len(res),
                "mean_cost": float(costs.mean()),
                "std_cost": float(costs.std()),
                "mean_descent": float(desc.mean()),
                "median_descent": float(np.median(desc)),
                "mean_fes": float(fes.mean()),
                "sig": mark,
                "p_value": p,
            })
    return rows


def descents(records, method: str) -> np.ndarray:
    return np.array([r.result.descent for r in records if r.method == method])


def per_instance_medians(records, method: str) -> np.ndarray:
    by_inst = {}
    for r in records:
        if r.method == method:
            by_inst.setdefault(r.instance, []).append(r.result.descent)
    return np.array([np.median(v) for _, v in sorted(by_inst.items())])


def transfer_eval(agent: PpoAgent, target: InstanceSet, env_cfg: EnvConfig, runs: int, seed: int = 0,
                  workers: int = 1) -> list:
    """Zero-shot evaluation on another class set; parameters are not touched."""
    return evaluate(agent, target, env_cfg, runs, seed, workers)
