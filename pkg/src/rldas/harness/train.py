"""PPO training over batched instances with epoch-level checkpoints.

Every random stream is derived from (seed, epoch, batch), so a run resumed
from an epoch checkpoint reproduces the uninterrupted run exactly.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..agent import PpoAgent, Trajectory
from ..bench import InstanceSet, generate_instance_set, load_instance_set, save_instance_set
from ..de_pool import N_ALGORITHMS
from .config import RunConfig
from .parallel import make_pool

log = logging.getLogger(__name__)

LOG_FIELDS = ["epoch", "train_descent", "val_descent", "actor_loss", "critic_loss", "updates"]


def episode_seed(*parts) -> int:
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)[0] >> 1)


def instance_sets(cfg: RunConfig) -> tuple[InstanceSet, InstanceSet | None, InstanceSet]:
    """Load the configured sets or generate them deterministically from the seed."""
    cls = cfg.train_class()
    pool = cfg.classes if len(cfg.classes) > 1 else None
    train = (load_instance_set(cfg.train_set) if cfg.train_set else
             generate_instance_set(cls, cfg.dim, cfg.n_train, seed=episode_seed(cfg.seed, 1), role="train", classes=pool))
    val = None
    if cfg.val_set:
        val = load_instance_set(cfg.val_set)
    elif cfg.n_val > 0:
        val = generate_instance_set(cls, cfg.dim, max(cfg.n_val, 4), seed=episode_seed(cfg.seed, 2), role="val", classes=pool)
    test = load_instance_set(cfg.test_set) if cfg.test_set else test_set_for(cfg)
    return train, val, test


def test_set_for(cfg: RunConfig, target=None) -> InstanceSet:
    classes = cfg.target_classes() if target is None else (target,)
    from ..bench import MIXED

    cls = classes[0] if len(classes) == 1 else MIXED
    pool = classes if len(classes) > 1 else None
    return generate_instance_set(cls, cfg.dim, cfg.n_test, seed=episode_seed(cfg.seed, 3, cls), role="test", classes=pool)


def rollout(agent: PpoAgent, pool, insts, env_cfg, seeds, rng, greedy: bool = False):
    """Run a batch of episodes in lockstep; returns (trajectories, summaries)."""
    keys = list(range(len(insts)))
    started = pool.reset([(k, insts[k], env_cfg, seeds[k]) for k in keys])
    states = {k: s for k, (s, _) in started.items()}
    buf = {k: {"la": [], "ah": [], "a": [], "logp": []} for k in keys}
    active = [k for k in keys if not started[k][1]]
    while active:
        la = np.stack([states[k].la for k in active])
        ah = np.stack([states[k].ah for k in active])
        acts, logps = agent.act(la, ah, rng, greedy=greedy)
        for k, a, lp, x, y in zip(active, acts, logps, la, ah):
            b = buf[k]
            b["la"].append(x)
            b["ah"].append(y)
            b["a"].append(int(a))
            b["logp"].append(float(lp))
        out = pool.step({k: int(a) for k, a in zip(active, acts)})
        nxt = []
        for k in active:
            s, _, done = out[k]
            states[k] = s
            if not done:
                nxt.append(k)
        active = nxt
    summaries = pool.finish(keys)
    trajs = []
    for k in keys:
        b = buf[k]
        if not b["a"]:
            continue
        trajs.append(Trajectory(np.array(b["la"]), np.array(b["ah"]), np.array(b["a"], dtype=np.int64),
                                np.array(b["logp"]), np.asarray(summaries[k]["rewards"], dtype=float)))
    return trajs, [summaries[k] for k in keys]


@dataclass
class TrainResult:
    agent: PpoAgent
    checkpoints: list = field(default_factory=list)
    log: list = field(default_factory=list)


def checkpoint_path(out_dir, epoch: int) -> Path:
    return Path(out_dir) / "checkpoints" / f"epoch_{epoch:04d}.ckpt"


def latest_checkpoint(out_dir) -> Path | None:
    ckpts = sorted((Path(out_dir) / "checkpoints").glob("epoch_*.ckpt"))
    return ckpts[-1] if ckpts else None


def _read_log(path: Path) -> list:
    if not path.exists():
        return []
    with path.open() as fh:
        return list(csv.DictReader(fh))


def train(cfg: RunConfig, resume: bool = True, stop_after: int | None = None) -> TrainResult:
    """Train for ``cfg.epochs`` epochs; ``stop_after`` ends early (simulates an interruption)."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(cfg.to_json())
    train_set, val_set, test_set = instance_sets(cfg)
    for name, iset in (("train", train_set), ("val", val_set), ("test", test_set)):
        if iset is not None:
            save_instance_set(iset, out / "sets" / f"{name}.rset")

    env_cfg = cfg.env_config()
    last = latest_checkpoint(out) if resume else None
    if last is not None:
        agent, _ = PpoAgent.load(last)
        log.info("resuming from %s (epoch %d)", last, agent.epoch)
    else:
        agent = PpoAgent(cfg.dim, N_ALGORITHMS, cfg.ppo_config(), seed=episode_seed(cfg.seed, 4))
    log_path = out / "train_log.csv"
    rows = _read_log(log_path)[: agent.epoch]
    result = TrainResult(agent, [], rows)

    pool = make_pool(cfg.workers)
    try:
        n = len(train_set.instances)
        done_epochs = 0
        while agent.epoch < cfg.epochs:
            epoch = agent.epoch
            order = np.random.default_rng([cfg.seed, epoch, 1]).permutation(n)
            descents, reports = [], []
            for b, start in enumerate(range(0, n, cfg.batch_size)):
                idx = order[start : start + cfg.batch_size]
                seeds = [episode_seed(cfg.seed, epoch, int(i), 5) for i in idx]
                rng = np.random.default_rng([cfg.seed, epoch, b, 2])
                trajs, summ = rollout(agent, pool, [train_set.instances[i] for i in idx], env_cfg, seeds, rng)
                descents += [s["descent"] for s in summ]
                if trajs:
                    reports.append(agent.update(trajs))
            agent.epoch = epoch + 1
            val_descent = float("nan")
            if val_set is not None:
                vseeds = [episode_seed(cfg.seed, 6, i) for i in range(len(val_set.instances))]
                _, vs = rollout(agent, pool, val_set.instances, env_cfg, vseeds, None, greedy=True)
                val_descent = float(np.mean([s["descent"] for s in vs]))
            row = {
                "epoch": agent.epoch,
                "train_descent": repr(float(np.mean(descents))),
                "val_descent": repr(val_descent),
                "actor_loss": repr(float(np.mean([r["actor_loss"] for r in reports])) if reports else 0.0),
                "critic_loss": repr(float(np.mean([r["critic_loss"] for r in reports])) if reports else 0.0),
                "updates": agent.n_updates,
            }
            rows.append(row)
            with log_path.open("w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=LOG_FIELDS, lineterminator="\n")
                w.writeheader()
                w.writerows(rows)
            path = agent.save(checkpoint_path(out, agent.epoch), {"run": cfg.name, "seed": cfg.seed})
            result.checkpoints.append(path)
            log.info("epoch %d: train descent %.3f, val descent %.3f", agent.epoch, float(np.mean(descents)), val_descent)
            done_epochs += 1
            if stop_after is not None and done_epochs >= stop_after:
                break
    finally:
        pool.close()
    result.log = rows
    return result
