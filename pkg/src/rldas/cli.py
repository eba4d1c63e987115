"""Command-line entry point: ``rldas <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np


def _cmd_bench_gen(args) -> int:
    from .bench import generate_instance_set, save_instance_set

    classes = tuple(args.classes.split(",")) if args.classes else None
    iset = generate_instance_set(args.cls, args.dim, args.count, seed=args.seed, k_folds=args.folds,
                                 role=args.role, classes=classes)
    path = save_instance_set(iset, args.out)
    print(f"wrote {len(iset.instances)} instances to {path}")
    return 0


def _cmd_de_run(args) -> int:
    from .de_pool.runner import run_cli

    sys.stdout.write(run_cli(args.alg, args.cls, args.dim, args.maxfes, args.seed, args.delta))
    return 0


def _cmd_features_dump(args) -> int:
    from .features import features_cli

    sys.stdout.write(features_cli(args.cls, args.dim, args.seed, args.maxfes))
    return 0


def _load_config(args):
    from .harness.config import PROFILES, RunConfig, apply_env_overrides

    cfg = RunConfig.load(args.config) if args.config else PROFILES[args.profile]
    overrides = {k: getattr(args, k) for k in ("epochs", "seed", "workers", "out_dir") if getattr(args, k, None) is not None}
    cfg = cfg.with_(**overrides) if overrides else cfg
    return apply_env_overrides(cfg)


def _cmd_train(args) -> int:
    from .harness.train import train

    cfg = _load_config(args)
    res = train(cfg, resume=not args.fresh)
    print(f"trained {res.agent.epoch} epochs; checkpoints in {Path(cfg.out_dir) / 'checkpoints'}")
    return 0


def _report(records, out_dir, meta) -> None:
    from .harness.evaluate import result_table
    from .harness.report import emit_report, table_csv

    rows = result_table(records)
    manifest = emit_report(rows, records, out_dir, meta=meta)
    sys.stdout.write(table_csv(rows))
    print(f"manifest: {manifest}")


def _env_for(agent_dim: int, args):
    from .env import EnvConfig

    kw = {}
    if args.maxfes:
        kw["max_fes"] = args.maxfes
    if args.delta:
        kw["delta"] = args.delta
    return EnvConfig.for_dim(agent_dim, **kw)


def _out_dir(args, default: str) -> str:
    import os

    from .harness.config import ENV_OUT_DIR

    return args.out or os.environ.get(ENV_OUT_DIR) or default


def _workers(args) -> int:
    import os

    from .harness.config import ENV_WORKERS

    if args.workers is not None:
        return args.workers
    return int(os.environ.get(ENV_WORKERS, "1"))


def _cmd_eval(args) -> int:
    from .agent import PpoAgent
    from .bench import load_instance_set
    from .harness.evaluate import evaluate

    agent, _ = PpoAgent.load(args.checkpoint)
    iset = load_instance_set(args.set)
    env_cfg = _env_for(iset.dim, args)
    records = evaluate(agent, iset, env_cfg, args.runs, args.seed, _workers(args))
    _report(records, _out_dir(args, "runs/eval"), {"checkpoint": str(args.checkpoint), "set": str(args.set),
                                                  "runs": args.runs, "seed": args.seed})
    return 0


def _cmd_transfer(args) -> int:
    from .agent import PpoAgent
    from .bench import generate_instance_set, parse_class
    from .harness.evaluate import transfer_eval
    from .harness.train import episode_seed

    agent, _ = PpoAgent.load(args.checkpoint)
    cls = parse_class(args.target_class)
    target = generate_instance_set(cls, agent.dim, args.count, seed=episode_seed(args.seed, 3, cls), role="test")
    env_cfg = _env_for(agent.dim, args)
    records = transfer_eval(agent, target, env_cfg, args.runs, args.seed, _workers(args))
    _report(records, _out_dir(args, f"runs/transfer_C{cls}"), {"checkpoint": str(args.checkpoint),
                                                               "target_class": cls, "runs": args.runs})
    return 0


def _read_sample(path, column: str | None):
    import csv

    text = Path(path).read_text().strip().splitlines()
    try:
        return np.array([float(x) for x in text])
    except ValueError:
        rows = list(csv.DictReader(text))
        col = column or "final_cost"
        return np.array([float(r[col]) for r in rows])


def _cmd_stats(args) -> int:
    from .harness.stats import wilcoxon_rank_sum

    a = _read_sample(args.a, args.column)
    b = _read_sample(args.b, args.column)
    verdict, p = wilcoxon_rank_sum(a, b, args.alpha, lower_is_better=not args.higher_is_better)
    print(json.dumps({"verdict": verdict, "p_value": p, "n_a": len(a), "n_b": len(b)}, ensure_ascii=False))
    return 0


def _cmd_episode(args) -> int:
    from .agent import PpoAgent
    from .baselines import action_rng
    from .bench import make_instance
    from .env import EnvConfig, reset

    inst = make_instance(args.cls, args.dim, args.seed)
    cfg = EnvConfig.for_dim(args.dim)
    agent = PpoAgent.load(args.checkpoint)[0] if args.checkpoint else None
    if agent is None:
        cfg = cfg.with_(use_la=False)
    rng = action_rng(args.seed)
    state, ep = reset(inst, cfg, args.seed)
    while not ep.done:
        if agent is None:
            a = int(rng.integers(3))
        else:
            a = int(agent.act(state.la[None], state.ah[None], rng, greedy=True)[0][0])
        state, _, _, _ = ep.step(a)
    sys.stdout.write(ep.trace_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rldas", description="Dynamic algorithm selection over DE backbones.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="benchmark instance sets").add_subparsers(dest="bench_cmd", required=True)
    g = bench.add_parser("gen", help="generate and save an instance set")
    g.add_argument("--class", dest="cls", required=True)
    g.add_argument("--dim", type=int, default=10)
    g.add_argument("--count", type=int, default=64)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--folds", type=int, default=4)
    g.add_argument("--role", default="train")
    g.add_argument("--classes", help="comma-separated class pool for the mixed class")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_bench_gen)

    de = sub.add_parser("de", help="run one backbone").add_subparsers(dest="de_cmd", required=True)
    r = de.add_parser("run", help="print the descent trace as CSV")
    r.add_argument("--alg", required=True, help="jde21 | madde | nl_shade_rsp")
    r.add_argument("--class", dest="cls", required=True)
    r.add_argument("--dim", type=int, default=10)
    r.add_argument("--maxfes", type=int, default=200_000)
    r.add_argument("--delta", type=int, default=2_500)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=_cmd_de_run)

    feat = sub.add_parser("features", help="landscape features").add_subparsers(dest="feat_cmd", required=True)
    d = feat.add_parser("dump", help="print the LA vector of a fresh population as CSV")
    d.add_argument("--class", dest="cls", required=True)
    d.add_argument("--dim", type=int, default=10)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--maxfes", type=int)
    d.set_defaults(func=_cmd_features_dump)

    t = sub.add_parser("train", help="train the agent")
    t.add_argument("--config", help="JSON run config")
    t.add_argument("--profile", default="desk", choices=("desk", "full"))
    t.add_argument("--epochs", type=int)
    t.add_argument("--seed", type=int)
    t.add_argument("--workers", type=int)
    t.add_argument("--out-dir", dest="out_dir")
    t.add_argument("--fresh", action="store_true", help="ignore existing checkpoints")
    t.set_defaults(func=_cmd_train)

    for name, helptext in (("eval", "evaluate a checkpoint"), ("transfer", "zero-shot transfer")):
        e = sub.add_parser(name, help=helptext)
        e.add_argument("--checkpoint", required=True)
        if name == "eval":
            e.add_argument("--set", required=True)
            e.set_defaults(func=_cmd_eval)
        else:
            e.add_argument("--target-class", required=True)
            e.add_argument("--count", type=int, default=32)
            e.set_defaults(func=_cmd_transfer)
        e.add_argument("--runs", type=int, default=30)
        e.add_argument("--seed", type=int, default=0)
        e.add_argument("--workers", type=int)
        e.add_argument("--maxfes", type=int)
        e.add_argument("--delta", type=int)
        e.add_argument("--out")

    s = sub.add_parser("stats", help="rank-sum test between two samples")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--column")
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--higher-is-better", action="store_true")
    s.set_defaults(func=_cmd_stats)

    ep = sub.add_parser("episode", help="print one episode trace as CSV")
    ep.add_argument("--class", dest="cls", required=True)
    ep.add_argument("--dim", type=int, default=10)
    ep.add_argument("--seed", type=int, default=0)
    ep.add_argument("--checkpoint", help="greedy agent; random selection when omitted")
    ep.set_defaults(func=_cmd_episode)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
