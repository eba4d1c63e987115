"""Lockstep episode pools and an ordered task map.

Episodes are addressed by integer keys. A pool owns its episodes; callers
send one action per active key and get back the transitions. Results depend
only on keys, seeds and actions, never on how keys are spread over workers.
"""
from __future__ import annotations

import multiprocessing as mp

from ..env import reset


def _summary(ep) -> dict:
    return {
        "rewards": ep.rewards(),
        "descent": ep.descent() * 100.0,
        "fe_end": ep.pop.fe_used,
        "final_cost": ep.pop.best_cost,
        "cost0": ep.cost0,
        "steps": ep.t,
    }


class SerialPool:
    def __init__(self):
        self.episodes = {}

    def reset(self, jobs) -> dict:
        out = {}
        for key, inst, cfg, seed in jobs:
            state, ep = reset(inst, cfg, seed)
            self.episodes[key] = ep
            out[key] = (state, ep.done)
        return out

    def step(self, actions: dict) -> dict:
        out = {}
        for key, a in actions.items():
            state, adc, done, _ = self.episodes[key].step(a)
            out[key] = (state, adc, done)
        return out

    def finish(self, keys) -> dict:
        return {k: _summary(self.episodes.pop(k)) for k in keys}

    def close(self) -> None:
        self.episodes.clear()


def _worker(conn) -> None:
    pool = SerialPool()
    while True:
        cmd, payload = conn.recv()
        if cmd == "close":
            conn.close()
            return
        try:
            conn.send(("ok", getattr(pool, cmd)(payload)))
        except Exception as exc:  # surfaced in the parent
            conn.send(("error", repr(exc)))


class ProcessPool:
    """Episodes spread over ``workers`` subprocesses, key % workers."""

    def __init__(self, workers: int):
        ctx = mp.get_context("fork")
        self.workers = workers
        self.conns, self.procs = [], []
        for _ in range(workers):
            parent, child = ctx.Pipe()
            p = ctx.Process(target=_worker, args=(child,), daemon=True)
            p.start()
            child.close()
            self.conns.append(parent)
            self.procs.append(p)

    def _scatter(self, cmd, items, part) -> dict:
        chunks = [[] for _ in range(self.workers)]
        for item in items:
            chunks[part(item) % self.workers].append(item)
        used = []
        for w, chunk in enumerate(chunks):
            if chunk:
                self.conns[w].send((cmd, chunk if cmd != "step" else dict(chunk)))
                used.append(w)
        out = {}
        for w in used:
            status, payload = self.conns[w].recv()
            if status != "ok":
                raise RuntimeError(f"worker {w}: {payload}")
            out.update(payload)
        return out

    def reset(self, jobs) -> dict:
        return self._scatter("reset", list(jobs), lambda j: j[0])

    def step(self, actions: dict) -> dict:
        return self._scatter("step", list(actions.items()), lambda kv: kv[0])

    def finish(self, keys) -> dict:
        return self._scatter("finish", list(keys), lambda k: k)

    def close(self) -> None:
        for c in self.conns:
            try:
                c.send(("close", None))
                c.close()
            except (BrokenPipeError, OSError):
                pass
        for p in self.procs:
            p.join(timeout=5)


def make_pool(workers: int):
    return SerialPool() if workers <= 1 else ProcessPool(workers)


def ordered_map(func, tasks, workers: int, initializer=None, initargs=()):
    """``[func(t) for t in tasks]`` over a process pool; order preserved."""
    tasks = list(tasks)
    if workers <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [func(t) for t in tasks]
    ctx = mp.get_context("fork")
    with ctx.Pool(workers, initializer=initializer, initargs=initargs) as pool:
        return pool.map(func, tasks, chunksize=max(1, len(tasks) // (4 * workers)))
