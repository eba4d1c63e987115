"""CSV artifacts plus a manifest of content hashes."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

from ..de_pool import AlgorithmId

TABLE_FIELDS = ["method", "class", "n", "mean_cost", "std_cost", "mean_descent", "median_descent",
                "mean_fes", "sig", "p_value"]


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def _csv(rows, fields) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([_fmt(row[f]) for f in fields])
    return buf.getvalue()


def table_csv(rows) -> str:
    return _csv(rows, TABLE_FIELDS)


def runs_csv(records) -> str:
    fields = ["method", "instance", "class", "run", "seed", "cost0", "final_cost", "descent", "fe_end"]
    rows = [{"method": r.method, "instance": r.instance, "class": r.problem_class, "run": r.run,
             "seed": r.result.seed, "cost0": r.result.cost0, "final_cost": r.result.final_cost,
             "descent": r.result.descent, "fe_end": r.result.fe_end} for r in records]
    return _csv(rows, fields)


def curves_csv(records) -> str:
    """Best cost after every step of every episode (non-increasing per episode)."""
    fields = ["method", "instance", "run", "step", "fe_used", "best_cost"]
    rows = []
    for r in records:
        rows.append({"method": r.method, "instance": r.instance, "run": r.run, "step": -1,
                     "fe_used": 0, "best_cost": r.result.cost0})
        for step, _, fe, best in r.result.trace:
            rows.append({"method": r.method, "instance": r.instance, "run": r.run, "step": step,
                         "fe_used": fe, "best_cost": best})
    return _csv(rows, fields)


def action_histogram_csv(records, method: str) -> str:
    """Per step: how many episodes picked each backbone; ``finished`` counts episodes already over."""
    eps = [r.result.actions for r in records if r.method == method]
    horizon = max((len(a) for a in eps), default=0)
    labels = [a.label for a in AlgorithmId]
    fields = ["step"] + labels + ["finished"]
    rows = []
    for t in range(horizon):
        counts = dict.fromkeys(labels, 0)
        finished = 0
        for a in eps:
            if t < len(a):
                counts[labels[a[t]]] += 1
            else:
                finished += 1
        rows.append({"step": t, **counts, "finished": finished})
    return _csv(rows, fields)


def emit_report(table_rows, records, out_dir, extra_files: dict | None = None, meta: dict | None = None) -> Path:
    """Write table/runs/curves/action CSVs and ``manifest.json``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "table.csv": table_csv(table_rows),
        "runs.csv": runs_csv(records),
        "curves.csv": curves_csv(records),
    }
    for method in sorted({r.method for r in records}):
        if any(r.result.actions for r in records if r.method == method):
            slug = method.lower().replace("*", "star").replace("-", "_")
            files[f"actions_{slug}.csv"] = action_histogram_csv(records, method)
    files.update(extra_files or {})
    entries = []
    for name, text in files.items():
        data = text.encode("utf-8")
        (out / name).write_bytes(data)
        entries.append({"file": name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})
    manifest = {"files": entries, "meta": meta or {}}
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return path
