"""Binary container for instance sets.

Layout::

    b"RLDASSET"                 8-byte magic
    uint32 LE                   format version
    uint32 LE                   header length in bytes
    header                      UTF-8 JSON (set metadata + per-instance records)
    payload                     per instance: shifts, rotations as float64 LE,
                                then the permutation as int64 LE (hybrids only)
    uint32 LE                   CRC32 of the payload

Floats are stored raw, so a round trip is bit-exact.
"""
from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path

import numpy as np

from .problems import InstanceSet, InstanceSpec, Recipe

MAGIC = b"RLDASSET"
VERSION = 1


class InstanceSetFormatError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class InstanceSetVersionError(ValueError):
    pass


def dumps_instance_set(iset: InstanceSet) -> bytes:
    records = []
    chunks = []
    for inst, fold in zip(iset.instances, iset.folds):
        records.append(
            {
                "class": inst.problem_class,
                "seed": str(inst.seed),
                "fold": int(fold),
                "n_shifts": int(inst.shifts.shape[0]),
                "has_perm": inst.perm is not None,
                "recipe": inst.recipe.to_dict(),
                "optimum_cost": inst.optimum_cost,
                "bounds": [inst.lower, inst.upper],
            }
        )
        chunks.append(np.ascontiguousarray(inst.shifts, dtype="<f8").tobytes())
        chunks.append(np.ascontiguousarray(inst.rotations, dtype="<f8").tobytes())
        if inst.perm is not None:
            chunks.append(np.ascontiguousarray(inst.perm, dtype="<i8").tobytes())
    header = {
        "class": iset.problem_class,
        "dim": iset.dim,
        "count": len(iset.instances),
        "k_folds": iset.k_folds,
        "master_seed": str(iset.master_seed),
        "role": iset.role,
        "classes": list(iset.classes) if iset.classes is not None else None,
        "meta": iset.meta,
        "instances": records,
    }
    hbytes = json.dumps(header, sort_keys=True).encode("utf-8")
    payload = b"".join(chunks)
    return (
        MAGIC
        + struct.pack("<II", VERSION, len(hbytes))
        + hbytes
        + payload
        + struct.pack("<I", zlib.crc32(payload))
    )


def loads_instance_set(data: bytes) -> InstanceSet:
    if len(data) < 16:
        raise InstanceSetFormatError("file too short for preamble", len(data))
    if data[:8] != MAGIC:
        raise InstanceSetFormatError("bad magic", 0)
    version, hlen = struct.unpack_from("<II", data, 8)
    if version != VERSION:
        raise InstanceSetVersionError(f"instance set version {version}, expected {VERSION}")
    pos = 16
    if pos + hlen > len(data):
        raise InstanceSetFormatError("truncated header", len(data))
    try:
        header = json.loads(data[pos : pos + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InstanceSetFormatError(f"malformed header: {exc}", pos) from exc
    pos += hlen
    payload_start = pos
    dim = int(header["dim"])
    instances = []
    folds = []
    for rec in header["instances"]:
        k = int(rec["n_shifts"])
        parts = [("shifts", "<f8", (k, dim)), ("rotations", "<f8", (k, dim, dim))]
        if rec["has_perm"]:
            parts.append(("perm", "<i8", (dim,)))
        arrays = {}
        for name, dtype, shape in parts:
            nbytes = int(np.prod(shape)) * 8
            if pos + nbytes > len(data) - 4:
                raise InstanceSetFormatError(f"truncated payload reading {name}", pos)
            raw = np.frombuffer(data, dtype=dtype, count=int(np.prod(shape)), offset=pos)
            native = np.float64 if dtype == "<f8" else np.int64
            arrays[name] = raw.reshape(shape).astype(native)
            pos += nbytes
        lo, hi = rec["bounds"]
        instances.append(
            InstanceSpec(
                problem_class=int(rec["class"]),
                dim=dim,
                shifts=arrays["shifts"],
                rotations=arrays["rotations"],
                recipe=Recipe.from_dict(rec["recipe"]),
                seed=int(rec["seed"]),
                perm=arrays.get("perm"),
                optimum_cost=float(rec["optimum_cost"]),
                lower=float(lo),
                upper=float(hi),
            )
        )
        folds.append(int(rec["fold"]))
    if pos + 4 != len(data):
        raise InstanceSetFormatError("payload length does not match header", pos)
    (crc,) = struct.unpack_from("<I", data, pos)
    if crc != zlib.crc32(data[payload_start:pos]):
        raise InstanceSetFormatError("payload checksum mismatch", pos)
    classes = header.get("classes")
    return InstanceSet(
        instances=instances,
        folds=np.asarray(folds, dtype=np.int64),
        problem_class=int(header["class"]),
        dim=dim,
        master_seed=int(header["master_seed"]),
        k_folds=int(header["k_folds"]),
        role=header["role"],
        classes=tuple(classes) if classes is not None else None,
        meta=header.get("meta", {}),
    )


def save_instance_set(iset: InstanceSet, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(dumps_instance_set(iset))
    tmp.replace(path)
    return path


def load_instance_set(path) -> InstanceSet:
    return loads_instance_set(Path(path).read_bytes())
