"""Context memory shared by the candidate optimizers.

The memory is a nested dictionary: one entry per algorithm holding its
private adaptive state, and a ``common`` entry for state several algorithms
read and write (per-individual F/CR, SHADE memories, the elite archive).
``restore`` hands out deep copies; ``save_context`` writes a run state back
and returns a new memory, so a memory is never mutated in place.
"""
from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field

import numpy as np

N_MIN, N_MAX = 30, 170
ARCHIVE_RATE = 2.3
MEMORY_PER_DIM = 20
F_INIT, CR_INIT = 0.5, 0.9
MEMORY_INIT = 0.5


class AlgorithmId(enum.IntEnum):
    """Action index of each candidate (0-based)."""

    JDE21 = 0
    MADDE = 1
    NL_SHADE_RSP = 2

    @classmethod
    def parse(cls, value) -> "AlgorithmId":
        if isinstance(value, AlgorithmId):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(int(value))
        key = str(value).strip().upper().replace("-", "_")
        aliases = {"JDE21": cls.JDE21, "MADDE": cls.MADDE, "NL_SHADE_RSP": cls.NL_SHADE_RSP,
                   "NLSHADE_RSP": cls.NL_SHADE_RSP, "NLSHADERSP": cls.NL_SHADE_RSP}
        if key not in aliases:
            raise ValueError(f"unknown algorithm {value!r}")
        return aliases[key]

    @property
    def label(self) -> str:
        return {0: "JDE21", 1: "MadDE", 2: "NL-SHADE-RSP"}[int(self)]


N_ALGORITHMS = len(AlgorithmId)


def archive_capacity(n: int) -> int:
    # integer form: floor(2.3 * n) in floating point loses one slot for n = 50, 100, 170
    return (23 * int(n)) // 10


def _default_params(alg: AlgorithmId, max_fes: int) -> dict:
    if alg is AlgorithmId.JDE21:
        return {
            "tau1": 0.1,
            "tau2": 0.1,
            "age_limit": max_fes // 10,
            "eps": 1e-12,
            "my_eqs": 0.25,
            # live counters carried across switches
            "age": 0,
            "n_big_reset": 0,
            "n_small_reset": 0,
        }
    if alg is AlgorithmId.MADDE:
        return {"p_m": np.full(3, 1.0 / 3.0), "p_best": 0.18, "p_qbx": 0.01}
    return {"n_a": 0, "p_a": 0.5}


@dataclass
class ContextMemory:
    algorithms: dict
    common: dict
    dim: int

    def __getitem__(self, key):
        if isinstance(key, str) and key.lower() == "common":
            return self.common
        return self.algorithms[AlgorithmId.parse(key)]

    def copy(self) -> "ContextMemory":
        return copy.deepcopy(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ContextMemory):
            return NotImplemented
        return (
            self.dim == other.dim
            and _deep_equal(self.algorithms, other.algorithms)
            and _deep_equal(self.common, other.common)
        )


@dataclass
class DeRunState:
    """Live state of one algorithm: its own parameters plus the common block."""

    algorithm: AlgorithmId
    params: dict
    common: dict
    dim: int
    info: dict = field(default_factory=dict)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DeRunState):
            return NotImplemented
        return (
            self.algorithm == other.algorithm
            and self.dim == other.dim
            and _deep_equal(self.params, other.params)
            and _deep_equal(self.common, other.common)
        )


def _deep_equal(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        a, b = np.asarray(a), np.asarray(b)
        return a.shape == b.shape and a.dtype == b.dtype and np.array_equal(a, b)
    if isinstance(a, dict):
        return (
            isinstance(b, dict)
            and a.keys() == b.keys()
            and all(_deep_equal(a[k], b[k]) for k in a)
        )
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(_deep_equal(x, y) for x, y in zip(a, b))
    return type(a) is type(b) and a == b


def init_context(n: int, dim: int, max_fes: int = 200_000) -> ContextMemory:
    """Fresh memory for a population of ``n`` individuals in ``dim`` dimensions."""
    if n < 1 or dim < 1:
        raise ValueError("n and dim must be positive")
    h = MEMORY_PER_DIM * dim
    common = {
        "S_F": np.full(n, F_INIT),
        "S_Cr": np.full(n, CR_INIT),
        "M_F": np.full(h, MEMORY_INIT),
        "M_Cr": np.full(h, MEMORY_INIT),
        "mem_pos": 0,
        "archive": np.empty((0, dim)),
        "archive_costs": np.empty(0),
        "archive_capacity": archive_capacity(n),
    }
    algorithms = {alg: _default_params(alg, max_fes) for alg in AlgorithmId}
    return ContextMemory(algorithms, common, dim)


def restore(ctx: ContextMemory, alg) -> DeRunState:
    """Run state for ``alg`` warm-started from ``ctx``. ``ctx`` is not touched."""
    alg = AlgorithmId.parse(alg)
    return DeRunState(alg, copy.deepcopy(ctx.algorithms[alg]), copy.deepcopy(ctx.common), ctx.dim)


def save_context(ctx: ContextMemory, state: DeRunState) -> ContextMemory:
    """New memory with ``state``'s algorithm entry and the common block replaced."""
    algorithms = dict(ctx.algorithms)
    algorithms[state.algorithm] = copy.deepcopy(state.params)
    return ContextMemory(algorithms, copy.deepcopy(state.common), ctx.dim)
