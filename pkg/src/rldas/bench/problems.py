"""Augmented CEC2021-style problem instances.

An instance is one of ten problem classes with its own random shift vectors,
rotation matrices and (for hybrids) a coordinate permutation. Costs are
reported as error to the known optimum, so every instance has optimum 0.

Randomness uses numpy's PCG64 bit generator. Per-instance seeds are spawned
from the master seed with ``SeedSequence.spawn``, so a set is reproducible
from (class, dim, count, seed) alone.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import functions as fn

LOWER, UPPER = -100.0, 100.0
SHIFT_RANGE = 80.0


class Family(str, enum.Enum):
    UNIMODAL = "unimodal"
    BASIC = "basic"
    HYBRID = "hybrid"
    COMPOSITION = "composition"


@dataclass(frozen=True)
class Recipe:
    """How a class combines basis functions."""

    family: Family
    components: tuple[str, ...]
    partition: tuple[float, ...] = ()  # hybrid: fraction of coordinates per component
    sigmas: tuple[float, ...] = ()  # composition: weight widths
    lambdas: tuple[float, ...] = ()  # composition: component height scales
    biases: tuple[float, ...] = ()  # composition: component offsets

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "components": list(self.components),
            "partition": list(self.partition),
            "sigmas": list(self.sigmas),
            "lambdas": list(self.lambdas),
            "biases": list(self.biases),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Recipe":
        return cls(
            family=Family(d["family"]),
            components=tuple(d["components"]),
            partition=tuple(float(v) for v in d["partition"]),
            sigmas=tuple(float(v) for v in d["sigmas"]),
            lambdas=tuple(float(v) for v in d["lambdas"]),
            biases=tuple(float(v) for v in d["biases"]),
        )

    @property
    def n_shifts(self) -> int:
        return len(self.components) if self.family is Family.COMPOSITION else 1


RECIPES: dict[int, Recipe] = {
    1: Recipe(Family.UNIMODAL, ("bent_cigar",)),
    2: Recipe(Family.BASIC, ("schwefel",)),
    3: Recipe(Family.BASIC, ("lunacek_bi_rastrigin",)),
    4: Recipe(Family.BASIC, ("griewank_rosenbrock",)),
    5: Recipe(Family.HYBRID, ("schwefel", "rastrigin", "ellipsoid"), partition=(0.3, 0.3, 0.4)),
    6: Recipe(
        Family.HYBRID,
        ("expanded_schaffer_f6", "hgbat", "rosenbrock", "schwefel"),
        partition=(0.2, 0.2, 0.3, 0.3),
    ),
    7: Recipe(
        Family.HYBRID,
        ("expanded_schaffer_f6", "hgbat", "rosenbrock", "schwefel", "ellipsoid"),
        partition=(0.1, 0.2, 0.2, 0.2, 0.3),
    ),
    8: Recipe(
        Family.COMPOSITION,
        ("rastrigin", "griewank", "schwefel"),
        sigmas=(10.0, 20.0, 30.0),
        lambdas=(1.0, 10.0, 1.0),
        biases=(0.0, 100.0, 200.0),
    ),
    9: Recipe(
        Family.COMPOSITION,
        ("ackley", "ellipsoid", "griewank", "rastrigin"),
        sigmas=(10.0, 20.0, 30.0, 40.0),
        lambdas=(10.0, 1e-6, 10.0, 1.0),
        biases=(0.0, 100.0, 200.0, 300.0),
    ),
    10: Recipe(
        Family.COMPOSITION,
        ("rastrigin", "happycat", "ackley", "discus", "rosenbrock"),
        sigmas=(10.0, 20.0, 30.0, 40.0, 50.0),
        lambdas=(10.0, 1.0, 10.0, 1e-6, 1.0),
        biases=(0.0, 100.0, 200.0, 300.0, 400.0),
    ),
}

MIXED = 11
CLASS_NAMES = {i: f"C{i}" for i in range(1, 12)}


def parse_class(name) -> int:
    """Accept 'C2', '2' or 2."""
    if isinstance(name, (int, np.integer)):
        cid = int(name)
    else:
        s = str(name).strip().upper()
        cid = int(s[1:] if s.startswith(("C", "F")) else s)
    if not 1 <= cid <= MIXED:
        raise ValueError(f"unknown problem class {name!r}")
    return cid


def family_of(cid: int) -> Family:
    return RECIPES[cid].family


def split_sizes(partition, dim: int) -> list[int]:
    """Hybrid group sizes: ceil for all but the last, which takes the rest."""
    sizes = [int(np.ceil(p * dim)) for p in partition[:-1]]
    sizes.append(dim - sum(sizes))
    return sizes


def gram_schmidt_rotation(seed: int, dim: int) -> np.ndarray:
    """Orthonormal matrix from Gram-Schmidt on i.i.d. standard normal columns."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    attempt = 0
    while True:
        rng = np.random.Generator(np.random.PCG64([int(seed), attempt]))
        A = rng.standard_normal((dim, dim))
        Q = np.empty_like(A)
        ok = True
        for j in range(dim):
            v = A[:, j].copy()
            # two passes of modified Gram-Schmidt keep orthogonality near eps
            for _ in range(2):
                for k in range(j):
                    v -= (Q[:, k] @ v) * Q[:, k]
            norm = np.linalg.norm(v)
            if norm < 1e-12:
                ok = False
                break
            Q[:, j] = v / norm
        if ok:
            return Q
        attempt += 1


def sample_shift(seed: int, dim: int) -> np.ndarray:
    """Uniform shift vector in [-80, 80]^dim."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    return rng.uniform(-SHIFT_RANGE, SHIFT_RANGE, size=dim)


@dataclass(eq=False)
class InstanceSpec:
    """One augmented instance.

    ``shifts`` has one row per component (one row unless composition) and
    ``rotations`` one matrix per component; row 0 is the global optimum.
    """

    problem_class: int
    dim: int
    shifts: np.ndarray
    rotations: np.ndarray
    recipe: Recipe
    seed: int
    perm: np.ndarray | None = None
    optimum_cost: float = 0.0
    lower: float = LOWER
    upper: float = UPPER

    @property
    def shift(self) -> np.ndarray:
        return self.shifts[0]

    @property
    def rotation(self) -> np.ndarray:
        return self.rotations[0]

    @property
    def family(self) -> Family:
        return self.recipe.family

    @property
    def name(self) -> str:
        return CLASS_NAMES[self.problem_class]

    def __eq__(self, other) -> bool:
        if not isinstance(other, InstanceSpec):
            return NotImplemented
        same_perm = (self.perm is None and other.perm is None) or (
            self.perm is not None
            and other.perm is not None
            and np.array_equal(self.perm, other.perm)
        )
        return (
            self.problem_class == other.problem_class
            and self.dim == other.dim
            and self.seed == other.seed
            and self.recipe == other.recipe
            and same_perm
            and np.array_equal(self.shifts, other.shifts)
            and np.array_equal(self.rotations, other.rotations)
            and self.lower == other.lower
            and self.upper == other.upper
        )

    def __call__(self, x):
        return evaluate(self, x)


def make_instance(problem_class, dim: int, seed: int, classes=None) -> InstanceSpec:
    """Build one instance deterministically from its seed.

    For the mixed class the concrete class is drawn uniformly from
    ``classes`` (default C1-C10) using the instance's own stream.
    """
    cid = parse_class(problem_class)
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    if cid == MIXED:
        pool = list(classes) if classes is not None else list(range(1, 11))
        cid = int(pool[int(rng.integers(len(pool)))])
    recipe = RECIPES[cid]
    if recipe.family is Family.HYBRID and dim < len(recipe.components):
        raise ValueError(f"C{cid} needs dim >= {len(recipe.components)}")
    k = recipe.n_shifts
    sub = rng.integers(0, 2**63 - 1, size=2 * k)
    shifts = np.stack([sample_shift(int(sub[2 * j]), dim) for j in range(k)])
    rotations = np.stack([gram_schmidt_rotation(int(sub[2 * j + 1]), dim) for j in range(k)])
    perm = rng.permutation(dim).astype(np.int64) if recipe.family is Family.HYBRID else None
    return InstanceSpec(cid, dim, shifts, rotations, recipe, int(seed), perm)


def _basis(name: str, diff: np.ndarray, rot: np.ndarray, shift: np.ndarray) -> np.ndarray:
    """Scale, rotate and evaluate one basis function at ``diff = x - o``."""
    if name == "lunacek_bi_rastrigin":
        return fn.lunacek_bi_rastrigin(diff * (10.0 / 100.0), shift, rot)
    func, rate = fn.BASIS[name]
    return func((diff * rate) @ rot.T)


def _hybrid(inst: InstanceSpec, x: np.ndarray) -> np.ndarray:
    z = (x - inst.shift) @ inst.rotation.T
    y = z[:, inst.perm]
    total = np.zeros(x.shape[0])
    start = 0
    for name, size in zip(inst.recipe.components, split_sizes(inst.recipe.partition, inst.dim)):
        if size <= 0:
            continue
        func, rate = fn.BASIS[name]
        total += func(y[:, start : start + size] * rate)
        start += size
    return total


def _composition(inst: InstanceSpec, x: np.ndarray) -> np.ndarray:
    r = inst.recipe
    n, d = x.shape
    k = len(r.components)
    fits = np.empty((k, n))
    weights = np.empty((k, n))
    for i, name in enumerate(r.components):
        diff = x - inst.shifts[i]
        fits[i] = r.lambdas[i] * _basis(name, diff, inst.rotations[i], inst.shifts[i]) + r.biases[i]
        sq = np.sum(diff**2, axis=1)
        with np.errstate(divide="ignore"):
            weights[i] = np.where(
                sq > 0.0,
                np.exp(-sq / (2.0 * d * r.sigmas[i] ** 2)) / np.sqrt(np.where(sq > 0.0, sq, 1.0)),
                np.inf,
            )
    hit = np.isinf(weights)
    # a point sitting exactly on a component optimum takes that component only
    w = np.where(hit.any(axis=0), hit.astype(float), weights)
    w[:, w.max(axis=0) == 0.0] = 1.0
    return np.sum((w / w.sum(axis=0)) * fits, axis=0)


def evaluate(inst: InstanceSpec, x) -> np.ndarray | float:
    """Error to the optimum of ``inst`` at ``x`` (a point or an (n, D) batch).

    Out-of-bounds points are evaluated as-is. No evaluation counter is kept.
    """
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 1
    X = arr[None, :] if single else arr
    if X.ndim != 2 or X.shape[1] != inst.dim:
        raise ValueError(f"expected points of dimension {inst.dim}, got shape {arr.shape}")
    fam = inst.recipe.family
    if fam is Family.HYBRID:
        f = _hybrid(inst, X)
    elif fam is Family.COMPOSITION:
        f = _composition(inst, X)
    else:
        f = _basis(inst.recipe.components[0], X - inst.shift, inst.rotation, inst.shift)
    f = np.maximum(f - inst.optimum_cost, 0.0)
    return float(f[0]) if single else f


@dataclass(eq=False)
class InstanceSet:
    instances: list[InstanceSpec]
    folds: np.ndarray
    problem_class: int
    dim: int
    master_seed: int
    k_folds: int
    role: str = "train"
    classes: tuple[int, ...] | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    def __getitem__(self, i):
        return self.instances[i]

    def fold(self, k: int) -> list[InstanceSpec]:
        return [inst for inst, f in zip(self.instances, self.folds) if f == k]

    def split(self, k: int) -> tuple[list[InstanceSpec], list[InstanceSpec]]:
        """(training, validation) for validation fold ``k``."""
        train = [inst for inst, f in zip(self.instances, self.folds) if f != k]
        return train, self.fold(k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, InstanceSet):
            return NotImplemented
        return (
            self.problem_class == other.problem_class
            and self.dim == other.dim
            and self.master_seed == other.master_seed
            and self.k_folds == other.k_folds
            and self.role == other.role
            and self.classes == other.classes
            and np.array_equal(self.folds, other.folds)
            and len(self.instances) == len(other.instances)
            and all(a == b for a, b in zip(self.instances, other.instances))
        )


def instance_seeds(master_seed: int, count: int) -> list[int]:
    children = np.random.SeedSequence(int(master_seed)).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def generate_instance_set(
    problem_class,
    dim: int,
    count: int,
    seed: int,
    k_folds: int = 4,
    role: str = "train",
    classes=None,
) -> InstanceSet:
    """``count`` instances with round-robin fold labels."""
    if not count >= k_folds >= 1:
        raise ValueError("need count >= k_folds >= 1")
    cid = parse_class(problem_class)
    cls_tuple = tuple(int(c) for c in classes) if classes is not None else None
    seeds = instance_seeds(seed, count)
    instances = [make_instance(cid, dim, s, classes=cls_tuple) for s in seeds]
    folds = np.arange(count, dtype=np.int64) % k_folds
    return InstanceSet(instances, folds, cid, dim, int(seed), k_folds, role, cls_tuple)
