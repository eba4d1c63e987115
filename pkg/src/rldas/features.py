"""State features: nine landscape-analysis scalars and the algorithm-history block.

Landscape features that need probing use one generation of randomly chosen
candidates applied to the current population (read-only); the probe
evaluations are charged to the run's budget by the caller through
``charge_probes``.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bench import InstanceSpec, evaluate
from .de_pool import BACKBONES, N_ALGORITHMS, ContextMemory, PopulationState, restore

N_LA = 9
LA_NAMES = (
    "cost_ratio",
    "fdc",
    "dispersion_diff",
    "max_distance",
    "nsc",
    "anr",
    "best_improvement",
    "worst_improvement",
    "fe_ratio",
)
N_PROBES = 3
ANR_EPS = 1e-8
_DEN_EPS = 1e-12


def diameter(lower: float, upper: float, dim: int) -> float:
    return (upper - lower) * np.sqrt(dim)


# ---------------------------------------------------------------- scalar features


def feature_cost_ratio(best_cost: float, initial_best_cost: float) -> tuple[float, bool]:
    """best / initial best clamped to [0, 1]; returns (value, degenerate)."""
    if initial_best_cost <= 0:
        return 0.0, True
    return float(np.clip(best_cost / initial_best_cost, 0.0, 1.0)), False


def feature_fdc(costs, dists) -> tuple[float, bool]:
    """Correlation of costs with distances to the best individual."""
    c = np.asarray(costs, dtype=float)
    d = np.asarray(dists, dtype=float)
    if c.shape[0] < 2:
        return 0.0, True
    sc, sd = c.std(), d.std()
    if sc < _DEN_EPS or sd < _DEN_EPS or not np.isfinite(sc * sd):
        return 0.0, True
    cov = np.mean((c - c.mean()) * (d - d.mean()))
    return float(np.clip(cov / (sc * sd), -1.0, 1.0)), False


def mean_pairwise_distance(X) -> float:
    return float(kernels.pairwise_stats(np.ascontiguousarray(X, dtype=np.float64))[0])


def feature_dispersion_diff(X, costs) -> float:
    """Mean pairwise distance of the best ceil(N/10) minus that of the whole population."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    k = int(np.ceil(0.1 * n))
    top = np.argsort(costs, kind="stable")[:k]
    return mean_pairwise_distance(X[top]) - mean_pairwise_distance(X)


def feature_max_distance(X, lower: float = -100.0, upper: float = 100.0) -> float:
    X = np.ascontiguousarray(X, dtype=np.float64)
    dmax = kernels.pairwise_stats(X)[1]
    return float(np.clip(dmax / diameter(lower, upper, X.shape[1]), 0.0, 1.0))


def nsc_segments(n: int) -> int:
    return 8 if n >= 32 else 4


def feature_nsc(evolved_sorted, probe_sorted, m: int) -> tuple[float, bool]:
    """Segmented slope-ratio sum, capped at 0; returns (value, degenerate)."""
    if m < 2:
        raise ValueError("m must be >= 2")
    a = np.array_split(np.asarray(evolved_sorted, dtype=float), m)
    b = np.array_split(np.asarray(probe_sorted, dtype=float), m)
    ca = np.array([s.mean() for s in a if s.size])
    cb = np.array([s.mean() for s in b if s.size])
    total, degenerate = 0.0, False
    for i in range(min(ca.shape[0], cb.shape[0]) - 1):
        den = cb[i + 1] - cb[i]
        if abs(den) < _DEN_EPS:
            degenerate = True
            continue
        total += (ca[i + 1] - ca[i]) / den
    if not np.isfinite(total):
        return 0.0, True
    return float(min(total, 0.0)), degenerate


def feature_anr(base_costs, probe_cost_sets, eps: float = ANR_EPS) -> float:
    base = np.asarray(base_costs, dtype=float)
    P = np.asarray(probe_cost_sets, dtype=float).reshape(-1, base.shape[0])
    return float(np.mean(np.abs(P - base[None, :]) < eps))


def feature_best_worst_improvement(base_costs, probe_cost_sets) -> tuple[float, float]:
    base = np.asarray(base_costs, dtype=float)
    P = np.asarray(probe_cost_sets, dtype=float).reshape(-1, base.shape[0])
    alpha = ~np.any(P < base[None, :], axis=0)
    beta = np.all(P > base[None, :], axis=0)
    return float(alpha.mean()), float(beta.mean())


# ---------------------------------------------------------------- probing


@dataclass
class ProbeResult:
    costs: list
    trials: list
    algorithms: list
    fe_consumed: int
    truncated: bool


def sample_probe_populations(
    pop: PopulationState,
    inst: InstanceSpec,
    ctx: ContextMemory,
    rng: np.random.Generator,
    S: int = N_PROBES,
) -> ProbeResult:
    """Apply one generation of a random candidate, ``S`` times, without selection.

    Neither ``pop`` nor ``ctx`` is modified; FEs are reported, not charged.
    """
    if S < 2:
        raise ValueError("S must be >= 2")
    n = pop.n
    s_eff = min(S, pop.remaining // n)
    costs, trials, algs = [], [], []
    for _ in range(s_eff):
        alg = int(rng.integers(N_ALGORITHMS))
        state = restore(ctx, alg)
        U = BACKBONES[state.algorithm].propose(state, pop, inst, rng)
        costs.append(np.asarray(evaluate(inst, U)))
        trials.append(U)
        algs.append(alg)
    return ProbeResult(costs, trials, algs, s_eff * n, s_eff < S)


def charge_probes(pop: PopulationState, probes: ProbeResult) -> None:
    """Count probe FEs against the budget and let probe points improve the incumbent."""
    pop.fe_used += probes.fe_consumed
    for c, U in zip(probes.costs, probes.trials):
        j = int(np.argmin(c))
        if c[j] < pop.best_cost:
            pop.best_cost = float(c[j])
            pop.best_x = U[j].copy()


def combine_probes(probes: ProbeResult, rng: np.random.Generator) -> np.ndarray | None:
    """Probe cost set for NSC: first half of one random probe, second half of another, sorted."""
    k = len(probes.costs)
    if k == 0:
        return None
    if k == 1:
        return np.sort(probes.costs[0])
    a, b = rng.choice(k, size=2, replace=False)
    n = probes.costs[0].shape[0]
    half = n // 2
    return np.sort(np.concatenate([probes.costs[a][:half], probes.costs[b][half:]]))


# ---------------------------------------------------------------- LA vector


@dataclass
class LaVector:
    values: np.ndarray
    flags: set = field(default_factory=set)

    def as_dict(self) -> dict:
        return dict(zip(LA_NAMES, self.values.tolist()))


def la_from_probes(pop: PopulationState, cost0: float, probes: ProbeResult, rng, lower, upper) -> LaVector:
    X, costs = pop.X, pop.costs
    flags = set()
    f = np.zeros(N_LA)
    f[0], deg = feature_cost_ratio(pop.best_cost, cost0)
    if deg:
        flags.add("cost_ratio")
    best = X[int(np.argmin(costs))]
    dists = np.sqrt(np.sum((X - best) ** 2, axis=1))
    f[1], deg = feature_fdc(costs, dists)
    if deg:
        flags.add("fdc")
    # stored relative to the box diameter so it lives on the same scale as f4
    f[2] = feature_dispersion_diff(X, costs) / diameter(lower, upper, X.shape[1])
    f[3] = feature_max_distance(X, lower, upper)
    if probes.truncated:
        flags.add("probes_truncated")
    if probes.costs:
        evolved = np.sort(costs)
        f[4], deg = feature_nsc(evolved, combine_probes(probes, rng), nsc_segments(pop.n))
        if deg:
            flags.add("nsc")
        f[5] = feature_anr(costs, probes.costs)
        f[6], f[7] = feature_best_worst_improvement(costs, probes.costs)
    else:
        flags.add("no_probes")
    f[8] = min(pop.fe_used / pop.max_fes, 1.0)
    return LaVector(f, flags)


def extract_la(
    pop: PopulationState,
    inst: InstanceSpec,
    ctx: ContextMemory,
    rng: np.random.Generator,
    cost0: float,
    S: int = N_PROBES,
) -> tuple[LaVector, int]:
    """Probe, charge the probe FEs to ``pop`` and compute the LA vector."""
    probes = sample_probe_populations(pop, inst, ctx, rng, S)
    charge_probes(pop, probes)
    return la_from_probes(pop, cost0, probes, rng, inst.lower, inst.upper), probes.fe_consumed


# ---------------------------------------------------------------- algorithm history


@dataclass
class AhHistory:
    dim: int
    n_algorithms: int = N_ALGORITHMS
    sums: np.ndarray = None
    counts: np.ndarray = None

    def __post_init__(self):
        if self.sums is None:
            self.sums = np.zeros((self.n_algorithms, 2, self.dim))
        if self.counts is None:
            self.counts = np.zeros(self.n_algorithms, dtype=np.int64)

    def copy(self) -> "AhHistory":
        return copy.deepcopy(self)

    def means(self) -> np.ndarray:
        """(L, 2, D) array of mean best/worst shifts; zeros where never selected."""
        out = np.zeros_like(self.sums)
        seen = self.counts > 0
        out[seen] = self.sums[seen] / self.counts[seen, None, None]
        return out


def record_shift(history: AhHistory, alg, x_best_before, x_best_after, x_worst_before, x_worst_after) -> AhHistory:
    """Return a new history with one more best/worst shift recorded for ``alg``."""
    h = history.copy()
    a = int(alg)
    h.sums[a, 0] += np.asarray(x_best_after) - np.asarray(x_best_before)
    h.sums[a, 1] += np.asarray(x_worst_after) - np.asarray(x_worst_before)
    h.counts[a] += 1
    return h


def best_and_worst(pop: PopulationState) -> tuple[np.ndarray, np.ndarray]:
    return pop.X[int(np.argmin(pop.costs))].copy(), pop.X[int(np.argmax(pop.costs))].copy()


# ---------------------------------------------------------------- state


@dataclass(eq=False)
class DasState:
    la: np.ndarray
    ah: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, DasState):
            return NotImplemented
        return np.array_equal(self.la, other.la) and np.array_equal(self.ah, other.ah)

    def to_bytes(self) -> bytes:
        head = np.array([self.ah.shape[0], self.ah.shape[1]], dtype="<i8").tobytes()
        return head + self.la.astype("<f8").tobytes() + self.ah.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "DasState":
        rows, dim = np.frombuffer(data, dtype="<i8", count=2)
        la = np.frombuffer(data, dtype="<f8", count=N_LA, offset=16).astype(np.float64)
        ah = np.frombuffer(data, dtype="<f8", count=int(rows * dim), offset=16 + 8 * N_LA)
        return cls(la, ah.reshape(int(rows), int(dim)).astype(np.float64))


def assemble_state(la: LaVector | np.ndarray, history: AhHistory) -> DasState:
    """Rows of the AH block are ordered best_1, worst_1, ..., best_L, worst_L."""
    values = la.values if isinstance(la, LaVector) else np.asarray(la, dtype=float)
    ah = history.means().reshape(2 * history.n_algorithms, history.dim)
    return DasState(values.copy(), ah)


def features_cli(problem_class, dim: int, seed: int, max_fes: int | None = None) -> str:
    """Labeled LA vector of a fresh population, as CSV."""
    from .bench import make_instance
    from .de_pool import N_MAX, init_context, init_population

    max_fes = max_fes or (200_000 if dim <= 10 else 1_000_000)
    inst = make_instance(problem_class, dim, seed)
    rng = np.random.default_rng(seed)
    pop = init_population(inst, N_MAX, max_fes, rng)
    ctx = init_context(pop.n, dim, max_fes)
    la, _ = extract_la(pop, inst, ctx, rng, pop.best_cost)
    lines = ["feature,value"] + [f"{k},{v:.17g}" for k, v in la.as_dict().items()]
    return "\n".join(lines) + "\n"
