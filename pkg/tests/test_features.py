import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import anr_oracle, bw_oracle, dispersion_oracle, fdc_oracle, max_dist_oracle, mean_pair_oracle, nsc_oracle

from rldas.bench import make_instance
from rldas.de_pool import N_ALGORITHMS, init_context, init_population
from rldas.features import (
    N_LA,
    AhHistory,
    DasState,
    assemble_state,
    charge_probes,
    extract_la,
    feature_anr,
    feature_best_worst_improvement,
    feature_cost_ratio,
    feature_dispersion_diff,
    feature_fdc,
    feature_max_distance,
    feature_nsc,
    features_cli,
    record_shift,
    sample_probe_populations,
)

# ---------------------------------------------------------------- documented examples


def test_cost_ratio_examples():
    assert feature_cost_ratio(50, 100) == (0.5, False)
    assert feature_cost_ratio(100, 100) == (1.0, False)
    assert feature_cost_ratio(1e-9, 100)[0] == pytest.approx(1e-11, rel=1e-15)
    assert feature_cost_ratio(5, 0) == (0.0, True)


def test_fdc_examples():
    assert feature_fdc([1, 2, 3, 4], [1, 2, 3, 4])[0] == pytest.approx(1.0, abs=1e-15)
    assert feature_fdc([4, 3, 2, 1], [1, 2, 3, 4])[0] == pytest.approx(-1.0, abs=1e-15)
    assert feature_fdc([1, 1, 1], [1, 2, 3]) == (0.0, True)


def test_dispersion_examples():
    X = np.ones((20, 3))
    assert feature_dispersion_diff(X, np.arange(20.0)) == 0.0
    rng = np.random.default_rng(0)
    X = rng.uniform(-50, 50, (20, 3))
    X[:2] = 7.0
    costs = np.arange(20.0)
    expected = -mean_pair_oracle(X.tolist())
    assert feature_dispersion_diff(X, costs) == pytest.approx(expected, abs=1e-10)


def test_max_distance_examples():
    D = 6
    X = np.stack([np.full(D, -100.0), np.full(D, 100.0)])
    assert feature_max_distance(X) == pytest.approx(1.0, abs=1e-15)
    assert feature_max_distance(np.zeros((5, D))) == 0.0


def test_nsc_examples():
    assert feature_nsc([1, 2, 3, 4], [1, 2, 3, 4], 2)[0] == 0.0
    # evolved segment means 0 -> -2, probe means 0 -> 1: ratio -2
    assert feature_nsc([0, 0, -2, -2], [0, 0, 1, 1], 2)[0] == pytest.approx(-2.0)
    val, deg = feature_nsc([0, 0, -2, -2], [1, 1, 1, 1], 2)
    assert val == 0.0 and deg


def test_anr_and_improvement_examples():
    base = np.arange(10.0)
    assert feature_anr(base, [base, base]) == 1.0
    assert feature_anr(base, [base + 1.0]) == 0.0
    assert feature_best_worst_improvement(base, [base - 1, base - 2]) == (0.0, 0.0)
    assert feature_best_worst_improvement(base, [base + 1, base + 2]) == (1.0, 1.0)


# ---------------------------------------------------------------- oracle agreement (randomized)


def _random_population(rng):
    n = int(rng.integers(10, 51))
    d = int(rng.integers(1, 11))
    X = rng.uniform(-100, 100, (n, d))
    costs = rng.exponential(100.0, n)
    if rng.random() < 0.2:
        costs[: n // 3] = costs[0]  # ties
    return X, costs


def test_oracles_on_200_populations():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        X, costs = _random_population(rng)
        n, d = X.shape
        best = X[int(np.argmin(costs))]
        dists = np.sqrt(((X - best) ** 2).sum(axis=1))
        assert feature_fdc(costs, dists)[0] == pytest.approx(fdc_oracle(costs.tolist(), dists.tolist()), abs=1e-10)
        assert feature_dispersion_diff(X, costs) == pytest.approx(dispersion_oracle(X.tolist(), costs.tolist()), abs=1e-10)
        assert feature_max_distance(X) == pytest.approx(max_dist_oracle(X.tolist(), d), abs=1e-10)

        S = int(rng.integers(1, 4))
        probes = [costs + rng.normal(0, 5, n) * (rng.random(n) < 0.7) for _ in range(S)]
        assert feature_anr(costs, probes) == pytest.approx(anr_oracle(costs, probes, 1e-8), abs=1e-12)
        b, w = feature_best_worst_improvement(costs, probes)
        ob, ow = bw_oracle(costs.tolist(), [p.tolist() for p in probes])
        assert (b, w) == (pytest.approx(ob, abs=1e-12), pytest.approx(ow, abs=1e-12))

        m = 8 if n >= 32 else 4
        a_sorted, p_sorted = np.sort(costs), np.sort(probes[0])
        got = feature_nsc(a_sorted, p_sorted, m)[0]
        assert got == pytest.approx(nsc_oracle(a_sorted.tolist(), p_sorted.tolist(), m), abs=1e-10)
        assert got <= 0.0


# ---------------------------------------------------------------- range invariants (fuzz)


@settings(max_examples=300, deadline=None)
@given(
    arrays(np.float64, st.tuples(st.integers(2, 30), st.integers(1, 8)), elements=st.floats(-100, 100)),
    st.data(),
)
def test_scalar_feature_ranges(X, data):
    n = X.shape[0]
    costs = np.array(data.draw(st.lists(st.floats(0, 1e6), min_size=n, max_size=n)))
    best = X[int(np.argmin(costs))]
    dists = np.sqrt(((X - best) ** 2).sum(axis=1))
    f2, _ = feature_fdc(costs, dists)
    assert -1.0 <= f2 <= 1.0
    assert 0.0 <= feature_max_distance(X) <= 1.0
    assert abs(feature_dispersion_diff(X, costs)) <= 200.0 * np.sqrt(X.shape[1]) + 1e-9
    probes = [costs + data.draw(st.floats(-10, 10)) for _ in range(2)]
    assert 0.0 <= feature_anr(costs, probes) <= 1.0
    b, w = feature_best_worst_improvement(costs, probes)
    assert 0.0 <= w <= b <= 1.0
    assert feature_nsc(np.sort(costs), np.sort(probes[0]), 4 if n >= 4 else 2)[0] <= 0.0


@pytest.mark.parametrize("cls", [1, 2, 5, 8])
def test_la_vector_ranges_on_real_runs(cls):
    inst = make_instance(cls, 10, 3)
    rng = np.random.default_rng(cls)
    pop = init_population(inst, 60, 200_000, rng)
    ctx = init_context(pop.n, 10)
    cost0 = pop.best_cost
    for _ in range(5):
        la, fe = extract_la(pop, inst, ctx, rng, cost0)
        f = la.values
        assert f.shape == (N_LA,) and np.all(np.isfinite(f))
        assert 0 <= f[0] <= 1 and -1 <= f[1] <= 1 and 0 <= f[3] <= 1 and f[4] <= 0
        assert all(0 <= f[i] <= 1 for i in (5, 6, 7, 8))


# ---------------------------------------------------------------- probing


def test_probes_side_effect_free_and_deterministic():
    inst = make_instance(2, 10, 0)
    pop = init_population(inst, 100, 200_000, np.random.default_rng(0))
    ctx = init_context(pop.n, 10)
    pop0, ctx0 = pop.copy(), ctx.copy()
    a = sample_probe_populations(pop, inst, ctx, np.random.default_rng(5), 3)
    assert a.fe_consumed == 300 and not a.truncated
    assert pop == pop0 and ctx == ctx0
    b = sample_probe_populations(pop, inst, ctx, np.random.default_rng(5), 3)
    assert all(np.array_equal(x, y) for x, y in zip(a.costs, b.costs))


def test_probe_truncation():
    inst = make_instance(2, 10, 0)
    pop = init_population(inst, 100, 350, np.random.default_rng(0))
    res = sample_probe_populations(pop, inst, init_context(100, 10), np.random.default_rng(1), 3)
    assert res.truncated and res.fe_consumed == 200 and len(res.costs) == 2


def test_fe_conservation_and_incumbent():
    inst = make_instance(3, 10, 0)
    rng = np.random.default_rng(0)
    pop = init_population(inst, 50, 200_000, rng)
    ctx = init_context(pop.n, 10)
    fe0, best0 = pop.fe_used, pop.best_cost
    probes = sample_probe_populations(pop, inst, ctx, rng, 3)
    charge_probes(pop, probes)
    assert pop.fe_used == fe0 + probes.fe_consumed == fe0 + 150
    assert pop.best_cost == min(best0, min(c.min() for c in probes.costs))


# ---------------------------------------------------------------- history and state


def test_shift_means():
    h = AhHistory(4)
    rng = np.random.default_rng(0)
    shifts = rng.normal(size=(5, 4))
    zero = np.zeros(4)
    for v in shifts:
        h = record_shift(h, 1, zero, v, zero, 2 * v)
    means = h.means()
    assert np.allclose(means[1, 0], shifts.mean(axis=0), atol=1e-12)
    assert np.allclose(means[1, 1], 2 * shifts.mean(axis=0), atol=1e-12)
    assert np.all(means[0] == 0) and np.all(means[2] == 0)
    assert h.counts.tolist() == [0, 5, 0]


def test_record_shift_no_movement_and_purity():
    h = AhHistory(3)
    x = np.array([1.0, 2.0, 3.0])
    h2 = record_shift(h, 0, x, x, x, x)
    assert np.all(h2.means() == 0) and h2.counts[0] == 1 and h.counts[0] == 0


def test_assemble_state_layout_and_roundtrip():
    h = AhHistory(10)
    h = record_shift(h, 2, np.zeros(10), np.ones(10), np.zeros(10), -np.ones(10))
    s = assemble_state(np.linspace(0, 1, N_LA), h)
    assert s.ah.shape == (2 * N_ALGORITHMS, 10)
    assert np.all(s.ah[4] == 1) and np.all(s.ah[5] == -1) and np.all(s.ah[:4] == 0)
    assert DasState.from_bytes(s.to_bytes()) == s


def test_features_cli_csv():
    out = features_cli("C2", 10, 0).strip().splitlines()
    assert out[0] == "feature,value" and len(out) == 1 + N_LA
    rows = dict(line.split(",") for line in out[1:])
    assert float(rows["cost_ratio"]) == 1.0
    assert float(rows["fe_ratio"]) == pytest.approx((170 + 3 * 170) / 200_000)
