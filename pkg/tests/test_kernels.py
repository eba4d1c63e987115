import importlib
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rldas import _kernels_py, kernels

compiled = pytest.importorskip("rldas._kernels")


def test_backend_selected():
    assert kernels.BACKEND in ("compiled", "python")


def test_env_var_forces_python(monkeypatch):
    monkeypatch.setenv("RLDAS_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("RLDAS_PURE_PYTHON")
        importlib.reload(kernels)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 60), st.integers(1, 12), st.integers(0, 2**31))
def test_pairwise_stats_agree(n, d, seed):
    X = np.random.default_rng(seed).uniform(-100, 100, (n, d))
    a = compiled.pairwise_stats(X)
    b = _kernels_py.pairwise_stats(X)
    assert a[1] == pytest.approx(b[1], rel=1e-12, abs=1e-12)
    assert a[0] == pytest.approx(b[0], rel=1e-12, abs=1e-12)
    if n >= 2:
        dists = [np.linalg.norm(X[i] - X[j]) for i, j in itertools.combinations(range(n), 2)]
        assert a[1] == pytest.approx(max(dists), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 40), st.integers(1, 12), st.integers(0, 2**31))
def test_crowding_replace_agrees(n, d, seed):
    rng = np.random.default_rng(seed)
    args = [rng.uniform(-100, 100, (n, d)), rng.uniform(0, 100, n), rng.random(n), rng.random(n),
            rng.uniform(-100, 100, (n, d)), rng.uniform(0, 100, n), rng.random(n), rng.random(n)]
    a = [np.copy(x) for x in args]
    b = [np.copy(x) for x in args]
    ta = compiled.crowding_replace(*a)
    tb = _kernels_py.crowding_replace(*b)
    assert np.array_equal(ta, tb)
    for x, y in zip(a[:4], b[:4]):
        assert np.array_equal(x, y)
