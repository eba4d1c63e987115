import math

import numpy as np
import pytest
from helpers import constant_state_learning, numeric_grad_errors, tiny_batch
from hypothesis import given, settings
from hypothesis import strategies as st

from rldas.agent import (
    CheckpointError,
    PpoAgent,
    PpoConfig,
    Trajectory,
    discounted_returns,
    embed,
    forward,
    init_params,
    param_shapes,
    policy,
    ppo_loss,
    sample_action,
    value,
    zeros_like_params,
)
from rldas.features import N_LA


def _params(dim=3, n_actions=3, seed=0):
    return init_params(dim, n_actions, np.random.default_rng(seed))


def test_shape_audit():
    shapes = param_shapes(10, 3)
    assert shapes["W_dv"] == (15, 64)
    assert shapes["W_c1"] == (64, 64)
    assert list(shapes)[0] == "W_ve1" and list(shapes)[-1] == "b_c2"


def test_zero_weights():
    p = zeros_like_params(_params())
    la, ah = np.ones((2, N_LA)), np.ones((2, 6, 3))
    assert np.all(embed(p, la, ah) == 0)
    assert np.allclose(policy(p, la, ah), 1 / 3, atol=1e-15)
    assert np.all(value(p, la, ah) == 0)


def test_logit_argmax():
    p = zeros_like_params(_params())
    p["b_a2"] = np.array([10.0, 0.0, 0.0])
    assert np.argmax(policy(p, np.zeros(N_LA), np.zeros((6, 3)))[0]) == 0


def test_row_wise_embedding():
    p = _params()
    rng = np.random.default_rng(1)
    la, ah = rng.normal(size=N_LA), rng.normal(size=(6, 3))
    base = forward(p, la, ah)[2]["x"][0, N_LA:]
    ah2 = ah.copy()
    ah2[4] += 5.0
    moved = forward(p, la, ah2)[2]["x"][0, N_LA:]
    assert np.array_equal(np.delete(base, 4), np.delete(moved, 4))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 1e3))
def test_softmax_and_tanh_bounds(seed, scale):
    rng = np.random.default_rng(seed)
    p = _params(seed=seed % 7)
    la = rng.normal(0, scale, (64, N_LA))
    ah = rng.normal(0, scale, (64, 6, 3))
    pi = policy(p, la, ah)
    assert np.all(pi >= 0) and np.max(np.abs(pi.sum(axis=1) - 1)) < 1e-12
    assert np.all(np.abs(embed(p, la, ah)) <= 1.0)
    assert np.all(value(p, la, ah) >= 0)


def test_bulk_random_inputs():
    rng = np.random.default_rng(3)
    p = _params()
    la = rng.normal(0, 10, (100_000, N_LA))
    ah = rng.normal(0, 10, (100_000, 6, 3))
    pi = policy(p, la, ah)
    assert np.max(np.abs(pi.sum(axis=1) - 1)) < 1e-12
    assert np.max(np.abs(embed(p, la, ah))) <= 1.0


def test_non_finite_input_rejected():
    la = np.zeros(N_LA)
    la[2] = np.nan
    with pytest.raises(ValueError):
        forward(_params(), la, np.zeros((6, 3)))


def test_sample_action():
    rng = np.random.default_rng(0)
    assert all(sample_action(np.array([1.0, 0.0, 0.0]), rng)[0] == 0 for _ in range(100))
    draws = [sample_action(np.full(3, 1 / 3), rng) for _ in range(30_000)]
    freq = np.bincount([a for a, _ in draws], minlength=3) / 30_000
    assert np.all(np.abs(freq - 1 / 3) <= 0.01)
    pi = np.array([0.2, 0.5, 0.3])
    a, lp = sample_action(pi, rng)
    assert abs(lp - math.log(pi[a])) < 1e-12


def test_discounted_returns():
    G = discounted_returns([1.0, 0.0, 2.0], 0.5)
    assert G.tolist() == [1.5, 1.0, 2.0]
    assert G[-1] == 2.0


def test_k_updates():
    assert PpoConfig().k_updates(70) == 21
    assert PpoConfig().k_updates(1) == 1


def test_gradient_check_every_tensor():
    errs = numeric_grad_errors(_params(seed=4), tiny_batch(seed=4))
    assert set(errs) == set(param_shapes(3, 3))
    assert max(errs.values()) < 1e-4, errs


def test_gradient_check_two_step_trajectory():
    b = tiny_batch(n=2, seed=9)
    errs = numeric_grad_errors(_params(seed=9), b)
    assert max(errs.values()) < 1e-4, errs


def test_ratio_one_objective_equals_mean_advantage():
    p = _params()
    b = tiny_batch()
    logp, _, _ = forward(p, b["la"], b["ah"])
    b["logp_old"] = logp[np.arange(5), b["actions"]]
    _, rep, _ = ppo_loss(p, b, 0.2)
    assert rep["mean_ratio"] == 1.0
    assert rep["actor_loss"] == pytest.approx(-b["adv"].mean(), abs=1e-15)


def test_zero_advantage_zero_actor_gradient():
    p = _params()
    b = tiny_batch()
    b["adv"] = np.zeros(5)
    _, _, g = ppo_loss(p, b, 0.2)
    for name in ("W_a1", "b_a1", "W_a2", "b_a2"):
        assert np.all(g[name] == 0)


def test_empty_batch_rejected():
    with pytest.raises(ValueError):
        PpoAgent(3).update([])


def _trajs(dim, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(3):
        T = 4
        out.append(Trajectory(rng.normal(size=(T, N_LA)), rng.normal(size=(T, 6, dim)),
                              rng.integers(3, size=T), np.log(np.full(T, 1 / 3)), rng.uniform(0, 1, T)))
    return out


def test_update_deterministic():
    a, b = PpoAgent(4, seed=1), PpoAgent(4, seed=1)
    a.update(_trajs(4, 0))
    b.update(_trajs(4, 0))
    assert a.to_bytes() == b.to_bytes()


def test_checkpoint_roundtrip(tmp_path):
    agent = PpoAgent(5, seed=2, cfg=PpoConfig(lr=1e-3))
    agent.update(_trajs(5, 1))
    agent.epoch = 3
    path = agent.save(tmp_path / "a.ckpt", {"note": "x"})
    back, extra = PpoAgent.load(path)
    assert extra == {"note": "x"}
    assert back.to_bytes({"note": "x"}) == agent.to_bytes({"note": "x"})
    assert back.cfg == agent.cfg and back.epoch == 3
    # continued training is identical too
    agent.update(_trajs(5, 2))
    back.update(_trajs(5, 2))
    assert back.to_bytes() == agent.to_bytes()


def test_checkpoint_errors():
    data = PpoAgent(3).to_bytes()
    with pytest.raises(CheckpointError):
        PpoAgent.from_bytes(b"garbage" * 4)
    with pytest.raises(CheckpointError):
        PpoAgent.from_bytes(data[:-100])
    bad = bytearray(data)
    bad[-50] ^= 1
    with pytest.raises(CheckpointError):
        PpoAgent.from_bytes(bytes(bad))
    bad = bytearray(data)
    bad[8] = 7
    with pytest.raises(CheckpointError):
        PpoAgent.from_bytes(bytes(bad))


def test_learning_sanity_short():
    probs = constant_state_learning(updates=60)
    assert probs[-1] > probs[0] and probs[-1] >= 0.8
