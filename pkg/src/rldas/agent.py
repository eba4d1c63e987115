"""Actor-critic network and PPO, in numpy with hand-written backprop.

Shapes (B = batch, L = actions, D = problem dimension)::

    AH rows  (B, 2L, D) -> ReLU(D->64) -> ReLU(64->1)       -> (B, 2L)
    [LA | AH embedding] (B, 9+2L) -> Tanh(->64)              -> DV
    actor   DV -> Tanh(64->16) -> (16->L) -> softmax
    critic  DV -> ReLU(64->64) -> ReLU(64->1)
"""
from __future__ import annotations

import json
import math
import struct
import zlib
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .features import N_LA

HIDDEN = 64
ACTOR_HIDDEN = 16
CKPT_MAGIC = b"RLDASCKP"
CKPT_VERSION = 1


class CheckpointError(ValueError):
    pass


@dataclass(frozen=True)
class PpoConfig:
    clip: float = 0.2
    gamma: float = 0.99
    k_ratio: float = 0.3
    lr: float = 1e-5
    batch_size: int = 16
    epochs: int = 200
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    standardize_adv: bool = True

    def k_updates(self, horizon: int) -> int:
        return max(1, math.ceil(self.k_ratio * horizon))


def param_shapes(dim: int, n_actions: int) -> dict:
    """Declared tensor order; also the checkpoint order."""
    return {
        "W_ve1": (dim, HIDDEN),
        "b_ve1": (HIDDEN,),
        "W_ve2": (HIDDEN, 1),
        "b_ve2": (1,),
        "W_dv": (N_LA + 2 * n_actions, HIDDEN),
        "b_dv": (HIDDEN,),
        "W_a1": (HIDDEN, ACTOR_HIDDEN),
        "b_a1": (ACTOR_HIDDEN,),
        "W_a2": (ACTOR_HIDDEN, n_actions),
        "b_a2": (n_actions,),
        "W_c1": (HIDDEN, HIDDEN),
        "b_c1": (HIDDEN,),
        "W_c2": (HIDDEN, 1),
        "b_c2": (1,),
    }


def init_params(dim: int, n_actions: int, rng: np.random.Generator) -> dict:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases alike."""
    shapes = param_shapes(dim, n_actions)
    params = {}
    for name, shape in shapes.items():
        fan_in = shape[0] if name.startswith("W") else shapes["W" + name[1:]][0]
        bound = 1.0 / math.sqrt(fan_in)
        params[name] = rng.uniform(-bound, bound, size=shape)
    return params


def zeros_like_params(params: dict) -> dict:
    return {k: np.zeros_like(v) for k, v in params.items()}


def _log_softmax(z):
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def forward(params: dict, la: np.ndarray, ah: np.ndarray):
    """Returns (log_probs (B, L), values (B,), cache)."""
    la = np.atleast_2d(np.asarray(la, dtype=float))
    ah = np.asarray(ah, dtype=float)
    if ah.ndim == 2:
        ah = ah[None]
    if not (np.all(np.isfinite(la)) and np.all(np.isfinite(ah))):
        raise ValueError("non-finite network input")
    z1 = ah @ params["W_ve1"] + params["b_ve1"]
    h1 = np.maximum(z1, 0.0)
    z2 = (h1 @ params["W_ve2"])[..., 0] + params["b_ve2"][0]
    e = np.maximum(z2, 0.0)
    x = np.concatenate([la, e], axis=1)
    dv = np.tanh(x @ params["W_dv"] + params["b_dv"])
    ha = np.tanh(dv @ params["W_a1"] + params["b_a1"])
    logits = ha @ params["W_a2"] + params["b_a2"]
    logp = _log_softmax(logits)
    zc1 = dv @ params["W_c1"] + params["b_c1"]
    hc = np.maximum(zc1, 0.0)
    zc2 = (hc @ params["W_c2"])[:, 0] + params["b_c2"][0]
    v = np.maximum(zc2, 0.0)
    cache = dict(ah=ah, z1=z1, h1=h1, z2=z2, x=x, dv=dv, ha=ha, logp=logp, zc1=zc1, hc=hc, zc2=zc2)
    return logp, v, cache


def embed(params, la, ah) -> np.ndarray:
    return forward(params, la, ah)[2]["dv"]


def policy(params, la, ah) -> np.ndarray:
    return np.exp(forward(params, la, ah)[0])


def value(params, la, ah) -> np.ndarray:
    return forward(params, la, ah)[1]


def backward(params: dict, cache: dict, g_logp: np.ndarray, g_v: np.ndarray) -> dict:
    """Gradients of a scalar loss given dLoss/dlogp (B, L) and dLoss/dv (B,)."""
    g = {}
    logp, dv = cache["logp"], cache["dv"]
    p = np.exp(logp)
    # log-softmax
    g_logits = g_logp - p * g_logp.sum(axis=1, keepdims=True)
    g["W_a2"] = cache["ha"].T @ g_logits
    g["b_a2"] = g_logits.sum(axis=0)
    g_za1 = (g_logits @ params["W_a2"].T) * (1.0 - cache["ha"] ** 2)
    g["W_a1"] = dv.T @ g_za1
    g["b_a1"] = g_za1.sum(axis=0)
    g_dv = g_za1 @ params["W_a1"].T

    g_zc2 = g_v * (cache["zc2"] > 0)
    g["W_c2"] = cache["hc"].T @ g_zc2[:, None]
    g["b_c2"] = np.array([g_zc2.sum()])
    g_zc1 = (g_zc2[:, None] @ params["W_c2"].T) * (cache["zc1"] > 0)
    g["W_c1"] = dv.T @ g_zc1
    g["b_c1"] = g_zc1.sum(axis=0)
    g_dv = g_dv + g_zc1 @ params["W_c1"].T

    g_zd = g_dv * (1.0 - dv**2)
    g["W_dv"] = cache["x"].T @ g_zd
    g["b_dv"] = g_zd.sum(axis=0)
    g_x = g_zd @ params["W_dv"].T
    g_e = g_x[:, N_LA:]

    g_z2 = g_e * (cache["z2"] > 0)
    h1 = cache["h1"]
    g["W_ve2"] = np.einsum("brh,br->h", h1, g_z2)[:, None]
    g["b_ve2"] = np.array([g_z2.sum()])
    g_z1 = g_z2[..., None] * params["W_ve2"][:, 0] * (cache["z1"] > 0)
    g["W_ve1"] = np.einsum("brd,brh->dh", cache["ah"], g_z1)
    g["b_ve1"] = g_z1.sum(axis=(0, 1))
    return {k: g[k] for k in params}


def sample_action(probs: np.ndarray, rng: np.random.Generator) -> tuple[int, float]:
    probs = np.asarray(probs, dtype=float)
    a = int(rng.choice(probs.shape[0], p=probs / probs.sum()))
    return a, float(np.log(probs[a]))


# ---------------------------------------------------------------- PPO


@dataclass
class Trajectory:
    la: np.ndarray
    ah: np.ndarray
    actions: np.ndarray
    logp: np.ndarray
    rewards: np.ndarray

    def __len__(self) -> int:
        return int(self.actions.shape[0])


def discounted_returns(rewards, gamma: float) -> np.ndarray:
    r = np.asarray(rewards, dtype=float)
    G = np.zeros_like(r)
    acc = 0.0
    for t in range(r.shape[0] - 1, -1, -1):
        acc = r[t] + gamma * acc
        G[t] = acc
    return G


def ppo_loss(params: dict, batch: dict, clip: float, with_grad: bool = True):
    """Total loss = clipped surrogate (actor) + MSE (critic). Returns (loss, report, grads)."""
    logp, v, cache = forward(params, batch["la"], batch["ah"])
    a = batch["actions"]
    n = a.shape[0]
    adv, G = batch["adv"], batch["returns"]
    logp_a = logp[np.arange(n), a]
    ratio = np.exp(logp_a - batch["logp_old"])
    s1 = ratio * adv
    s2 = np.clip(ratio, 1.0 - clip, 1.0 + clip) * adv
    actor = -np.mean(np.minimum(s1, s2))
    critic = np.mean((G - v) ** 2)
    report = {"actor_loss": float(actor), "critic_loss": float(critic), "mean_ratio": float(ratio.mean())}
    if not with_grad:
        return float(actor + critic), report, None
    g_logp = np.zeros_like(logp)
    g_logp[np.arange(n), a] = np.where(s1 <= s2, -adv * ratio / n, 0.0)
    g_v = -2.0 * (G - v) / n
    return float(actor + critic), report, backward(params, cache, g_logp, g_v)


class Adam:
    def __init__(self, params: dict, lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = zeros_like_params(params)
        self.v = zeros_like_params(params)
        self.t = 0

    def step(self, params: dict, grads: dict) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for k in params:
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * grads[k]
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * grads[k] ** 2
            params[k] -= self.lr * (self.m[k] / c1) / (np.sqrt(self.v[k] / c2) + self.eps)


class PpoAgent:
    def __init__(self, dim: int, n_actions: int = 3, cfg: PpoConfig | None = None, seed=0):
        self.dim = dim
        self.n_actions = n_actions
        self.cfg = cfg or PpoConfig()
        self.params = init_params(dim, n_actions, np.random.default_rng(seed))
        self.opt = Adam(self.params, self.cfg.lr, self.cfg.beta1, self.cfg.beta2, self.cfg.adam_eps)
        self.epoch = 0
        self.n_updates = 0

    def act(self, la, ah, rng: np.random.Generator | None = None, greedy: bool = False):
        """Batch action selection; returns (actions, log-probs)."""
        logp, _, _ = forward(self.params, la, ah)
        if greedy:
            a = np.argmax(logp, axis=1)
        else:
            p = np.exp(logp)
            a = np.array([rng.choice(self.n_actions, p=row / row.sum()) for row in p], dtype=np.int64)
        return a.astype(np.int64), logp[np.arange(a.shape[0]), a]

    def build_batch(self, trajectories) -> dict:
        if not trajectories or all(len(t) == 0 for t in trajectories):
            raise ValueError("empty trajectory batch")
        la = np.concatenate([t.la for t in trajectories])
        ah = np.concatenate([t.ah for t in trajectories])
        G = np.concatenate([discounted_returns(t.rewards, self.cfg.gamma) for t in trajectories])
        _, v, _ = forward(self.params, la, ah)
        adv = G - v
        if self.cfg.standardize_adv and adv.shape[0] > 1:
            sd = adv.std()
            adv = (adv - adv.mean()) / sd if sd > 1e-12 else adv - adv.mean()
        return {
            "la": la,
            "ah": ah,
            "actions": np.concatenate([t.actions for t in trajectories]).astype(np.int64),
            "logp_old": np.concatenate([t.logp for t in trajectories]),
            "returns": G,
            "adv": adv,
        }

    def update(self, trajectories, k_updates: int | None = None) -> dict:
        """K passes of PPO over one batch of complete trajectories."""
        batch = self.build_batch(trajectories)
        horizon = max(len(t) for t in trajectories)
        k = k_updates if k_updates is not None else self.cfg.k_updates(horizon)
        reports = []
        for _ in range(k):
            _, rep, grads = ppo_loss(self.params, batch, self.cfg.clip)
            self.opt.step(self.params, grads)
            self.n_updates += 1
            reports.append(rep)
        out = {key: float(np.mean([r[key] for r in reports])) for key in reports[0]}
        out["k_updates"] = k
        return out

    # ------------------------------------------------------------ checkpoint

    def to_bytes(self, extra: dict | None = None) -> bytes:
        names = list(param_shapes(self.dim, self.n_actions))
        header = {
            "dim": self.dim,
            "n_actions": self.n_actions,
            "cfg": asdict(self.cfg),
            "epoch": self.epoch,
            "n_updates": self.n_updates,
            "adam_t": self.opt.t,
            "tensors": names,
            "extra": extra or {},
        }
        hb = json.dumps(header, sort_keys=True).encode("utf-8")
        payload = b"".join(
            np.ascontiguousarray(src[k], dtype="<f8").tobytes()
            for src in (self.params, self.opt.m, self.opt.v)
            for k in names
        )
        return CKPT_MAGIC + struct.pack("<II", CKPT_VERSION, len(hb)) + hb + payload + struct.pack("<I", zlib.crc32(payload))

    @classmethod
    def from_bytes(cls, data: bytes) -> tuple["PpoAgent", dict]:
        if len(data) < 16 or data[:8] != CKPT_MAGIC:
            raise CheckpointError("not a checkpoint")
        version, hlen = struct.unpack_from("<II", data, 8)
        if version != CKPT_VERSION:
            raise CheckpointError(f"checkpoint version {version}, expected {CKPT_VERSION}")
        header = json.loads(data[16 : 16 + hlen].decode("utf-8"))
        agent = cls(header["dim"], header["n_actions"], PpoConfig(**header["cfg"]))
        shapes = param_shapes(agent.dim, agent.n_actions)
        pos = start = 16 + hlen
        for dst in (agent.params, agent.opt.m, agent.opt.v):
            for k in header["tensors"]:
                count = int(np.prod(shapes[k]))
                if pos + 8 * count > len(data) - 4:
                    raise CheckpointError("truncated checkpoint")
                dst[k] = np.frombuffer(data, dtype="<f8", count=count, offset=pos).reshape(shapes[k]).astype(np.float64)
                pos += 8 * count
        if pos + 4 != len(data) or struct.unpack_from("<I", data, pos)[0] != zlib.crc32(data[start:pos]):
            raise CheckpointError("checkpoint checksum mismatch")
        agent.epoch = header["epoch"]
        agent.n_updates = header["n_updates"]
        agent.opt.t = header["adam_t"]
        return agent, header["extra"]

    def save(self, path, extra: dict | None = None) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_bytes(self.to_bytes(extra))
        tmp.replace(path)
        return path

    @classmethod
    def load(cls, path) -> tuple["PpoAgent", dict]:
        return cls.from_bytes(Path(path).read_bytes())
