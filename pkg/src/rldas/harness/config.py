"""Run configuration and named profiles."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from ..agent import PpoConfig
from ..bench import MIXED, parse_class
from ..env import EnvConfig

ENV_WORKERS = "RLDAS_WORKERS"
ENV_OUT_DIR = "RLDAS_OUT_DIR"

# train/test class splits for the partition experiments
SPLITS = {
    "TS1": ((1, 2), (3, 4, 5, 6, 7, 8, 9, 10)),
    "TS2": ((1, 2, 3, 4, 5), (6, 7, 8, 9, 10)),
    "TS3": ((1, 2, 3, 4, 5, 6, 7, 8), (9, 10)),
}


@dataclass(frozen=True)
class RunConfig:
    name: str = "desk"
    classes: tuple = (2,)
    test_classes: tuple | None = None
    dim: int = 10
    max_fes: int = 50_000
    delta: int = 2_500
    reward_scheme: str = "adjusted"
    use_la: bool = True
    use_ah: bool = True
    use_context: bool = True
    epochs: int = 20
    batch_size: int = 16
    lr: float = 1e-3
    n_train: int = 64
    n_val: int = 8
    n_test: int = 32
    eval_runs: int = 5
    seed: int = 0
    workers: int = 1
    out_dir: str = "runs/desk"
    train_set: str | None = None
    val_set: str | None = None
    test_set: str | None = None
    checkpoint: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(parse_class(c) for c in self.classes))
        if self.test_classes is not None:
            object.__setattr__(self, "test_classes", tuple(parse_class(c) for c in self.test_classes))
        for path in (self.train_set, self.val_set, self.test_set):
            if path is not None and not Path(path).exists():
                raise FileNotFoundError(path)
        self.env_config()

    def env_config(self) -> EnvConfig:
        return EnvConfig(
            max_fes=self.max_fes,
            delta=self.delta,
            reward_scheme=self.reward_scheme,
            use_la=self.use_la,
            use_ah=self.use_ah,
            use_context=self.use_context,
        )

    def ppo_config(self) -> PpoConfig:
        return PpoConfig(lr=self.lr, batch_size=self.batch_size, epochs=self.epochs)

    def train_class(self) -> int:
        return self.classes[0] if len(self.classes) == 1 else MIXED

    def target_classes(self) -> tuple:
        return self.test_classes if self.test_classes is not None else self.classes

    def with_(self, **kw) -> "RunConfig":
        return replace(self, **kw)

    def to_json(self) -> str:
        d = asdict(self)
        d["classes"] = list(self.classes)
        d["test_classes"] = list(self.test_classes) if self.test_classes is not None else None
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        base = PROFILES.get(d.get("profile", d.get("name", "desk")), DESK)
        d = {k: v for k, v in d.items() if k != "profile"}
        return replace(base, **d)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


DESK = RunConfig()
FULL = RunConfig(
    name="full",
    max_fes=200_000,
    delta=2_500,
    epochs=200,
    lr=1e-5,
    n_train=512,
    n_val=32,
    n_test=512,
    eval_runs=30,
    out_dir="runs/full",
)
PROFILES = {"desk": DESK, "full": FULL}


def apply_env_overrides(cfg: RunConfig) -> RunConfig:
    """Worker count and output directory can be overridden from the environment."""
    kw = {}
    if os.environ.get(ENV_WORKERS):
        kw["workers"] = int(os.environ[ENV_WORKERS])
    if os.environ.get(ENV_OUT_DIR):
        kw["out_dir"] = os.environ[ENV_OUT_DIR]
    return cfg.with_(**kw) if kw else cfg
