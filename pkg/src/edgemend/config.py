"""Experiment configuration: flat ``key = value`` files and seed handling.

Keys use dotted section prefixes (network.n, attack.kind, ...). Command
line flags override file values, which override defaults. A single
top-level seed is expanded into per-component seeds through fixed labels
so that every stage is reproducible yet decorrelated.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields

from .errors import ConfigError
from .recommend import RecommenderConfig


def derive_seed(root: int, label: str) -> int:
    """Stable 63-bit seed for a labeled component under a root seed."""
    digest = hashlib.blake2s(f"{root}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


@dataclass
class ExperimentConfig:
    """Everything one end-to-end run needs, file-serializable."""

    seed: int = 0
    threads: int = 1
    out_dir: str = "."
    network_n: int = 250
    network_gamma: float = -2.5
    network_file: str | None = None
    opinions_file: str | None = None
    attack_kind: str = "random"  # random | knapsack | none
    attack_n_targets: int = 16
    attack_budget: int = 16
    attack_value: float = 1.0
    recommend_k: int = 5
    recommend_n_src: int = 25
    recommend_theta: float = 0.1
    recommend_destination_scope: str = "all"
    recommend_mfpt_mode: str = "exact"
    recommend_walk_len: int | None = None
    recommend_score_subset_size: int | None = None
    recommend_overshoot_policy: str = "skip"
    run_batch: int = 5
    run_max_edges: int = 180
    run_stop_tol: float = 1e-8
    run_figures: bool = True

    def recommender(self) -> RecommenderConfig:
        return RecommenderConfig(
            k=self.recommend_k,
            n_src=self.recommend_n_src,
            theta=self.recommend_theta,
            destination_scope=self.recommend_destination_scope,
            mfpt_mode=self.recommend_mfpt_mode,
            walk_len=self.recommend_walk_len,
            walk_seed=derive_seed(self.seed, "walk"),
            score_subset_size=self.recommend_score_subset_size,
            overshoot_policy=self.recommend_overshoot_policy,
        )


_KEY_TO_FIELD = {
    "seed": ("seed", int),
    "threads": ("threads", int),
    "out_dir": ("out_dir", str),
    "network.n": ("network_n", int),
    "network.gamma": ("network_gamma", float),
    "network.file": ("network_file", str),
    "opinions.file": ("opinions_file", str),
    "attack.kind": ("attack_kind", str),
    "attack.n_targets": ("attack_n_targets", int),
    "attack.budget": ("attack_budget", int),
    "attack.value": ("attack_value", float),
    "recommend.k": ("recommend_k", int),
    "recommend.n_src": ("recommend_n_src", int),
    "recommend.theta": ("recommend_theta", float),
    "recommend.destination_scope": ("recommend_destination_scope", str),
    "recommend.mfpt_mode": ("recommend_mfpt_mode", str),
    "recommend.walk_len": ("recommend_walk_len", int),
    "recommend.score_subset_size": ("recommend_score_subset_size", int),
    "recommend.overshoot_policy": ("recommend_overshoot_policy", str),
    "run.batch": ("run_batch", int),
    "run.max_edges": ("run_max_edges", int),
    "run.stop_tol": ("run_stop_tol", float),
    "run.figures": ("run_figures", _parse_bool),
}

_FIELD_TO_KEY = {f: k for k, (f, _) in _KEY_TO_FIELD.items()}


def parse_config_file(path) -> dict:
    """Read a flat config file into {field_name: typed value}.

    Raises ConfigError with the line number on syntax errors, unknown
    keys, or values of the wrong type.
    """
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(
                    f"expected 'key = value', got {line!r}", line=lineno)
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _KEY_TO_FIELD:
                raise ConfigError(f"unknown key {key!r}", line=lineno)
            field_name, cast = _KEY_TO_FIELD[key]
            try:
                out[field_name] = cast(value)
            except ValueError as exc:
                raise ConfigError(
                    f"bad value for {key!r}: {exc}", line=lineno) from None
    return out


def load_config(path=None, overrides=None) -> ExperimentConfig:
    """Defaults, then file values, then explicit overrides."""
    cfg = ExperimentConfig()
    values = parse_config_file(path) if path else {}
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    valid = {f.name for f in fields(ExperimentConfig)}
    for name, value in values.items():
        if name not in valid:
            raise ConfigError(f"unknown setting {name!r}")
        setattr(cfg, name, value)
    return cfg


def write_config(cfg: ExperimentConfig, path) -> None:
    """Archive a config as a flat file that load_config reads back."""
    with open(path, "w", encoding="utf-8") as fh:
        for f in fields(ExperimentConfig):
            value = getattr(cfg, f.name)
            if value is None:
                continue
            key = _FIELD_TO_KEY[f.name]
            if isinstance(value, bool):
                value = "true" if value else "false"
            fh.write(f"{key} = {value}\n")
