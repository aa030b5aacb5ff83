"""Run configuration: flat ``key = value`` files with dotted keys.

Defaults reproduce the reference figures. Precedence, lowest first:
defaults, config file, ``--set`` / per-key command-line flags.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .binormal import BinormalParams, QuadratureConfig


class ConfigError(ValueError):
    pass


DEFAULTS: dict[str, object] = {
    "seed": 0,
    "out": ".",
    "model.mu": 0.0,
    "model.nu": 1.5,
    "model.sigma": 1.0,
    "model.p": 0.3,
    "model.tau": 2.5,
    "quad.method": "adaptive",
    "quad.nodes": 64,
    "quad.tol": 1e-8,
    "tol.predicate": 1e-9,
    "figure1.q_min": 0.0,
    "figure1.q_max": 1.0,
    "figure1.q_step": 0.01,
    "figure2.x_min": -3.0,
    "figure2.x_max": 8.0,
    "figure2.x_step": 0.01,
    "theorem.max_size": 6,
    "theorem.n_instances": 20,
    "theorem.n_random": 4,
    "probing.grid_n": 1000,
    "probing.t_max": 0.999,
    "probing.max_iter": 100,
    "probing.family": "bayes",
    "probing.n_source": 1_000_000,
    "probing.n_target": 1_000_000,
    "probing.pps_q": 0.6,
    "probing.split_x": 2.5,
    "probing.dump": 0,
    "estimate.method": "pa",
    "estimate.source": "",
    "estimate.target": "",
    "estimate.threshold": "auto",
}


def _coerce(key: str, raw: str):
    default = DEFAULTS[key]
    text = raw.strip()
    try:
        if isinstance(default, bool):
            return text.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(text, 0)
        if isinstance(default, float):
            value = float(text)
            if not math.isfinite(value):
                raise ValueError
            return value
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {type(default).__name__}") from None
    return text


def parse_config_text(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        if key not in DEFAULTS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    return values


@dataclass(frozen=True)
class RunConfig:
    values: dict

    @classmethod
    def build(cls, path: str | Path | None = None, overrides: dict | None = None) -> "RunConfig":
        values = dict(DEFAULTS)
        if path is not None:
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc}") from None
            values.update(parse_config_text(text, str(path)))
        for key, raw in (overrides or {}).items():
            if key not in DEFAULTS:
                raise ConfigError(f"unknown key {key!r}")
            values[key] = _coerce(key, raw) if isinstance(raw, str) else raw
        cfg = cls(values)
        cfg.validate()
        return cfg

    def __getitem__(self, key):
        return self.values[key]

    @property
    def seed(self) -> int:
        return int(self.values["seed"])

    @property
    def out(self) -> Path:
        return Path(self.values["out"])

    @property
    def params(self) -> BinormalParams:
        v = self.values
        return BinormalParams(v["model.mu"], v["model.nu"], v["model.sigma"], v["model.p"], v["model.tau"])

    @property
    def quad(self) -> QuadratureConfig:
        v = self.values
        return QuadratureConfig(v["quad.method"], v["quad.nodes"], v["quad.tol"])

    def grid(self, prefix: str, lo: str, hi: str, step: str) -> list[float]:
        a, b, h = self[f"{prefix}.{lo}"], self[f"{prefix}.{hi}"], self[f"{prefix}.{step}"]
        if h <= 0 or b < a:
            raise ConfigError(f"{prefix}: need {lo} <= {hi} and {step} > 0")
        count = int(math.floor((b - a) / h + 1e-9)) + 1
        return [round(a + k * h, 10) for k in range(count)]

    def validate(self):
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        try:
            self.params
            self.quad
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not 0 <= self["figure1.q_min"] <= self["figure1.q_max"] <= 1:
            raise ConfigError("figure1 grid must lie in [0, 1]")
        for key in ("theorem.max_size", "theorem.n_instances", "probing.grid_n",
                    "probing.n_source", "probing.n_target"):
            if self[key] < 1:
                raise ConfigError(f"{key} must be positive")
        if self["theorem.max_size"] < 2:
            raise ConfigError("theorem.max_size must be at least 2")
        if self["theorem.n_random"] < 0 or self["probing.max_iter"] < 0:
            raise ConfigError("counts must be non-negative")
        if not 0 < self["probing.t_max"] < 1:
            raise ConfigError("probing.t_max must lie in (0, 1)")
        if not 0 <= self["probing.pps_q"] <= 1:
            raise ConfigError("probing.pps_q must lie in [0, 1]")
