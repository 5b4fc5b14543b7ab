"""Experiment configuration: a YAML mapping validated into :class:`ExperimentConfig`.

Recognised keys (all optional except as required by the chosen prediction)::

    domain:   {type: interval|box, bounds: [a, b] | [[a1, b1], ...], modes: K}
    z:        starting point (number or list)
    t_grid:   {start, stop, points}  geometric grid, or an explicit list under ``t``
    method:   quadrature | montecarlo | both
    process:  ibm | btbm
    prediction: bounded_ibm | bounded_ibm_log | tail_btbm
    tail:     {kind, C, p, A, lam, alpha, beta, u0}
    twisted:  {gamma, p}
    parabola: {variant, nu, p, A, alpha, beta}
    tolerances: {quadrature: 1e-8, sigmas: 3}
    n, seed, workers
    outputs:  {csv, json, svg}
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import yaml

from .domains import SpectralDomain, domain_from_config
from .predictors import ParabolaParams, TwistedParams
from .subordination import TailLaw, tail_from_config

METHODS = ("quadrature", "montecarlo", "both")
PROCESSES = ("ibm", "btbm")
PREDICTIONS = ("bounded_ibm", "bounded_ibm_log", "tail_btbm")
_KEYS = {
    "domain", "z", "t_grid", "t", "method", "process", "prediction", "tail", "twisted", "parabola",
    "tolerances", "n", "seed", "workers", "outputs",
}


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


@dataclass
class ExperimentConfig:
    domain: SpectralDomain | None = None
    z: tuple[float, ...] | None = None
    t_grid: tuple[float, ...] = ()
    method: str = "quadrature"
    process: str = "ibm"
    prediction: str | None = None
    tail: TailLaw | None = None
    twisted: TwistedParams | None = None
    parabola: ParabolaParams | None = None
    quad_tol: float = 1e-8
    sigmas: float = 3.0
    n: int = 100_000
    seed: int = 0
    workers: int | None = None
    outputs: dict = field(default_factory=dict)

    def require_grid(self) -> tuple[float, ...]:
        if not self.t_grid:
            raise ConfigError("t_grid is empty: give t_grid {start, stop, points} or a list under t")
        return self.t_grid

    def require_domain(self) -> tuple[SpectralDomain, tuple[float, ...]]:
        if self.domain is None or self.z is None:
            raise ConfigError("this command needs both domain and z")
        return self.domain, self.z


def geometric_grid(start: float, stop: float, points: int) -> tuple[float, ...]:
    if not (start > 0 and stop > start and points >= 2):
        raise ConfigError("t_grid needs 0 < start < stop and points >= 2")
    return tuple(float(v) for v in np.geomspace(start, stop, int(points)))


def _grid(raw) -> tuple[float, ...]:
    if isinstance(raw, dict):
        missing = {"start", "stop", "points"} - set(raw)
        if missing:
            raise ConfigError(f"t_grid missing {sorted(missing)}")
        return geometric_grid(float(raw["start"]), float(raw["stop"]), int(raw["points"]))
    values = tuple(float(v) for v in raw)
    if any(not (v > 0 and math.isfinite(v)) for v in values):
        raise ConfigError("t values must be positive and finite")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("t_grid must be strictly increasing")
    return values


def _choice(value, allowed, key):
    if value not in allowed:
        raise ConfigError(f"{key} must be one of {allowed}, got {value!r}")
    return value


def config_from_mapping(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping")
    unknown = set(raw) - _KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys {sorted(unknown)}")
    try:
        cfg = ExperimentConfig()
        if "domain" in raw:
            cfg.domain = domain_from_config(raw["domain"])
        if "z" in raw:
            z = raw["z"]
            cfg.z = tuple(float(v) for v in (z if isinstance(z, (list, tuple)) else [z]))
            if cfg.domain is not None:
                cfg.domain.check_interior(cfg.z)
        if "t_grid" in raw and "t" in raw:
            raise ConfigError("give either t_grid or t, not both")
        if "t_grid" in raw:
            cfg.t_grid = _grid(raw["t_grid"])
        elif "t" in raw:
            cfg.t_grid = _grid(raw["t"] if isinstance(raw["t"], (list, tuple)) else [raw["t"]])
        cfg.method = _choice(raw.get("method", cfg.method), METHODS, "method")
        cfg.process = _choice(raw.get("process", cfg.process), PROCESSES, "process")
        if "prediction" in raw:
            cfg.prediction = _choice(raw["prediction"], PREDICTIONS, "prediction")
        if "tail" in raw:
            cfg.tail = tail_from_config(raw["tail"])
        if "twisted" in raw:
            cfg.twisted = TwistedParams(float(raw["twisted"]["gamma"]), float(raw["twisted"]["p"]))
        if "parabola" in raw:
            cfg.parabola = ParabolaParams(**raw["parabola"])
        tols = raw.get("tolerances", {}) or {}
        cfg.quad_tol = float(tols.get("quadrature", cfg.quad_tol))
        cfg.sigmas = float(tols.get("sigmas", cfg.sigmas))
        if not (cfg.quad_tol > 0 and cfg.sigmas > 0):
            raise ConfigError("tolerances must be positive")
        cfg.n = int(raw.get("n", cfg.n))
        cfg.seed = int(raw.get("seed", cfg.seed))
        if cfg.n < 1 or cfg.seed < 0:
            raise ConfigError("n must be >= 1 and seed >= 0")
        if raw.get("workers") is not None:
            cfg.workers = int(raw["workers"])
            if cfg.workers < 1:
                raise ConfigError("workers must be >= 1")
        cfg.outputs = dict(raw.get("outputs", {}) or {})
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    _check_consistency(cfg)
    return cfg


def _check_consistency(cfg: ExperimentConfig) -> None:
    if cfg.prediction == "tail_btbm":
        if cfg.tail is None:
            raise ConfigError("prediction tail_btbm needs a tail law, not a domain")
        if cfg.method != "quadrature":
            raise ConfigError("tail-transfer predictions only support method quadrature")
    if cfg.prediction in ("bounded_ibm", "bounded_ibm_log") and (cfg.domain is None or cfg.z is None):
        raise ConfigError(f"prediction {cfg.prediction} needs domain and z")


def load_config(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    return raw or {}
