"""Run configuration: JSON schema, validation with field paths, canonical form.

A config file is a single JSON object.  Commands read the sections they
need; every run embeds its fully resolved configuration (canonical JSON,
sorted keys) in the output as a provenance header, and that header parses
back into an equivalent config.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .engine import RefrigeratorParams
from .markov import DEFAULT_CUTOFF, MarkovParams
from .spinstar import SingleStarParams

MODES = ("single", "evolve", "optimize", "scaling", "markov", "validate")


class ConfigError(ValueError):
    """Invalid configuration; the message carries the offending field path."""


def _require(data: dict, key: str, path: str) -> Any:
    if key not in data:
        raise ConfigError(f"{path}{key}: missing required field")
    return data[key]


def _finite_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite, got {value!r}")
    return float(value)


def _positive_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{path}: expected a positive integer, got {value!r}")
    return value


def _triple(value: Any, path: str, kind="number") -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{path}: expected a list of three entries, got {value!r}")
    if kind == "int":
        return tuple(_positive_int(v, f"{path}[{k}]") for k, v in enumerate(value))
    return tuple(_finite_number(v, f"{path}[{k}]") for k, v in enumerate(value))


def _resolve_beta(data: dict, path: str, triple: bool):
    """Exactly one of beta / temperature, converted to beta."""
    has_beta = "beta" in data
    has_temp = "temperature" in data
    if has_beta == has_temp:
        raise ConfigError(
            f"{path}: provide exactly one of 'beta' or 'temperature'"
        )
    if triple:
        raw = _triple(data.get("beta", data.get("temperature")), path)
    else:
        raw = (_finite_number(data.get("beta", data.get("temperature")), path),)
    for v in raw:
        if v <= 0:
            raise ConfigError(f"{path}: values must be positive, got {v}")
    values = raw if has_beta else tuple(1.0 / v for v in raw)
    return values if triple else values[0]


@dataclass(frozen=True)
class TimeGrid:
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if self.step <= 0:
            raise ConfigError("time_grid.step: must be positive")
        if self.stop <= self.start:
            raise ConfigError("time_grid.stop: must exceed time_grid.start")

    def points(self) -> np.ndarray:
        return np.arange(self.start, self.stop + 0.5 * self.step, self.step)


@dataclass(frozen=True)
class OptimizationConfig:
    coupling_range: tuple[float, float] = (0.0, 1.0)
    g_range: tuple[float, float] = (0.0, 0.1)
    alpha_range: tuple[float, float] = (0.0, 1e-4)
    budget: int = 2000
    seed: int = 0


@dataclass(frozen=True)
class RunConfig:
    mode: str
    refrigerator: RefrigeratorParams | None = None
    single: SingleStarParams | None = None
    markov: MarkovParams | None = None
    markov_action: str = "evolve"
    time_grid: TimeGrid = TimeGrid(0.0, 10.0, 0.005)
    prune_tol: float = 1e-12
    optimization: OptimizationConfig = OptimizationConfig()
    n_list: tuple[int, ...] = ()
    output_path: str = "out"
    output_format: str = "csv"
    raw: dict = field(default_factory=dict, repr=False)


def _parse_refrigerator(data: dict, path: str) -> RefrigeratorParams:
    beta = _resolve_beta(data, f"{path}.beta", triple=True)
    try:
        return RefrigeratorParams(
            epsilon=_triple(_require(data, "epsilon", f"{path}."), f"{path}.epsilon"),
            bath_energy=_triple(
                _require(data, "bath_energy", f"{path}."), f"{path}.bath_energy"
            ),
            coupling=_triple(
                data.get("coupling", [0.0, 0.0, 0.0]), f"{path}.coupling"
            ),
            g=_finite_number(data.get("g", 0.0), f"{path}.g"),
            n_bath=_triple(_require(data, "n_bath", f"{path}."), f"{path}.n_bath", "int"),
            beta=beta,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_single(data: dict, path: str) -> SingleStarParams:
    beta = _resolve_beta(data, f"{path}.beta", triple=False)
    try:
        return SingleStarParams(
            epsilon=_finite_number(_require(data, "epsilon", f"{path}."), f"{path}.epsilon"),
            bath_energy=_finite_number(
                _require(data, "bath_energy", f"{path}."), f"{path}.bath_energy"
            ),
            coupling=_finite_number(data.get("coupling", 0.0), f"{path}.coupling"),
            n_bath=_positive_int(_require(data, "n_bath", f"{path}."), f"{path}.n_bath"),
            beta=beta,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_markov(data: dict, path: str) -> MarkovParams:
    beta = _resolve_beta(data, f"{path}.beta", triple=True)
    try:
        return MarkovParams(
            epsilon=_triple(_require(data, "epsilon", f"{path}."), f"{path}.epsilon"),
            g=_finite_number(data.get("g", 0.0), f"{path}.g"),
            alpha=_triple(data.get("alpha", [0.0, 0.0, 0.0]), f"{path}.alpha"),
            beta=beta,
            cutoff=_finite_number(data.get("cutoff", DEFAULT_CUTOFF), f"{path}.cutoff"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_range(value: Any, path: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{path}: expected [low, high], got {value!r}")
    lo = _finite_number(value[0], f"{path}[0]")
    hi = _finite_number(value[1], f"{path}[1]")
    if hi < lo:
        raise ConfigError(f"{path}: high bound below low bound")
    return lo, hi


def parse_config(data: dict, mode: str | None = None) -> RunConfig:
    """Validate a parsed JSON object into a RunConfig for ``mode``."""
    if not isinstance(data, dict):
        raise ConfigError(": top level must be a JSON object")
    cfg_mode = data.get("mode", mode)
    if cfg_mode is None:
        raise ConfigError("mode: missing (not in config and no command given)")
    if cfg_mode not in MODES:
        raise ConfigError(f"mode: unknown mode {cfg_mode!r}, expected one of {MODES}")
    if mode is not None and cfg_mode != mode:
        raise ConfigError(
            f"mode: config says {cfg_mode!r} but the command is {mode!r}"
        )

    grid_data = data.get("time_grid", {})
    if not isinstance(grid_data, dict):
        raise ConfigError("time_grid: expected an object")
    time_grid = TimeGrid(
        _finite_number(grid_data.get("start", 0.0), "time_grid.start"),
        _finite_number(grid_data.get("stop", 10.0), "time_grid.stop"),
        _finite_number(grid_data.get("step", 0.005), "time_grid.step"),
    )

    prune_tol = _finite_number(data.get("prune_tol", 1e-12), "prune_tol")
    if not 0.0 <= prune_tol < 1.0:
        raise ConfigError(f"prune_tol: must lie in [0, 1), got {prune_tol}")

    opt_data = data.get("optimization", {})
    if not isinstance(opt_data, dict):
        raise ConfigError("optimization: expected an object")
    optimization = OptimizationConfig(
        coupling_range=_parse_range(
            opt_data.get("coupling_range", [0.0, 1.0]), "optimization.coupling_range"
        ),
        g_range=_parse_range(opt_data.get("g_range", [0.0, 0.1]), "optimization.g_range"),
        alpha_range=_parse_range(
            opt_data.get("alpha_range", [0.0, 1e-4]), "optimization.alpha_range"
        ),
        budget=_positive_int(opt_data.get("budget", 2000), "optimization.budget"),
        seed=(
            0 if "seed" not in opt_data
            else int(_finite_number(opt_data["seed"], "optimization.seed"))
        ),
    )

    output = data.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("output: expected an object")
    output_format = output.get("format", "json" if cfg_mode in
                               ("optimize", "scaling", "validate") else "csv")
    if output_format not in ("csv", "json"):
        raise ConfigError(f"output.format: expected 'csv' or 'json', got {output_format!r}")
    output_path = output.get("path", f"{cfg_mode}-out.{output_format}")
    if not isinstance(output_path, str) or not output_path:
        raise ConfigError("output.path: expected a nonempty string")

    refrigerator = single = markov = None
    n_list: tuple[int, ...] = ()
    if cfg_mode in ("evolve", "optimize", "validate"):
        refrigerator = _parse_refrigerator(
            _require(data, "params", ""), "params"
        )
    if cfg_mode == "scaling":
        refrigerator = _parse_refrigerator(_require(data, "params", ""), "params")
        raw_list = _require(data, "n_list", "")
        if not isinstance(raw_list, list) or not raw_list:
            raise ConfigError("n_list: expected a nonempty list of integers")
        n_list = tuple(
            _positive_int(v, f"n_list[{k}]") for k, v in enumerate(raw_list)
        )
    if cfg_mode == "single":
        single = _parse_single(_require(data, "params", ""), "params")
    if cfg_mode == "markov":
        markov = _parse_markov(_require(data, "params", ""), "params")
    markov_action = data.get("action", "evolve")
    if cfg_mode == "markov" and markov_action not in ("evolve", "optimize"):
        raise ConfigError(f"action: expected 'evolve' or 'optimize', got {markov_action!r}")

    return RunConfig(
        mode=cfg_mode,
        refrigerator=refrigerator,
        single=single,
        markov=markov,
        markov_action=markov_action,
        time_grid=time_grid,
        prune_tol=prune_tol,
        optimization=optimization,
        n_list=n_list,
        output_path=output_path,
        output_format=output_format,
        raw=data,
    )


def load_config(path: str, mode: str | None = None) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f": cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f": config file {path} is not valid JSON: {exc}") from exc
    return parse_config(data, mode)


def canonical_config(config: RunConfig) -> dict:
    """Fully resolved configuration; re-parsing it reproduces the run."""
    out: dict[str, Any] = {
        "mode": config.mode,
        "time_grid": {
            "start": config.time_grid.start,
            "stop": config.time_grid.stop,
            "step": config.time_grid.step,
        },
        "prune_tol": config.prune_tol,
        "optimization": {
            "coupling_range": list(config.optimization.coupling_range),
            "g_range": list(config.optimization.g_range),
            "alpha_range": list(config.optimization.alpha_range),
            "budget": config.optimization.budget,
            "seed": config.optimization.seed,
        },
        "output": {"path": config.output_path, "format": config.output_format},
    }
    if config.refrigerator is not None:
        p = config.refrigerator
        out["params"] = {
            "epsilon": list(p.epsilon),
            "bath_energy": list(p.bath_energy),
            "coupling": list(p.coupling),
            "g": p.g,
            "n_bath": list(p.n_bath),
            "beta": list(p.beta),
        }
    if config.single is not None:
        p = config.single
        out["params"] = {
            "epsilon": p.epsilon,
            "bath_energy": p.bath_energy,
            "coupling": p.coupling,
            "n_bath": p.n_bath,
            "beta": p.beta,
        }
    if config.markov is not None:
        p = config.markov
        out["params"] = {
            "epsilon": list(p.epsilon),
            "g": p.g,
            "alpha": list(p.alpha),
            "beta": list(p.beta),
            "cutoff": p.cutoff,
        }
        out["action"] = config.markov_action
    if config.n_list:
        out["n_list"] = list(config.n_list)
    return out


def dump_canonical(config: RunConfig) -> str:
    return json.dumps(canonical_config(config), sort_keys=True, separators=(",", ":"))
