"""Run settings: one flat, typed key/value record loaded from JSON.

Every key is optional; missing keys take the defaults below (15 banks,
10^4-unit day, unit liquidity price, levels 0..80 step 2, 10-day window).
Unknown keys and wrongly typed values are rejected with the field name.
"""
from __future__ import annotations

import json
import math
import os
import typing
from dataclasses import asdict, dataclass, fields, replace

from .errors import InvalidConfiguration
from .experiments import DEFAULT_KAPPAS, DESK_PLAYS, FULL_PLAYS
from .learning import ActionGrid
from .play import PlayConfig
from .settlement import CostParams, ScenarioConfig


@dataclass(frozen=True)
class Settings:
    # system and costs
    n_banks: int = 15
    day_length: float = 10_000.0
    lam: float = 1.0
    kappa: float = 8.0
    grid_top: int = 80
    grid_step: int = 2
    # scenario
    scenario: str = "base"
    throughput_penalty: float = 64.0
    throughput_threshold: float = 0.1
    incident_fraction: float = 0.5
    # learning and play control
    exploration_days: int = 500
    convergence_window: int = 10
    max_days: int = 5000
    seed: int = 0
    # experiments
    kappas: tuple[float, ...] = DEFAULT_KAPPAS
    plays_per_point: int = DESK_PLAYS
    eval_days: int = 50
    compare_days: int = 200
    ladder_days: int = 50
    sizes: tuple[int, ...] = (15, 50)
    fixed_profile: tuple[int, ...] = ()
    fixed_days: int = 200
    nash_samples: int = 100
    nash_epsilon: float = 0.0
    trace_n_banks: int = 3
    trace_day_length: float = 20.0
    trace_actions: tuple[int, ...] = (1, 0, 0)

    def __post_init__(self):
        hints = typing.get_type_hints(Settings)
        for f in fields(self):
            _check_type(f.name, getattr(self, f.name), hints[f.name])
        for name in ("plays_per_point", "eval_days", "compare_days", "ladder_days",
                     "fixed_days", "nash_samples"):
            if getattr(self, name) < (0 if name == "eval_days" else 1):
                raise InvalidConfiguration("out of range", name)
        if not self.kappas:
            raise InvalidConfiguration("need at least one value", "kappas")
        if any(k < 0 or not math.isfinite(k) for k in self.kappas):
            raise InvalidConfiguration("values must be finite and >= 0", "kappas")
        if any(n < 2 for n in self.sizes):
            raise InvalidConfiguration("sizes must be >= 2", "sizes")
        if self.grid_step < 1 or self.grid_top < 0:
            raise InvalidConfiguration("grid_top >= 0 and grid_step >= 1 required", "grid_step")
        if self.fixed_profile and len(self.fixed_profile) != self.n_banks:
            raise InvalidConfiguration("needs one level per bank", "fixed_profile")
        if len(self.trace_actions) != self.trace_n_banks:
            raise InvalidConfiguration("needs one level per bank", "trace_actions")
        # build the domain objects once so their checks run at load time
        self.play_config()
        CostParams(self.lam, self.kappa, self.trace_day_length)

    def grid(self) -> ActionGrid:
        return ActionGrid.from_range(self.grid_top, self.grid_step)

    def costs(self, kappa: float | None = None) -> CostParams:
        return CostParams(self.lam, self.kappa if kappa is None else kappa, self.day_length)

    def scenario_config(self, kind: str | None = None) -> ScenarioConfig:
        return ScenarioConfig(kind or self.scenario, self.throughput_penalty,
                              self.throughput_threshold, self.incident_fraction)

    def play_config(self, kind: str | None = None) -> PlayConfig:
        return PlayConfig(
            n_banks=self.n_banks, grid=self.grid(), costs=self.costs(),
            scenario=self.scenario_config(kind), exploration_days=self.exploration_days,
            convergence_window=self.convergence_window, max_days=self.max_days, seed=self.seed,
        )

    def full_scale(self) -> "Settings":
        return replace(self, plays_per_point=FULL_PLAYS)


def _check_type(name, value, hint):
    origin = typing.get_origin(hint)
    if origin is tuple:
        inner = typing.get_args(hint)[0]
        if not isinstance(value, tuple):
            raise InvalidConfiguration(f"expected a list, got {type(value).__name__}", name)
        for v in value:
            _check_scalar(name, v, inner)
    else:
        _check_scalar(name, value, hint)


def _check_scalar(name, value, t):
    ok = (not isinstance(value, bool)) and (
        isinstance(value, int) if t is int else
        isinstance(value, (int, float)) if t is float else isinstance(value, t))
    if not ok:
        raise InvalidConfiguration(f"expected {t.__name__}, got {value!r}", name)


def _coerce(d: dict) -> dict:
    hints = typing.get_type_hints(Settings)
    known = {f.name for f in fields(Settings)}
    out = {}
    for key, value in d.items():
        if key not in known:
            raise InvalidConfiguration("unknown key", key)
        hint = hints[key]
        if typing.get_origin(hint) is tuple:
            if not isinstance(value, (list, tuple)):
                raise InvalidConfiguration(f"expected a list, got {value!r}", key)
            value = tuple(float(v) if typing.get_args(hint)[0] is float and _is_num(v) else v
                          for v in value)
        elif hint is float and _is_num(value):
            value = float(value)
        out[key] = value
    return out


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def parse_config(path: str | os.PathLike | None = None, overrides: dict | None = None) -> Settings:
    """Load settings from a JSON object file, then apply ``overrides``."""
    data = {}
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except FileNotFoundError:
            raise InvalidConfiguration(f"config file not found: {path}") from None
        if text.strip():
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise InvalidConfiguration(f"cannot parse {path}: {e}") from None
            if not isinstance(data, dict):
                raise InvalidConfiguration(f"{path}: top level must be an object")
    data.update(overrides or {})
    return Settings(**_coerce(data))


def settings_to_dict(s: Settings) -> dict:
    d = asdict(s)
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def dump_settings(s: Settings, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        json.dump(settings_to_dict(s), fh, indent=2, sort_keys=True)
        fh.write("\n")
