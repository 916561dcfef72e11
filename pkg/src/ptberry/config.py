"""Run and sweep configuration files (JSON objects, all angles in radians)."""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .adiabatic_evolution import EvolutionConfig
from .errors import PTBerryError
from .paths import LoopPath
from .pt_model import DEFAULT_TOLERANCES, ParamPoint, Tolerances

__all__ = ["ConfigError", "RunConfig", "SweepSpec", "load_json", "SWEEP_AXES"]

SWEEP_AXES = ("theta0", "b_over_a", "delta")


class ConfigError(PTBerryError, ValueError):
    """Malformed or inconsistent configuration."""


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _section(data: dict, name: str, required=True) -> dict:
    sec = data.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing section '{name}'")
        return {}
    if not isinstance(sec, dict):
        raise ConfigError(f"section '{name}' must be an object")
    return sec


def _float(sec: dict, key: str, default=None) -> float:
    if key not in sec:
        if default is None:
            raise ConfigError(f"missing key '{key}'")
        return default
    try:
        return float(sec[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{key}' must be a number") from exc


def _tolerances(sec: dict) -> Tolerances:
    names = {f.name for f in fields(Tolerances)}
    unknown = set(sec) - names
    if unknown:
        raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")
    try:
        return Tolerances(**{k: float(v) for k, v in sec.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad tolerance value: {exc}") from exc


def _evolution(sec: dict) -> EvolutionConfig | None:
    if not sec:
        return None
    if "steps" not in sec:
        raise ConfigError("missing key 'steps'")
    try:
        return EvolutionConfig(
            total_time=_float(sec, "total_time"),
            steps=int(sec["steps"]),
            branch=str(sec.get("branch", "+")),
            record_stride=int(sec.get("record_stride", 10)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class RunConfig:
    model: dict
    loop: dict
    evolution: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        cfg = cls(
            model=dict(_section(data, "model")),
            loop=dict(_section(data, "loop")),
            evolution=dict(_section(data, "evolution", required=False)),
            output=dict(_section(data, "output", required=False)),
            tolerances=dict(_section(data, "tolerances", required=False)),
        )
        # fail early on anything that would not build
        cfg.build_path()
        cfg.build_evolution()
        cfg.build_tolerances()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_dict(load_json(path))

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def build_base(self) -> ParamPoint:
        m = self.model
        try:
            return ParamPoint(
                epsilon=_float(m, "epsilon", 0.0),
                a=_float(m, "a"),
                b=_float(m, "b", 0.0),
                theta=0.0,
                phi=0.0,
                delta=_float(m, "delta", 0.0),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def build_path(self) -> LoopPath:
        base = self.build_base()
        lp = self.loop
        kind = lp.get("kind", "latitude")
        try:
            if kind == "latitude":
                return LoopPath.latitude(
                    base, _float(lp, "theta0"), int(lp.get("winding", 1)), _float(lp, "phi0", 0.0)
                )
            if kind == "polygon":
                return LoopPath.polygon(base, lp["vertices"])
            if kind == "custom":
                return LoopPath.custom(base, lp["samples"])
        except KeyError as exc:
            raise ConfigError(f"loop of kind '{kind}' needs key {exc}") from exc
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        raise ConfigError(f"unknown loop kind '{kind}'")

    def build_evolution(self) -> EvolutionConfig | None:
        return _evolution(self.evolution)

    def build_tolerances(self) -> Tolerances:
        return _tolerances(self.tolerances)


def _axis_values(name: str, spec) -> list:
    if isinstance(spec, list):
        values = [float(x) for x in spec]
    elif isinstance(spec, dict):
        try:
            values = list(np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["count"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"axis '{name}' needs start, stop, count") from exc
    else:
        values = [float(spec)]
    if not values:
        raise ConfigError(f"axis '{name}' is empty")
    if name == "b_over_a" and any(not -1.0 < v < 1.0 for v in values):
        raise ConfigError("b_over_a values must lie strictly inside (-1, 1)")
    if name == "theta0" and any(not 0.0 <= v <= np.pi for v in values):
        raise ConfigError("theta0 values must lie in [0, pi]")
    return [float(v) for v in values]


@dataclass
class SweepSpec:
    epsilon: float
    a: float
    axes: dict
    winding: int = 1
    evolution: EvolutionConfig | None = None
    workers: int = 1
    tolerances: Tolerances = DEFAULT_TOLERANCES

    @classmethod
    def from_dict(cls, data: dict, evolution_enabled: bool = True) -> "SweepSpec":
        model = _section(data, "model")
        raw_axes = _section(data, "axes")
        unknown = set(raw_axes) - set(SWEEP_AXES)
        if unknown:
            raise ConfigError(f"unknown sweep axes {sorted(unknown)}; allowed {SWEEP_AXES}")
        fixed = {"theta0": np.pi / 2, "b_over_a": 0.0, "delta": 0.0}
        fixed.update({k: v for k, v in model.items() if k in fixed})
        axes = {
            name: _axis_values(name, raw_axes.get(name, fixed[name])) for name in SWEEP_AXES
        }
        tasks = _section(data, "tasks", required=False)
        evo = _evolution(_section(data, "evolution", required=False))
        if not tasks.get("evolution", True) or not evolution_enabled:
            evo = None
        a = _float(model, "a")
        if a == 0:
            raise ConfigError("a must be non-zero")
        return cls(
            epsilon=_float(model, "epsilon", 0.0),
            a=a,
            axes=axes,
            winding=int(data.get("winding", 1)),
            evolution=evo,
            workers=max(1, int(data.get("workers", 1))),
            tolerances=_tolerances(_section(data, "tolerances", required=False)),
        )

    @classmethod
    def load(cls, path, evolution_enabled: bool = True) -> "SweepSpec":
        return cls.from_dict(load_json(path), evolution_enabled)

    def points(self):
        """Grid points in lexicographic order over ``(theta0, b_over_a, delta)``."""
        return list(itertools.product(*(self.axes[name] for name in SWEEP_AXES)))
