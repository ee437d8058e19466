"""YAML scenario files: strict schema loading and default rendering.

A config file holds the :class:`~arisblock.simulation.ScenarioConfig` fields
at top level plus an optional ``sweeps`` block::

    blocker_density: 0.5
    radio:
      tx_gain_db: 45
    sweeps:
      fig4: {densities: {start: 0.1, stop: 2.0, step: 0.1}, clearance: 13}
      fig5: {densities: [0.5, 1.0, 1.5], clearances: {start: 2, stop: 40, step: 1}}

Unknown keys are errors. Missing keys take their defaults. A run manifest
(a document with a ``config`` entry) is accepted in place of a config file.
"""
import dataclasses
import math
from dataclasses import dataclass, field

import yaml

from .blockage import BlockageModelParams
from .channel import RadioParams
from .errors import ConfigurationError
from .geometry import Area
from .simulation import BlockerDims, ScenarioConfig

NESTED = {
    "area": Area,
    "radio": RadioParams,
    "blocker_dims": BlockerDims,
    "blockage": BlockageModelParams,
}


@dataclass(frozen=True)
class SweepSpec:
    densities: tuple
    clearances: tuple


@dataclass(frozen=True)
class SweepBlocks:
    fig4: SweepSpec = field(default_factory=lambda: SweepSpec(
        tuple(round(0.1 * k, 10) for k in range(1, 21)), (13.0,)))
    fig5: SweepSpec = field(default_factory=lambda: SweepSpec(
        (0.5, 1.0, 1.5), tuple(float(c) for c in range(2, 41))))
    fig6: SweepSpec = field(default_factory=lambda: SweepSpec(
        (0.5, 1.0, 1.5), tuple(float(c) for c in range(2, 41))))

    def to_dict(self):
        return {
            "fig4": {"densities": list(self.fig4.densities), "clearance": self.fig4.clearances[0]},
            "fig5": {"densities": list(self.fig5.densities), "clearances": list(self.fig5.clearances)},
            "fig6": {"densities": list(self.fig6.densities), "clearances": list(self.fig6.clearances)},
        }


def _check_type(value, kind, path):
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigurationError(f"expected true/false, got {value!r}", field=path)
    elif kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"expected an integer, got {value!r}", field=path)
    elif kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigurationError(f"expected a number, got {value!r}", field=path)
        value = float(value)
    elif kind is str:
        if not isinstance(value, str):
            raise ConfigurationError(f"expected a string, got {value!r}", field=path)
    return value


def _build(cls, data, prefix=""):
    if not isinstance(data, dict):
        raise ConfigurationError(f"expected a mapping, got {type(data).__name__}", field=prefix.rstrip(".") or None)
    known = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        path = f"{prefix}{key}"
        if key not in known:
            raise ConfigurationError("unknown key", field=path)
        if key in NESTED and cls is ScenarioConfig:
            kwargs[key] = _build(NESTED[key], value, f"{path}.")
        elif key == "aris_xy":
            if value is not None:
                if not isinstance(value, (list, tuple)) or len(value) != 2:
                    raise ConfigurationError("expected [x, y] or null", field=path)
                value = tuple(_check_type(v, float, f"{path}[{i}]") for i, v in enumerate(value))
            kwargs[key] = value
        else:
            kwargs[key] = _check_type(value, known[key].type, path)
    return cls(**kwargs)


def _values(spec, path):
    if isinstance(spec, dict):
        unknown = set(spec) - {"start", "stop", "step"}
        if unknown:
            raise ConfigurationError("unknown key", field=f"{path}.{sorted(unknown)[0]}")
        try:
            start, stop, step = (_check_type(spec[k], float, f"{path}.{k}") for k in ("start", "stop", "step"))
        except KeyError as exc:
            raise ConfigurationError("missing key", field=f"{path}.{exc.args[0]}") from None
        if not step > 0 or stop < start:
            raise ConfigurationError("need step > 0 and stop >= start", field=path)
        n = int(math.floor((stop - start) / step + 1e-9))
        return tuple(round(start + k * step, 10) for k in range(n + 1))
    if isinstance(spec, (list, tuple)) and spec:
        return tuple(_check_type(v, float, f"{path}[{i}]") for i, v in enumerate(spec))
    raise ConfigurationError("expected a non-empty list or {start, stop, step}", field=path)


def _increasing(values, path):
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigurationError("values must be strictly increasing", field=path)
    if any(v < 0 for v in values):
        raise ConfigurationError("values must be >= 0", field=path)
    return values


def _build_sweeps(data):
    defaults = SweepBlocks()
    if data is None:
        return defaults
    if not isinstance(data, dict):
        raise ConfigurationError("expected a mapping", field="sweeps")
    blocks = {}
    for name, block in data.items():
        path = f"sweeps.{name}"
        if name not in ("fig4", "fig5", "fig6"):
            raise ConfigurationError("unknown key", field=path)
        if not isinstance(block, dict):
            raise ConfigurationError("expected a mapping", field=path)
        base = getattr(defaults, name)
        allowed = {"densities", "clearance"} if name == "fig4" else {"densities", "clearances"}
        for key in block:
            if key not in allowed:
                raise ConfigurationError("unknown key", field=f"{path}.{key}")
        densities = base.densities
        clearances = base.clearances
        if "densities" in block:
            densities = _increasing(_values(block["densities"], f"{path}.densities"), f"{path}.densities")
        if "clearance" in block:
            clearances = (_check_type(block["clearance"], float, f"{path}.clearance"),)
        if "clearances" in block:
            clearances = _increasing(_values(block["clearances"], f"{path}.clearances"), f"{path}.clearances")
        blocks[name] = SweepSpec(densities, clearances)
    return dataclasses.replace(defaults, **blocks)


def parse_config(data):
    """Build ``(ScenarioConfig, SweepBlocks)`` from a decoded YAML document."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError("top level must be a mapping")
    if "config" in data and "tool_version" in data:
        data = data["config"]
        if not isinstance(data, dict):
            raise ConfigurationError("expected a mapping", field="config")
    data = dict(data)
    sweeps = _build_sweeps(data.pop("sweeps", None))
    return _build(ScenarioConfig, data), sweeps


def load_config(path=None):
    if path is None:
        return parse_config({})
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"malformed YAML in {path}: {exc}") from None
    return parse_config(data)


def config_to_dict(config, sweeps=None):
    d = config.to_dict()
    if sweeps is not None:
        d["sweeps"] = sweeps.to_dict()
    return d


def dump_config(config, sweeps=None):
    return yaml.safe_dump(config_to_dict(config, sweeps), sort_keys=False)
