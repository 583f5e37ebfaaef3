"""Scenario configuration, built-in environments, and file output.

A scenario is a single JSON object:

    {
      "name": "rich",
      "sites": [{"label": "site1", "m0": 1.0}, ...],
      "r_off": 100.0,
      "beta": 1.0,
      "supply_v": 5.0,
      "dt": 0.001,
      "max_steps": 10000000
    }

``dt`` and ``max_steps`` are optional and default to 0.001 and 10^7.
Traces serialize to wide CSV: ``step,time,influx,cum_frac`` followed by
``q_<label>,M_<label>,V_<label>`` per site in declaration order; unwired
sites report V = 0.  All numeric fields are written with nine decimal
places, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, NamedTuple

if TYPE_CHECKING:
    from .engine import SimulationTrace

DEFAULT_DT = 0.001
DEFAULT_MAX_STEPS = 10**7


class Site(NamedTuple):
    label: str
    m0: float


@dataclass(frozen=True)
class Environment:
    """A set of resource sites plus drive and integration settings."""

    sites: tuple[Site, ...]
    r_off: float = 100.0
    beta: float = 1.0
    supply_v: float = 5.0
    dt: float = DEFAULT_DT
    max_steps: int = DEFAULT_MAX_STEPS
    name: str | None = None

    def __post_init__(self) -> None:
        if not self.sites:
            raise ValueError("sites: environment must contain at least one site")
        if not self.r_off > 0:
            raise ValueError(f"r_off: must be positive, got {self.r_off}")
        if not self.beta > 0:
            raise ValueError(f"beta: must be positive, got {self.beta}")
        if not self.supply_v > 0:
            raise ValueError(f"supply_v: must be positive, got {self.supply_v}")
        if not self.dt > 0:
            raise ValueError(f"dt: must be positive, got {self.dt}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps: must be >= 1, got {self.max_steps}")
        seen = set()
        for k, site in enumerate(self.sites):
            if not site.label:
                raise ValueError(f"sites[{k}].label: must be a nonempty string")
            if site.label in seen:
                raise ValueError(f"sites[{k}].label: duplicate label {site.label!r}")
            seen.add(site.label)
            if not 0 < site.m0 <= self.r_off:
                raise ValueError(
                    f"sites[{k}].m0: must satisfy 0 < m0 <= r_off, "
                    f"got m0={site.m0} with r_off={self.r_off}"
                )

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.sites)

    @property
    def m0s(self) -> tuple[float, ...]:
        return tuple(s.m0 for s in self.sites)


_PRESETS = {
    "rich": (1.0, 2.0, 0.5, 15.0, 4.0),
    "poor": (0.5, 60.0, 70.0, 80.0, 90.0),
}

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str) -> Environment:
    """Built-in environment by name.

    ``rich`` has five sites of broadly similar quality; ``poor`` has one
    very good site and four expensive ones.
    """
    if name not in _PRESETS:
        raise ValueError(
            f"unknown preset {name!r}; valid names: {', '.join(PRESET_NAMES)}"
        )
    m0s = _PRESETS[name]
    return Environment(
        sites=tuple(Site(f"site{k + 1}", m0) for k, m0 in enumerate(m0s)),
        name=name,
    )


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise ValueError(f"{where}{key}: missing required field")
    value = obj[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind):
        raise ValueError(
            f"{where}{key}: expected {kind.__name__}, got {type(value).__name__}"
        )
    return value


def load_scenario(path: str | Path) -> Environment:
    """Read and validate a scenario file; errors name the offending field."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ValueError(f"cannot read scenario {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"cannot parse scenario {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"scenario {path}: top level must be a JSON object")

    sites_raw = _require(raw, "sites", list, "")
    sites = []
    for k, entry in enumerate(sites_raw):
        if not isinstance(entry, dict):
            raise ValueError(f"sites[{k}]: expected an object with label and m0")
        label = _require(entry, "label", str, f"sites[{k}].")
        m0 = _require(entry, "m0", float, f"sites[{k}].")
        sites.append(Site(label, m0))

    kwargs = {}
    for key, kind, default in (
        ("r_off", float, 100.0),
        ("beta", float, 1.0),
        ("supply_v", float, 5.0),
        ("dt", float, DEFAULT_DT),
        ("max_steps", int, DEFAULT_MAX_STEPS),
    ):
        kwargs[key] = _require(raw, key, kind, "") if key in raw else default
    name = raw.get("name")
    if name is not None and not isinstance(name, str):
        raise ValueError("name: expected string")
    return Environment(sites=tuple(sites), name=name, **kwargs)


def scenario_dict(env: Environment) -> dict:
    """Scenario file content for an environment, with stable field order."""
    doc: dict = {}
    if env.name is not None:
        doc["name"] = env.name
    doc["sites"] = [{"label": s.label, "m0": s.m0} for s in env.sites]
    doc["r_off"] = env.r_off
    doc["beta"] = env.beta
    doc["supply_v"] = env.supply_v
    doc["dt"] = env.dt
    doc["max_steps"] = env.max_steps
    return doc


def write_scenario(env: Environment, path: str | Path) -> None:
    """Write a scenario file that loads back to an identical environment."""
    path = Path(path)
    try:
        path.write_text(json.dumps(scenario_dict(env), indent=2) + "\n")
    except OSError as exc:
        raise ValueError(f"cannot write scenario {path}: {exc}") from exc


def trace_header(labels: tuple[str, ...]) -> str:
    cols = ["step", "time", "influx", "cum_frac"]
    for label in labels:
        cols += [f"q_{label}", f"M_{label}", f"V_{label}"]
    return ",".join(cols)


def write_trace(trace: "SimulationTrace", path: str | Path) -> None:
    """Write a trace as CSV, one row per recorded step.

    ``cum_frac`` is the cumulative delivered charge normalized by the
    final recorded value; for a completed run that is the charge at full
    depletion, so the last row reads 1.000000000.
    """
    path = Path(path)
    lines = [trace_header(trace.site_labels)]
    total = float(trace.cum_charge[-1]) if trace.n_records else 1.0
    n = trace.n_sites
    for k in range(trace.n_records):
        row = [
            str(int(trace.steps[k])),
            f"{trace.times[k]:.9f}",
            f"{trace.influx[k]:.9f}",
            f"{trace.cum_charge[k] / total:.9f}",
        ]
        for i in range(n):
            row += [
                f"{trace.q[k, i]:.9f}",
                f"{trace.m[k, i]:.9f}",
                f"{trace.v[k, i]:.9f}",
            ]
        lines.append(",".join(row))
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise ValueError(f"cannot write trace {path}: {exc}") from exc


def write_summary(document: dict, path: str | Path) -> None:
    """Write a summary document as JSON with stable field order."""
    path = Path(path)
    try:
        path.write_text(json.dumps(document, indent=2) + "\n")
    except OSError as exc:
        raise ValueError(f"cannot write summary {path}: {exc}") from exc
