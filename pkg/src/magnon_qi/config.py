"""Sweep configuration: TOML document -> validated, unit-normalized SweepConfig.

Physical inputs carry their unit in the key name (``pump_power_mw``,
``magnon_damping_mhz``); every rate given in Hz is converted to rad/s here.
"""
from __future__ import annotations

import copy
import hashlib
import json
import math
import re
from dataclasses import dataclass, field

import numpy as np
import tomli

from .errors import ConfigError, DomainError
from .system_params import TWO_PI, MaterialParams, SystemParams

DISCORD_CHOICES = ("half", "unit", "both")
OCCUPANCY_CHOICES = ("microwave", "magnon", "both")

# key -> (default, unit, lower bound kind). Units convert to SI, with 2*pi
# applied after the decimal prefix so defaults reproduce SystemParams exactly.
_UNITS = {
    "1": lambda v: v,
    "micro": lambda v: v / 1e6,
    "milli": lambda v: v / 1e3,
    "nano": lambda v: v / 1e9,
    "mhz": lambda v: TWO_PI * (v * 1e6),
    "ghz": lambda v: TWO_PI * (v * 1e9),
}

DEVICE_KEYS = {
    "sphere_radius_um": (100.0, "micro", "positive"),
    "pump_power_mw": (60.0, "milli", "positive"),
    "pump_wavelength_nm": (1550.0, "nano", "positive"),
    "optical_quality": (3e6, "1", "positive"),
    "magnon_damping_mhz": (1.0, "mhz", "positive"),
    "microwave_damping_mhz": (1.0, "mhz", "positive"),
    "electromagnonic_coupling_mhz": (40.0, "mhz", "positive"),
    "microwave_frequency_ghz": (9.0, "ghz", "positive"),
    "magnon_frequency_ghz": (None, "ghz", "positive"),
    "bias_field_mt": (100.0, "milli", "positive"),
    "gyromagnetic_ghz_per_t": (28.0, "ghz", "positive"),
    "environment_temperature_mk": (30.0, "milli", "nonnegative"),
    "optical_thermal_occupancy": (0.0, "1", "nonnegative"),
    "verdet_rad_per_m": (377.0, "1", "positive"),
    "refractive_index": (2.19, "1", "positive"),
    "spin_density_per_m3": (2.1e28, "1", "positive"),
}

SCENARIO_KEYS = {
    "eta": 0.07,
    "room_temperature_k": 293.0,
    "lambda_a": 0.054,
    "lambda_b": 400.0,
}

EOM_KEYS = {
    "lambda_a": 668.43,
    "lambda_b": 5181.95,
    "resonator_frequency_mhz": 10.0,
}

SPECTRUM_KEYS = {
    "lambda_a": 0.054,
    "lambda_b": 400.0,
    "points": 41,
    "span": 1.0,
}

GRID_FIELDS = ("min", "max", "points", "spacing", "values")

DEFAULT_GRIDS = {
    "grid": {
        "lambda_a": {"min": 0.001, "max": 0.054, "points": 20, "spacing": "linear"},
        "lambda_b": {"min": 1.0, "max": 1600.0, "points": 20, "spacing": "log"},
        "mode_count": {"min": 1e3, "max": 1e10, "points": 29, "spacing": "log"},
    },
    "advantage": {
        "lambda_a": {"min": 0.01, "max": 0.3, "points": 30, "spacing": "linear"},
        "lambda_b": {"values": [100.0, 200.0, 400.0, 800.0, 1600.0]},
    },
    "stability": {
        "lambda_a": {"min": 0.0, "max": 5.0, "points": 11, "spacing": "linear"},
        "lambda_b": {"min": 0.0, "max": 4.0, "points": 9, "spacing": "linear"},
    },
}

TOP_LEVEL_KEYS = set(DEVICE_KEYS) | {"discord_convention", "occupancy", "output_dir",
                                     "scenario", "eom", "spectrum", "grid", "advantage", "stability"}


@dataclass(frozen=True)
class GridSpec:
    name: str
    values: tuple

    @classmethod
    def build(cls, name: str, spec: dict, locate) -> "GridSpec":
        unknown = set(spec) - set(GRID_FIELDS)
        if unknown:
            key = f"{name}.{sorted(unknown)[0]}"
            raise ConfigError("unknown key", key=key, line=locate(key))
        if "values" in spec:
            vals = spec["values"]
            if not isinstance(vals, list) or not vals:
                raise ConfigError("values must be a nonempty list", key=f"{name}.values",
                                  line=locate(f"{name}.values"))
            try:
                out = tuple(float(v) for v in vals)
            except (TypeError, ValueError):
                raise ConfigError("values must be numbers", key=f"{name}.values",
                                  line=locate(f"{name}.values")) from None
            return cls(name, out)
        for req in ("min", "max", "points"):
            if req not in spec:
                raise ConfigError("missing required key", key=f"{name}.{req}", line=locate(name))
        spacing = spec.get("spacing", "linear")
        lo, hi, points = spec["min"], spec["max"], spec["points"]
        if spacing not in ("linear", "log"):
            raise ConfigError("spacing must be 'linear' or 'log'", key=f"{name}.spacing",
                              line=locate(f"{name}.spacing"))
        if not isinstance(points, int) or isinstance(points, bool) or points < 2:
            raise ConfigError("points must be an integer >= 2", key=f"{name}.points",
                              line=locate(f"{name}.points"))
        if not (_is_number(lo) and _is_number(hi)) or not lo < hi:
            raise ConfigError("grid requires numeric min < max", key=f"{name}.min",
                              line=locate(f"{name}.min"))
        if spacing == "log" and not lo > 0.0:
            raise ConfigError("log spacing requires min > 0", key=f"{name}.min",
                              line=locate(f"{name}.min"))
        if spacing == "log":
            vals = np.geomspace(lo, hi, points)
        else:
            vals = np.linspace(lo, hi, points)
        vals[0], vals[-1] = lo, hi
        return cls(name, tuple(float(v) for v in vals))


@dataclass(frozen=True)
class SweepConfig:
    params: SystemParams
    grids: dict
    eta: float
    room_temperature: float
    operating_point: tuple  # (Lambda_a, Lambda_b) of the magnon transmitter
    eom_point: tuple
    eom_resonator_frequency: float  # rad/s
    spectrum: dict
    discord_convention: str = "both"
    occupancy: str = "both"
    output_dir: str = "out"
    echo: dict = field(default_factory=dict)

    @property
    def discord_conventions(self) -> tuple:
        return ("half", "unit") if self.discord_convention == "both" else (self.discord_convention,)

    @property
    def occupancies(self) -> tuple:
        return ("microwave", "magnon") if self.occupancy == "both" else (self.occupancy,)

    @property
    def mode_counts(self) -> tuple:
        return tuple(sorted({max(1, int(round(m))) for m in self.grids["grid.mode_count"].values}))

    def grid(self, name: str) -> tuple:
        return self.grids[name].values

    def with_overrides(self, discord_convention=None, occupancy=None, output_dir=None) -> "SweepConfig":
        changes = {}
        echo = copy.deepcopy(self.echo)
        if discord_convention is not None:
            _check_choice("discord_convention", discord_convention, DISCORD_CHOICES, None)
            changes["discord_convention"] = echo["discord_convention"] = discord_convention
        if occupancy is not None:
            _check_choice("occupancy", occupancy, OCCUPANCY_CHOICES, None)
            changes["occupancy"] = echo["occupancy"] = occupancy
        if output_dir is not None:
            changes["output_dir"] = str(output_dir)
        return _replace(self, echo=echo, **changes)

    def config_hash(self) -> str:
        blob = json.dumps(self.echo, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def _replace(cfg, **changes):
    from dataclasses import replace
    return replace(cfg, **changes)


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _check_choice(key, value, choices, line):
    if value not in choices:
        raise ConfigError(f"expected one of {list(choices)}, got {value!r}", key=key, line=line)


def _key_locator(text: str):
    """Map dotted key paths to 1-based line numbers of their definitions."""
    positions = {}
    prefix = ""
    header = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\s\"]+?)\s*\]\s*$")
    assign = re.compile(r"^\s*([A-Za-z0-9_.\"\s]+?)\s*=")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        m = header.match(line)
        if m:
            prefix = m.group(1).replace(" ", "").replace('"', "")
            positions.setdefault(prefix, lineno)
            continue
        m = assign.match(line)
        if m:
            key = m.group(1).replace(" ", "").replace('"', "")
            full = f"{prefix}.{key}" if prefix else key
            positions.setdefault(full, lineno)
            parts = full.split(".")
            for i in range(1, len(parts)):
                positions.setdefault(".".join(parts[:i]), lineno)
            for inner in re.findall(r"([A-Za-z0-9_]+)\s*=", line[m.end():]):
                positions.setdefault(f"{full}.{inner}", lineno)

    def locate(path: str):
        parts = path.split(".")
        while parts:
            hit = positions.get(".".join(parts))
            if hit is not None:
                return hit
            parts.pop()
        return None

    return locate


def _section(doc: dict, name: str, allowed, locate) -> dict:
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError("expected a table", key=name, line=locate(name))
    for key in sec:
        if key not in allowed:
            raise ConfigError("unknown key", key=f"{name}.{key}", line=locate(f"{name}.{key}"))
    return sec


def _number(value, key, locate, kind="any"):
    if not _is_number(value):
        raise ConfigError(f"expected a finite number, got {value!r}", key=key, line=locate(key))
    if kind == "positive" and not value > 0:
        raise ConfigError(f"must be > 0, got {value}", key=key, line=locate(key))
    if kind == "nonnegative" and not value >= 0:
        raise ConfigError(f"must be >= 0, got {value}", key=key, line=locate(key))
    return float(value)


def parse_config(text: str) -> SweepConfig:
    """Parse and validate a sweep configuration document; empty text gives the defaults."""
    locate = _key_locator(text)
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"malformed document: {exc}", line=int(m.group(1)) if m else None) from None

    for key in doc:
        if key not in TOP_LEVEL_KEYS:
            raise ConfigError("unknown key", key=key, line=locate(key))

    echo = {}
    device = {}
    for key, (default, unit, kind) in DEVICE_KEYS.items():
        value = doc.get(key, default)
        if value is None:
            continue
        value = _number(value, key, locate, kind)
        echo[key] = value
        device[key] = _UNITS[unit](value)

    magnon_frequency = device.get("magnon_frequency_ghz", device["microwave_frequency_ghz"])
    try:
        params = SystemParams(
            sphere_radius=device["sphere_radius_um"],
            pump_power=device["pump_power_mw"],
            pump_wavelength=device["pump_wavelength_nm"],
            optical_quality=device["optical_quality"],
            magnon_damping=device["magnon_damping_mhz"],
            microwave_damping=device["microwave_damping_mhz"],
            electromagnonic_coupling=device["electromagnonic_coupling_mhz"],
            microwave_frequency=device["microwave_frequency_ghz"],
            magnon_frequency=magnon_frequency,
            bias_field=device["bias_field_mt"],
            gyromagnetic_ratio=device["gyromagnetic_ghz_per_t"],
            environment_temperature=device["environment_temperature_mk"],
            optical_thermal_occupancy=device["optical_thermal_occupancy"],
            material=MaterialParams(
                verdet_constant=device["verdet_rad_per_m"],
                refractive_index=device["refractive_index"],
                spin_density=device["spin_density_per_m3"],
            ),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from None

    discord = doc.get("discord_convention", "both")
    _check_choice("discord_convention", discord, DISCORD_CHOICES, locate("discord_convention"))
    occupancy = doc.get("occupancy", "both")
    _check_choice("occupancy", occupancy, OCCUPANCY_CHOICES, locate("occupancy"))
    output_dir = doc.get("output_dir", "out")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("expected a nonempty string", key="output_dir", line=locate("output_dir"))
    echo.update(discord_convention=discord, occupancy=occupancy)

    scen = _section(doc, "scenario", SCENARIO_KEYS, locate)
    scenario = {k: _number(scen.get(k, d), f"scenario.{k}", locate, "nonnegative")
                for k, d in SCENARIO_KEYS.items()}
    if not scenario["eta"] < 1.0:
        raise ConfigError("eta must be < 1", key="scenario.eta", line=locate("scenario.eta"))
    echo["scenario"] = scenario

    eom_sec = _section(doc, "eom", EOM_KEYS, locate)
    eom = {k: _number(eom_sec.get(k, d), f"eom.{k}", locate, "nonnegative") for k, d in EOM_KEYS.items()}
    if not eom["resonator_frequency_mhz"] > 0.0:
        raise ConfigError("must be > 0", key="eom.resonator_frequency_mhz",
                          line=locate("eom.resonator_frequency_mhz"))
    echo["eom"] = eom

    spec_sec = _section(doc, "spectrum", SPECTRUM_KEYS, locate)
    spectrum = {}
    for k, d in SPECTRUM_KEYS.items():
        v = spec_sec.get(k, d)
        if k == "points":
            if not isinstance(v, int) or isinstance(v, bool) or v < 3:
                raise ConfigError("points must be an integer >= 3", key="spectrum.points",
                                  line=locate("spectrum.points"))
            spectrum[k] = v
        else:
            spectrum[k] = _number(v, f"spectrum.{k}", locate, "positive" if k == "span" else "nonnegative")
    echo["spectrum"] = spectrum

    grids = {}
    for section, axes in DEFAULT_GRIDS.items():
        sec = _section(doc, section, axes, locate)
        echo[section] = {}
        for axis, default in axes.items():
            spec = sec.get(axis, {})
            name = f"{section}.{axis}"
            if not isinstance(spec, dict):
                raise ConfigError("expected a table", key=name, line=locate(name))
            if not spec:
                spec = default
            elif "values" not in spec:
                spec = {**{k: v for k, v in default.items() if k != "values"}, **spec}
            grid = GridSpec.build(name, spec, locate)
            grids[name] = grid
            echo[section][axis] = list(grid.values)

    return SweepConfig(
        params=params,
        grids=grids,
        eta=scenario["eta"],
        room_temperature=scenario["room_temperature_k"],
        operating_point=(scenario["lambda_a"], scenario["lambda_b"]),
        eom_point=(eom["lambda_a"], eom["lambda_b"]),
        eom_resonator_frequency=TWO_PI * 1e6 * eom["resonator_frequency_mhz"],
        spectrum=spectrum,
        discord_convention=discord,
        occupancy=occupancy,
        output_dir=output_dir,
        echo=echo,
    )


def load_config(path=None) -> SweepConfig:
    if path is None:
        return parse_config("")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return parse_config(text)
