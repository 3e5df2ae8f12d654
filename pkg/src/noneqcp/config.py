"""Run configuration: YAML (or JSON) file validated against a JSON schema.

Angles are given in degrees in the file and converted to radians here.
Beam angles may be absolute (``theta_deg``) or measured beyond the bare
glass/vacuum TIR angle (``offset_deg``).
"""
from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import yaml

from .atom import RUBIDIUM, TwoLevelAtom, rubidium_two_level
from .errors import ConfigError
from .laser import LaserBeam
from .materials import DrudeMetal, LayerStack, load_sapphire, tir_angle
from .potentials import QuadratureOptions

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nonneg = {"type": "number", "minimum": 0}

_AXIS = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "start", "stop", "count"],
    "properties": {
        "name": {"type": "string"},
        "start": _num,
        "stop": _num,
        "count": {"type": "integer", "minimum": 1},
        "spacing": {"enum": ["linear", "log"]},
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "material": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "plasma_ev": _pos,
                "relaxation_ev": _nonneg,
                "glass_table": {"type": "string"},
                "film_thickness_m": _pos,
            },
        },
        "atom": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "model": {"enum": ["rubidium", "two_level"]},
                "transition_frequency_rad_s": _pos,
                "transition_over_sp": _pos,
                "static_polarizability_m3": _pos,
            },
        },
        "temperature": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "T_K": _nonneg,
                "T_a_K": _nonneg,
                "T_sp_K": {"oneOf": [_nonneg, {"type": "array", "items": _nonneg, "minItems": 1}]},
            },
        },
        "beams": {
            "type": "array",
            "maxItems": 2,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["omega_rad_s", "power_W", "waist_m"],
                "oneOf": [{"required": ["theta_deg"]}, {"required": ["offset_deg"]}],
                "properties": {
                    "omega_rad_s": _pos,
                    "theta_deg": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 90},
                    "offset_deg": {"type": "number", "exclusiveMinimum": 0},
                    "power_W": _nonneg,
                    "waist_m": _pos,
                    "phase_rad": _num,
                    "direction": {"enum": ["+x", "-x"]},
                },
            },
        },
        "scan": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "axes": {"type": "array", "items": _AXIS, "maxItems": 2},
                "quantity": {"enum": ["barrier", "well", "potential"]},
                "L_m": _pos,
                "x_m": _num,
                "time_s": _num,
                "time_averaged": {"type": "boolean"},
            },
        },
        "quadrature": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"rtol": _pos, "cutoff_scale": _pos},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "format": {"enum": ["csv", "json"]},
                "energy_unit": {"enum": ["J", "uK", "both"]},
                "path": {"type": "string"},
            },
        },
    },
}

# axes whose values are angles (degrees in the file)
ANGLE_AXES = {"theta_i", "theta_b", "theta_r", "theta1", "theta2",
              "offset_i", "offset_b", "offset_r", "offset1", "offset2", "phase1", "phase2"}
# phases are already radians
_RADIAN_AXES = {"phase1", "phase2"}


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple

    @property
    def is_angle(self):
        return self.name in ANGLE_AXES and self.name not in _RADIAN_AXES


@dataclass
class RunConfig:
    raw: dict
    metal: DrudeMetal
    stack: LayerStack
    atom: object
    temperature: float
    atom_temperature: float
    plasmon_temperatures: tuple
    beams: tuple
    axes: tuple
    quantity: str
    L: float
    x: float
    time: float
    time_averaged: object
    quad: QuadratureOptions
    output_format: str
    energy_unit: str
    output_path: object

    @property
    def digest(self):
        return config_hash(self.raw)


def config_hash(raw) -> str:
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads 1e-6 and 2.46e15 as floats (YAML 1.2 style)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^[-+]?(?:[0-9][0-9_]*\.?[0-9_]*|\.[0-9_]+)(?:[eE][-+]?[0-9]+)?$|^[-+]?\.(?:inf|Inf|INF)$|^\.(?:nan|NaN|NAN)$""", re.X),
    list("-+0123456789."),
)


def load_raw(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    return {} if raw is None else raw


def validate(raw):
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from exc


def _axis(spec):
    import numpy as np

    start, stop, n = spec["start"], spec["stop"], spec["count"]
    if spec.get("spacing", "linear") == "log":
        if start <= 0 or stop <= 0:
            raise ConfigError(f"log axis {spec['name']} needs positive bounds")
        vals = np.geomspace(start, stop, n)
    else:
        vals = np.linspace(start, stop, n)
    name = spec["name"]
    if name in ANGLE_AXES and name not in _RADIAN_AXES:
        vals = np.radians(vals)
    return Axis(name, tuple(float(v) for v in vals))


def build(raw: dict) -> RunConfig:
    """Validate ``raw`` and turn it into library objects."""
    validate(raw)
    mat = raw.get("material", {})
    metal = DrudeMetal.from_ev(mat.get("plasma_ev", 9.0), mat.get("relaxation_ev", 0.035))
    glass = load_sapphire(mat.get("glass_table"))
    stack = LayerStack(glass, metal, mat.get("film_thickness_m", 50e-9))

    temps = raw.get("temperature", {})
    T = temps.get("T_K", 300.0)
    T_a = temps.get("T_a_K", T)
    T_sp = temps.get("T_sp_K", T)
    T_sp = tuple(T_sp) if isinstance(T_sp, list) else (T_sp,)

    at = raw.get("atom", {})
    if at.get("model", "rubidium") == "rubidium" and not (set(at) - {"model"}):
        atom = RUBIDIUM
    else:
        if "transition_over_sp" in at and "transition_frequency_rad_s" in at:
            raise ConfigError("give either transition_frequency_rad_s or transition_over_sp, not both")
        if "transition_over_sp" in at:
            wa = at["transition_over_sp"] * metal.surface_plasmon_frequency
        else:
            wa = at.get("transition_frequency_rad_s", rubidium_two_level().transition_frequency)
        vol = at.get("static_polarizability_m3", 46e-30)
        atom = TwoLevelAtom.from_volume(wa, vol, T_a)

    beams = []
    for b in raw.get("beams", []):
        if "theta_deg" in b:
            theta = math.radians(b["theta_deg"])
        else:
            theta = tir_angle(glass, b["omega_rad_s"]) + math.radians(b["offset_deg"])
        beams.append(LaserBeam(b["omega_rad_s"], theta, b["power_W"], b["waist_m"],
                               b.get("phase_rad", 0.0), -1 if b.get("direction", "+x") == "-x" else 1))

    scan = raw.get("scan", {})
    quad_raw = raw.get("quadrature", {})
    quad = QuadratureOptions(rtol=quad_raw.get("rtol", 1e-8), cutoff_scale=quad_raw.get("cutoff_scale", 1.0))
    out = raw.get("output", {})
    return RunConfig(
        raw=raw, metal=metal, stack=stack, atom=atom,
        temperature=T, atom_temperature=T_a, plasmon_temperatures=T_sp,
        beams=tuple(beams), axes=tuple(_axis(a) for a in scan.get("axes", [])),
        quantity=scan.get("quantity", "barrier"), L=scan.get("L_m", 100e-9), x=scan.get("x_m", 0.0),
        time=scan.get("time_s", 0.0), time_averaged=scan.get("time_averaged"),
        quad=quad, output_format=out.get("format", "csv"), energy_unit=out.get("energy_unit", "both"),
        output_path=out.get("path"),
    )


def load(path) -> RunConfig:
    return build(load_raw(path))
