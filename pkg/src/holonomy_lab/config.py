"""TOML scenario files.

A file holds one or more ``[[scenario]]`` tables::

    [[scenario]]
    id = "abelian-B1"
    group = "U1"                       # U1, SU2, SO3, SO4, ...

    [scenario.connection]
    family = "constant-field"          # any name in connection.FAMILIES
    B = 1.0                            # remaining keys are family parameters

    [scenario.chart]
    shape = "ball"                     # or "box" with lower/upper
    center = [0.0, 0.0]
    radius = 1.5

    [scenario.path]                    # optional; defaults to the surface boundary
    family = "circle"
    radius = 1.0

    [scenario.surface]
    family = "identity-disk"

    [scenario.numerics]
    steps = 4096
    grid = [256, 256]

Recognised numerics keys: steps, grid, h_r, radius, radii, n_theta,
direction, axial_grid, line_steps, max_residual, seed.
"""
from __future__ import annotations

import copy
import sys
from dataclasses import dataclass, field
from pathlib import Path as FilePath

import numpy as np
import tomli_w

from . import lie, transport, verify
from .connection import FAMILIES, Chart, Connection, make_connection
from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

PATH_FAMILIES = ("circle", "ellipse", "polynomial", "sampled")
SURFACE_FAMILIES = ("identity-disk", "scaled-disk", "ellipse-disk", "linear-disk", "polynomial-embedding")

NUMERIC_DEFAULTS = {
    "steps": transport.DEFAULT_STEPS,
    "grid": list(verify.DEFAULT_GRID),
    "h_r": 1e-3,
    "n_theta": 512,
    "axial_grid": 64,
    "max_residual": 1e-5,
}


@dataclass
class ScenarioConfig:
    id: str
    group: lie.GroupKind
    connection: dict
    chart: dict
    path: dict | None = None
    surface: dict | None = None
    numerics: dict = field(default_factory=dict)

    def numeric(self, key, default=None):
        if key in self.numerics:
            return self.numerics[key]
        return NUMERIC_DEFAULTS.get(key, default)

    def build_chart(self) -> Chart:
        c = self.chart
        try:
            if c.get("shape", "ball") == "ball":
                return Chart.ball(c.get("center", [0.0, 0.0]), float(c.get("radius", 2.0)))
            return Chart.box(c["lower"], c["upper"])
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"bad chart: {err}", f"{self.id}.chart") from err

    def build_connection(self) -> Connection:
        params = {k: v for k, v in self.connection.items() if k != "family"}
        try:
            return make_connection(self.connection["family"], self.group, self.build_chart(), **params)
        except (TypeError, ValueError) as err:
            raise ConfigError(f"bad connection parameters: {err}", f"{self.id}.connection") from err

    def build_surface(self):
        if self.surface is None:
            return None
        s = {k: v for k, v in self.surface.items() if k != "family"}
        fam = self.surface["family"]
        try:
            if fam == "identity-disk":
                return verify.identity_disk()
            if fam == "scaled-disk":
                return verify.scaled_disk(float(s["radius"]), s.get("center", (0.0, 0.0)))
            if fam == "ellipse-disk":
                return verify.ellipse_disk(float(s["a"]), float(s["b"]), s.get("center", (0.0, 0.0)))
            if fam == "linear-disk":
                return verify.linear_disk(s["matrix"], s.get("offset"))
            return verify.polynomial_embedding(s["coeffs"])
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"bad surface parameters: {err}", f"{self.id}.surface") from err

    def build_path(self):
        if self.path is None:
            surface = self.build_surface()
            return None if surface is None else surface.boundary()
        p = {k: v for k, v in self.path.items() if k != "family"}
        fam = self.path["family"]
        try:
            if fam == "circle":
                return transport.circle(float(p["radius"]), p.get("center", (0.0, 0.0)), int(p.get("turns", 1)))
            if fam == "ellipse":
                return transport.ellipse(float(p["a"]), float(p["b"]), p.get("center", (0.0, 0.0)))
            if fam == "polynomial":
                return transport.polynomial(p["coeffs"])
            return transport.sampled(p["points"], p.get("times"))
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(f"bad path parameters: {err}", f"{self.id}.path") from err


def _require_table(raw, key, where):
    val = raw.get(key)
    if not isinstance(val, dict):
        raise ConfigError("missing or not a table", f"{where}.{key}")
    return val


def _check_numerics(num: dict, where: str):
    if "steps" in num and (not isinstance(num["steps"], int) or num["steps"] < transport.MIN_STEPS):
        raise ConfigError(f"must be an integer >= {transport.MIN_STEPS}", f"{where}.numerics.steps")
    if "grid" in num:
        g = num["grid"]
        if (not isinstance(g, list) or len(g) != 2 or not all(isinstance(x, int) for x in g)
                or g[0] < verify.MIN_GRID[0] or g[1] < verify.MIN_GRID[1]):
            raise ConfigError(f"must be [n_r, n_theta] with n_r >= {verify.MIN_GRID[0]}, "
                              f"n_theta >= {verify.MIN_GRID[1]}", f"{where}.numerics.grid")
    for key in ("h_r", "radius", "max_residual"):
        if key in num and (not isinstance(num[key], (int, float)) or num[key] <= 0):
            raise ConfigError("must be a positive number", f"{where}.numerics.{key}")
    if "radii" in num:
        r = num["radii"]
        if not isinstance(r, list) or len(r) == 0 or np.any(np.diff(np.asarray(r, float)) <= 0):
            raise ConfigError("must be a non-empty increasing list", f"{where}.numerics.radii")


def parse_scenario(raw: dict, index: int = 0) -> ScenarioConfig:
    where = f"scenario[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError("must be a table", where)
    sid = raw.get("id", f"scenario-{index}")
    if not isinstance(sid, str):
        raise ConfigError("must be a string", f"{where}.id")
    try:
        group = lie.GroupKind.parse(str(raw.get("group", "")))
    except ValueError as err:
        raise ConfigError(str(err), f"{where}.group") from err
    conn = _require_table(raw, "connection", where)
    if conn.get("family") not in FAMILIES:
        raise ConfigError(f"unknown family {conn.get('family')!r}; expected one of {sorted(FAMILIES)}",
                          f"{where}.connection.family")
    chart = raw.get("chart", {"shape": "ball", "center": [0.0, 0.0], "radius": 2.0})
    if not isinstance(chart, dict) or chart.get("shape", "ball") not in ("ball", "box"):
        raise ConfigError("shape must be 'ball' or 'box'", f"{where}.chart")
    path = raw.get("path")
    if path is not None and (not isinstance(path, dict) or path.get("family") not in PATH_FAMILIES):
        raise ConfigError(f"family must be one of {PATH_FAMILIES}", f"{where}.path.family")
    surface = raw.get("surface")
    if surface is not None and (not isinstance(surface, dict) or surface.get("family") not in SURFACE_FAMILIES):
        raise ConfigError(f"family must be one of {SURFACE_FAMILIES}", f"{where}.surface.family")
    numerics = raw.get("numerics", {})
    if not isinstance(numerics, dict):
        raise ConfigError("must be a table", f"{where}.numerics")
    _check_numerics(numerics, where)
    known = {"id", "group", "connection", "chart", "path", "surface", "numerics"}
    extra = sorted(set(raw) - known)
    if extra:
        raise ConfigError("unknown key", f"{where}.{extra[0]}")
    return ScenarioConfig(sid, group, dict(conn), dict(chart),
                          None if path is None else dict(path),
                          None if surface is None else dict(surface), dict(numerics))


def loads(text: str) -> list[ScenarioConfig]:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"not valid TOML: {err}") from err
    items = raw.get("scenario")
    if not isinstance(items, list) or not items:
        raise ConfigError("expected at least one [[scenario]] table", "scenario")
    return [parse_scenario(item, i) for i, item in enumerate(items)]


def load(path) -> list[ScenarioConfig]:
    try:
        text = FilePath(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}", "config") from err
    return loads(text)


def to_dict(scenario: ScenarioConfig) -> dict:
    out = {"id": scenario.id, "group": scenario.group.name,
           "connection": copy.deepcopy(scenario.connection), "chart": copy.deepcopy(scenario.chart)}
    for key in ("path", "surface"):
        val = getattr(scenario, key)
        if val is not None:
            out[key] = copy.deepcopy(val)
    if scenario.numerics:
        out["numerics"] = copy.deepcopy(scenario.numerics)
    return out


def dumps(scenarios) -> str:
    return tomli_w.dumps({"scenario": [to_dict(s) for s in scenarios]})
