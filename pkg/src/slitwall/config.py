"""Scenario files: strict JSON schema, full validation, canonical hashing.

A scenario file looks like::

    {
      "grid": {"n_points": 16384, "momentum_spacing": 0.0078125},
      "particle": {"kind": "PlaneWavePacket", "sigma": 2.0, "momentum": 0.0},
      "wall": {"kind": "GaussianPosition", "sigma": 0.5},
      "mass_particle": 1.0, "mass_wall": 1.0,
      "tau": 0.5, "tau_prime": 3.0, "k": 1.0,
      "slits": {"mode": "partition", "x_divide": 0.0},
      "seed": 20070314,
      "sweep": {"parameter": "sigma", "start": 0.05, "stop": 5.0, "points": 12, "spacing": "log"}
    }

The grid takes either ``length`` or ``momentum_spacing``. Unknown keys are
rejected, and every problem is reported rather than only the first.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .dynamics import SlitMode, SlitModel, slit_model_errors
from .errors import ConfigError, ContractViolation
from .grid import EDGE_TOL, GridSpec
from .states import StateKind, StateSpec, parameter_names, validate_spec

SWEEP_SPACINGS = ("linear", "log")
DEFAULT_SAMPLES = 10_000
DEFAULT_SCREEN_POINTS = (0.0,)


@dataclass(frozen=True)
class SweepDescriptor:
    """Which scalar to vary and over which grid of values.

    ``parameter`` is either ``"k"`` or the name of a wall-state parameter.
    """

    parameter: str
    start: float
    stop: float
    points: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class ScenarioConfig:
    grid: GridSpec
    particle: StateSpec
    wall: StateSpec
    k: float
    slits: SlitModel = field(default_factory=SlitModel)
    mass_particle: float = 1.0
    mass_wall: float = 1.0
    tau: float = 0.0
    tau_prime: float = 0.0
    pivot: float | None = None
    seed: int | None = None
    samples: int = DEFAULT_SAMPLES
    sweep: SweepDescriptor | None = None
    v_min: float = 0.9
    acc_min: float = 0.99
    screen_points: tuple[float, ...] = DEFAULT_SCREEN_POINTS
    propagation_edge_tol: float = EDGE_TOL
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form of the source document."""
        canonical = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


_TOP_LEVEL = {
    "grid", "particle", "wall", "k", "slits", "mass_particle", "mass_wall", "tau",
    "tau_prime", "pivot", "seed", "samples", "sweep", "thresholds", "screen_points",
    "propagation_edge_tol", "output",
}
_REQUIRED = ("grid", "particle", "wall", "k")


class _Collector:
    def __init__(self):
        self.errors: list[str] = []

    def add(self, msg: str):
        self.errors.append(msg)

    def unknown(self, where: str, data: dict, allowed):
        for key in sorted(set(data) - set(allowed)):
            self.add(f"{where}: unknown field {key!r}")

    def number(self, where: str, value, *, positive=False, nonneg=False, default=None):
        if value is None:
            return default
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
            self.add(f"{where}: expected a finite number, got {value!r}")
            return default
        if positive and value <= 0:
            self.add(f"{where}: must be > 0, got {value}")
        elif nonneg and value < 0:
            self.add(f"{where}: must be >= 0, got {value}")
        return float(value)

    def integer(self, where: str, value, *, minimum=None, default=None):
        if value is None:
            return default
        if isinstance(value, bool) or not isinstance(value, int):
            self.add(f"{where}: expected an integer, got {value!r}")
            return default
        if minimum is not None and value < minimum:
            self.add(f"{where}: must be >= {minimum}, got {value}")
        return value

    def mapping(self, where: str, value) -> dict | None:
        if value is None:
            return None
        if not isinstance(value, dict):
            self.add(f"{where}: expected an object")
            return None
        return value


def _parse_grid(c: _Collector, data: dict | None) -> GridSpec | None:
    if data is None:
        return None
    c.unknown("grid", data, {"n_points", "length", "momentum_spacing"})
    n = c.integer("grid.n_points", data.get("n_points"), minimum=16)
    if "n_points" not in data:
        c.add("grid: missing field 'n_points'")
    if ("length" in data) == ("momentum_spacing" in data):
        c.add("grid: give exactly one of 'length' or 'momentum_spacing'")
        return None
    length = c.number("grid.length", data.get("length"), positive=True)
    dp = c.number("grid.momentum_spacing", data.get("momentum_spacing"), positive=True)
    if n is None or (length is None and dp is None):
        return None
    try:
        if length is not None:
            return GridSpec(length, n)
        return GridSpec.from_momentum_spacing(dp, n)
    except ContractViolation as exc:
        c.add(f"grid: {exc}")
        return None


def _parse_state(c: _Collector, where: str, data: dict | None) -> StateSpec | None:
    if data is None:
        return None
    kind = data.get("kind")
    try:
        kind = StateKind(kind)
    except ValueError:
        choices = ", ".join(k.value for k in StateKind)
        c.add(f"{where}.kind: expected one of {choices}, got {kind!r}")
        return None
    params = {key: val for key, val in data.items() if key != "kind"}
    spec = StateSpec(kind, params)
    for msg in validate_spec(spec):
        c.add(f"{where}: {msg}")
    return spec


def _parse_slits(c: _Collector, data: dict | None) -> SlitModel:
    if data is None:
        return SlitModel()
    c.unknown("slits", data, {"mode", "x_divide", "d", "w"})
    try:
        mode = SlitMode(data.get("mode", "partition"))
    except ValueError:
        c.add(f"slits.mode: expected 'partition' or 'aperture', got {data.get('mode')!r}")
        return SlitModel()
    x_divide = c.number("slits.x_divide", data.get("x_divide"), default=0.0)
    d = c.number("slits.d", data.get("d"))
    w = c.number("slits.w", data.get("w"))
    problems = slit_model_errors(mode, d, w)
    for msg in problems:
        c.add(f"slits: {msg}")
    if problems:
        return SlitModel()
    return SlitModel(mode, x_divide, d, w)


def _parse_sweep(c: _Collector, data: dict | None, wall: StateSpec | None) -> SweepDescriptor | None:
    if data is None:
        return None
    c.unknown("sweep", data, {"parameter", "start", "stop", "points", "spacing"})
    param = data.get("parameter")
    if not isinstance(param, str):
        c.add("sweep.parameter: expected a string")
    elif wall is not None and param != "k" and param not in parameter_names(wall.kind):
        c.add(f"sweep.parameter: {param!r} is neither 'k' nor a {wall.kind.value} parameter")
    start = c.number("sweep.start", data.get("start"))
    stop = c.number("sweep.stop", data.get("stop"))
    points = c.integer("sweep.points", data.get("points"), minimum=3)
    spacing = data.get("spacing", "linear")
    for name in ("start", "stop", "points"):
        if name not in data:
            c.add(f"sweep: missing field {name!r}")
    if spacing not in SWEEP_SPACINGS:
        c.add(f"sweep.spacing: expected one of {SWEEP_SPACINGS}, got {spacing!r}")
    if start is not None and stop is not None:
        if not start < stop:
            c.add("sweep: start must be below stop (monotone parameter grid)")
        if spacing == "log" and start <= 0:
            c.add("sweep: log spacing needs a positive start")
    if c.errors or not isinstance(param, str) or None in (start, stop, points):
        return None
    return SweepDescriptor(param, start, stop, points, spacing)


def parse_config(data: Any) -> ScenarioConfig:
    """Validate a decoded JSON document; raises :class:`ConfigError` listing all problems."""
    c = _Collector()
    if not isinstance(data, dict):
        raise ConfigError(["top level: expected a JSON object"])
    c.unknown("config", data, _TOP_LEVEL)
    for key in _REQUIRED:
        if key not in data:
            c.add(f"config: missing field {key!r}")

    grid = _parse_grid(c, c.mapping("grid", data.get("grid")))
    particle = _parse_state(c, "particle", c.mapping("particle", data.get("particle")))
    wall = _parse_state(c, "wall", c.mapping("wall", data.get("wall")))
    k = c.number("k", data.get("k"), nonneg=True)
    slits = _parse_slits(c, c.mapping("slits", data.get("slits")))
    mass_particle = c.number("mass_particle", data.get("mass_particle"), positive=True, default=1.0)
    mass_wall = c.number("mass_wall", data.get("mass_wall"), positive=True, default=1.0)
    tau = c.number("tau", data.get("tau"), nonneg=True, default=0.0)
    tau_prime = c.number("tau_prime", data.get("tau_prime"), nonneg=True, default=0.0)
    pivot = c.number("pivot", data.get("pivot"))
    seed = c.integer("seed", data.get("seed"), minimum=0)
    if seed is not None and seed >= 2**64:
        c.add("seed: must fit in 64 bits")
    samples = c.integer("samples", data.get("samples"), minimum=10_000, default=DEFAULT_SAMPLES)
    tol = c.number("propagation_edge_tol", data.get("propagation_edge_tol"), positive=True, default=EDGE_TOL)

    thresholds = c.mapping("thresholds", data.get("thresholds")) or {}
    c.unknown("thresholds", thresholds, {"v_min", "acc_min"})
    v_min = c.number("thresholds.v_min", thresholds.get("v_min"), default=0.9)
    acc_min = c.number("thresholds.acc_min", thresholds.get("acc_min"), default=0.99)
    for name, val in (("v_min", v_min), ("acc_min", acc_min)):
        if val is not None and not 0 <= val < 1:
            c.add(f"thresholds.{name}: must lie in [0, 1)")

    screen = data.get("screen_points", list(DEFAULT_SCREEN_POINTS))
    if not isinstance(screen, list) or not screen:
        c.add("screen_points: expected a non-empty list of numbers")
        screen = list(DEFAULT_SCREEN_POINTS)
    screen = tuple(c.number(f"screen_points[{i}]", q, default=0.0) for i, q in enumerate(screen))
    if grid is not None:
        half = grid.length / 2
        for i, q in enumerate(screen):
            if not -half <= q < half:
                c.add(f"screen_points[{i}]: {q} lies outside the grid [{-half:.6g}, {half:.6g})")

    output = c.mapping("output", data.get("output"))
    if output is not None:
        c.unknown("output", output, {"dir"})

    sweep = _parse_sweep(c, c.mapping("sweep", data.get("sweep")), wall)
    if "sweep" in data and seed is None:
        c.add("seed: required because the sweep estimates path accuracy by Monte Carlo")

    if c.errors:
        raise ConfigError(c.errors)
    return ScenarioConfig(
        grid=grid, particle=particle, wall=wall, k=k, slits=slits,
        mass_particle=mass_particle, mass_wall=mass_wall, tau=tau, tau_prime=tau_prime,
        pivot=pivot, seed=seed, samples=samples, sweep=sweep, v_min=v_min, acc_min=acc_min,
        screen_points=screen, propagation_edge_tol=tol, raw=data,
    )


def load_config(path) -> ScenarioConfig:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror or exc}"]) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"]) from exc
    return parse_config(data)


def output_dir(config: ScenarioConfig) -> str | None:
    out = config.raw.get("output") or {}
    return out.get("dir")
