"""Initial states for the particle and the slit-wall.

Every constructor returns a normalized :class:`~slitwall.grid.WaveFunction`
in the representation where the state is defined analytically: Gaussians in
position space (or momentum space for ``GaussianMomentum``), compact-support
states in momentum space.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ContractViolation, GridTooCoarse
from .grid import (
    EDGE_TOL,
    HBAR,
    GridSpec,
    Representation,
    WaveFunction,
    check_edge_decay,
)

# Samples required across the narrowest feature of a state.
MIN_FEATURE_SAMPLES = 16
# Default mass left outside an epsilon-support interval.
SUPPORT_EPS = 1e-6


class StateKind(str, enum.Enum):
    GAUSSIAN_POSITION = "GaussianPosition"
    GAUSSIAN_MOMENTUM = "GaussianMomentum"
    TOP_HAT_MOMENTUM = "TopHatMomentum"
    SINE_COUNTEREXAMPLE = "SineCounterexample"
    PLANE_WAVE_PACKET = "PlaneWavePacket"


# kind -> (required parameters, optional parameters with defaults)
_PARAMETERS: dict[StateKind, tuple[tuple[str, ...], dict[str, float]]] = {
    StateKind.GAUSSIAN_POSITION: (("sigma",), {"center": 0.0, "momentum": 0.0, "chirp": 0.0}),
    StateKind.GAUSSIAN_MOMENTUM: (("sigma",), {"center": 0.0, "position": 0.0}),
    StateKind.TOP_HAT_MOMENTUM: (("width",), {"center": 0.0}),
    StateKind.SINE_COUNTEREXAMPLE: (("k",), {"a": 1.0, "b": 1.0}),
    StateKind.PLANE_WAVE_PACKET: (("sigma", "momentum"), {"center": 0.0}),
}


@dataclass(frozen=True)
class StateSpec:
    kind: StateKind
    parameters: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", StateKind(self.kind))
        object.__setattr__(self, "parameters", dict(self.parameters))

    def get(self, name: str) -> float:
        required, optional = _PARAMETERS[self.kind]
        if name in self.parameters:
            return float(self.parameters[name])
        if name in optional:
            return optional[name]
        raise ContractViolation(f"{self.kind.value} needs parameter {name!r}")

    def with_parameter(self, name: str, value: float) -> "StateSpec":
        params = dict(self.parameters)
        params[name] = value
        return StateSpec(self.kind, params)

    @classmethod
    def from_dict(cls, data: Mapping) -> "StateSpec":
        data = dict(data)
        kind = data.pop("kind")
        return cls(StateKind(kind), data)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, **self.parameters}


def parameter_names(kind: StateKind) -> set[str]:
    required, optional = _PARAMETERS[StateKind(kind)]
    return set(required) | set(optional)


def validate_spec(spec: StateSpec) -> list[str]:
    """Every problem with ``spec`` as a list of messages (empty when valid)."""
    required, optional = _PARAMETERS[spec.kind]
    errors = []
    for name in spec.parameters:
        if name not in required and name not in optional:
            errors.append(f"{spec.kind.value}: unknown parameter {name!r}")
    for name in required:
        if name not in spec.parameters:
            errors.append(f"{spec.kind.value}: missing parameter {name!r}")
    for name, value in spec.parameters.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
            errors.append(f"{spec.kind.value}: parameter {name!r} must be a finite number")
    if errors:
        return errors
    for name in ("sigma", "width", "k"):
        if name in spec.parameters and spec.parameters[name] <= 0:
            errors.append(f"{spec.kind.value}: {name} must be > 0")
    if spec.kind is StateKind.SINE_COUNTEREXAMPLE and spec.get("a") == 0 and spec.get("b") == 0:
        errors.append("SineCounterexample: a and b cannot both be zero")
    return errors


def _require_resolved(feature: float, step: float, what: str) -> None:
    if feature / step < MIN_FEATURE_SAMPLES:
        raise GridTooCoarse(
            f"{what} spans {feature / step:.1f} samples; at least "
            f"{MIN_FEATURE_SAMPLES} are needed"
        )


def _gaussian(axis, center, sigma):
    return np.exp(-((axis - center) ** 2) / (4 * sigma**2))


def build_state(spec: StateSpec, grid: GridSpec) -> WaveFunction:
    """Construct the normalized state described by ``spec`` on ``grid``."""
    errors = validate_spec(spec)
    if errors:
        raise ContractViolation("; ".join(errors))
    kind = spec.kind

    if kind in (StateKind.GAUSSIAN_POSITION, StateKind.PLANE_WAVE_PACKET):
        x = grid.positions
        x0, sigma, p0 = spec.get("center"), spec.get("sigma"), spec.get("momentum")
        chirp = spec.get("chirp") if kind is StateKind.GAUSSIAN_POSITION else 0.0
        # the +-2 sigma core must be resolved
        _require_resolved(4 * sigma, grid.spacing, f"{kind.value} core")
        amps = _gaussian(x, x0, sigma) * np.exp(
            1j * p0 * x / HBAR + 0.5j * chirp * (x - x0) ** 2 / HBAR
        )
        rep = Representation.POSITION

    elif kind is StateKind.GAUSSIAN_MOMENTUM:
        p = grid.momenta
        p0, sigma, x0 = spec.get("center"), spec.get("sigma"), spec.get("position")
        _require_resolved(4 * sigma, grid.momentum_spacing, "GaussianMomentum core")
        amps = _gaussian(p, p0, sigma) * np.exp(-1j * p * x0 / HBAR)
        rep = Representation.MOMENTUM

    elif kind is StateKind.TOP_HAT_MOMENTUM:
        p = grid.momenta
        p0, width = spec.get("center"), spec.get("width")
        _require_resolved(width, grid.momentum_spacing, "TopHatMomentum width")
        amps = (np.abs(p - p0) < width / 2).astype(float)
        rep = Representation.MOMENTUM

    elif kind is StateKind.SINE_COUNTEREXAMPLE:
        p = grid.momenta
        k, a, b = spec.get("k"), spec.get("a"), spec.get("b")
        # the b-lobe oscillates twice as fast: its half period is k/2
        _require_resolved(k / 2 if b else k, grid.momentum_spacing, "SineCounterexample lobe")
        upper = (p >= 0) & (p <= 2 * k)
        lower = (p < 0) & (p >= -2 * k)
        amps = np.where(upper, a * np.sin(2 * np.pi * p / (2 * k)), 0.0)
        amps = amps + np.where(lower, b * np.sin(4 * np.pi * p / (2 * k)), 0.0)
        rep = Representation.MOMENTUM

    else:  # pragma: no cover - enum is exhaustive
        raise ContractViolation(f"unsupported state kind {kind}")

    psi = WaveFunction(grid, amps, rep)
    if psi.norm_sq() == 0:
        raise GridTooCoarse(f"{kind.value} has no samples on this grid")
    psi = psi.normalized()
    check_edge_decay(psi, EDGE_TOL, kind.value)
    return psi


def support_width(psi: WaveFunction, eps: float, representation=Representation.MOMENTUM) -> float:
    """Length of the shortest run of samples holding at least ``1 - eps`` of the mass.

    Each sample stands for a cell of one grid step, so a state occupying
    ``n`` consecutive samples has width ``n * step``.
    """
    if not 0 < eps <= 0.1:
        raise ContractViolation(f"eps must lie in (0, 0.1], got {eps}")
    phi = psi.in_representation(representation)
    mass = phi.density() * phi.step
    mass = mass / mass.sum()
    cum = np.concatenate(([0.0], np.cumsum(mass)))
    target = 1.0 - eps
    # for each start i, the first end j with cum[j] - cum[i] >= target
    ends = np.searchsorted(cum, cum[:-1] + target, side="left")
    valid = ends < len(cum)
    if not valid.any():
        # rounding left the total a hair short of the target
        return len(mass) * phi.step
    counts = ends[valid] - np.nonzero(valid)[0]
    return float(counts.min() * phi.step)


def momentum_support_width(psi: WaveFunction, eps: float = SUPPORT_EPS) -> float:
    """Epsilon-support width of the momentum distribution of ``psi``."""
    return support_width(psi, eps, Representation.MOMENTUM)
