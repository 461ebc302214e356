"""
Uniform periodic 1-D grids and wavefunctions sampled on them.

Natural units are used throughout: hbar = 1. A grid of ``n_points`` samples
over ``length`` places sample j at

    x_j = (j - n_points/2) * dx,        dx = length / n_points

and the conjugate momentum lattice at

    P_m = (m - n_points/2) * dP,        dP = 2*pi*hbar / length

The transform between the two is the discretized unitary Fourier integral

    psi~(P) = (2*pi*hbar)^(-1/2) * sum_j exp(-i P x_j / hbar) psi(x_j) dx

which is exactly unitary with respect to the weighted norms
sum |psi|^2 dx and sum |psi~|^2 dP.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ContractViolation, GridTooSmall, InternalConsistencyError

HBAR = 1.0

# Amplitude that a freshly constructed state may carry at the two edge samples.
EDGE_TOL = 1e-8
NORM_TOL = 1e-10
MIN_POINTS = 16


class Representation(str, enum.Enum):
    POSITION = "position"
    MOMENTUM = "momentum"


@dataclass(frozen=True)
class GridSpec:
    """Centered, periodic sample lattice shared by all wavefunctions of a run."""

    length: float
    n_points: int

    def __post_init__(self):
        if not np.isfinite(self.length) or self.length <= 0:
            raise ContractViolation(f"grid length must be positive, got {self.length}")
        n = int(self.n_points)
        if n != self.n_points or n < MIN_POINTS or n & (n - 1):
            raise ContractViolation(
                f"n_points must be a power of two >= {MIN_POINTS}, got {self.n_points}"
            )

    @classmethod
    def from_momentum_spacing(cls, momentum_spacing: float, n_points: int) -> "GridSpec":
        """Grid whose momentum lattice has the given spacing.

        Handy for putting a kick ``k`` exactly on the lattice: choose
        ``momentum_spacing = k / m`` for an integer ``m``.
        """
        if momentum_spacing <= 0:
            raise ContractViolation("momentum_spacing must be positive")
        return cls(2 * np.pi * HBAR / momentum_spacing, n_points)

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @property
    def momentum_spacing(self) -> float:
        return 2 * np.pi * HBAR / self.length

    @cached_property
    def positions(self) -> np.ndarray:
        x = (np.arange(self.n_points) - self.n_points // 2) * self.spacing
        x.flags.writeable = False
        return x

    @cached_property
    def momenta(self) -> np.ndarray:
        p = (np.arange(self.n_points) - self.n_points // 2) * self.momentum_spacing
        p.flags.writeable = False
        return p

    def axis(self, representation: Representation) -> np.ndarray:
        return self.positions if representation is Representation.POSITION else self.momenta

    def step(self, representation: Representation) -> float:
        if representation is Representation.POSITION:
            return self.spacing
        return self.momentum_spacing

    def momentum_steps(self, k: float) -> int:
        """Number of momentum-lattice steps nearest to ``k``."""
        return int(np.rint(k / self.momentum_spacing))

    def snap_momentum(self, k: float) -> float:
        """``k`` rounded to the nearest multiple of the momentum spacing."""
        return self.momentum_steps(k) * self.momentum_spacing

    def nearest_index(self, value: float, representation=Representation.POSITION) -> int:
        axis = self.axis(representation)
        h = self.step(representation)
        if value < axis[0] - h / 2 or value > axis[-1] + h / 2:
            raise ContractViolation(
                f"{value} lies outside the {representation.value} grid "
                f"[{axis[0]:.6g}, {axis[-1]:.6g}]"
            )
        return int(np.clip(np.rint(value / h) + self.n_points // 2, 0, self.n_points - 1))


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitudes on a grid, tagged with their representation.

    Instances are immutable: the amplitude array is copied on construction and
    marked read-only. Amplitudes are not forced to unit norm, because branch
    factors after the slits are legitimately sub-normalized; use
    :meth:`normalized` where a unit state is required.
    """

    grid: GridSpec
    amplitudes: np.ndarray
    representation: Representation = Representation.POSITION

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if amps.shape != (self.grid.n_points,):
            raise ContractViolation(
                f"expected {self.grid.n_points} amplitudes, got shape {amps.shape}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "representation", Representation(self.representation))

    @property
    def axis(self) -> np.ndarray:
        return self.grid.axis(self.representation)

    @property
    def step(self) -> float:
        return self.grid.step(self.representation)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_sq(self) -> float:
        return float(np.sum(self.density()) * self.step)

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def normalized(self) -> "WaveFunction":
        n = self.norm()
        if n == 0 or not np.isfinite(n):
            raise ContractViolation("cannot normalize a zero or non-finite state")
        return self.replace(self.amplitudes / n)

    def replace(self, amplitudes) -> "WaveFunction":
        return WaveFunction(self.grid, amplitudes, self.representation)

    def position(self) -> "WaveFunction":
        if self.representation is Representation.POSITION:
            return self
        return _inverse_transform(self)

    def momentum(self) -> "WaveFunction":
        if self.representation is Representation.MOMENTUM:
            return self
        return _forward_transform(self)

    def in_representation(self, representation: Representation) -> "WaveFunction":
        if Representation(representation) is Representation.POSITION:
            return self.position()
        return self.momentum()

    def edge_amplitude(self) -> float:
        return float(max(abs(self.amplitudes[0]), abs(self.amplitudes[-1])))


def _forward_transform(psi: WaveFunction) -> WaveFunction:
    g = psi.grid
    amps = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(psi.amplitudes)))
    amps *= g.spacing / np.sqrt(2 * np.pi * HBAR)
    return WaveFunction(g, amps, Representation.MOMENTUM)


def _inverse_transform(psi: WaveFunction) -> WaveFunction:
    g = psi.grid
    amps = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(psi.amplitudes)))
    amps *= g.n_points * g.momentum_spacing / np.sqrt(2 * np.pi * HBAR)
    return WaveFunction(g, amps, Representation.POSITION)


def to_momentum(psi: WaveFunction) -> WaveFunction:
    """Unitary transform of a position-space state to momentum space."""
    if psi.representation is not Representation.POSITION:
        raise ContractViolation("to_momentum expects a position-representation state")
    return _forward_transform(psi)


def to_position(psi: WaveFunction) -> WaveFunction:
    """Inverse of :func:`to_momentum`."""
    if psi.representation is not Representation.MOMENTUM:
        raise ContractViolation("to_position expects a momentum-representation state")
    return _inverse_transform(psi)


def check_edge_decay(psi: WaveFunction, tol: float = EDGE_TOL, what: str = "state") -> None:
    """Raise :class:`GridTooSmall` when ``psi`` has not decayed at the grid edges."""
    edge = psi.edge_amplitude()
    if edge >= tol:
        raise GridTooSmall(
            f"{what} has amplitude {edge:.3g} at the {psi.representation.value} grid edge "
            f"(limit {tol:.1g}); enlarge the grid"
        )


def moments(psi: WaveFunction) -> tuple[float, float]:
    """Mean and standard deviation of the coordinate of ``psi``'s representation."""
    rho = psi.density() * psi.step
    total = rho.sum()
    if total <= 0:
        raise ContractViolation("moments of a zero state are undefined")
    rho = rho / total
    axis = psi.axis
    mean = float(np.dot(axis, rho))
    var = float(np.dot((axis - mean) ** 2, rho))
    if var < -1e-12:
        raise InternalConsistencyError(f"negative variance {var:.3g}")
    return mean, float(np.sqrt(max(var, 0.0)))


def overlap(phi: WaveFunction, chi: WaveFunction) -> complex:
    """Inner product <phi|chi> as a Riemann sum in the shared representation."""
    if phi.grid != chi.grid:
        raise ContractViolation("overlap of states on different grids")
    if phi.representation is not chi.representation:
        raise ContractViolation("overlap of states in different representations")
    return complex(np.vdot(phi.amplitudes, chi.amplitudes) * phi.step)
