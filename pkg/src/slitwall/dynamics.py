"""Free flight, slit projection and momentum exchange for the particle and wall.

The composite state is never stored as a dense (q, Q) array. After the slits
it is the sum of two product terms,

    |final> = |psi_1> (x) e^{+ikQ}|xi> + |psi_2> (x) e^{-ikQ}|xi>,

with psi_1 = U(tau') e^{-ikq} S_1 U(tau) psi and psi_2 = U(tau') e^{+ikq} S_2 U(tau) psi,
and :class:`BranchPair` keeps the four factors.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import ContractViolation
from .grid import EDGE_TOL, HBAR, Representation, WaveFunction, check_edge_decay, overlap
from .states import build_state

if TYPE_CHECKING:
    from .config import ScenarioConfig

log = logging.getLogger(__name__)


class SlitMode(str, enum.Enum):
    PARTITION = "partition"
    APERTURE = "aperture"


@dataclass(frozen=True)
class SlitModel:
    """How the wall's two openings act on the particle coordinate.

    ``partition`` splits the line at ``x_divide`` (slit 1 on the right), so the
    two projectors sum to the identity. ``aperture`` keeps two windows of
    width ``width`` centred at +-separation/2 and renormalizes what passes.
    """

    mode: SlitMode = SlitMode.PARTITION
    x_divide: float = 0.0
    separation: float | None = None
    width: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", SlitMode(self.mode))
        errors = slit_model_errors(self.mode, self.separation, self.width)
        if errors:
            raise ContractViolation("; ".join(errors))


def slit_model_errors(mode: SlitMode, separation: float | None, width: float | None) -> list[str]:
    if SlitMode(mode) is SlitMode.PARTITION:
        return []
    errors = []
    if separation is None or separation <= 0:
        errors.append("aperture mode needs separation d > 0")
    if width is None or width <= 0:
        errors.append("aperture mode needs width w > 0")
    if not errors and width > separation:
        errors.append(f"aperture windows overlap: width w={width} exceeds separation d={separation}")
    return errors


@dataclass(frozen=True)
class Branch:
    particle: WaveFunction
    wall: WaveFunction

    def norm_sq(self) -> float:
        return self.particle.norm_sq() * self.wall.norm_sq()


@dataclass(frozen=True)
class BranchPair:
    """The two product terms of the final state.

    Branch factors are unnormalized; for a partition slit model the two
    squared branch norms add up to one. ``k_applied`` is the kick after
    snapping to the momentum lattice.
    """

    branch1: Branch
    branch2: Branch
    k_applied: float

    @property
    def grid(self):
        return self.branch1.particle.grid

    def norms_sq(self) -> tuple[float, float]:
        return self.branch1.norm_sq(), self.branch2.norm_sq()

    def wall_overlap(self) -> complex:
        """<xi_+|xi_->, the coherence factor multiplying the interference term."""
        w1 = self.branch1.wall.position()
        w2 = self.branch2.wall.position()
        return overlap(w1, w2) / (w1.norm() * w2.norm())


def free_propagate(psi: WaveFunction, mass: float, t: float, edge_tol: float = EDGE_TOL) -> WaveFunction:
    """Evolve under the free Hamiltonian p^2/2m for time ``t``.

    The result is returned in the representation of the input. The
    position-space result must stay below ``edge_tol`` at the grid edges.
    """
    if mass <= 0:
        raise ContractViolation(f"mass must be positive, got {mass}")
    if t < 0:
        raise ContractViolation(f"time must be non-negative, got {t}")
    if t == 0:
        return psi
    phi = psi.momentum()
    p = phi.grid.momenta
    phi = phi.replace(phi.amplitudes * np.exp(-1j * p**2 * t / (2 * mass * HBAR)))
    out = phi.position()
    check_edge_decay(out, edge_tol, "propagated state")
    return out.in_representation(psi.representation)


def slit_masks(x: np.ndarray, model: SlitModel) -> tuple[np.ndarray, np.ndarray]:
    if model.mode is SlitMode.PARTITION:
        right = x >= model.x_divide
        return right, ~right
    half = model.width / 2
    c = model.separation / 2
    # half-open windows so touching apertures (w == d) stay disjoint
    m1 = (x >= c - half) & (x < c + half)
    m2 = (x >= -c - half) & (x < -c + half)
    return m1, m2


def apply_slits(psi: WaveFunction, model: SlitModel) -> tuple[WaveFunction, WaveFunction]:
    """Project ``psi`` onto the two openings; returns (through slit 1, through slit 2)."""
    if psi.representation is not Representation.POSITION:
        raise ContractViolation("apply_slits expects a position-representation state")
    m1, m2 = slit_masks(psi.grid.positions, model)
    a = psi.amplitudes
    s1 = psi.replace(np.where(m1, a, 0))
    s2 = psi.replace(np.where(m2, a, 0))
    if model.mode is SlitMode.APERTURE:
        passed = s1.norm_sq() + s2.norm_sq()
        if passed <= 0:
            raise ContractViolation("no amplitude reaches either aperture")
        scale = 1 / np.sqrt(passed)
        s1 = s1.replace(s1.amplitudes * scale)
        s2 = s2.replace(s2.amplitudes * scale)
    return s1, s2


def momentum_kick(psi: WaveFunction, k: float, sign: int) -> WaveFunction:
    """Apply exp(i*sign*k*x/hbar), shifting momentum by ``sign * k``.

    ``k`` is snapped to the nearest multiple of the momentum spacing so that
    the shift is an exact translation of the momentum lattice; the snapped
    value is ``psi.grid.snap_momentum(k)``.
    """
    if k < 0:
        raise ContractViolation(f"kick must be non-negative, got {k}")
    if sign not in (1, -1):
        raise ContractViolation(f"sign must be +1 or -1, got {sign}")
    g = psi.grid
    steps = g.momentum_steps(k)
    if steps * g.momentum_spacing != k:
        log.debug("kick %g snapped to %g", k, steps * g.momentum_spacing)
    if steps == 0:
        return psi
    if psi.representation is Representation.MOMENTUM:
        return psi.replace(np.roll(psi.amplitudes, sign * steps))
    k_applied = steps * g.momentum_spacing
    return psi.replace(psi.amplitudes * np.exp(1j * sign * k_applied * g.positions / HBAR))


def branch_pair(
    psi: WaveFunction,
    xi: WaveFunction,
    *,
    k: float,
    slits: SlitModel,
    mass: float = 1.0,
    tau: float = 0.0,
    tau_prime: float = 0.0,
    edge_tol: float = EDGE_TOL,
    propagation_edge_tol: float = EDGE_TOL,
) -> BranchPair:
    """Assemble the final two-branch state from explicit initial states."""
    grid = psi.grid
    if xi.grid != grid:
        raise ContractViolation("particle and wall states must share a grid")
    at_slits = free_propagate(psi.position(), mass, tau, edge_tol)
    s1, s2 = apply_slits(at_slits, slits)
    # the particle recoils opposite to the wall, branch by branch
    p1 = free_propagate(momentum_kick(s1, k, -1), mass, tau_prime, propagation_edge_tol)
    p2 = free_propagate(momentum_kick(s2, k, +1), mass, tau_prime, propagation_edge_tol)
    wall = xi.position()
    return BranchPair(
        Branch(p1, momentum_kick(wall, k, +1)),
        Branch(p2, momentum_kick(wall, k, -1)),
        grid.snap_momentum(k),
    )


def run_pipeline(config: "ScenarioConfig") -> BranchPair:
    """Run the full scenario: flight to the slits, projection, kick, flight to the screen."""
    grid = config.grid
    psi = build_state(config.particle, grid)
    xi = build_state(config.wall, grid)
    return branch_pair(
        psi,
        xi,
        k=config.k,
        slits=config.slits,
        mass=config.mass_particle,
        tau=config.tau,
        tau_prime=config.tau_prime,
        propagation_edge_tol=config.propagation_edge_tol,
    )
