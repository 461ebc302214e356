"""SI-unit recoil estimates for a photon bounced off an atomic reflector.

A photon of wavelength lambda reflected by a target of mass M transfers
k = 2h/lambda, so the target recoils at v = 2h/(M lambda). The wall-spread
scale below which fringes survive is pi*hbar/k = lambda/4.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .grid import GridSpec
from .observables import visibility
from .states import StateKind, StateSpec, build_state

# CODATA 2018 (h is exact in SI); 9 significant digits for the mass unit.
PLANCK_H = 6.62607015e-34          # J s
HBAR_SI = PLANCK_H / (2 * np.pi)   # J s
ATOMIC_MASS_UNIT = 1.66053907e-27  # kg

# Standard atomic weights (u).
MERCURY_U = 200.592
SODIUM_U = 22.9897693


@dataclass(frozen=True)
class RecoilScenario:
    wavelength: float  # m
    mass: float        # kg
    label: str = ""

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ContractViolation(f"wavelength must be positive, got {self.wavelength}")
        if not self.mass > 0:
            raise ContractViolation(f"mass must be positive, got {self.mass}")

    @classmethod
    def atoms(cls, wavelength: float, atomic_mass_u: float, count: int = 1, label: str = "") -> "RecoilScenario":
        return cls(wavelength, atomic_mass_u * ATOMIC_MASS_UNIT * count, label)

    @property
    def photon_momentum(self) -> float:
        return PLANCK_H / self.wavelength

    @property
    def kick(self) -> float:
        return 2 * self.photon_momentum


def recoil_velocity(s: RecoilScenario) -> float:
    """Target recoil speed k/M in m/s."""
    return s.kick / s.mass


def max_target_spread(s: RecoilScenario) -> tuple[float, float]:
    """(lambda/4, pi*hbar/k) in metres; the two agree identically."""
    return s.wavelength / 4, np.pi * HBAR_SI / s.kick


def reference_scenarios(wavelength: float = 0.5e-6) -> list[RecoilScenario]:
    return [
        RecoilScenario.atoms(wavelength, MERCURY_U, 1, "mercury atom"),
        RecoilScenario.atoms(wavelength, SODIUM_U, 10_000, "sodium BEC (1e4 atoms)"),
    ]


def recoil_table(scenarios=None) -> list[dict]:
    rows = []
    for s in scenarios or reference_scenarios():
        spread, _ = max_target_spread(s)
        rows.append({
            "target": s.label,
            "wavelength_m": s.wavelength,
            "mass_kg": s.mass,
            "velocity_m_per_s": recoil_velocity(s),
            "max_spread_m": spread,
        })
    return rows


def visibility_spread_threshold(s: RecoilScenario, v_min: float = 0.5, tol: float = 1e-6) -> tuple[float, float]:
    """Largest Gaussian wall spread (m) keeping the simulated visibility >= ``v_min``.

    Runs in natural units where hbar = 1 and the kick is 1, so one length
    unit is hbar/k metres. Returns (spread in metres, spread / (lambda/4)).
    """
    if not 0 < v_min < 1:
        raise ContractViolation("v_min must lie in (0, 1)")
    # k = 1 lands on the lattice exactly; sigma from 0.1 to 3 stays resolved
    grid = GridSpec.from_momentum_spacing(1 / 64, 16384)

    def vis(sigma):
        xi = build_state(StateSpec(StateKind.GAUSSIAN_POSITION, {"sigma": sigma}), grid)
        return visibility(xi, 1.0).visibility

    lo, hi = 0.1, 3.0
    if vis(lo) < v_min or vis(hi) >= v_min:
        raise ContractViolation(f"v_min={v_min} is not bracketed by the spread range")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if vis(mid) >= v_min:
            lo = mid
        else:
            hi = mid
    metres = lo * HBAR_SI / s.kick
    return metres, metres / (s.wavelength / 4)
