"""Two-branch object/meter states in finite dimensions.

A state c1 |psi1>|xi1> + c2 |psi2>|xi2> carries everything needed to talk
about interference on the object side, path information on the meter side,
and the disturbance a meter reading leaves behind. All quantities are
computed from the branch factors; nothing forms the tensor product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import BranchPair
from .errors import ContractViolation, OutcomeUnreachable

ORTHONORMAL_TOL = 1e-10
UNREACHABLE_PROB = 1e-14


def _unit(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128).ravel()
    n = np.linalg.norm(v)
    if n == 0 or not np.isfinite(n):
        raise ContractViolation(f"{name} must be a nonzero finite vector")
    return v / n


@dataclass(frozen=True, eq=False)
class TwoBranchState:
    """c1|psi1>(x)|xi1> + c2|psi2>(x)|xi2> with unit factor vectors and unit total norm."""

    c1: complex
    c2: complex
    psi1: np.ndarray
    psi2: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray

    @classmethod
    def create(cls, c1, c2, psi1, psi2, xi1, xi2) -> "TwoBranchState":
        """Normalize the factors, then rescale c1, c2 so the whole state has norm one."""
        psi1, psi2 = _unit(psi1, "psi1"), _unit(psi2, "psi2")
        xi1, xi2 = _unit(xi1, "xi1"), _unit(xi2, "xi2")
        if psi1.shape != psi2.shape or xi1.shape != xi2.shape:
            raise ContractViolation("branch factors must share the object and meter spaces")
        if psi1.size < 2 or xi1.size < 2:
            raise ContractViolation("object and meter spaces need dimension >= 2")
        c1, c2 = complex(c1), complex(c2)
        norm_sq = (
            abs(c1) ** 2 + abs(c2) ** 2
            + 2 * np.real(np.conj(c1) * c2 * np.vdot(psi1, psi2) * np.vdot(xi1, xi2))
        )
        if norm_sq <= 0:
            raise ContractViolation("the two branches cancel: zero state")
        scale = 1 / np.sqrt(norm_sq)
        for v in (psi1, psi2, xi1, xi2):
            v.flags.writeable = False
        return cls(c1 * scale, c2 * scale, psi1, psi2, xi1, xi2)

    @property
    def meter_overlap(self) -> complex:
        return complex(np.vdot(self.xi1, self.xi2))

    @property
    def object_overlap(self) -> complex:
        return complex(np.vdot(self.psi1, self.psi2))

    def visibility(self) -> float:
        return abs(self.meter_overlap)

    def norm_sq(self) -> float:
        return float(
            abs(self.c1) ** 2 + abs(self.c2) ** 2
            + 2 * np.real(np.conj(self.c1) * self.c2 * self.object_overlap * self.meter_overlap)
        )

    def swapped(self) -> "TwoBranchState":
        """The same state with object and meter roles exchanged."""
        return TwoBranchState(self.c1, self.c2, self.xi1, self.xi2, self.psi1, self.psi2)


def check_orthonormal(basis: np.ndarray) -> np.ndarray:
    """Return ``basis`` (columns are basis vectors) or raise if it is not orthonormal."""
    basis = np.asarray(basis, dtype=np.complex128)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
        raise ContractViolation("a basis must be a square matrix of column vectors")
    gram = basis.conj().T @ basis
    if np.max(np.abs(gram - np.eye(basis.shape[1]))) > ORTHONORMAL_TOL:
        raise ContractViolation("basis is not orthonormal")
    return basis


def _branch_distribution(c1, c2, u1, u2, other_overlap, basis) -> np.ndarray:
    basis = check_orthonormal(basis)
    if basis.shape[0] != u1.size:
        raise ContractViolation(f"basis dimension {basis.shape[0]} does not match the space ({u1.size})")
    a1 = c1 * (basis.conj().T @ u1)
    a2 = c2 * (basis.conj().T @ u2)
    prob = np.abs(a1) ** 2 + np.abs(a2) ** 2 + 2 * np.real(np.conj(a1) * a2 * other_overlap)
    prob = np.clip(prob, 0.0, None)
    return prob / prob.sum()


def object_outcome_distribution(s: TwoBranchState, basis: np.ndarray) -> np.ndarray:
    """Outcome probabilities for an object observable with eigenbasis ``basis``.

    The interference term is weighted by <xi1|xi2>; it vanishes when the
    meter states are orthogonal.
    """
    return _branch_distribution(s.c1, s.c2, s.psi1, s.psi2, s.meter_overlap, basis)


def meter_outcome_distribution(s: TwoBranchState, basis: np.ndarray) -> np.ndarray:
    """Outcome probabilities for a meter observable; mirror of the object case."""
    return _branch_distribution(s.c1, s.c2, s.xi1, s.xi2, s.object_overlap, basis)


@dataclass(frozen=True, eq=False)
class PostMeasurement:
    state: np.ndarray
    probability: float


def post_measurement_state(s: TwoBranchState, meter_basis: np.ndarray, outcome: int) -> PostMeasurement:
    """Normalized object state after the meter reads basis vector ``outcome``."""
    meter_basis = check_orthonormal(meter_basis)
    if not 0 <= outcome < meter_basis.shape[1]:
        raise ContractViolation(f"outcome index {outcome} out of range")
    m = meter_basis[:, outcome]
    vec = s.c1 * s.psi1 * np.vdot(m, s.xi1) + s.c2 * s.psi2 * np.vdot(m, s.xi2)
    prob = float(np.vdot(vec, vec).real)
    if prob < UNREACHABLE_PROB:
        raise OutcomeUnreachable(f"meter outcome {outcome} has probability {prob:.3g}")
    return PostMeasurement(vec / np.sqrt(prob), prob)


@dataclass(frozen=True, eq=False)
class DisturbanceReport:
    before: np.ndarray
    after: np.ndarray
    total_variation: float


def disturbance(
    s: TwoBranchState, meter_basis: np.ndarray, outcome: int, test_basis: np.ndarray
) -> DisturbanceReport:
    """How far a meter reading moves the distribution of a test observable on the object."""
    before = object_outcome_distribution(s, test_basis)
    post = post_measurement_state(s, meter_basis, outcome).state
    after = np.abs(check_orthonormal(test_basis).conj().T @ post) ** 2
    after = after / after.sum()
    return DisturbanceReport(before, after, float(0.5 * np.abs(before - after).sum()))


def robertson_sides(A: np.ndarray, B: np.ndarray, state: np.ndarray) -> tuple[float, float]:
    """(sigma_A * sigma_B, |<[A, B]>| / 2) for a pure ``state``."""
    v = _unit(state, "state")

    def spread(M):
        mean = np.vdot(v, M @ v).real
        second = np.vdot(M @ v, M @ v).real
        return np.sqrt(max(second - mean**2, 0.0))

    comm = A @ B - B @ A
    return float(spread(A) * spread(B)), float(abs(np.vdot(v, comm @ v)) / 2)


def link_to_slit_model(b: BranchPair) -> TwoBranchState:
    """Recast the grid branches as a two-branch state on sampled vectors.

    Grid amplitudes are scaled by sqrt(spacing) so plain vector inner
    products reproduce the integrals; <xi1|xi2> equals the kicked wall overlap.
    """
    g = b.grid
    root = np.sqrt(g.spacing)
    p1 = b.branch1.particle.position().amplitudes * root
    p2 = b.branch2.particle.position().amplitudes * root
    w1 = b.branch1.wall.position().amplitudes * root
    w2 = b.branch2.wall.position().amplitudes * root
    c1 = np.linalg.norm(p1) * np.linalg.norm(w1)
    c2 = np.linalg.norm(p2) * np.linalg.norm(w2)
    if c1 == 0 or c2 == 0:
        raise ContractViolation("a branch carries no amplitude; the slit model has one open path")
    return TwoBranchState.create(c1, c2, p1, p2, w1, w2)
