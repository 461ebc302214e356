"""Screen pattern, fringe visibility, wall-momentum path inference, Kennard audit."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dynamics import BranchPair
from .errors import ContractViolation, InternalConsistencyError, OutcomeUnreachable
from .grid import HBAR, WaveFunction, moments, overlap

FORM_AGREEMENT_TOL = 1e-9
# A second moment is trusted only if the outer eighth of the grid on each
# side carries less than this share of it.
TAIL_SHARE_TOL = 1e-2
KENNARD_SLACK = 1e-9


@dataclass(frozen=True)
class VisibilityReport:
    visibility: float
    phase_alpha: float
    overlap_position: complex
    overlap_momentum: complex
    k_applied: float

    def to_dict(self) -> dict:
        return {
            "visibility": self.visibility,
            "phase_alpha": self.phase_alpha,
            "overlap_position": [self.overlap_position.real, self.overlap_position.imag],
            "overlap_momentum": [self.overlap_momentum.real, self.overlap_momentum.imag],
            "k_applied": self.k_applied,
        }


def visibility(xi: WaveFunction, k: float) -> VisibilityReport:
    """Fringe visibility and phase for wall state ``xi`` and kick ``k``.

    Computes <xi|exp(-2ikQ/hbar)|xi> as a position-space sum and as the
    momentum-space overlap of xi~(P-k) with xi~(P+k); the two must agree.
    """
    if k < 0:
        raise ContractViolation(f"kick must be non-negative, got {k}")
    grid = xi.grid
    steps = grid.momentum_steps(k)
    k_applied = steps * grid.momentum_spacing
    xi = xi.normalized()

    x = xi.position()
    ov_pos = complex(
        np.sum(np.conj(x.amplitudes) * np.exp(-2j * k_applied * grid.positions / HBAR) * x.amplitudes)
        * grid.spacing
    )
    p = xi.momentum().amplitudes
    minus = np.roll(p, steps)   # xi~(P - k)
    plus = np.roll(p, -steps)   # xi~(P + k)
    ov_mom = complex(np.vdot(minus, plus) * grid.momentum_spacing)

    if abs(ov_pos - ov_mom) > FORM_AGREEMENT_TOL:
        raise InternalConsistencyError(
            f"visibility forms disagree: {ov_pos} (position) vs {ov_mom} (momentum)"
        )
    v = min(abs(ov_pos), 1.0)
    return VisibilityReport(v, float(np.angle(ov_pos)), ov_pos, ov_mom, k_applied)


def helstrom_distinguishability(vis: float) -> float:
    """Optimal discrimination score sqrt(1 - V^2) for the two kicked wall states.

    An extension next to the support-based path criterion; nothing else
    in the package depends on it.
    """
    return float(np.sqrt(max(0.0, 1.0 - vis**2)))


def screen_distribution(b: BranchPair) -> np.ndarray:
    """Normalized probability density of the particle position on the screen.

    |psi_1|^2 ||xi_+||^2 + |psi_2|^2 ||xi_-||^2 + 2 Re{psi_1* psi_2 <xi_+|xi_->},
    which is the composite density with the wall coordinate integrated out.
    """
    psi1 = b.branch1.particle.position()
    psi2 = b.branch2.particle.position()
    w1 = b.branch1.wall.position()
    w2 = b.branch2.wall.position()
    a1, a2 = psi1.amplitudes, psi2.amplitudes
    cross = overlap(w1, w2)
    rho = (
        np.abs(a1) ** 2 * w1.norm_sq()
        + np.abs(a2) ** 2 * w2.norm_sq()
        + 2 * np.real(np.conj(a1) * a2 * cross)
    )
    dx = psi1.step
    total = rho.sum() * dx
    if total <= 0:
        raise InternalConsistencyError("screen distribution has no mass")
    rho = rho / total
    if rho.min() < -1e-10:
        raise InternalConsistencyError(f"negative screen probability {rho.min():.3g}")
    return np.clip(rho, 0.0, None)


def kicked_momentum_density(xi: WaveFunction, k: float, sign: int) -> np.ndarray:
    """|xi~(P - sign*k)|^2 on the momentum lattice, normalized as a density."""
    steps = xi.grid.momentum_steps(k)
    p = xi.momentum().normalized().amplitudes
    return np.abs(np.roll(p, sign * steps)) ** 2


def conditional_momentum(b: BranchPair, q: float) -> np.ndarray:
    """Density of the wall momentum P given the particle was found at ``q``.

    Uses the grid point nearest to ``q``; proportional to
    |psi_1(q) xi~_+(P) + psi_2(q) xi~_-(P)|^2.
    """
    grid = b.grid
    j = grid.nearest_index(q)
    c1 = b.branch1.particle.position().amplitudes[j]
    c2 = b.branch2.particle.position().amplitudes[j]
    amp = c1 * b.branch1.wall.momentum().amplitudes + c2 * b.branch2.wall.momentum().amplitudes
    rho = np.abs(amp) ** 2
    total = rho.sum() * grid.momentum_spacing
    if total < 1e-300:
        raise OutcomeUnreachable(f"the particle is never found at q={q}")
    return rho / total


class PathLabel(enum.IntEnum):
    AMBIGUOUS = 0
    SLIT1 = 1
    SLIT2 = 2


@dataclass(frozen=True)
class PathInferenceRule:
    """Slit 1 for P in (P0, P0+2k], slit 2 for P in [P0-2k, P0), else ambiguous."""

    pivot: float
    k: float

    def __post_init__(self):
        if not self.k > 0:
            raise ContractViolation(f"path rule needs k > 0, got {self.k}")


def classify_paths(P: np.ndarray, rule: PathInferenceRule) -> np.ndarray:
    """Vectorized :func:`classify_path`; returns an int array of PathLabel values."""
    P = np.asarray(P, dtype=float)
    d = P - rule.pivot
    out = np.full(P.shape, int(PathLabel.AMBIGUOUS))
    out[(d > 0) & (d <= 2 * rule.k)] = PathLabel.SLIT1
    out[(d < 0) & (d >= -2 * rule.k)] = PathLabel.SLIT2
    return out


def classify_path(P: float, rule: PathInferenceRule) -> PathLabel:
    return PathLabel(int(classify_paths(np.array([P]), rule)[0]))


def sample_momenta(density: np.ndarray, momenta: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling of lattice momenta from uniform variates ``u``."""
    cdf = np.cumsum(density)
    cdf /= cdf[-1]
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)
    return momenta[idx]


def classification_accuracy(
    xi: WaveFunction,
    k: float,
    rule: PathInferenceRule,
    rng: np.random.Generator,
    weights: tuple[float, float] = (0.5, 0.5),
    n_samples: int = 10_000,
) -> float:
    """Monte Carlo success rate of the window rule at naming the slit.

    Each trial picks a slit with probability ``weights`` (the squared branch
    norms), draws the wall momentum from that branch's conditional
    distribution |xi~(P -+ k)|^2, and scores the rule's verdict. Ambiguous
    verdicts count as failures.
    """
    w1, w2 = weights
    if w1 < 0 or w2 < 0 or w1 + w2 <= 0:
        raise ContractViolation(f"invalid branch weights {weights}")
    u_label = rng.random(n_samples)
    u_momentum = rng.random(n_samples)
    truth = np.where(u_label < w1 / (w1 + w2), int(PathLabel.SLIT1), int(PathLabel.SLIT2))
    momenta = xi.grid.momenta
    P = np.where(
        truth == PathLabel.SLIT1,
        sample_momenta(kicked_momentum_density(xi, k, +1), momenta, u_momentum),
        sample_momenta(kicked_momentum_density(xi, k, -1), momenta, u_momentum),
    )
    return float(np.mean(classify_paths(P, rule) == truth))


def tail_share(psi: WaveFunction) -> float:
    """Share of the second central moment contributed by the outer grid eighths."""
    rho = psi.density()
    axis = psi.axis
    mean = np.dot(axis, rho) / rho.sum()
    w = (axis - mean) ** 2 * rho
    total = w.sum()
    if total == 0:
        return 0.0
    half = psi.grid.n_points // 2
    outer = np.abs(np.arange(psi.grid.n_points) - half) >= 0.75 * half
    return float(w[outer].sum() / total)


@dataclass(frozen=True)
class KennardAudit:
    sigma_q: float
    sigma_p: float
    product: float
    bound: float
    satisfied: bool
    status: str = "ok"


def kennard_audit(psi: WaveFunction) -> KennardAudit:
    """Check sigma_Q * sigma_P >= hbar/2 for ``psi``.

    States whose position or momentum variance is not captured by the grid
    (heavy algebraic tails, e.g. hard-edged momentum states) get status
    ``"moments unresolved"`` and NaN entries instead of a verdict.
    """
    pos = psi.position().normalized()
    mom = psi.momentum().normalized()
    bound = HBAR / 2
    if tail_share(pos) > TAIL_SHARE_TOL or tail_share(mom) > TAIL_SHARE_TOL:
        nan = float("nan")
        return KennardAudit(nan, nan, nan, bound, False, "moments unresolved")
    _, sq = moments(pos)
    _, sp = moments(mom)
    product = sq * sp
    return KennardAudit(sq, sp, product, bound, bool(product >= bound - KENNARD_SLACK))

