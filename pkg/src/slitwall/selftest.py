"""Quick oracle and invariant battery behind ``slitwall selftest``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import oracles
from .config import ScenarioConfig, SweepDescriptor
from .dynamics import SlitModel, branch_pair, slit_masks
from .entanglement import (
    TwoBranchState,
    meter_outcome_distribution,
    object_outcome_distribution,
    post_measurement_state,
    robertson_sides,
)
from .grid import GridSpec, to_momentum, to_position
from .observables import (
    PathInferenceRule,
    classification_accuracy,
    conditional_momentum,
    kennard_audit,
    screen_distribution,
    visibility,
)
from .recoil import reference_scenarios, recoil_velocity
from .states import StateKind, StateSpec, build_state, momentum_support_width
from .sweep import incompatibility_frontier, run_sweep


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _gauss(sigma, **extra):
    return StateSpec(StateKind.GAUSSIAN_POSITION, {"sigma": sigma, **extra})


def check_transform() -> tuple[bool, str]:
    g = GridSpec.from_momentum_spacing(1 / 32, 4096)
    psi = build_state(_gauss(1.3, center=0.7, momentum=0.4, chirp=0.2), g)
    back = to_position(to_momentum(psi))
    err = np.max(np.abs(back.amplitudes - psi.amplitudes))
    parseval = abs(to_momentum(psi).norm_sq() - psi.norm_sq())
    return err < 1e-12 and parseval < 1e-12, f"round trip {err:.1e}, Parseval {parseval:.1e}"


def check_gaussian_visibility() -> tuple[bool, str]:
    g = GridSpec.from_momentum_spacing(1 / 32, 8192)
    worst = 0.0
    for sigma in (0.25, 0.5, 1.0, 2.0):
        v = visibility(build_state(_gauss(sigma), g), 1.0).visibility
        ref = abs(oracles.gaussian_visibility_quadrature(sigma, 1.0))
        worst = max(worst, abs(v - ref), abs(v - np.exp(-2 * sigma**2)))
    return worst < 1e-4, f"max deviation {worst:.1e}"


def check_counterexample() -> tuple[bool, str]:
    g = GridSpec.from_momentum_spacing(1 / 32, 8192)
    xi = build_state(StateSpec(StateKind.SINE_COUNTEREXAMPLE, {"k": 1.0, "a": 1.0, "b": 0.6}), g)
    v = visibility(xi, 1.0).visibility
    return v < 1e-10, f"V = {v:.1e}"


def check_perfect_path() -> tuple[bool, str]:
    g = GridSpec.from_momentum_spacing(1 / 32, 8192)
    xi = build_state(StateSpec(StateKind.TOP_HAT_MOMENTUM, {"width": 1.9}), g)
    width = momentum_support_width(xi, 1e-9)
    v = visibility(xi, 1.0).visibility
    acc = classification_accuracy(xi, 1.0, PathInferenceRule(0.0, 1.0), np.random.default_rng(7))
    return width < 2 and v < 1e-9 and acc == 1.0, f"width {width:.4f}, V {v:.1e}, accuracy {acc}"


def coarse_scenario():
    """128-point scenario shared by the dense-oracle comparisons."""
    g = GridSpec.from_momentum_spacing(1 / 4, 128)
    psi = build_state(StateSpec(StateKind.PLANE_WAVE_PACKET, {"sigma": 1.2, "momentum": 0.3}), g)
    xi = build_state(_gauss(1.0, center=0.4), g)
    params = {"k": 1.0, "mass": 1.0, "tau": 0.5, "tau_prime": 1.5}
    return g, psi, xi, params


def check_dense_oracle() -> tuple[bool, str]:
    g, psi, xi, params = coarse_scenario()
    model = SlitModel()
    b = branch_pair(psi, xi, slits=model, propagation_edge_tol=1.0, **params)
    mask, _ = slit_masks(g.positions, model)
    dense = oracles.dense_final_state(
        g, psi.amplitudes, xi.amplitudes, k=params["k"], slit1_mask=mask,
        mass=params["mass"], tau=params["tau"], tau_prime=params["tau_prime"],
    )
    err = np.max(np.abs(screen_distribution(b) - oracles.dense_screen_marginal(g, dense)))
    for q in (-3.0, 0.0, 2.5):
        j = g.nearest_index(q)
        cond = oracles.dense_conditional_momentum(g, dense, j)
        err = max(err, np.max(np.abs(conditional_momentum(b, q) - cond)))
    return err < 1e-8, f"max-norm deviation {err:.1e}"


def check_kennard() -> tuple[bool, str]:
    g = GridSpec.from_momentum_spacing(1 / 32, 8192)
    specs = [
        _gauss(1.0),
        _gauss(0.7, chirp=0.8),
        StateSpec(StateKind.GAUSSIAN_MOMENTUM, {"sigma": 0.8, "center": 0.5}),
        StateSpec(StateKind.PLANE_WAVE_PACKET, {"sigma": 2.0, "momentum": 1.5}),
        StateSpec(StateKind.SINE_COUNTEREXAMPLE, {"k": 1.0}),
        StateSpec(StateKind.TOP_HAT_MOMENTUM, {"width": 1.5}),
    ]
    audits = [kennard_audit(build_state(s, g)) for s in specs]
    resolved = [a for a in audits if a.status == "ok"]
    ok = all(a.satisfied for a in resolved) and abs(audits[0].product - 0.5) < 1e-6
    return ok, f"{len(resolved)}/{len(audits)} resolved, min product {min(a.product for a in resolved):.6f}"


def _random_unit(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def _random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def check_entanglement() -> tuple[bool, str]:
    rng = np.random.default_rng(11)
    worst = 0.0
    for dim_o, dim_m in ((2, 2), (3, 3), (8, 8)):
        s = TwoBranchState.create(
            *(rng.normal(size=2) + 1j * rng.normal(size=2)),
            _random_unit(rng, dim_o), _random_unit(rng, dim_o),
            _random_unit(rng, dim_m), _random_unit(rng, dim_m),
        )
        A, M = _random_unitary(rng, dim_o), _random_unitary(rng, dim_m)
        rho = oracles.dense_two_branch(s.c1, s.c2, s.psi1, s.psi2, s.xi1, s.xi2)
        obj = oracles.outcome_probabilities(oracles.partial_trace(rho, dim_o, dim_m, "object"), A)
        met = oracles.outcome_probabilities(oracles.partial_trace(rho, dim_o, dim_m, "meter"), M)
        worst = max(worst, np.max(np.abs(object_outcome_distribution(s, A) - obj)))
        worst = max(worst, np.max(np.abs(meter_outcome_distribution(s, M) - met)))
        post = post_measurement_state(s, M, 0).state
        ref = oracles.dense_conditional_object(rho, dim_o, dim_m, M[:, 0])
        worst = max(worst, np.max(np.abs(np.outer(post, post.conj()) - ref)))
    gap = np.inf
    for _ in range(1000):
        H = rng.normal(size=(2, 8, 8)) + 1j * rng.normal(size=(2, 8, 8))
        A, B = H[0] + H[0].conj().T, H[1] + H[1].conj().T
        lhs, rhs = robertson_sides(A, B, _random_unit(rng, 8))
        gap = min(gap, lhs - rhs)
    return worst < 1e-12 and gap > -1e-10, f"oracle deviation {worst:.1e}, Robertson min slack {gap:.2e}"


def check_recoil() -> tuple[bool, str]:
    mercury, bec = (recoil_velocity(s) for s in reference_scenarios())
    ok = abs(mercury / 7.9e-3 - 1) < 0.02 and abs(bec / 6.9e-6 - 1) < 0.02
    return ok, f"mercury {mercury:.3e} m/s, sodium BEC {bec:.3e} m/s"


def check_frontier() -> tuple[bool, str]:
    config = ScenarioConfig(
        grid=GridSpec.from_momentum_spacing(1 / 32, 16384),
        particle=StateSpec(StateKind.PLANE_WAVE_PACKET, {"sigma": 2.0, "momentum": 0.0}),
        wall=_gauss(1.0),
        k=1.0,
        seed=1234,
        sweep=SweepDescriptor("sigma", 0.05, 5.0, 9, "log"),
    )
    verdict = incompatibility_frontier(run_sweep(config), 0.9, 0.99)
    return not verdict.compatible, f"verdict {verdict.label}"


CHECKS: dict[str, Callable[[], tuple[bool, str]]] = {
    "transform round trip and Parseval": check_transform,
    "Gaussian visibility law vs quadrature": check_gaussian_visibility,
    "sine counterexample has zero visibility": check_counterexample,
    "compact support gives perfect path inference": check_perfect_path,
    "factored state vs dense 128x128 composite": check_dense_oracle,
    "Kennard bound over library states": check_kennard,
    "two-branch framework vs dense oracle, Robertson": check_entanglement,
    "recoil velocities": check_recoil,
    "Gaussian sweep is incompatible": check_frontier,
}


def run_all() -> list[CheckResult]:
    results = []
    for name, fn in CHECKS.items():
        t0 = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # a crash is a failed check, not a crashed run
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail, time.perf_counter() - t0))
    return results
