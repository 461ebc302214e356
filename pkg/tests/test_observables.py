import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erf

from slitwall import oracles
from slitwall.dynamics import SlitModel, branch_pair, slit_masks
from slitwall.errors import ContractViolation, OutcomeUnreachable
from slitwall.grid import GridSpec
from slitwall.observables import (
    PathInferenceRule,
    PathLabel,
    classification_accuracy,
    classify_path,
    classify_paths,
    conditional_momentum,
    helstrom_distinguishability,
    kennard_audit,
    kicked_momentum_density,
    sample_momenta,
    screen_distribution,
    tail_share,
    visibility,
)
from slitwall.selftest import coarse_scenario
from slitwall.states import StateKind, StateSpec, build_state

from conftest import gaussian


@pytest.mark.parametrize("sigma", [0.25, 0.5, 1.0, 2.0])
def test_gaussian_visibility_law(grid, sigma):
    report = visibility(build_state(gaussian(sigma), grid), 1.0)
    assert report.visibility == pytest.approx(np.exp(-2 * sigma**2), abs=1e-12)
    assert abs(report.overlap_position - report.overlap_momentum) < 1e-12


def test_quadrature_oracle_agrees_with_closed_form():
    for sigma in (0.25, 0.5, 1.0, 2.0):
        ref = oracles.gaussian_visibility_quadrature(sigma, 1.0)
        assert abs(ref - np.exp(-2 * sigma**2)) < 1e-10


def test_visibility_phase_tracks_wall_position(grid):
    # <xi|exp(-2ikQ)|xi> picks up the phase -2 k x0
    report = visibility(build_state(gaussian(0.5, center=0.3), grid), 1.0)
    assert report.phase_alpha == pytest.approx(-0.6, abs=1e-12)
    assert report.visibility == pytest.approx(np.exp(-0.5), abs=1e-12)


def test_visibility_ignores_wall_momentum(grid):
    a = visibility(build_state(gaussian(0.7), grid), 1.0).visibility
    b = visibility(build_state(gaussian(0.7, momentum=2.0), grid), 1.0).visibility
    assert a == pytest.approx(b, abs=1e-13)


def test_zero_kick_gives_full_visibility(grid):
    assert visibility(build_state(gaussian(0.4), grid), 0.0).visibility == pytest.approx(1.0)
    with pytest.raises(ContractViolation):
        visibility(build_state(gaussian(0.4), grid), -1.0)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-3, 3), b=st.floats(-3, 3), k=st.sampled_from([0.5, 1.0, 1.5]))
def test_sine_counterexample_has_no_fringes(a, b, k):
    if abs(a) < 1e-3 and abs(b) < 1e-3:
        return
    g = GridSpec.from_momentum_spacing(1 / 64, 8192)
    xi = build_state(StateSpec(StateKind.SINE_COUNTEREXAMPLE, {"k": k, "a": a, "b": b}), g)
    assert visibility(xi, k).visibility < 1e-10


def test_sine_counterexample_shifted_supports_overlap(grid):
    # supports [k, 3k] and [-k, k] of the two kicked copies meet on [-k, k]: measure 2k
    xi = build_state(StateSpec(StateKind.SINE_COUNTEREXAMPLE, {"k": 1.0, "a": 1.0, "b": 1.0}), grid)
    plus = kicked_momentum_density(xi, 1.0, +1)
    minus = kicked_momentum_density(xi, 1.0, -1)
    both = (plus > 0) & (minus > 0)
    p = grid.momenta[both]
    assert p.max() - p.min() + grid.momentum_spacing == pytest.approx(2.0, abs=2 * grid.momentum_spacing)


@pytest.mark.parametrize("width", [0.5, 1.0, 1.9])
def test_narrow_top_hat_gives_zero_visibility_and_perfect_paths(grid, width):
    xi = build_state(StateSpec(StateKind.TOP_HAT_MOMENTUM, {"width": width}), grid)
    assert visibility(xi, 1.0).visibility < 1e-12
    rule = PathInferenceRule(0.0, 1.0)
    assert classification_accuracy(xi, 1.0, rule, np.random.default_rng(0)) == 1.0


def test_wide_top_hat_keeps_some_visibility(grid):
    # width 3 > 2k: the shifted supports overlap on a unit interval
    xi = build_state(StateSpec(StateKind.TOP_HAT_MOMENTUM, {"width": 3.0}), grid)
    assert visibility(xi, 1.0).visibility == pytest.approx(1 / 3, abs=2 / 96)


def test_helstrom_score():
    assert helstrom_distinguishability(0.0) == 1.0
    assert helstrom_distinguishability(1.0) == 0.0
    assert helstrom_distinguishability(0.6) == pytest.approx(0.8)


def test_path_windows():
    rule = PathInferenceRule(0.5, 1.0)
    assert classify_path(0.5, rule) is PathLabel.AMBIGUOUS
    assert classify_path(2.5, rule) is PathLabel.SLIT1
    assert classify_path(2.51, rule) is PathLabel.AMBIGUOUS
    assert classify_path(-1.5, rule) is PathLabel.SLIT2
    assert classify_path(-1.51, rule) is PathLabel.AMBIGUOUS
    labels = classify_paths(np.array([0.6, 0.4, 9.0]), rule)
    assert labels.tolist() == [1, 2, 0]
    with pytest.raises(ContractViolation):
        PathInferenceRule(0.0, 0.0)


def test_inverse_cdf_sampling_matches_distribution():
    momenta = np.arange(5.0)
    density = np.array([0.1, 0.0, 0.4, 0.3, 0.2])
    u = np.random.default_rng(3).random(200_000)
    draws = sample_momenta(density, momenta, u)
    freq = np.bincount(draws.astype(int), minlength=5) / len(u)
    assert freq[1] == 0
    assert np.max(np.abs(freq - density)) < 5e-3


@pytest.mark.parametrize("sigma_q", [0.3, 0.5, 1.0])
def test_gaussian_accuracy_matches_normal_window(grid, sigma_q):
    # P ~ N(+-k, sigma_P) with sigma_P = 1/(2 sigma_Q); success = P(0 < P <= 2k)
    xi = build_state(gaussian(sigma_q), grid)
    n = 40_000
    acc = classification_accuracy(xi, 1.0, PathInferenceRule(0.0, 1.0), np.random.default_rng(5), n_samples=n)
    sigma_p = 1 / (2 * sigma_q)
    expected = erf(1 / (sigma_p * np.sqrt(2)))
    assert abs(acc - expected) < 5 * np.sqrt(expected * (1 - expected) / n) + 1e-3


def test_accuracy_is_seed_deterministic(grid):
    xi = build_state(gaussian(0.6), grid)
    rule = PathInferenceRule(0.0, 1.0)
    a = classification_accuracy(xi, 1.0, rule, np.random.default_rng(9), (0.3, 0.7))
    b = classification_accuracy(xi, 1.0, rule, np.random.default_rng(9), (0.3, 0.7))
    assert a == b
    with pytest.raises(ContractViolation):
        classification_accuracy(xi, 1.0, rule, np.random.default_rng(9), (-1.0, 1.0))


def test_factored_observables_match_dense_composite():
    g, psi, xi, params = coarse_scenario()
    model = SlitModel()
    b = branch_pair(psi, xi, slits=model, propagation_edge_tol=1.0, **params)
    mask, _ = slit_masks(g.positions, model)
    dense = oracles.dense_final_state(g, psi.amplitudes, xi.amplitudes, slit1_mask=mask, **params)
    screen = screen_distribution(b)
    assert np.max(np.abs(screen - oracles.dense_screen_marginal(g, dense))) < 1e-8
    assert screen.sum() * g.spacing == pytest.approx(1.0)
    for q in np.linspace(-10, 10, 9):
        j = g.nearest_index(q)
        ref = oracles.dense_conditional_momentum(g, dense, j)
        assert np.max(np.abs(conditional_momentum(b, q) - ref)) < 1e-8


def test_orthogonal_walls_wash_out_fringes(grid):
    # with V = 0 the screen is the plain sum of the two branch densities
    psi = build_state(StateSpec(StateKind.PLANE_WAVE_PACKET, {"sigma": 2.0, "momentum": 0.0}), grid)
    xi = build_state(StateSpec(StateKind.TOP_HAT_MOMENTUM, {"width": 1.5}), grid)
    b = branch_pair(psi, xi, k=1.0, slits=SlitModel(), tau_prime=1.0, propagation_edge_tol=1e-2)
    incoherent = np.abs(b.branch1.particle.amplitudes) ** 2 + np.abs(b.branch2.particle.amplitudes) ** 2
    incoherent /= incoherent.sum() * grid.spacing
    assert np.max(np.abs(screen_distribution(b) - incoherent)) < 1e-12


def test_unreachable_screen_point(grid):
    psi = build_state(StateSpec(StateKind.PLANE_WAVE_PACKET, {"sigma": 1.0, "momentum": 0.0}), grid)
    xi = build_state(gaussian(1.0), grid)
    b = branch_pair(psi, xi, k=1.0, slits=SlitModel(x_divide=50.0))
    with pytest.raises(OutcomeUnreachable):
        conditional_momentum(b, 60.0)


def test_kennard_audit_statuses(grid):
    g = build_state(gaussian(1.0), grid)
    audit = kennard_audit(g)
    assert audit.status == "ok" and audit.satisfied
    assert audit.product == pytest.approx(0.5, abs=1e-9)
    hat = kennard_audit(build_state(StateSpec(StateKind.TOP_HAT_MOMENTUM, {"width": 1.5}), grid))
    assert hat.status == "moments unresolved" and np.isnan(hat.product)
    assert tail_share(g) < 1e-12
