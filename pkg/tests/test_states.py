import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slitwall.errors import ContractViolation, GridTooCoarse, GridTooSmall
from slitwall.grid import GridSpec, Representation, moments
from slitwall.observables import kennard_audit, visibility
from slitwall.states import (
    StateKind,
    StateSpec,
    build_state,
    momentum_support_width,
    parameter_names,
    support_width,
    validate_spec,
)

from conftest import gaussian


def test_every_kind_builds_normalized(grid):
    specs = [
        gaussian(1.0, center=0.3, momentum=0.2, chirp=0.1),
        StateSpec(StateKind.GAUSSIAN_MOMENTUM, {"sigma": 0.5, "center": 0.2, "position": 1.0}),
        StateSpec(StateKind.TOP_HAT_MOMENTUM, {"width": 1.0}),
        StateSpec(StateKind.SINE_COUNTEREXAMPLE, {"k": 1.0}),
        StateSpec(StateKind.PLANE_WAVE_PACKET, {"sigma": 2.0, "momentum": 0.5}),
    ]
    for spec in specs:
        psi = build_state(spec, grid)
        assert psi.norm_sq() == pytest.approx(1.0, abs=1e-12)
        assert psi.position().norm_sq() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "spec, needle",
    [
        (StateSpec(StateKind.GAUSSIAN_POSITION, {}), "missing parameter 'sigma'"),
        (gaussian(-1.0), "sigma must be > 0"),
        (gaussian(1.0, spread=2.0), "unknown parameter 'spread'"),
        (gaussian(float("nan")), "finite number"),
        (StateSpec(StateKind.SINE_COUNTEREXAMPLE, {"k": 1.0, "a": 0, "b": 0}), "both be zero"),
        (StateSpec(StateKind.PLANE_WAVE_PACKET, {"sigma": 1.0}), "missing parameter 'momentum'"),
    ],
)
def test_validate_spec_messages(spec, needle):
    errors = validate_spec(spec)
    assert any(needle in e for e in errors), errors
    with pytest.raises(ContractViolation):
        build_state(spec, GridSpec(50.0, 1024))


def test_spec_round_trip_and_names():
    spec = gaussian(0.5, center=1.0)
    assert StateSpec.from_dict(spec.to_dict()) == spec
    assert spec.get("chirp") == 0.0
    assert spec.with_parameter("sigma", 2.0).get("sigma") == 2.0
    assert parameter_names(StateKind.TOP_HAT_MOMENTUM) == {"width", "center"}


def test_unresolved_gaussian_is_rejected():
    g = GridSpec(100.0, 256)  # spacing 0.39
    with pytest.raises(GridTooCoarse):
        build_state(gaussian(0.5), g)


def test_gaussian_too_wide_for_box():
    with pytest.raises(GridTooSmall):
        build_state(gaussian(3.0), GridSpec(20.0, 1024))


def test_top_hat_uses_open_interval(grid):
    psi = build_state(StateSpec(StateKind.TOP_HAT_MOMENTUM, {"width": 1.0}), grid)
    occupied = grid.momenta[np.abs(psi.amplitudes) > 0]
    # |P| < 1/2 strictly: the lattice points at +-1/2 are empty
    assert occupied.min() > -0.5 and occupied.max() < 0.5
    assert len(occupied) == 31


def test_sine_counterexample_lobes(grid):
    psi = build_state(StateSpec(StateKind.SINE_COUNTEREXAMPLE, {"k": 1.0, "a": 2.0, "b": 1.0}), grid)
    p, amps = grid.momenta, psi.amplitudes.real
    assert np.all(amps[(p > 2) | (p < -2)] == 0)
    # one full period on [0, 2k], sign change at P = k
    assert np.all(amps[(p > 0) & (p < 1)] > 0)
    assert np.all(amps[(p > 1) & (p < 2)] < 0)
    lower_mass = np.sum(amps[p < 0] ** 2)
    upper_mass = np.sum(amps[p >= 0] ** 2)
    assert upper_mass / lower_mass == pytest.approx(4.0, rel=1e-9)


@pytest.mark.parametrize("sigma, chirp", [(1.0, 0.0), (0.7, 0.8), (1.5, -0.3), (0.5, 2.0)])
def test_chirped_gaussian_uncertainty_product(grid, sigma, chirp):
    audit = kennard_audit(build_state(gaussian(sigma, chirp=chirp), grid))
    expected = 0.5 * np.sqrt(1 + 4 * chirp**2 * sigma**4)
    assert audit.status == "ok"
    assert audit.product == pytest.approx(expected, rel=1e-8)
    assert audit.sigma_q == pytest.approx(sigma, rel=1e-10)


def test_gaussian_momentum_state_widths(grid):
    psi = build_state(StateSpec(StateKind.GAUSSIAN_MOMENTUM, {"sigma": 0.4, "center": 0.3}), grid)
    mean_p, sp = moments(psi.momentum())
    _, sq = moments(psi.position())
    assert mean_p == pytest.approx(0.3, abs=1e-12)
    assert sp == pytest.approx(0.4, rel=1e-10)
    assert sq == pytest.approx(1 / 0.8, rel=1e-8)


def test_support_width_of_top_hat(grid):
    psi = build_state(StateSpec(StateKind.TOP_HAT_MOMENTUM, {"width": 1.9}), grid)
    # 61 lattice points of spacing 1/32 inside |P| < 0.95
    assert momentum_support_width(psi, 1e-9) == pytest.approx(61 / 32)


def test_support_width_of_gaussian(grid):
    # two-sided normal tail of 1% sits at 2.5758 sigma
    psi = build_state(gaussian(1.0), grid)
    width = support_width(psi, 0.01, Representation.POSITION)
    assert width == pytest.approx(2 * 2.5758 * 1.0, abs=2 * grid.spacing)


@pytest.mark.parametrize("eps", [0.0, -1e-3, 0.5])
def test_support_width_rejects_eps(grid, eps):
    psi = build_state(gaussian(1.0), grid)
    with pytest.raises(ContractViolation):
        support_width(psi, eps)


@settings(max_examples=30, deadline=None)
@given(sigma_p=st.floats(0.05, 0.3), eps=st.sampled_from([1e-9, 1e-6, 1e-4, 1e-2]))
def test_visibility_bounded_by_support_leakage(sigma_p, eps):
    # a support interval shorter than 2k leaves only eps outside it, so |V| <= 2 sqrt(eps)
    g = GridSpec.from_momentum_spacing(1 / 128, 8192)
    psi = build_state(StateSpec(StateKind.GAUSSIAN_MOMENTUM, {"sigma": sigma_p}), g)
    if momentum_support_width(psi, eps) < 2.0:
        assert visibility(psi, 1.0).visibility <= 2 * np.sqrt(eps)


def test_narrow_support_alone_does_not_force_tiny_visibility(grid):
    # a Gaussian can have an eps-support below 2k and still keep V above eps
    psi = build_state(StateSpec(StateKind.GAUSSIAN_MOMENTUM, {"sigma": 0.16}), grid)
    assert momentum_support_width(psi, 1e-9) < 2.0
    v = visibility(psi, 1.0).visibility
    assert v == pytest.approx(np.exp(-1 / (2 * 0.16**2)), rel=1e-6)
    assert 1e-9 < v < 2 * np.sqrt(1e-9)
