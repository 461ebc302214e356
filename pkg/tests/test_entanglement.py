import numpy as np
import pytest

from slitwall import oracles
from slitwall.dynamics import SlitModel, branch_pair
from slitwall.entanglement import (
    TwoBranchState,
    check_orthonormal,
    disturbance,
    link_to_slit_model,
    meter_outcome_distribution,
    object_outcome_distribution,
    post_measurement_state,
    robertson_sides,
)
from slitwall.errors import ContractViolation, OutcomeUnreachable
from slitwall.observables import visibility
from slitwall.states import StateKind, StateSpec, build_state

from conftest import gaussian


def unit(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng, dim_o, dim_m):
    c = rng.normal(size=2) + 1j * rng.normal(size=2)
    return TwoBranchState.create(c[0], c[1], unit(rng, dim_o), unit(rng, dim_o), unit(rng, dim_m), unit(rng, dim_m))


@pytest.mark.parametrize("dim_o, dim_m", [(2, 2), (2, 5), (4, 3), (8, 8)])
def test_distributions_match_dense_oracle(dim_o, dim_m):
    rng = np.random.default_rng(dim_o * 10 + dim_m)
    for _ in range(5):
        s = random_state(rng, dim_o, dim_m)
        assert s.norm_sq() == pytest.approx(1.0, abs=1e-12)
        rho = oracles.dense_two_branch(s.c1, s.c2, s.psi1, s.psi2, s.xi1, s.xi2)
        A, M = unitary(rng, dim_o), unitary(rng, dim_m)
        obj = oracles.outcome_probabilities(oracles.partial_trace(rho, dim_o, dim_m, "object"), A)
        met = oracles.outcome_probabilities(oracles.partial_trace(rho, dim_o, dim_m, "meter"), M)
        assert np.max(np.abs(object_outcome_distribution(s, A) - obj)) < 1e-12
        assert np.max(np.abs(meter_outcome_distribution(s, M) - met)) < 1e-12
        for outcome in range(dim_m):
            post = post_measurement_state(s, M, outcome)
            ref = oracles.dense_conditional_object(rho, dim_o, dim_m, M[:, outcome])
            assert np.max(np.abs(np.outer(post.state, post.state.conj()) - ref)) < 1e-12
            assert post.probability == pytest.approx(met[outcome], abs=1e-12)


def test_orthogonal_meters_remove_interference():
    rng = np.random.default_rng(1)
    psi1, psi2 = unit(rng, 4), unit(rng, 4)
    s = TwoBranchState.create(1, 1, psi1, psi2, [1, 0, 0], [0, 1, 0])
    assert s.visibility() == 0
    A = unitary(rng, 4)
    incoherent = 0.5 * (np.abs(A.conj().T @ psi1) ** 2 + np.abs(A.conj().T @ psi2) ** 2)
    assert np.max(np.abs(object_outcome_distribution(s, A) - incoherent)) < 1e-15


def test_identical_meters_keep_full_interference():
    rng = np.random.default_rng(2)
    psi1, psi2, xi = unit(rng, 3), unit(rng, 3), unit(rng, 2)
    s = TwoBranchState.create(0.6, 0.8j, psi1, psi2, xi, xi)
    A = unitary(rng, 3)
    coherent = np.abs(A.conj().T @ (0.6 * psi1 + 0.8j * psi2)) ** 2
    assert np.max(np.abs(object_outcome_distribution(s, A) - coherent / coherent.sum())) < 1e-14
    assert s.visibility() == pytest.approx(1.0)


def test_swapped_roles_mirror_distributions():
    rng = np.random.default_rng(3)
    s = random_state(rng, 3, 5)
    M = unitary(rng, 5)
    assert np.allclose(meter_outcome_distribution(s, M), object_outcome_distribution(s.swapped(), M), atol=1e-15)


def test_reading_an_orthogonal_meter_destroys_fringes():
    # reading which branch the meter is in leaves a single object branch
    rng = np.random.default_rng(4)
    psi1, psi2 = unit(rng, 3), unit(rng, 3)
    s = TwoBranchState.create(1, 1, psi1, psi2, [1, 0], [0, 1])
    post = post_measurement_state(s, np.eye(2), 0)
    assert abs(abs(np.vdot(post.state, psi1)) - 1) < 1e-12
    report = disturbance(s, np.eye(2), 0, unitary(rng, 3))
    assert report.total_variation >= 0
    assert report.after.sum() == pytest.approx(1.0)


def test_unreachable_meter_outcome():
    s = TwoBranchState.create(1, 1, [1, 0], [0, 1], [1, 0, 0], [0, 1, 0])
    with pytest.raises(OutcomeUnreachable):
        post_measurement_state(s, np.eye(3), 2)
    with pytest.raises(ContractViolation):
        post_measurement_state(s, np.eye(3), 5)


@pytest.mark.parametrize(
    "args",
    [
        (1, 1, [1, 0], [0, 1], [1], [1]),
        (1, 1, [1, 0], [0, 1, 0], [1, 0], [0, 1]),
        (1, 1, [0, 0], [0, 1], [1, 0], [0, 1]),
        (1, -1, [1, 0], [1, 0], [1, 0], [1, 0]),
    ],
)
def test_invalid_states(args):
    with pytest.raises(ContractViolation):
        TwoBranchState.create(*args)


def test_non_orthonormal_basis_rejected():
    with pytest.raises(ContractViolation):
        check_orthonormal(np.array([[1, 1], [0, 1]]))
    with pytest.raises(ContractViolation):
        check_orthonormal(np.ones((2, 3)))


def test_robertson_inequality_on_random_pairs():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        H = rng.normal(size=(2, n, n)) + 1j * rng.normal(size=(2, n, n))
        A, B = H[0] + H[0].conj().T, H[1] + H[1].conj().T
        lhs, rhs = robertson_sides(A, B, unit(rng, n))
        assert lhs >= rhs - 1e-10


def test_robertson_equality_for_spin_half():
    sx = np.array([[0, 1], [1, 0]])
    sy = np.array([[0, -1j], [1j, 0]])
    lhs, rhs = robertson_sides(sx, sy, np.array([1, 0]))
    assert lhs == pytest.approx(rhs) == pytest.approx(1.0)


def test_link_to_grid_model(grid):
    psi = build_state(StateSpec(StateKind.PLANE_WAVE_PACKET, {"sigma": 2.0, "momentum": 0.0}), grid)
    xi = build_state(gaussian(0.5, center=0.2), grid)
    b = branch_pair(psi, xi, k=1.0, slits=SlitModel(), tau_prime=1.0, propagation_edge_tol=1e-2)
    s = link_to_slit_model(b)
    assert s.visibility() == pytest.approx(visibility(xi, 1.0).visibility, abs=1e-12)
    assert s.norm_sq() == pytest.approx(1.0, abs=1e-12)
    assert abs(s.object_overlap) < 1e-12
