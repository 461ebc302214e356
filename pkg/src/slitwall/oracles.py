"""Brute-force reference computations.

These deliberately avoid the factored code paths: the composite particle-wall
state is built as a dense (q, Q) array and evolved with explicit DFT
matrices, two-branch states are expanded with ``np.kron`` and traced, and the
visibility integral is done by adaptive quadrature of the analytic density.
Used by the self-test and the test suite.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate

from .grid import GridSpec


def dft_matrices(grid: GridSpec, hbar: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Dense forward and inverse matrices of the unitary position<->momentum transform."""
    x = (np.arange(grid.n_points) - grid.n_points // 2) * grid.spacing
    p = (np.arange(grid.n_points) - grid.n_points // 2) * grid.momentum_spacing
    phase = np.exp(-1j * np.outer(p, x) / hbar)
    fwd = phase * grid.spacing / np.sqrt(2 * np.pi * hbar)
    inv = phase.conj().T * grid.momentum_spacing / np.sqrt(2 * np.pi * hbar)
    return fwd, inv


def dense_final_state(
    grid: GridSpec,
    psi: np.ndarray,
    xi: np.ndarray,
    *,
    k: float,
    slit1_mask: np.ndarray,
    mass: float,
    tau: float,
    tau_prime: float,
    hbar: float = 1.0,
) -> np.ndarray:
    """Composite amplitude Psi[q, Q] on the screen, built without factoring.

    ``psi`` and ``xi`` are position-space samples. Slit 2 is the complement
    of ``slit1_mask`` (partition geometry) unless the caller zeroes it.
    """
    x = (np.arange(grid.n_points) - grid.n_points // 2) * grid.spacing
    p = (np.arange(grid.n_points) - grid.n_points // 2) * grid.momentum_spacing
    fwd, inv = dft_matrices(grid, hbar)

    def propagator(t):
        return inv @ np.diag(np.exp(-1j * p**2 * t / (2 * mass * hbar))) @ fwd

    state = np.outer(psi, xi)
    state = propagator(tau) @ state
    s1 = np.diag(slit1_mask.astype(float))
    s2 = np.diag((~slit1_mask).astype(float))
    q, Q = np.meshgrid(x, x, indexing="ij")
    # exp(ik(Q - q)) for slit 1, its conjugate for slit 2
    kick = np.exp(1j * k * (Q - q) / hbar)
    after = kick * (s1 @ state) + kick.conj() * (s2 @ state)
    return propagator(tau_prime) @ after


def dense_screen_marginal(grid: GridSpec, state: np.ndarray) -> np.ndarray:
    rho = np.sum(np.abs(state) ** 2, axis=1) * grid.spacing
    return rho / (rho.sum() * grid.spacing)


def dense_conditional_momentum(grid: GridSpec, state: np.ndarray, q_index: int) -> np.ndarray:
    fwd, _ = dft_matrices(grid)
    row = fwd @ state[q_index, :]
    rho = np.abs(row) ** 2
    return rho / (rho.sum() * grid.momentum_spacing)


def dense_two_branch(c1, c2, psi1, psi2, xi1, xi2) -> np.ndarray:
    """Full density matrix of c1 psi1(x)xi1 + c2 psi2(x)xi2 after normalization."""
    vec = c1 * np.kron(psi1, xi1) + c2 * np.kron(psi2, xi2)
    vec = vec / np.linalg.norm(vec)
    return np.outer(vec, vec.conj())


def partial_trace(rho: np.ndarray, dim_object: int, dim_meter: int, keep: str) -> np.ndarray:
    r = rho.reshape(dim_object, dim_meter, dim_object, dim_meter)
    if keep == "object":
        return np.einsum("ajbj->ab", r)
    return np.einsum("iaib->ab", r)


def outcome_probabilities(reduced: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("ia,ij,ja->a", basis.conj(), reduced, basis))


def dense_conditional_object(rho: np.ndarray, dim_object: int, dim_meter: int, m: np.ndarray) -> np.ndarray:
    """Object density matrix after projecting the meter onto |m>, normalized."""
    proj = np.kron(np.eye(dim_object), np.outer(m, m.conj()))
    post = proj @ rho @ proj
    post = post / np.trace(post).real
    return partial_trace(post, dim_object, dim_meter, "object")


def gaussian_visibility_quadrature(sigma: float, k: float, hbar: float = 1.0) -> complex:
    """<xi|exp(-2ikQ/hbar)|xi> for a centred Gaussian by adaptive quadrature."""
    def density(q):
        return np.exp(-q**2 / (2 * sigma**2)) / np.sqrt(2 * np.pi * sigma**2)

    lim = 40 * sigma
    w = 2 * k / hbar
    opts = {"limit": 400, "epsabs": 1e-14, "epsrel": 1e-12}
    re, _ = integrate.quad(density, -lim, lim, weight="cos", wvar=w, **opts)
    im, _ = integrate.quad(density, -lim, lim, weight="sin", wvar=w, **opts)
    return complex(re, -im)
