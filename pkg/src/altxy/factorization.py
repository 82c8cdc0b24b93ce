"""Separable-ground-state analysis: pair Hamiltonian, product-ansatz energy,
and the factorization line lambda1^2 = lambda2^2 + (1 - gamma^2).

The chain splits into even-odd pair Hamiltonians, each carrying the full
bond and half of each site's field (every site belongs to two pairs).  The
lowest product-state energy per site equals the pair ground energy exactly
on the factorization line, where the pair ground manifold becomes doubly
degenerate and admits the two Neel-ordered product states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .model import SystemParams
from .twosite import PAULI, TwoSiteState, assemble_rho

_GRID = 256  # coarse minimization grid per angle
FL_TOL_ANALYTIC = 1e-9
FL_TOL_GRID = 1e-6


@dataclass(frozen=True)
class SeparableAnsatz:
    """Optimal Neel-ansatz angles and energies (units of the input J)."""

    theta_e: float
    theta_o: float
    epsilon: float
    epsilon0: float
    pair_ground_degenerate: bool


def pair_hamiltonian(params: SystemParams) -> np.ndarray:
    """Even-odd pair Hamiltonian whose sum over pairs rebuilds the chain.

    Bond terms appear once per pair; each site's field is shared between
    its two pairs, so the pair carries h_plus/4 and h_minus/4.
    """
    j, g = params.j, params.gamma
    sx, sy, sz = PAULI["x"], PAULI["y"], PAULI["z"]
    eye = np.eye(2, dtype=complex)
    return (
        j * (1 + g) / 4.0 * np.kron(sx, sx)
        + j * (1 - g) / 4.0 * np.kron(sy, sy)
        + params.h_plus / 4.0 * np.kron(sz, eye)
        + params.h_minus / 4.0 * np.kron(eye, sz)
    )


def pair_ground_energy(params: SystemParams) -> tuple[float, bool]:
    """Lowest pair eigenvalue and whether it is (near-)degenerate.

    Closed form: -max(sqrt(h1^2 + (J g)^2), sqrt(J^2 + h2^2))/2; the two
    branches cross exactly on the factorization line.
    """
    w = np.linalg.eigvalsh(pair_hamiltonian(params))
    return float(w[0]), bool(w[1] - w[0] < 1e-9 * max(1.0, abs(w[0])))


def _ansatz_energy(theta_e, theta_o, params: SystemParams) -> np.ndarray:
    """Product-state energy per site over real Bloch angles.

    For gamma > 0 the optimal azimuths put the spins in the xz plane; for
    gamma < 0 in the yz plane, which amounts to |gamma| in the coupling.
    """
    j = params.j * (1.0 + abs(params.gamma))
    return 0.25 * (j * np.sin(theta_e) * np.sin(theta_o)
                   + params.h_plus * np.cos(theta_e)
                   + params.h_minus * np.cos(theta_o))


def _closed_form_candidates(params: SystemParams) -> list[tuple[float, float]]:
    """Stationary points of the ansatz energy, all sign branches.

    Derived from the stationarity conditions J' cos(te) sin(to) = h+ sin(te),
    J' sin(te) cos(to) = h- sin(to) with J' = J (1+|gamma|); kept as a
    cross-check of the grid minimization.
    """
    jp = params.j * (1.0 + abs(params.gamma))
    hp, hm = params.h_plus, params.h_minus
    cands = [(0.0, 0.0), (0.0, math.pi), (math.pi, 0.0), (math.pi, math.pi)]
    # Equatorial branches: one spin pinned to +/- x, the partner aligned
    # against the combined bond-plus-field axis (exact when h+ or h- is 0).
    for s in (+1.0, -1.0):
        cands.append((s * math.pi / 2.0, math.atan2(-jp * s, -hm)))
        cands.append((math.atan2(-jp * s, -hp), s * math.pi / 2.0))
    num = jp**4 - hp**2 * hm**2
    if num > 0:
        se2 = num / (jp**2 * (jp**2 + hp**2))
        if 0.0 <= se2 <= 1.0:
            for s_sign in (+1.0, -1.0):
                for c_sign in (+1.0, -1.0):
                    se = s_sign * math.sqrt(se2)
                    ce = c_sign * math.sqrt(max(0.0, 1.0 - se2))
                    if abs(ce) < 1e-15:
                        continue
                    so = hp * se / (jp * ce)
                    co = hp * hm / (jp**2 * ce)
                    if abs(so**2 + co**2 - 1.0) < 1e-9:
                        cands.append((math.atan2(se, ce), math.atan2(so, co)))
    return cands


def separable_energy(params: SystemParams) -> SeparableAnsatz:
    """Minimum product-state energy per site, with the optimizing angles.

    Minimized two ways: a 256^2 angle grid polished by simplex (the
    authority) and the closed-form stationary branches; raises if the two
    disagree beyond 1e-6.
    """
    th = np.linspace(-math.pi, math.pi, _GRID, endpoint=False)
    grid = _ansatz_energy(th[:, None], th[None, :], params)
    i, k = np.unravel_index(np.argmin(grid), grid.shape)
    res = minimize(lambda x: float(_ansatz_energy(x[0], x[1], params)),
                   x0=np.array([th[i], th[k]]), method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 2000})
    eps_num = float(res.fun)
    te, to = float(res.x[0]), float(res.x[1])
    eps_closed = min(float(_ansatz_energy(a, b, params))
                     for a, b in _closed_form_candidates(params))
    if abs(eps_closed - eps_num) > 1e-6:
        raise ArithmeticError(
            f"closed-form and grid minima disagree: {eps_closed} vs {eps_num}")
    eps0, degenerate = pair_ground_energy(params)
    return SeparableAnsatz(theta_e=te, theta_o=to,
                           epsilon=min(eps_num, eps_closed), epsilon0=eps0,
                           pair_ground_degenerate=degenerate)


def factorization_lambda1(gamma: float, lambda2: float) -> float:
    """Positive lambda1 on the factorization line at the given lambda2."""
    return math.sqrt(lambda2**2 + 1.0 - gamma**2)


def on_factorization_line(params: SystemParams, tol: float = FL_TOL_GRID) -> bool:
    """Membership predicate |l1^2 - l2^2 - (1 - g^2)| < tol."""
    return abs(params.lambda1**2 - params.lambda2**2 - (1.0 - params.gamma**2)) < tol


def factorization_locus(gamma: float, lambda2_values: np.ndarray) -> np.ndarray:
    """Sample points (lambda1, lambda2) of the line for |gamma| <= 1."""
    if abs(gamma) > 1.0:
        raise ValueError("the locus is real at lambda2=0 only for |gamma| <= 1")
    l2 = np.asarray(lambda2_values, dtype=float)
    l1 = np.sqrt(l2**2 + 1.0 - gamma**2)
    return np.stack([l1, l2], axis=-1)


def _bloch_state(theta: float) -> np.ndarray:
    return np.array([math.cos(theta / 2.0), math.sin(theta / 2.0)], dtype=complex)


def neel_product_state(params: SystemParams, tol: float = FL_TOL_ANALYTIC):
    """The Neel product ground state at a factorization-line point.

    Returns (theta_e, theta_o, rho_eo) where rho_eo is the pure product
    pair state.  Raises for parameters off the line (the product ansatz is
    then not a ground state).  The +/- angle pair is the two-fold ground
    degeneracy; the returned angles are the optimizer's branch.
    """
    if not on_factorization_line(params, tol=max(tol, 1e-9)):
        raise ValueError(
            f"parameters (gamma={params.gamma}, l1={params.lambda1}, "
            f"l2={params.lambda2}) are not on the factorization line")
    ansatz = separable_energy(params)
    psi_e = _bloch_state(ansatz.theta_e)
    psi_o = _bloch_state(ansatz.theta_o)
    rho = np.kron(np.outer(psi_e, psi_e.conj()), np.outer(psi_o, psi_o.conj()))
    return ansatz.theta_e, ansatz.theta_o, TwoSiteState(rho, source="CES")
