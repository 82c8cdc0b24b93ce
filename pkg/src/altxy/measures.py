"""Bipartite correlation measures of a two-qubit state.

Negativity and logarithmic negativity come from the partial transpose;
quantum discord from rank-one projective measurements on one qubit, with
the conditional entropy minimized over the measurement axis by a coarse
angle grid followed by multistart simplex refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .linalg import EIGENVALUE_FLOOR, partial_transpose, trace_norm, von_neumann_entropy
from .twosite import TwoSiteState

# Coarse measurement-axis grid; every local minimum within this margin of
# the best seed gets refined (the landscape is multimodal).
GRID_POINTS = 48
MULTISTART_MARGIN = 1e-3
OBJECTIVE_TOL = 1e-10


@dataclass(frozen=True)
class MeasureResult:
    """All measures of one state plus the discord optimizer report."""

    ln: float
    negativity: float
    discord: float
    mutual_info: float
    classical_corr: float
    theta: float
    phi: float
    conditional_entropy: float
    converged: bool


def negativity(state: TwoSiteState) -> float:
    """(|rho^T_e|_1 - 1)/2, clipped to zero below the eigenvalue floor."""
    value = 0.5 * (trace_norm(partial_transpose(state.rho, "even")) - 1.0)
    return 0.0 if value < EIGENVALUE_FLOOR else float(value)


def log_negativity(state: TwoSiteState) -> float:
    """log2(2 N + 1) in ebits."""
    return float(np.log2(2.0 * negativity(state) + 1.0))


def mutual_information(state: TwoSiteState) -> float:
    """S(e) + S(o) - S(eo) in bits."""
    s_e = von_neumann_entropy(state.reduced("even"))
    s_o = von_neumann_entropy(state.reduced("odd"))
    s_eo = von_neumann_entropy(state.rho)
    return max(0.0, s_e + s_o - s_eo)


def _entropy2(p: np.ndarray) -> np.ndarray:
    q = np.clip(p, EIGENVALUE_FLOOR, 1.0)
    return -np.where(p > EIGENVALUE_FLOOR, q * np.log2(q), 0.0)


def conditional_entropy_grid(rho: np.ndarray, theta: np.ndarray, phi: np.ndarray,
                             measured: str = "even") -> np.ndarray:
    """Measured conditional entropy sum_i p_i S(rho_unmeasured|i) on an angle grid.

    theta, phi broadcast together; returns an array of their common shape.
    Vectorized through closed-form 2x2 eigenvalues.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    nx = np.sin(theta) * np.cos(phi)
    ny = np.sin(theta) * np.sin(phi)
    nz = np.cos(theta)
    r = rho.reshape(2, 2, 2, 2)
    if measured == "odd":
        r = r.transpose(1, 0, 3, 2)
    # rho blocks indexed by the measured qubit: B_{ab} = <a|_m rho |b>_m.
    b00, b01 = r[0, :, 0, :], r[0, :, 1, :]
    b10, b11 = r[1, :, 0, :], r[1, :, 1, :]
    out = np.zeros(theta.shape)
    for s in (+1.0, -1.0):
        # P = (I + s n.sigma)/2 has entries p00=(1+s nz)/2 etc.
        p00 = 0.5 * (1.0 + s * nz)
        p11 = 0.5 * (1.0 - s * nz)
        p01 = 0.5 * s * (nx - 1j * ny)
        p10 = 0.5 * s * (nx + 1j * ny)
        # Unnormalized conditional state tr_m[(P x 1) rho (P x 1)] = sum_ab P_ba B_ab.
        m = (p00[..., None, None] * b00 + p01[..., None, None] * b10
             + p10[..., None, None] * b01 + p11[..., None, None] * b11)
        prob = np.real(m[..., 0, 0] + m[..., 1, 1])
        half = 0.5 * prob
        det = np.real(m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0])
        disc = np.sqrt(np.clip(half * half - det, 0.0, None))
        lam1 = np.clip(half + disc, 0.0, None)
        lam2 = np.clip(half - disc, 0.0, None)
        safe = np.clip(prob, EIGENVALUE_FLOOR, None)
        cond = _entropy2(lam1 / safe) + _entropy2(lam2 / safe)
        out += np.where(prob > EIGENVALUE_FLOOR, prob * cond, 0.0)
    return out


def _minimize_conditional_entropy(rho: np.ndarray, measured: str) -> tuple[float, float, float, bool]:
    thetas = np.linspace(0.0, math.pi, GRID_POINTS)
    phis = np.linspace(0.0, math.pi, GRID_POINTS, endpoint=False)
    grid = conditional_entropy_grid(rho, thetas[:, None], phis[None, :], measured)
    best = float(grid.min())
    seeds = np.argwhere(grid <= best + MULTISTART_MARGIN)
    # Deterministic tie-break: lowest theta, then lowest phi.
    seeds = sorted((thetas[i], phis[j]) for i, j in seeds)
    best_val, best_x, ok = math.inf, (0.0, 0.0), False
    for seed in seeds[:16]:
        res = minimize(
            lambda x: float(conditional_entropy_grid(rho, x[0], x[1], measured)),
            x0=np.array(seed), method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": OBJECTIVE_TOL, "maxiter": 400})
        if res.fun < best_val - 1e-15:
            best_val, best_x, ok = float(res.fun), (float(res.x[0]), float(res.x[1])), bool(res.success)
    return best_val, best_x[0], best_x[1], ok


def quantum_discord(state: TwoSiteState, measured_party: str = "even") -> MeasureResult:
    """Discord (and companions) with measurement on the given qubit.

    discord = mutual information - classical correlation, where the
    classical correlation uses the optimal rank-one projective measurement.
    Small negative discord (above -1e-8) is clipped to zero.
    """
    if measured_party not in ("even", "odd"):
        raise ValueError(f"measured_party must be 'even' or 'odd', got {measured_party!r}")
    mi = mutual_information(state)
    s_other = von_neumann_entropy(state.reduced("odd" if measured_party == "even" else "even"))
    cond, theta, phi, ok = _minimize_conditional_entropy(state.rho, measured_party)
    classical = max(0.0, s_other - cond)
    disc = mi - classical
    if disc < -1e-8:
        raise ValueError(f"discord {disc} below tolerance; inconsistent inputs")
    disc = max(0.0, disc)
    neg = negativity(state)
    return MeasureResult(
        ln=float(np.log2(2.0 * neg + 1.0)), negativity=neg, discord=disc,
        mutual_info=mi, classical_corr=classical,
        theta=theta, phi=phi, conditional_entropy=cond, converged=ok)


def discord_value(state: TwoSiteState, measured_party: str = "even") -> float:
    return quantum_discord(state, measured_party).discord


# ---------------------------------------------------------------------------
# Batched evaluation over stacks of density matrices (time series, T scans)

def log_negativity_batch(rhos: np.ndarray) -> np.ndarray:
    """log2(2N+1) for a stack (..., 4, 4) of pair density matrices."""
    rhos = np.asarray(rhos, dtype=complex)
    lead = rhos.shape[:-2]
    r = rhos.reshape((-1, 2, 2, 2, 2))
    pt = r.transpose(0, 3, 2, 1, 4).reshape(-1, 4, 4)  # transpose the even party
    w = np.linalg.eigvalsh(pt)
    neg = 0.5 * (np.abs(w).sum(axis=-1) - 1.0)
    neg = np.where(neg < EIGENVALUE_FLOOR, 0.0, neg)
    return np.log2(2.0 * neg + 1.0).reshape(lead)


def _conditional_entropy_batch(rhos: np.ndarray, theta: np.ndarray, phi: np.ndarray,
                               measured: str, per_state_axes: bool = False) -> np.ndarray:
    """(S, A) conditional entropies for S states on A measurement axes.

    With per_state_axes, theta and phi are (S, A) arrays giving each state
    its own axis set; otherwise one (A,) set is shared by all states.
    """
    r = rhos.reshape(-1, 2, 2, 2, 2)
    if measured == "odd":
        r = r.transpose(0, 2, 1, 4, 3)
    blocks = [[r[:, a, :, b, :] for b in (0, 1)] for a in (0, 1)]
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if not per_state_axes:
        theta, phi = theta.reshape(1, -1), phi.reshape(1, -1)
    nx = np.sin(theta) * np.cos(phi)
    ny = np.sin(theta) * np.sin(phi)
    nz = np.cos(theta)
    out = np.zeros((r.shape[0], theta.shape[-1]))
    for s in (+1.0, -1.0):
        pm = [[0.5 * (1.0 + s * nz), 0.5 * s * (nx - 1j * ny)],
              [0.5 * s * (nx + 1j * ny), 0.5 * (1.0 - s * nz)]]
        m = sum(pm[b][a][:, :, None, None] * blocks[a][b][:, None, :, :]
                for a in (0, 1) for b in (0, 1))
        prob = np.real(m[..., 0, 0] + m[..., 1, 1])
        half = 0.5 * prob
        det = np.real(m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0])
        disc = np.sqrt(np.clip(half * half - det, 0.0, None))
        safe = np.clip(prob, EIGENVALUE_FLOOR, None)
        cond = _entropy2(np.clip(half + disc, 0, None) / safe) \
            + _entropy2(np.clip(half - disc, 0, None) / safe)
        out += np.where(prob > EIGENVALUE_FLOOR, prob * cond, 0.0)
    return out


def discord_batch(rhos: np.ndarray, measured: str = "even",
                  n_seeds: int = 2, chunk: int = 512,
                  zoom_levels: int = 9) -> np.ndarray:
    """Quantum discord for a stack (S, 4, 4) of pair density matrices.

    Vectorized variant of the `quantum_discord` optimizer for long time
    series and temperature scans: the same 48x48 coarse grid, then a
    shrinking 9x9 local grid around each of the best `n_seeds` points in
    place of the simplex (agrees with `quantum_discord` to ~1e-9 bits).
    """
    rhos = np.asarray(rhos, dtype=complex).reshape(-1, 4, 4)
    thetas = np.linspace(0.0, math.pi, GRID_POINTS)
    phis = np.linspace(0.0, math.pi, GRID_POINTS, endpoint=False)
    tg, pg = np.meshgrid(thetas, phis, indexing="ij")
    tflat, pflat = tg.ravel(), pg.ravel()
    local = np.linspace(-1.0, 1.0, 9)
    out = np.empty(rhos.shape[0])
    for lo in range(0, rhos.shape[0], chunk):
        batch = rhos[lo:lo + chunk]
        s = batch.shape[0]
        grid = _conditional_entropy_batch(batch, tflat, pflat, measured)
        order = np.argsort(grid, axis=1)[:, :n_seeds]
        t_best = tflat[order].reshape(-1)           # (s * n_seeds,)
        p_best = pflat[order].reshape(-1)
        f_best = np.take_along_axis(grid, order, axis=1).reshape(-1)
        wide = np.repeat(np.arange(s), n_seeds)
        half = math.pi / GRID_POINTS
        for _ in range(zoom_levels):
            tt = np.clip(t_best[:, None, None] + half * local[None, :, None],
                         0.0, math.pi)
            pp = p_best[:, None, None] + half * local[None, None, :]
            vals = _conditional_entropy_batch(
                batch[wide], tt.reshape(len(wide), -1), pp.reshape(len(wide), -1),
                measured, per_state_axes=True)
            k = np.argmin(vals, axis=1)
            better = vals[np.arange(len(wide)), k]
            move = better < f_best
            f_best = np.where(move, better, f_best)
            t_best = np.where(move, tt.reshape(len(wide), -1)[np.arange(len(wide)), k], t_best)
            p_best = np.where(move, pp.reshape(len(wide), -1)[np.arange(len(wide)), k], p_best)
            half /= 3.0
        cond = f_best.reshape(s, n_seeds).min(axis=1)
        for k, rho in enumerate(batch):
            state = TwoSiteState(rho, source="TES")
            mi = mutual_information(state)
            s_other = von_neumann_entropy(state.reduced("odd" if measured == "even" else "even"))
            out[lo + k] = max(0.0, mi - max(0.0, s_other - cond[k]))
    return out
