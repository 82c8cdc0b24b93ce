"""Finite-size scaling: pseudo-critical points from derivative extrema,
power-law drift fits, and the decay of the zone-edge jump.

Finite chains are evaluated on the integer momentum grid 2 pi p / N, whose
zone-edge mode crosses levels exactly at the AFM-DM boundary; that crossing
is what produces the finite jump whose 1/N decay is fitted here.  The
pseudo-critical point at size N is the extremum of |dQ/dlambda|.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .measures import discord_batch, log_negativity_batch
from .model import ZERO_TEMPERATURE, SystemParams
from .momentum import _golden_minimize
from .observables import ces_observables
from .twosite import assemble_rho

# Size 64 is excluded by default: the discord derivative extremum is barely
# formed there and its drift is visibly pre-asymptotic.
DEFAULT_MOMENTUM_SIZES = (128, 256, 512, 1024, 2048)
DEFAULT_ED_SIZES = (8, 10, 12, 14, 16, 18, 20)
DEFAULT_JUMP_SIZES = (64, 128, 256, 512, 1024)
JUMP_OFFSET = 1e-4


def afm_pm_boundary(lambda2: float) -> float:
    """lambda1 on the AFM-PM line: lambda1^2 = lambda2^2 + 1."""
    return math.sqrt(lambda2**2 + 1.0)


def afm_dm_boundary(lambda1: float, gamma: float) -> float:
    """lambda2 on the AFM-DM line: lambda2^2 = lambda1^2 + gamma^2."""
    return math.sqrt(lambda1**2 + gamma**2)


def _params_at(gamma: float, axis: str, value: float, fixed: float) -> SystemParams:
    if axis == "lambda1":
        return SystemParams(gamma=gamma, lambda1=value, lambda2=fixed)
    if axis == "lambda2":
        return SystemParams(gamma=gamma, lambda1=fixed, lambda2=value)
    raise ValueError(f"axis must be 'lambda1' or 'lambda2', got {axis!r}")


def measure_curve(gamma: float, n: float, axis: str, fixed: float,
                  measure: str = "ln", beta: float = ZERO_TEMPERATURE,
                  scheme: str = "integer") -> Callable[[float], float]:
    """lambda -> measure value of the size-N (or thermodynamic) pair state."""

    def f(value: float) -> float:
        params = _params_at(gamma, axis, value, fixed)
        if scheme == "ed":
            from .ed import build_spin_hamiltonian, lanczos_ground_state, reduce_two_site

            h = build_spin_hamiltonian(params, int(n))
            _, psi, _ = lanczos_ground_state(h)
            rho = reduce_two_site(psi, (0, 1), int(n))[None]
        else:
            obs = ces_observables(params, beta, size=n, scheme=scheme)
            rho = assemble_rho(obs).rho[None]
        if measure == "ln":
            return float(log_negativity_batch(rho)[0])
        if measure == "qd":
            return float(discord_batch(rho)[0])
        raise ValueError(f"measure must be 'ln' or 'qd', got {measure!r}")

    return f


def derivative(f: Callable[[float], float], x: float, step: float = 1e-3,
               richardson: bool = False) -> float:
    """Central difference, optionally Richardson-extrapolated (h and h/2)."""
    d1 = (f(x + step) - f(x - step)) / (2.0 * step)
    if not richardson:
        return d1
    d2 = (f(x + step / 2.0) - f(x - step / 2.0)) / step
    return (4.0 * d2 - d1) / 3.0


def locate_pseudocritical(gamma: float, n: float, axis: str, fixed: float,
                          bracket: tuple[float, float], measure: str = "ln",
                          beta: float = ZERO_TEMPERATURE, scheme: str = "integer",
                          coarse: int = 200, xtol: float = 1e-6,
                          step: float = 1e-3) -> float:
    """Extremum location of |dQ/dlambda| inside the bracket at size N.

    A coarse scan on the measure's own grid brackets the extremum, which is
    then refined by golden section on the central-difference derivative.
    Raises if the coarse extremum sits on the bracket edge.
    """
    f = measure_curve(gamma, n, axis, fixed, measure, beta, scheme)
    lam = np.linspace(bracket[0], bracket[1], coarse)
    q = np.array([f(x) for x in lam])
    slope = np.abs(np.gradient(q, lam))
    k = int(np.argmax(slope))
    if k in (0, coarse - 1):
        raise ValueError(f"no derivative extremum inside bracket {bracket}")

    def neg_abs_slope(x: float) -> float:
        return -abs(derivative(f, x, step=step))

    lo, hi = lam[max(k - 2, 0)], lam[min(k + 2, coarse - 1)]
    x_star, _ = _golden_minimize(neg_abs_slope, lo, hi, xtol)
    return float(x_star)


@dataclass(frozen=True)
class ScalingFit:
    """Power-law fit lambda_c(N) = lambda_c(inf) + alpha N^-nu on log-log axes."""

    nu: float
    ln_alpha: float
    nu_err: float
    ln_alpha_err: float
    residuals: np.ndarray
    sizes: np.ndarray
    axis: str
    fixed: float
    lambda_c_inf: float


@dataclass(frozen=True)
class JumpFit:
    """Power-law fit |Delta^N| = alpha~ N^-nu~ of the boundary jump."""

    nu: float
    ln_alpha: float
    nu_err: float
    ln_alpha_err: float
    residuals: np.ndarray
    sizes: np.ndarray


def _loglog_fit(ns: np.ndarray, ys: np.ndarray):
    """OLS of ln y = ln alpha - nu ln N with regression standard errors."""
    x = np.log(ns)
    y = np.log(ys)
    a = np.stack([np.ones_like(x), -x], axis=1)
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - a @ coef
    dof = max(len(x) - 2, 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(a.T @ a)
    return coef[1], coef[0], math.sqrt(cov[1, 1]), math.sqrt(cov[0, 0]), resid


def fit_power_law(sizes, lambda_cs, lambda_c_inf: float, axis: str = "lambda1",
                  fixed: float = 0.0) -> ScalingFit:
    """Fit the pseudo-critical drift toward the thermodynamic boundary."""
    sizes = np.asarray(sizes, dtype=float)
    lambda_cs = np.asarray(lambda_cs, dtype=float)
    gaps = np.abs(lambda_cs - lambda_c_inf)
    keep = gaps > 0
    if not keep.all():
        warnings.warn(f"dropping {int((~keep).sum())} points with zero drift")
    if keep.sum() < 4:
        raise ValueError("need at least 4 usable (N, lambda_c) points")
    nu, ln_alpha, nu_err, ln_err, resid = _loglog_fit(sizes[keep], gaps[keep])
    return ScalingFit(nu=nu, ln_alpha=ln_alpha, nu_err=nu_err, ln_alpha_err=ln_err,
                      residuals=resid, sizes=sizes[keep], axis=axis, fixed=fixed,
                      lambda_c_inf=lambda_c_inf)


def jump_magnitude(gamma: float, n: int, axis: str, fixed: float,
                   measure: str = "ln", lambda_c: float | None = None,
                   delta: float = JUMP_OFFSET) -> float:
    """|Q(lambda_c + delta) - Q(lambda_c - delta)| on the integer grid at zero T.

    The zone-edge level crossing sits exactly at the boundary for every N,
    so the two-sided difference isolates the finite jump.
    """
    if lambda_c is None:
        lambda_c = (afm_dm_boundary(fixed, gamma) if axis == "lambda2"
                    else afm_pm_boundary(fixed))
    f = measure_curve(gamma, n, axis, fixed, measure, ZERO_TEMPERATURE, "integer")
    return abs(f(lambda_c + delta) - f(lambda_c - delta))


def fit_jump_decay(sizes, jumps) -> JumpFit:
    """Fit the 1/N-type decay of the boundary jump."""
    sizes = np.asarray(sizes, dtype=float)
    jumps = np.asarray(jumps, dtype=float)
    keep = jumps > 0
    if not keep.all():
        warnings.warn(f"dropping {int((~keep).sum())} nonpositive jump points")
    if keep.sum() < 3:
        raise ValueError("need at least 3 usable (N, jump) points")
    nu, ln_alpha, nu_err, ln_err, resid = _loglog_fit(sizes[keep], jumps[keep])
    return JumpFit(nu=nu, ln_alpha=ln_alpha, nu_err=nu_err, ln_alpha_err=ln_err,
                   residuals=resid, sizes=sizes[keep])


def pseudocritical_drift(gamma: float, sizes, axis: str, fixed: float,
                         measure: str = "ln", scheme: str = "integer",
                         bracket: tuple[float, float] | None = None,
                         lambda_c_inf: float | None = None) -> ScalingFit:
    """Locate lambda_c(N) across sizes and fit the drift exponent."""
    if lambda_c_inf is None:
        lambda_c_inf = (afm_dm_boundary(fixed, gamma) if axis == "lambda2"
                        else afm_pm_boundary(fixed))
    if bracket is None:
        # Tight window around the boundary: wide enough for the size-64
        # drift, narrow enough to exclude the smooth flank of the measure.
        bracket = (0.90 * lambda_c_inf, 1.04 * lambda_c_inf)
    lcs = [locate_pseudocritical(gamma, n, axis, fixed, bracket, measure,
                                 scheme=scheme) for n in sizes]
    return fit_power_law(sizes, lcs, lambda_c_inf, axis=axis, fixed=fixed)
