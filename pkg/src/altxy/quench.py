"""Quench dynamics and ergodicity of pair correlations.

The equilibrium state prepared at t=0 evolves under the zero-field (or
user-chosen) Hamiltonian; every momentum subspace evolves independently, so
time-dependent observables are reduced-zone integrals of per-block
conjugations.  For long time windows the integrand is expanded once into
Bohr frequencies, after which a whole time series costs one phase sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .measures import discord_batch, log_negativity_batch
from .model import SystemParams, is_zero_temperature
from .momentum import BLOCK_SLICES, hamiltonian_16
from .observables import (ObservableSet, _assemble_set, _block_eigs,
                          _observable_blocks, _thermal_weights)
from .quadrature import panel_nodes
from .twosite import assemble_rho

LONG_TIME_WINDOW = (100.0 * math.pi, 120.0 * math.pi)
LONG_TIME_SAMPLES = 4000
FLUCTUATION_DELTA = 1e-3      # three-decimal accuracy convention
BASE_NODES = 2048
NODES_PER_TIME = 4096 / (100.0 * math.pi)  # minimum density at the long-time window

_KINDS = ("m_e", "m_o", "xx", "yy", "xy", "yx")


@dataclass(frozen=True)
class QuenchSpec:
    """Fields before t=0 (thermalized at beta_init) and after (default off)."""

    pre: SystemParams
    beta_init: float = 100.0
    post_fields: tuple[float, float] = (0.0, 0.0)

    @property
    def post(self) -> SystemParams:
        return self.pre.with_fields(self.post_fields[0] / self.pre.j,
                                    self.post_fields[1] / self.pre.j)


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    observables: list[ObservableSet] = field(default_factory=list)

    def __post_init__(self):
        t = np.asarray(self.times)
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")


@dataclass(frozen=True)
class ErgodicityReport:
    measure: str
    q_time_avg: float
    q_eq_max: float
    eta: float
    classification: str
    t_prime_at_max: float
    fluctuation: float
    inconclusive: bool
    note: str


def _nodes_for(t_max: float, nodes: int | None) -> int:
    if nodes is not None:
        return nodes
    return max(BASE_NODES, int(math.ceil(NODES_PER_TIME * max(t_max, 1.0))))


def _frequency_data(spec: QuenchSpec, nodes: int):
    """Bohr-frequency expansion of the six observables on the node set.

    Every observable's trace against the conjugated block states is a sum
    of phases exp(-i(w_k - w_j)t); Hermiticity pairs (j,k) with (k,j), so
    only j<k terms are kept with doubled real parts, and the stationary
    j=k terms collapse into one constant per observable:

        obs(t) = const + 2 Re sum_m amp_m exp(-i delta_m t).

    Returns (const (6,), deltas (M,), amps (6, M)) with the quadrature
    weights folded in.
    """
    x, w = panel_nodes(nodes, [0.0, math.pi / 2.0])
    params = spec.pre
    (w2, v2), (w4, v4) = _block_eigs(params, x)
    u1, u2, u4, z = _thermal_weights(w2, w4, spec.beta_init)
    hq = hamiltonian_16(x, params, spec.post_fields)
    wq2, vq2 = np.linalg.eigh(hq[:, BLOCK_SLICES[1], BLOCK_SLICES[1]])
    wq4, vq4 = np.linalg.eigh(hq[:, BLOCK_SLICES[3], BLOCK_SLICES[3]])
    # Initial block states rotated into the post-quench eigenbasis.
    r2 = np.einsum("kaj,kj,kbj->kab", v2, u2 / z[:, None], v2.conj())
    r4 = np.einsum("kaj,kj,kbj->kab", v4, u4 / z[:, None], v4.conj())
    rt2 = np.einsum("kaj,kab,kbl->kjl", vq2.conj(), r2, vq2)
    rt4 = np.einsum("kaj,kab,kbl->kjl", vq4.conj(), r4, vq4)
    scale = w / math.pi
    iu2, ik2 = np.triu_indices(wq2.shape[-1], k=1)
    iu4, ik4 = np.triu_indices(wq4.shape[-1], k=1)
    deltas = np.concatenate([
        (wq2[:, ik2] - wq2[:, iu2]).ravel(),
        (wq4[:, ik4] - wq4[:, iu4]).ravel(),
    ])
    n_pairs = iu2.size + iu4.size
    const = np.empty(len(_KINDS))
    amps = np.empty((len(_KINDS), nodes * n_pairs), dtype=complex)
    for k, kind in enumerate(_KINDS):
        b2, b3, b4 = _observable_blocks(kind, x)
        o23 = np.einsum("kaj,kab,kbl->kjl", vq2.conj(), b2 + b3, vq2)
        o4 = np.einsum("kaj,kab,kbl->kjl", vq4.conj(), b4, vq4)
        c23 = o23 * rt2.transpose(0, 2, 1)
        c4 = o4 * rt4.transpose(0, 2, 1)
        const[k] = float(np.dot(scale, c23.diagonal(0, 1, 2).sum(-1).real
                                + c4.diagonal(0, 1, 2).sum(-1).real))
        amps[k] = np.concatenate([
            (c23[:, iu2, ik2] * scale[:, None]).ravel(),
            (c4[:, iu4, ik4] * scale[:, None]).ravel(),
        ])
    return const, deltas, amps


def _series_raw(const: np.ndarray, deltas: np.ndarray, amps: np.ndarray,
                times: np.ndarray, time_block: int = 32) -> np.ndarray:
    """Evaluate the phase sums for all observables over a time grid.

    Uniform grids advance the phases by cumulative multiplication (no exp
    per sample); general grids fall back to direct exponentials.
    """
    times = np.asarray(times, dtype=float)
    out = np.empty((amps.shape[0], times.size))
    dt = np.diff(times)
    uniform = times.size > 2 and np.allclose(dt, dt[0], rtol=1e-12, atol=1e-15)
    if uniform:
        step = np.exp(-1j * deltas * dt[0])
        acc = np.exp(-1j * deltas * times[0])
        col = 0
        block = np.empty((deltas.size, time_block), dtype=complex)
        while col < times.size:
            nb = min(time_block, times.size - col)
            for j in range(nb):
                block[:, j] = acc
                acc = acc * step
            out[:, col:col + nb] = 2.0 * (amps @ block[:, :nb]).real
            col += nb
    else:
        for col in range(0, times.size, time_block):
            e = np.exp(-1j * deltas[:, None] * times[None, col:col + time_block])
            out[:, col:col + e.shape[1]] = 2.0 * (amps @ e).real
    return out + const[:, None]


def _sets_from_raw(raw: np.ndarray) -> list[ObservableSet]:
    sets = []
    for col in raw.T:
        vals = dict(zip(_KINDS, col))
        sets.append(_assemble_set(vals, tes=True))
    return sets


def evolve_observables(spec: QuenchSpec, t: float, size: float = math.inf,
                       nodes: int | None = None) -> ObservableSet:
    """Observables of the evolved state at one time (t in units of 1/J).

    size=inf evaluates the reduced-zone integral; a finite size N uses the
    sector-exact finite-chain path.
    """
    if t < 0:
        raise ValueError("time must be non-negative")
    if not math.isinf(size):
        from .finitesize import exact_observables

        return exact_observables(spec.pre, spec.beta_init, int(size),
                                 post_fields=spec.post_fields, t=t)
    const, deltas, amps = _frequency_data(spec, _nodes_for(t, nodes))
    raw = _series_raw(const, deltas, amps, np.array([float(t)]))
    return _sets_from_raw(raw)[0]


_MEASURES = {"ln": log_negativity_batch,
             "qd": lambda rhos: discord_batch(rhos, "even")}


def _measure_values(measure: str, sets: list[ObservableSet]) -> np.ndarray:
    if measure not in _MEASURES:
        raise ValueError(f"measure must be one of {sorted(_MEASURES)}, got {measure!r}")
    rhos = np.stack([assemble_rho(s, source="TES").rho for s in sets])
    return np.asarray(_MEASURES[measure](rhos))


def time_series(spec: QuenchSpec, measure: str, grid: np.ndarray,
                nodes: int | None = None, keep_observables: bool = True) -> TimeSeries:
    """Measure values on a sorted grid of times (units 1/J)."""
    grid = np.asarray(grid, dtype=float)
    const, deltas, amps = _frequency_data(spec, _nodes_for(float(grid.max()), nodes))
    sets = _sets_from_raw(_series_raw(const, deltas, amps, grid))
    values = _measure_values(measure, sets)
    return TimeSeries(times=grid, values=values,
                      observables=sets if keep_observables else [])


def _classify(values: np.ndarray) -> tuple[str, float]:
    fluct = 0.5 * float(values.max() - values.min())
    if fluct < 1e-9:
        return "saturated", fluct
    if fluct <= FLUCTUATION_DELTA:
        return "bounded-oscillation", fluct
    return "persistent-oscillation", fluct


def long_time_average(spec: QuenchSpec, measure: str,
                      window: tuple[float, float] = LONG_TIME_WINDOW,
                      samples: int = LONG_TIME_SAMPLES,
                      nodes: int | None = None) -> tuple[float, str]:
    """Time-averaged measure over the late window, with its (a)/(b)/(c) class."""
    grid = np.linspace(window[0], window[1], samples)
    series = time_series(spec, measure, grid, nodes=nodes, keep_observables=False)
    label, _ = _classify(series.values)
    return float(series.values.mean()), label


def equilibrium_measure_vs_temperature(measure: str, params: SystemParams,
                                       temperatures: np.ndarray,
                                       nodes: int = 512) -> np.ndarray:
    """Equilibrium measure of the pair state on a temperature grid (units J)."""
    from .observables import observables_vs_beta

    temperatures = np.asarray(temperatures, dtype=float)
    sets = observables_vs_beta(params, 1.0 / temperatures, nodes=nodes)
    return _measure_values(measure, sets)


def equilibrium_max_over_T(measure: str, post_params: SystemParams, t_ref: float,
                           grid_points: int = 200, rel_tol: float = 1e-6,
                           nodes: int = 512) -> tuple[float, float]:
    """Best equilibrium measure over the decade around the reference temperature.

    Scans a logarithmic grid on [t_ref/10, 10 t_ref] and refines around the
    best point by golden section in log T to the requested relative width.
    """
    logs = np.linspace(math.log(t_ref / 10.0), math.log(10.0 * t_ref), grid_points)
    vals = equilibrium_measure_vs_temperature(measure, post_params, np.exp(logs), nodes)
    k = int(np.argmax(vals))
    lo, hi = logs[max(k - 1, 0)], logs[min(k + 1, grid_points - 1)]

    def neg_measure(logt: float) -> float:
        return -float(equilibrium_measure_vs_temperature(
            measure, post_params, np.array([math.exp(logt)]), nodes)[0])

    from .momentum import _golden_minimize

    log_star, fneg = _golden_minimize(neg_measure, lo, hi, rel_tol)
    if -fneg >= vals[k]:
        return float(-fneg), math.exp(log_star)
    return float(vals[k]), math.exp(logs[k])


def ergodicity_score(spec: QuenchSpec, measure: str,
                     nodes: int | None = None) -> ErgodicityReport:
    """Long-time average against the best nearby-equilibrium value.

    A positive score means the time average exceeds every equilibrium value
    in the physically relevant temperature decade (nonergodic); scores
    below 1e-3 are ergodic within the numerical-accuracy convention.
    """
    grid = np.linspace(*LONG_TIME_WINDOW, LONG_TIME_SAMPLES)
    series = time_series(spec, measure, grid, nodes=nodes, keep_observables=False)
    label, fluct = _classify(series.values)
    q_avg = float(series.values.mean())
    t_ref = 1.0 / (spec.beta_init * spec.pre.j)
    q_eq, t_star = equilibrium_max_over_T(measure, spec.post, t_ref)
    eta_raw = q_avg - q_eq
    eta = max(0.0, eta_raw)
    inconclusive = 0.0 < eta < FLUCTUATION_DELTA
    note = ("ergodic within numerical accuracy" if eta < FLUCTUATION_DELTA
            else "nonergodic")
    return ErgodicityReport(measure=measure, q_time_avg=q_avg, q_eq_max=q_eq,
                            eta=eta, classification=label, t_prime_at_max=t_star,
                            fluctuation=fluct, inconclusive=inconclusive, note=note)


@dataclass(frozen=True)
class NonMonotonicityResult:
    flag: bool
    t_dip: float | None
    t_rise: float | None
    values: np.ndarray
    temperatures: np.ndarray


def nonmonotonicity_detect(params: SystemParams, measure: str,
                           temperatures: np.ndarray | None = None,
                           threshold: float = 1e-4,
                           nodes: int = 512) -> NonMonotonicityResult:
    """Flag non-monotonic temperature variation of the equilibrium measure.

    The default grid is 400 points up to T/J = 2.  A point is flagged when
    the measure rises by more than `threshold` between some T_a and a later
    T_b (covering both revival-after-decline and a climb from the
    zero-temperature value that later dies); the witness pair (T_a, T_b)
    with Q(T_b) > Q(T_a) + threshold is returned.
    """
    if temperatures is None:
        temperatures = np.linspace(2.0 / 400.0, 2.0, 400)
    temperatures = np.asarray(temperatures, dtype=float)
    vals = equilibrium_measure_vs_temperature(measure, params, temperatures, nodes)
    future_max = np.maximum.accumulate(vals[::-1])[::-1]
    rise = future_max - vals
    if not (rise > threshold).any():
        return NonMonotonicityResult(False, None, None, vals, temperatures)
    i = int(np.argmax(rise > threshold))
    j = i + int(np.argmax(vals[i:] > vals[i] + threshold))
    return NonMonotonicityResult(True, float(temperatures[i]), float(temperatures[j]),
                                 vals, temperatures)
