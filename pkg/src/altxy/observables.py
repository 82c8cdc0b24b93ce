"""Magnetization and nearest-neighbor correlator operators in momentum space,
and their expectations in canonical-equilibrium (thermal) states.

Every operator on one momentum-pair subspace is block-diagonal in the same
basis as the Hamiltonian blocks.  The operators are constructed by applying
second-quantized mode operators to the sixteen basis states rather than
transcribed, which fixes all sign conventions.  Correlators of the
even-odd pair (sx sx, sy sy, sx sy, sy sx) split into an e^{+i phi} part and
its conjugate; magnetizations are diagonal with eigenvalues {-2, 0, +2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import fock
from .errors import ConvergenceError
from .model import MomentumMode, SystemParams, is_zero_temperature, momentum_grid
from .momentum import (A_M, A_P, B_M, B_P, BLOCK_SLICES, STRUCTURAL,
                       gap_profile, hamiltonian_16, to_block_basis)
from .quadrature import panel_nodes

# Degenerate levels within this tolerance of the minimum share the
# zero-temperature projector equally.
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class ObservableSet:
    """Transverse magnetizations and two-site correlators of an even-odd pair."""

    m_e: float
    m_o: float
    c_xx: float
    c_yy: float
    c_zz: float
    c_xy: float = 0.0
    c_yx: float = 0.0

    def validate(self, tol: float = 1e-9) -> "ObservableSet":
        for name, v in self.__dict__.items():
            if not -1.0 - tol <= v <= 1.0 + tol:
                raise ValueError(f"observable {name}={v} outside [-1, 1]")
        return self

    def as_array(self) -> np.ndarray:
        return np.array([self.m_e, self.m_o, self.c_xx, self.c_yy,
                         self.c_zz, self.c_xy, self.c_yx])


def _correlator_plus_terms(kind: str) -> list[fock.Term]:
    """Terms multiplying e^{+i phi} in the momentum-pair correlator."""
    up_hop = ((A_P, True), (B_P, False))        # a_p^dag b_p
    dn_hop = ((B_M, True), (A_M, False))        # b_-p^dag a_-p
    pair_c = ((B_M, True), (A_P, True))         # b_-p^dag a_p^dag
    pair_a = ((A_M, False), (B_P, False))       # a_-p b_p
    if kind == "xx":
        return [(1, up_hop), (1, dn_hop), (1, pair_c), (1, pair_a)]
    if kind == "yy":
        return [(1, up_hop), (1, dn_hop), (-1, pair_c), (-1, pair_a)]
    if kind == "xy":
        return [(-1j, up_hop), (1j, dn_hop), (-1j, pair_c), (1j, pair_a)]
    if kind == "yx":
        return [(1j, up_hop), (-1j, dn_hop), (-1j, pair_c), (1j, pair_a)]
    raise ValueError(f"unknown correlator kind {kind!r}")


def _build_correlator_plus() -> dict[str, np.ndarray]:
    return {kind: to_block_basis(fock.operator_matrix(4, _correlator_plus_terms(kind)))
            for kind in ("xx", "yy", "xy", "yx")}


CORRELATOR_PLUS = _build_correlator_plus()

# m^z on one sublattice: 2(n_{+} + n_{-} - 1) with the pair's two modes.
MAGNETIZATION = {
    "odd": 2.0 * STRUCTURAL["na"] - 2.0 * STRUCTURAL["id"],
    "even": 2.0 * STRUCTURAL["nb"] - 2.0 * STRUCTURAL["id"],
}


def magnetization_operator(sublattice: str, mode: MomentumMode | float = 0.0) -> np.ndarray:
    """Transverse-magnetization operator of one sublattice, block basis."""
    if sublattice not in MAGNETIZATION:
        raise ValueError(f"sublattice must be 'even' or 'odd', got {sublattice!r}")
    return MAGNETIZATION[sublattice].copy()


def correlator_operator(kind: str, mode: MomentumMode | float) -> np.ndarray:
    """Two-site correlator operator at one momentum angle, block basis.

    phi may also be an array, producing a stacked (..., 16, 16) result.
    """
    phi = mode.phi if isinstance(mode, MomentumMode) else np.asarray(mode, dtype=float)
    plus = CORRELATOR_PLUS[kind]
    e = np.exp(1j * np.asarray(phi))
    return e[..., None, None] * plus + np.conj(e)[..., None, None] * plus.conj().T


# ---------------------------------------------------------------------------
# Gaussian (single-subspace) thermal machinery

def _block_eigs(params: SystemParams, phi: np.ndarray,
                fields: tuple[float, float] | None = None):
    """Batched eigensystems of blocks 2 and 4 over an angle array."""
    h16 = hamiltonian_16(phi, params, fields)
    b2 = h16[..., BLOCK_SLICES[1], BLOCK_SLICES[1]]
    b4 = h16[..., BLOCK_SLICES[3], BLOCK_SLICES[3]]
    w2, v2 = np.linalg.eigh(b2)
    w4, v4 = np.linalg.eigh(b4)
    return (w2, v2), (w4, v4)


def _thermal_weights(w2: np.ndarray, w4: np.ndarray, beta: float):
    """Unnormalized Boltzmann (or ground-projector) weights per block level.

    Returns (u1, u2, u4, z) where u1 is the weight of each of the two
    zero-energy levels of the null block, u2 applies to both 4-dim blocks,
    and z = 2 u1 + 2 sum(u2) + sum(u4) is per-subspace.
    """
    zero = np.zeros(w2.shape[:-1] + (1,))
    wmin = np.minimum(np.minimum(w2[..., 0], w4[..., 0]), 0.0)[..., None]
    if is_zero_temperature(beta):
        scale = np.maximum(1.0, np.abs(w4).max(axis=-1))[..., None]
        tol = DEGENERACY_TOL * scale
        u1 = (zero - wmin <= tol).astype(float)
        u2 = (w2 - wmin <= tol).astype(float)
        u4 = (w4 - wmin <= tol).astype(float)
    else:
        u1 = np.exp(-beta * (zero - wmin))
        u2 = np.exp(-beta * (w2 - wmin))
        u4 = np.exp(-beta * (w4 - wmin))
    z = 2.0 * u1.sum(axis=-1) + 2.0 * u2.sum(axis=-1) + u4.sum(axis=-1)
    return u1, u2, u4, z


def ces_block_state(params: SystemParams, beta: float,
                    mode: MomentumMode | float) -> np.ndarray:
    """Normalized canonical-equilibrium state of one momentum subspace.

    For finite beta this is the shifted Boltzmann weight exp(-beta H)/Z of
    the 16-dimensional subspace; for the zero-temperature tag it is the
    equal-weight projector onto the global ground manifold.
    """
    phi = mode.phi if isinstance(mode, MomentumMode) else float(mode)
    (w2, v2), (w4, v4) = _block_eigs(params, np.atleast_1d(phi))
    u1, u2, u4, z = _thermal_weights(w2, w4, beta)
    out = np.zeros((16, 16), dtype=complex)
    out[0, 0] = out[1, 1] = u1[0, 0]
    rho2 = (v2[0] * u2[0]) @ v2[0].conj().T
    out[BLOCK_SLICES[1], BLOCK_SLICES[1]] = rho2
    out[BLOCK_SLICES[2], BLOCK_SLICES[2]] = rho2
    out[BLOCK_SLICES[3], BLOCK_SLICES[3]] = (v4[0] * u4[0]) @ v4[0].conj().T
    return out / z[0]


_OBS_KINDS = ("m_e", "m_o", "xx", "yy", "xy", "yx")


def _observable_blocks(kind: str, phi: np.ndarray):
    """Blocks 2, 3, 4 of one observable over an angle array."""
    if kind in ("m_e", "m_o"):
        m = MAGNETIZATION["even" if kind == "m_e" else "odd"]
        b2, b3, b4 = (m[s, s] for s in BLOCK_SLICES[1:])
        shape = np.shape(phi) + (1, 1)
        return (np.broadcast_to(b2, shape[:-2] + b2.shape),
                np.broadcast_to(b3, shape[:-2] + b3.shape),
                np.broadcast_to(b4, shape[:-2] + b4.shape))
    op = correlator_operator(kind, phi)
    return tuple(op[..., s, s] for s in BLOCK_SLICES[1:])


def _raw_expectations(params: SystemParams, beta: float, phi: np.ndarray,
                      fields: tuple[float, float] | None = None) -> dict[str, np.ndarray]:
    """Per-angle Tr[O rho_phi] for the six standard observables."""
    (w2, v2), (w4, v4) = _block_eigs(params, phi, fields)
    u1, u2, u4, z = _thermal_weights(w2, w4, beta)
    out = {}
    for kind in _OBS_KINDS:
        b2, b3, b4 = _observable_blocks(kind, phi)
        d2 = np.einsum("...aj,...ab,...bj->...j", v2.conj(), b2, v2).real
        d3 = np.einsum("...aj,...ab,...bj->...j", v2.conj(), b3, v2).real
        d4 = np.einsum("...aj,...ab,...bj->...j", v4.conj(), b4, v4).real
        out[kind] = ((d2 + d3) * u2).sum(axis=-1) / z + (d4 * u4).sum(axis=-1) / z
    return out


def _assemble_set(raw: dict[str, float], tes: bool) -> ObservableSet:
    c_xy = float(raw["xy"]) if tes else 0.0
    c_yx = float(raw["yx"]) if tes else 0.0
    m_e, m_o = float(raw["m_e"]), float(raw["m_o"])
    c_xx, c_yy = float(raw["xx"]), float(raw["yy"])
    c_zz = m_o * m_e - c_xx * c_yy + c_xy * c_yx
    return ObservableSet(m_e=m_e, m_o=m_o, c_xx=c_xx, c_yy=c_yy,
                         c_zz=c_zz, c_xy=c_xy, c_yx=c_yx).validate()


def _zone_edges(params: SystemParams, beta: float) -> list[float]:
    """Split the reduced zone at the gap-closing angle when near-critical."""
    edges = [0.0, math.pi / 2.0]
    if is_zero_temperature(beta) or beta > 1e4:
        gap, phi_star = gap_profile(params)
        if gap < 1e-6 and 1e-9 < phi_star < math.pi / 2.0 - 1e-9:
            edges = [0.0, phi_star, math.pi / 2.0]
    return edges


def thermal_expectation(op, params: SystemParams, beta: float,
                        size: float = math.inf, *,
                        scheme: str = "exact", tol: float = 1e-9,
                        nodes: int | None = None) -> float:
    """Equilibrium expectation of a block-diagonal momentum-space operator.

    `op` is a 16x16 block-basis matrix or a callable phi -> (..., 16, 16).
    For finite `size` N (divisible by 4) the expectation is the mode sum
    (2/N) sum_p; scheme "exact" resolves the two boundary-condition sectors
    of the finite chain (matching spin exact diagonalization), while
    "half-integer" / "integer" evaluate the single-subspace sum on the
    corresponding momentum grid.  size=inf integrates over the reduced zone.
    """
    op_fn = op if callable(op) else (lambda p, _m=np.asarray(op, dtype=complex):
                                     np.broadcast_to(_m, np.shape(p) + (16, 16)))

    def node_values(phi: np.ndarray) -> np.ndarray:
        (w2, v2), (w4, v4) = _block_eigs(params, phi)
        u1, u2, u4, z = _thermal_weights(w2, w4, beta)
        o = op_fn(phi)
        b2, b3, b4 = (o[..., s, s] for s in BLOCK_SLICES[1:])
        o1 = o[..., BLOCK_SLICES[0], BLOCK_SLICES[0]]
        d2 = np.einsum("...aj,...ab,...bj->...j", v2.conj(), b2, v2)
        d3 = np.einsum("...aj,...ab,...bj->...j", v2.conj(), b3, v2)
        d4 = np.einsum("...aj,...ab,...bj->...j", v4.conj(), b4, v4)
        tr1 = np.einsum("...jj->...", o1).real * u1[..., 0]
        return (tr1 + ((d2 + d3).real * u2).sum(-1) + (d4.real * u4).sum(-1)) / z

    if math.isinf(size):
        from .quadrature import integrate_adaptive

        est = integrate_adaptive(node_values, _zone_edges(params, beta), tol=tol,
                                 start=nodes or 256)
        return float(est / math.pi)
    n = int(size)
    if scheme == "exact":
        from .finitesize import exact_thermal_expectation

        return exact_thermal_expectation(op_fn, params, beta, n)
    phis = momentum_grid(n, scheme)
    return float(np.sum(node_values(phis)) * 2.0 / n)


def ces_observables(params: SystemParams, beta: float, size: float = math.inf, *,
                    scheme: str = "exact", tol: float = 1e-9,
                    nodes: int | None = None) -> ObservableSet:
    """Magnetizations and correlators of the equilibrium state.

    c_zz comes from the Wick closure; the off-diagonal correlators vanish
    identically in equilibrium.  See `thermal_expectation` for the meaning
    of `size` and `scheme`.
    """
    if math.isinf(size):
        raw = integrate_observables(params, beta, tol=tol, nodes=nodes)
        return _assemble_set(raw, tes=False)
    n = int(size)
    if scheme == "exact":
        from .finitesize import exact_observables

        return exact_observables(params, beta, n)
    phis = momentum_grid(n, scheme)
    raw = _raw_expectations(params, beta, phis)
    return _assemble_set({k: 2.0 / n * v.sum() for k, v in raw.items()}, tes=False)


def integrate_observables(params: SystemParams, beta: float, *,
                          tol: float = 1e-9, nodes: int | None = None,
                          fields: tuple[float, float] | None = None) -> dict[str, float]:
    """Reduced-zone integrals (1/pi) int Tr[O rho] dphi of the six observables.

    With `nodes` set, a fixed Gauss-Legendre rule of that many points per
    panel is used (fast path for parameter sweeps); otherwise the rule
    doubles from 256 until all six observables move by less than tol.
    """
    edges = _zone_edges(params, beta)

    def batch(phi):
        raw = _raw_expectations(params, beta, phi, fields)
        return np.stack([raw[k] for k in _OBS_KINDS], axis=-1)

    if nodes is not None:
        x, w = panel_nodes(nodes, edges)
        vals = np.tensordot(w, batch(x), axes=(0, 0)) / math.pi
        return dict(zip(_OBS_KINDS, vals))

    from .quadrature import integrate_adaptive

    vals = integrate_adaptive(batch, edges, tol=tol) / math.pi
    return dict(zip(_OBS_KINDS, vals))


def observables_vs_beta(params: SystemParams, betas: np.ndarray,
                        nodes: int = 512) -> list[ObservableSet]:
    """Equilibrium observables on a grid of inverse temperatures.

    The block eigensystems are computed once on a fixed-node rule and
    reused for every beta (temperature scans, nonmonotonicity maps).
    """
    betas = np.asarray(betas, dtype=float)
    x, w = panel_nodes(nodes, [0.0, math.pi / 2.0])
    (w2, v2), (w4, v4) = _block_eigs(params, x)
    diags = {}
    for kind in _OBS_KINDS:
        b2, b3, b4 = _observable_blocks(kind, x)
        diags[kind] = (
            np.einsum("kaj,kab,kbj->kj", v2.conj(), b2, v2).real
            + np.einsum("kaj,kab,kbj->kj", v2.conj(), b3, v2).real,
            np.einsum("kaj,kab,kbj->kj", v4.conj(), b4, v4).real,
        )
    sets = []
    for beta in betas:
        u1, u2, u4, z = _thermal_weights(w2, w4, beta)
        raw = {}
        for kind in _OBS_KINDS:
            d23, d4 = diags[kind]
            vals = ((d23 * u2).sum(-1) + (d4 * u4).sum(-1)) / z
            raw[kind] = float(np.dot(w, vals) / math.pi)
        sets.append(_assemble_set(raw, tes=False))
    return sets
