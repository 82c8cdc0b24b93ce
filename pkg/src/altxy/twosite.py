"""Two-qubit density matrix of an even-odd nearest-neighbor pair.

Basis convention, shared by every module: the even-site qubit is the first
tensor factor, computational ordering {00, 01, 10, 11}, and sz|0> = +|0>.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PositivityError
from .linalg import POSITIVITY_TOL, hermitian_eig, require_hermitian
from .observables import ObservableSet

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_ID = np.eye(2, dtype=complex)

PAULI = {"x": _SX, "y": _SY, "z": _SZ}


@dataclass(frozen=True)
class TwoSiteState:
    """Validated 4x4 density matrix of an even-odd spin pair."""

    rho: np.ndarray
    source: str = "CES"  # CES, TES or ED

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError(f"expected a 4x4 density matrix, got shape {rho.shape}")
        require_hermitian(rho)
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > 1e-12:
            raise ValueError(f"trace is {tr}, not 1")
        values, vectors = hermitian_eig(rho)
        vmin = float(values[0])
        if vmin < -POSITIVITY_TOL:
            raise PositivityError(
                f"two-site state has eigenvalue {vmin:.3e}; correlators are inconsistent")
        if vmin < 0.0:
            clipped = np.clip(values, 0.0, None)
            rho = (vectors * (clipped / clipped.sum())) @ vectors.conj().T
        object.__setattr__(self, "rho", rho)

    def reduced(self, party: str) -> np.ndarray:
        r = self.rho.reshape(2, 2, 2, 2)
        return np.trace(r, axis1=1, axis2=3) if party == "even" else np.trace(r, axis1=0, axis2=2)


def assemble_rho(obs: ObservableSet, source: str = "CES") -> TwoSiteState:
    """Build the pair density matrix from magnetizations and correlators."""
    rho = (
        np.kron(_ID, _ID)
        + obs.m_e * np.kron(_SZ, _ID)
        + obs.m_o * np.kron(_ID, _SZ)
        + obs.c_xx * np.kron(_SX, _SX)
        + obs.c_yy * np.kron(_SY, _SY)
        + obs.c_zz * np.kron(_SZ, _SZ)
        + obs.c_xy * np.kron(_SX, _SY)
        + obs.c_yx * np.kron(_SY, _SX)
    ) / 4.0
    return TwoSiteState(rho, source=source)


def read_observables(state: TwoSiteState) -> ObservableSet:
    """Correlators read back from a pair state (round-trip of assemble_rho)."""
    rho = state.rho

    def ev(a, b):
        return float(np.trace(np.kron(a, b) @ rho).real)

    return ObservableSet(
        m_e=ev(_SZ, _ID), m_o=ev(_ID, _SZ),
        c_xx=ev(_SX, _SX), c_yy=ev(_SY, _SY), c_zz=ev(_SZ, _SZ),
        c_xy=ev(_SX, _SY), c_yx=ev(_SY, _SX),
    )


_XX = np.kron(_SX, _SX)


def fermionic_image(state: TwoSiteState) -> TwoSiteState:
    """Conjugate by sx x sx, the local unitary linking the spin pair to the
    two-mode fermion pair; an involution that leaves every measure unchanged."""
    return TwoSiteState(_XX @ state.rho @ _XX, source=state.source)
