"""Full-Hilbert-space spin-chain reference solver.

Matrix-free application of the chain Hamiltonian on bit-packed basis states
(site j is bit j, bit value 0 meaning sz = +1), dense thermal states for
small chains, and a Lanczos ground-state solver with full
reorthogonalization for larger ones.  This module is the oracle against
which the momentum-space formalism is validated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .linalg import partial_trace, partial_trace_vector
from .model import SystemParams

MAX_SITES = 22
MAX_DENSE_SITES = 12


@dataclass
class SpinHamiltonian:
    """Matrix-free chain Hamiltonian on 2^n bit-packed basis states."""

    params: SystemParams
    n: int
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n % 2 or not 4 <= self.n <= MAX_SITES:
            raise ValueError(f"site count must be even and in 4..{MAX_SITES}, got {self.n}")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")
        p = self.params
        dim = 1 << self.n
        idx = np.arange(dim, dtype=np.int64)
        bits = (idx[:, None] >> np.arange(self.n)) & 1          # (dim, n)
        sz = 1.0 - 2.0 * bits
        field = 0.5 * (p.h1 + (-1.0) ** np.arange(self.n) * p.h2)
        self._diag = sz @ field
        nb = self.n if self.boundary == "periodic" else self.n - 1
        self._bond_masks = [(1 << j) | (1 << ((j + 1) % self.n)) for j in range(nb)]
        # (01,10) pairs couple with J/2, (00,11) pairs with J*gamma/2.
        self._bond_coeff = []
        for j in range(nb):
            equal = bits[:, j] == bits[:, (j + 1) % self.n]
            self._bond_coeff.append(np.where(equal, 0.5 * p.j * p.gamma, 0.5 * p.j))
        self._idx = idx

    @property
    def dim(self) -> int:
        return 1 << self.n

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """H @ psi for a vector or a (dim, k) batch of columns."""
        psi = np.asarray(psi)
        out = self._diag.reshape(-1, *([1] * (psi.ndim - 1))) * psi
        for mask, coeff in zip(self._bond_masks, self._bond_coeff):
            src = self._idx ^ mask
            t = coeff.reshape(-1, *([1] * (psi.ndim - 1))) * psi
            out += t[src]
        return out

    def to_dense(self) -> np.ndarray:
        """Dense real-symmetric matrix (small chains only)."""
        if self.n > MAX_DENSE_SITES:
            raise ValueError(f"dense form limited to n <= {MAX_DENSE_SITES}")
        return self.apply(np.eye(self.dim)).real

    def parity_commutator_residual(self, rng: np.random.Generator, trials: int = 10) -> float:
        """max ||[H, global phase flip] v|| over random unit vectors."""
        signs = 1.0 - 2.0 * (np.array([bin(k).count("1") for k in range(self.dim)]) & 1)
        worst = 0.0
        for _ in range(trials):
            v = rng.normal(size=self.dim) + 1j * rng.normal(size=self.dim)
            v /= np.linalg.norm(v)
            r = self.apply(signs * v) - signs * self.apply(v)
            worst = max(worst, float(np.linalg.norm(r)))
        return worst


def build_spin_hamiltonian(params: SystemParams, n: int,
                           boundary: str = "periodic") -> SpinHamiltonian:
    return SpinHamiltonian(params=params, n=n, boundary=boundary)


def dense_eigensystem(h: SpinHamiltonian) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(h.to_dense())


def dense_thermal_state(h: SpinHamiltonian, beta: float) -> np.ndarray:
    """exp(-beta H)/Z via the dense eigensystem (shifted for stability)."""
    w, v = dense_eigensystem(h)
    u = np.exp(-beta * (w - w[0]))
    rho = (v * u) @ v.T
    return rho / u.sum()


def dense_time_evolved_state(h_pre: SpinHamiltonian, h_post: SpinHamiltonian,
                             beta: float, t: float) -> np.ndarray:
    """exp(-i H_post t) rho_eq(H_pre, beta) exp(+i H_post t), dense."""
    rho0 = dense_thermal_state(h_pre, beta)
    w, v = dense_eigensystem(h_post)
    u = np.exp(-1j * w * t)
    umat = (v * u) @ v.T
    return umat @ rho0 @ umat.conj().T


def lanczos_ground_state(h: SpinHamiltonian, max_iter: int = 2000,
                         tol: float = 1e-10, seed: int = 7,
                         _deflate: np.ndarray | None = None):
    """Lowest eigenpair by Lanczos with full reorthogonalization.

    Returns (energy, vector, degenerate) where `degenerate` is set by a
    second run deflated against the first converging within 1e-8 of it.
    Raises ConvergenceError if the residual does not reach tol * scale.
    """
    rng = np.random.default_rng(seed)
    dim = h.dim
    v = rng.normal(size=dim)
    if _deflate is not None:
        v -= _deflate @ (_deflate.conj().T @ v)
    v /= np.linalg.norm(v)
    basis = [v]
    alphas, betas = [], []
    scale = max(1.0, float(np.abs(h._diag).max()) + 2.0 * h.n * h.params.j)
    e0, ground = np.inf, None
    for it in range(1, max_iter + 1):
        w = h.apply(basis[-1])
        if _deflate is not None:
            w -= _deflate @ (_deflate.conj().T @ w)
        alphas.append(float(np.real(np.vdot(basis[-1], w))))
        # Full reorthogonalization keeps the Krylov basis clean.
        for b in basis:
            w -= np.vdot(b, w) * b
        for b in basis:
            w -= np.vdot(b, w) * b
        nb = float(np.linalg.norm(w))
        if it >= 2 or nb < 1e-14:
            tm = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
            ew, evec = np.linalg.eigh(tm)
            e0 = float(ew[0])
            ground = np.stack(basis, axis=1) @ evec[:, 0]
            resid = float(np.linalg.norm(h.apply(ground) - e0 * ground))
            if _deflate is not None:
                g = ground - _deflate @ (_deflate.conj().T @ ground)
                resid = float(np.linalg.norm(h.apply(g) - e0 * g)) if np.linalg.norm(g) > 0.5 else resid
            if resid < tol * scale or nb < 1e-14:
                break
        if nb < 1e-14:
            break
        betas.append(nb)
        basis.append(w / nb)
    else:
        raise ConvergenceError(f"Lanczos did not converge in {max_iter} iterations",
                               estimate=e0)
    ground = ground / np.linalg.norm(ground)
    if _deflate is not None:
        return e0, ground, False
    e1, _, _ = lanczos_ground_state(h, max_iter, tol, seed + 1,
                                    _deflate=ground.reshape(-1, 1))
    return e0, ground, bool(e1 - e0 < 1e-8)


def reduce_two_site(state: np.ndarray, pair: tuple[int, int], n: int | None = None) -> np.ndarray:
    """Two-site density matrix of a neighboring pair, even site first.

    `state` is a density matrix or a pure-state vector on the bit-packed
    basis.  The returned 4x4 matrix is in the |e> x |o> computational basis.
    """
    i, j = pair
    state = np.asarray(state)
    dim = state.shape[0]
    nn = n if n is not None else int(np.log2(dim))
    e, o = (i, j) if i % 2 == 0 else (j, i)
    keep = [nn - 1 - e, nn - 1 - o]  # axis order: site nn-1 is bit nn-1 = axis 0
    if state.ndim == 1:
        rho = partial_trace_vector(state, keep, nn)
    else:
        rho = partial_trace(state, keep, nn)
    return rho


def bond_log_negativities(h: SpinHamiltonian) -> np.ndarray:
    """Ground-state nearest-neighbor entanglement on every bond.

    Under open boundaries the value varies with bond position; this reports
    all n-1 (open) or n (periodic) bonds from a Lanczos ground state.
    """
    from .measures import log_negativity
    from .twosite import TwoSiteState

    _, psi, _ = lanczos_ground_state(h)
    nb = h.n if h.boundary == "periodic" else h.n - 1
    out = np.empty(nb)
    for b in range(nb):
        rho = reduce_two_site(psi, (b, (b + 1) % h.n), h.n)
        out[b] = log_negativity(TwoSiteState(rho, source="ED"))
    return out
