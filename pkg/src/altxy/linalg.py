"""Dense linear algebra for small Hermitian matrices.

Everything here operates on plain complex ndarrays.  Routines accept a
single matrix or a stack of matrices (leading batch axes) where noted;
eigendecompositions delegate to LAPACK via numpy.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import ConvergenceError, NonHermitianError, PositivityError

# Absolute tolerance for Hermiticity checks, scaled by max(1, |M|_max).
HERMITICITY_TOL = 1e-12

# Eigenvalues below this are treated as exact zeros in entropies and
# negativities (below double-precision meaningfulness).
EIGENVALUE_FLOOR = 1e-14

# A density matrix eigenvalue in [-POSITIVITY_TOL, 0) is numerical noise and
# gets clipped; anything more negative is a genuine inconsistency.
POSITIVITY_TOL = 1e-8


class HermitianEigen(NamedTuple):
    """Eigendecomposition with eigenvalues ascending and orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation |M - M^dag|."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - np.conj(np.swapaxes(m, -1, -2))))) if m.size else 0.0


def require_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return m unchanged, raising NonHermitianError if M != M^dag within tol."""
    m = np.asarray(m, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    defect = hermiticity_defect(m)
    if defect > tol * scale:
        raise NonHermitianError(
            f"matrix is not Hermitian: max entrywise defect {defect:.3e} "
            f"exceeds {tol:.1e} (scale {scale:.3g})"
        )
    return m


def hermitian_eig(m: np.ndarray) -> HermitianEigen:
    """Eigendecompose a Hermitian matrix (or stack of them).

    Returns eigenvalues in ascending order and the matching orthonormal
    eigenvectors as columns.  Raises NonHermitianError for bad input and
    ConvergenceError if LAPACK fails to converge.
    """
    m = require_hermitian(m)
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - pathological
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc
    return HermitianEigen(values, vectors)


def hermitian_matrix_function(m: np.ndarray, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    Computes V diag(f(w)) V^dag.  f receives the real eigenvalue array and
    may return complex values (e.g. phases).
    """
    values, vectors = hermitian_eig(m)
    fw = np.asarray(f(values))
    if not np.all(np.isfinite(fw)):
        raise ValueError("scalar map produced non-finite values on the spectrum")
    return (vectors * fw[..., None, :]) @ np.conj(np.swapaxes(vectors, -1, -2))


def boltzmann_matrix(m: np.ndarray, beta: float) -> tuple[np.ndarray, float]:
    """Shifted Boltzmann weight exp(-beta (M - w_min)) of a Hermitian matrix.

    The spectrum is shifted by its minimum before exponentiation so the
    result stays finite for beta up to ~1e6; returns (matrix, shift) where
    the true unnormalized weight is exp(-beta*shift) * matrix.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    values, vectors = hermitian_eig(m)
    shift = float(values[..., 0].min())
    w = np.exp(-beta * (values - shift))
    mat = (vectors * w[..., None, :]) @ np.conj(np.swapaxes(vectors, -1, -2))
    return mat, shift


def partial_transpose(rho: np.ndarray, party: str = "even") -> np.ndarray:
    """Partial transpose of a two-qubit matrix over one party.

    party "even" transposes the first tensor factor, "odd" the second.
    The basis ordering is |e> x |o| with computational order {00,01,10,11}.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {rho.shape}")
    r = rho.reshape(2, 2, 2, 2)
    if party == "even":
        r = r.transpose(2, 1, 0, 3)
    elif party == "odd":
        r = r.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"party must be 'even' or 'odd', got {party!r}")
    return r.reshape(4, 4)


def trace_norm(m: np.ndarray) -> float:
    """Trace norm (sum of absolute eigenvalues) of a Hermitian matrix."""
    values, _ = hermitian_eig(m)
    return float(np.sum(np.abs(values)))


def partial_trace(rho: np.ndarray, keep: Sequence[int], n_sites: int | None = None) -> np.ndarray:
    """Trace a 2^N x 2^N matrix down to the ordered qubit subset `keep`.

    Site 0 is the most significant qubit of the binary index.  The kept
    sites appear in the output in the order given.
    """
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    if rho.shape != (dim, dim) or dim & (dim - 1):
        raise ValueError(f"expected a square 2^N x 2^N matrix, got shape {rho.shape}")
    n = int(np.log2(dim)) if n_sites is None else n_sites
    if 2**n != dim:
        raise ValueError(f"n_sites={n} inconsistent with dimension {dim}")
    keep = list(keep)
    if len(set(keep)) != len(keep) or any(s < 0 or s >= n for s in keep):
        raise ValueError(f"keep sites must be distinct and in 0..{n-1}, got {keep}")
    traced = [s for s in range(n) if s not in keep]
    r = rho.reshape((2,) * (2 * n))
    # Row axes are 0..n-1, column axes n..2n-1. Contract traced pairs.
    for off, s in enumerate(traced):
        ax = s - sum(t < s for t in traced[:off])  # account for removed axes
        nrem = n - off
        r = np.trace(r, axis1=ax, axis2=ax + nrem)
    # Remaining row axes follow the ascending order of kept sites.
    order = np.argsort(np.argsort(keep))
    k = len(keep)
    perm = list(order) + [k + o for o in order]
    r = r.transpose(perm)
    return r.reshape(2**k, 2**k)


def partial_trace_vector(psi: np.ndarray, keep: Sequence[int], n_sites: int | None = None) -> np.ndarray:
    """Reduced density matrix of a pure state over the qubit subset `keep`."""
    psi = np.asarray(psi, dtype=complex).ravel()
    dim = psi.size
    if dim & (dim - 1):
        raise ValueError(f"state dimension {dim} is not a power of two")
    n = int(np.log2(dim)) if n_sites is None else n_sites
    keep = list(keep)
    if len(set(keep)) != len(keep) or any(s < 0 or s >= n for s in keep):
        raise ValueError(f"keep sites must be distinct and in 0..{n-1}, got {keep}")
    rest = [s for s in range(n) if s not in keep]
    t = psi.reshape((2,) * n).transpose(keep + rest)
    a = t.reshape(2 ** len(keep), 2 ** len(rest))
    return a @ a.conj().T


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy in bits, with sub-floor eigenvalues as exact zeros."""
    values, _ = hermitian_eig(rho)
    if float(values.min()) < -POSITIVITY_TOL:
        raise PositivityError(
            f"density matrix has eigenvalue {values.min():.3e} below -{POSITIVITY_TOL:.0e}"
        )
    p = values[values > EIGENVALUE_FLOOR]
    if p.size == 0:
        return 0.0
    return float(-np.sum(p * np.log2(p)))
