"""Dense Fock-space construction of few-mode fermionic operators.

Modes are indexed 0..n-1; a basis state is the integer whose bit m is the
occupation of mode m.  Creation/annihilation matrices carry the usual
Jordan-Wigner sign (-1)^(number of occupied modes below m), so operator
products built here obey the canonical anticommutation relations exactly.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

# An operator term: (coefficient, ((mode, is_creation), ...)) with the mode
# operators written left to right, i.e. applied to a ket from the right end.
Term = tuple[complex, Sequence[tuple[int, bool]]]


def _apply_mode_op(state: int, mode: int, create: bool) -> tuple[int, int] | None:
    """Apply c_m^dag (create) or c_m to a basis state; None if annihilated."""
    occupied = (state >> mode) & 1
    if create == bool(occupied):
        return None
    below = state & ((1 << mode) - 1)
    sign = -1 if (bin(below).count("1") & 1) else 1
    return state ^ (1 << mode), sign


def term_matrix(n_modes: int, ops: Sequence[tuple[int, bool]]) -> np.ndarray:
    """Matrix of a product of mode operators on the 2^n_modes Fock space."""
    dim = 1 << n_modes
    out = np.zeros((dim, dim), dtype=complex)
    for ket in range(dim):
        state, sign = ket, 1
        for mode, create in reversed(list(ops)):
            step = _apply_mode_op(state, mode, create)
            if step is None:
                state = -1
                break
            state, s = step
            sign *= s
        if state >= 0:
            out[state, ket] += sign
    return out


def operator_matrix(n_modes: int, terms: Sequence[Term]) -> np.ndarray:
    """Sum of coefficient-weighted operator products."""
    dim = 1 << n_modes
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, ops in terms:
        out += coeff * term_matrix(n_modes, ops)
    return out


def number_op(mode: int) -> Sequence[tuple[int, bool]]:
    return ((mode, True), (mode, False))


def parity_matrix(n_modes: int) -> np.ndarray:
    """Diagonal fermion-parity operator (-1)^(total occupation)."""
    dim = 1 << n_modes
    signs = np.array([(-1) ** bin(k).count("1") for k in range(dim)], dtype=float)
    return np.diag(signs).astype(complex)


def creation_string_state(n_modes: int, modes: Sequence[int]) -> tuple[int, int]:
    """Fock index and sign of (c_{m1}^dag c_{m2}^dag ... )|0>, read left to right."""
    state, sign = 0, 1
    for mode in reversed(list(modes)):
        step = _apply_mode_op(state, mode, True)
        if step is None:
            raise ValueError(f"mode {mode} created twice in {modes}")
        state, s = step
        sign *= s
    return state, sign
