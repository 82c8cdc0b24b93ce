"""System parameters and momentum-mode bookkeeping for the alternating-field XY chain.

The chain Hamiltonian is

    H = (1/2) sum_i [ J {(1+g)/2 sx_i sx_{i+1} + (1-g)/2 sy_i sy_{i+1}}
                      + (h1 + (-1)^i h2) sz_i ]

with periodic boundaries, an even number of sites, and dimensionless fields
lambda_i = h_i / J.  Sites with even index (0-based) carry field h1 + h2 and
host the "even" sublattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """Couplings and dimensionless transverse fields; J > 0, gamma != 0."""

    gamma: float
    lambda1: float
    lambda2: float
    j: float = 1.0

    def __post_init__(self):
        if not self.j > 0:
            raise ValueError(f"exchange strength must be positive, got j={self.j}")
        if self.gamma == 0:
            raise ValueError("anisotropy gamma must be nonzero")

    @property
    def h1(self) -> float:
        return self.j * self.lambda1

    @property
    def h2(self) -> float:
        return self.j * self.lambda2

    @property
    def h_plus(self) -> float:
        return self.h1 + self.h2

    @property
    def h_minus(self) -> float:
        return self.h1 - self.h2

    def with_fields(self, lambda1: float, lambda2: float) -> "SystemParams":
        return replace(self, lambda1=lambda1, lambda2=lambda2)

    def duality_partner(self) -> "SystemParams":
        """Exploratory hook for the field-swap duality; asserts nothing.

        Swaps the uniform and alternating fields, the companion move to the
        sublattice spin rotation that flips the sign of the anisotropy axis.
        Provided for numerical exploration only.
        """
        return SystemParams(gamma=self.gamma, lambda1=self.lambda2,
                            lambda2=self.lambda1, j=self.j)


@dataclass(frozen=True)
class MomentumMode:
    """A momentum angle phi in [0, pi/2], optionally tied to a finite chain."""

    phi: float
    p: int | None = None
    n: int | None = None

    def __post_init__(self):
        if not -1e-12 <= self.phi <= math.pi / 2 + 1e-12:
            raise ValueError(f"phi must lie in [0, pi/2], got {self.phi}")

    @classmethod
    def integer(cls, p: int, n: int) -> "MomentumMode":
        """Mode p of the integer grid phi_p = 2 pi p / N, p = 1..N/4."""
        _check_size(n)
        if not 1 <= p <= n // 4:
            raise ValueError(f"p must be in 1..{n//4}, got {p}")
        return cls(phi=2.0 * math.pi * p / n, p=p, n=n)

    @classmethod
    def half_integer(cls, p: int, n: int) -> "MomentumMode":
        """Mode p of the midpoint grid phi_p = (2p-1) pi / N, p = 1..N/4."""
        _check_size(n)
        if not 1 <= p <= n // 4:
            raise ValueError(f"p must be in 1..{n//4}, got {p}")
        return cls(phi=(2 * p - 1) * math.pi / n, p=p, n=n)


def _check_size(n: int):
    if n < 4 or n % 4:
        raise ValueError(f"chain length must be a positive multiple of 4, got {n}")


def momentum_grid(n: int, scheme: str = "half-integer") -> np.ndarray:
    """The N/4 momentum angles of a finite chain under the given scheme.

    "half-integer" places modes at (2p-1) pi / N (a unitary transform on both
    sublattices, and the midpoint rule for the reduced-zone integral);
    "integer" places them at 2 pi p / N, which includes the zone edge pi/2.
    """
    _check_size(n)
    p = np.arange(1, n // 4 + 1)
    if scheme == "half-integer":
        return (2 * p - 1) * np.pi / n
    if scheme == "integer":
        return 2 * np.pi * p / n
    raise ValueError(f"unknown momentum scheme {scheme!r}")


ZERO_TEMPERATURE = math.inf
"""Symbolic beta tag for exact zero temperature (ground-manifold projection)."""


def is_zero_temperature(beta: float) -> bool:
    return beta is None or math.isinf(beta)
