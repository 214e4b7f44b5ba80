"""Half-line discretization of the radial sector.

After the substitution u = r^{(n-1)/2} v the radial part of -Delta becomes
L = -d^2/dr^2 + (n-1)(n-3)/(4 r^2) on (0, R) with Dirichlet ends, which we
discretize with second-order central differences on M interior nodes.  The
resulting dense (well, tridiagonal-plus-diagonal) symmetric matrices are
the common currency of every matrix-based module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "RadialGrid",
    "PotentialSpec",
    "DiscreteOperator",
    "build_G0",
    "build_G",
    "weight_matrix",
    "spectral_decompose",
]


@dataclass(frozen=True)
class RadialGrid:
    """Uniform interior grid r_j = j * dr, j = 1..M, on (0, R)."""

    R: float
    M: int

    def __post_init__(self):
        if not (self.R > 0 and self.M >= 2):
            raise ValueError("need R > 0 and at least 2 interior nodes")

    @property
    def dr(self):
        return self.R / (self.M + 1)

    @property
    def nodes(self):
        return self.dr * np.arange(1, self.M + 1)

    def check_resolution(self, h_min, points_per_wavelength=10):
        """Top resolved frequency for scale h is a_hi/h; require that many
        grid points per half-wavelength pi/(a_hi/h_min)."""
        if self.dr > h_min / points_per_wavelength:
            raise ValueError(
                f"dr = {self.dr:.4g} too coarse for frequency scale {h_min}")

    def check_horizon(self, t_max, data_radius):
        # unit propagation speed: reflections stay outside the window
        if self.R < t_max + data_radius:
            raise ValueError("domain too small for the requested time window")

    def to_json(self):
        return json.dumps({"R": self.R, "M": self.M})


@dataclass(frozen=True)
class PotentialSpec:
    """V(r) = c <r>^-delta with delta > (n+1)/2."""

    c: float
    delta: float
    n: int = 4

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("amplitude must be >= 0")
        if not self.delta > (self.n + 1) / 2:
            raise ValueError("decay rate must exceed (n+1)/2")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.c * (1.0 + r ** 2) ** (-self.delta / 2.0)


@dataclass(frozen=True)
class DiscreteOperator:
    """Symmetric realization of the transformed radial operator.

    Stored as tridiagonal bands; ``matrix`` materializes the dense form on
    demand.  The eigendecomposition is memoized because every multiplier
    route reuses it.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    n: int
    grid: RadialGrid
    potential: PotentialSpec | None = None
    _eig: list = field(default_factory=list, compare=False, repr=False)

    @property
    def shape(self):
        return (self.grid.M, self.grid.M)

    @property
    def matrix(self):
        m = np.diag(self.diag)
        idx = np.arange(self.grid.M - 1)
        m[idx, idx + 1] = self.offdiag
        m[idx + 1, idx] = self.offdiag
        return m

    def apply(self, v):
        v = np.asarray(v)
        out = self.diag[:, None] * v if v.ndim == 2 else self.diag * v
        if v.ndim == 2:
            out[:-1] += self.offdiag[:, None] * v[1:]
            out[1:] += self.offdiag[:, None] * v[:-1]
        else:
            out[:-1] += self.offdiag * v[1:]
            out[1:] += self.offdiag * v[:-1]
        return out

    def eigensystem(self):
        """(eigenvalues ascending, orthonormal eigenvectors as columns)."""
        if not self._eig:
            try:
                vals, vecs = eigh_tridiagonal(self.diag, self.offdiag)
            except np.linalg.LinAlgError as exc:  # pragma: no cover
                raise RuntimeError("eigendecomposition failed") from exc
            self._eig.append((vals, vecs))
        return self._eig[0]


def _centrifugal(n, r):
    return (n - 1) * (n - 3) / 4.0 / r ** 2


# Checks build their operators independently; pooling hands them the same
# instance so the memoized eigendecomposition is computed once per
# (grid, n, potential).  Instances are read-only, so sharing is safe.
_pool: dict = {}


def build_G0(grid, n):
    """Free transformed radial operator, Dirichlet at both ends."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    key = (grid.R, grid.M, n, None, None)
    if key not in _pool:
        r = grid.nodes
        dr2 = grid.dr ** 2
        diag = 2.0 / dr2 + _centrifugal(n, r)
        offdiag = np.full(grid.M - 1, -1.0 / dr2)
        _pool[key] = DiscreteOperator(diag, offdiag, n, grid)
    return _pool[key]


def build_G(grid, n, potential):
    """Perturbed operator; c = 0 reproduces build_G0 bit-exactly."""
    free = build_G0(grid, n)
    key = (grid.R, grid.M, n, potential.c, potential.delta)
    if key not in _pool:
        if potential.c == 0.0:
            _pool[key] = DiscreteOperator(free.diag, free.offdiag, n, grid,
                                          potential)
        else:
            _pool[key] = DiscreteOperator(free.diag + potential(grid.nodes),
                                          free.offdiag, n, grid, potential)
    return _pool[key]


def weight_matrix(grid, s):
    """diag(<r_j>^-s), returned as a vector (diagonal)."""
    if not np.isfinite(s):
        raise ValueError("weight exponent must be finite")
    return (1.0 + grid.nodes ** 2) ** (-s / 2.0)


def spectral_decompose(op):
    """Eigenpairs of the operator; raises on solver failure."""
    return op.eigensystem()
