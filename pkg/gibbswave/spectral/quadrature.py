"""
Radial quadrature grids and the coefficient <-> grid transforms.

Two grid kinds are supported:

  uniform-sine     r_j = j/M, j = 1..M-1, weights r_j^2 / M. Since
                   r u(r) = sqrt(2) sum_n c_n sin(pi n r), synthesis and analysis
                   are type-I discrete sine transforms (scipy.fft.dst), and the
                   discrete orthogonality of the sine vectors makes the e_n
                   exactly orthonormal on the grid.
  gauss-legendre   Legendre nodes mapped to (0, 1), weights w_j r_j^2; dense
                   basis-matrix products. Used to cross-check the fast path.

The grid of M points supports N <= M // oversampling modes (default 8) so that
nonlinear powers |v|^alpha v, which are not band limited, are resolved.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre
from scipy import fft

from gibbswave.core.errors import CapacityError, DomainError
from gibbswave.spectral.basis import (
    SQRT2,
    SpectralState,
    StateLike,
    as_coeffs,
    eigenvalues,
)

DEFAULT_OVERSAMPLING = 8


class QuadratureKind(str, enum.Enum):
    UNIFORM_SINE = "uniform-sine"
    GAUSS_LEGENDRE = "gauss-legendre"


@dataclass(frozen=True, eq=False)
class RadialQuadrature:
    """
    Nodes r_j in (0, 1) and positive weights with
    int_0^1 f(r) r^2 dr ~ sum_j w_j f(r_j). Immutable once built, so one
    instance can be shared by concurrent trajectories.
    """

    m_points: int
    kind: QuadratureKind = QuadratureKind.UNIFORM_SINE
    oversampling: int = DEFAULT_OVERSAMPLING
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    _basis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        kind = QuadratureKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.m_points < 2:
            raise DomainError(f"quadrature needs m_points >= 2, got {self.m_points}")
        if self.oversampling < 1:
            raise DomainError(f"oversampling must be >= 1, got {self.oversampling}")

        if kind is QuadratureKind.UNIFORM_SINE:
            nodes = np.arange(1, self.m_points, dtype=np.float64) / self.m_points
            weights = nodes ** 2 / self.m_points
            basis = np.empty((0, 0))
        else:
            x, w = legendre.leggauss(self.m_points)
            nodes = 0.5 * (x + 1.0)
            weights = 0.5 * w * nodes ** 2
            n = np.arange(1, max(self.capacity, 1) + 1, dtype=np.float64)
            basis = SQRT2 * np.sin(math.pi * np.outer(nodes, n)) / nodes[:, None]
            basis.setflags(write=False)

        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_basis", basis)

    @classmethod
    def for_modes(
        cls,
        n_modes: int,
        kind: QuadratureKind = QuadratureKind.UNIFORM_SINE,
        oversampling: int = DEFAULT_OVERSAMPLING,
    ) -> "RadialQuadrature":
        """Smallest default grid able to carry N modes (M = oversampling * N)."""
        return cls(m_points=oversampling * int(n_modes), kind=kind, oversampling=oversampling)

    @property
    def capacity(self) -> int:
        """N_max(M): largest number of modes this grid is rated for."""
        return self.m_points // self.oversampling

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.shape[0])

    def require(self, n_modes: int) -> None:
        if n_modes > self.capacity:
            raise CapacityError(n_modes, self.capacity, self.m_points)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """sum_j w_j f(r_j) over the trailing axis."""
        return np.sum(np.asarray(values) * self.weights, axis=-1)


# ---------------------------------------------------------------------------
# Raw array kernels (no validation; used inside integrator loops)
# ---------------------------------------------------------------------------


def _dst1(x: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(x):
        return fft.dst(x.real, type=1, axis=-1) + 1j * fft.dst(x.imag, type=1, axis=-1)
    return fft.dst(x, type=1, axis=-1)


def grid_values(coeffs: np.ndarray, quad: RadialQuadrature) -> np.ndarray:
    """u(r_j) from coefficients; real input gives real output."""
    n_modes = coeffs.shape[-1]
    if quad.kind is QuadratureKind.UNIFORM_SINE:
        size = quad.m_points - 1
        pad = [(0, 0)] * (coeffs.ndim - 1) + [(0, size - n_modes)]
        g = (SQRT2 / 2.0) * _dst1(np.pad(coeffs, pad))
        return g / quad.nodes
    return coeffs @ quad._basis[:, :n_modes].T


def grid_coefficients(values: np.ndarray, quad: RadialQuadrature, n_modes: int) -> np.ndarray:
    """c_n = sum_j w_j u(r_j) e_n(r_j); real input gives real output."""
    if quad.kind is QuadratureKind.UNIFORM_SINE:
        scale = SQRT2 / (2.0 * quad.m_points)
        return scale * _dst1(values * quad.nodes)[..., :n_modes]
    return (values * quad.weights) @ quad._basis[:, :n_modes]


def lebesgue_power(coeffs: np.ndarray, p: float, quad: RadialQuadrature) -> np.ndarray:
    """sum_j w_j |u(r_j)|^p, the p-th power of the grid L^p norm."""
    return quad.integrate(np.abs(grid_values(coeffs, quad)) ** p)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def synthesize(state: StateLike, quad: RadialQuadrature) -> np.ndarray:
    """Grid values u(r_j) = sum_{n<=N} c_n e_n(r_j) (complex)."""
    coeffs = as_coeffs(state)
    quad.require(coeffs.shape[-1])
    return grid_values(coeffs, quad)


def analyze(values, quad: RadialQuadrature, n_modes: int) -> SpectralState:
    """Coefficient extraction c_n = <u, e_n> by quadrature."""
    values = np.asarray(values)
    if values.ndim == 0 or values.shape[-1] != quad.n_nodes:
        raise DomainError(
            f"grid has {values.shape[-1] if values.ndim else 0} values, quadrature has {quad.n_nodes} nodes"
        )
    quad.require(n_modes)
    return SpectralState(grid_coefficients(values, quad, n_modes))


def lebesgue_norm(state: StateLike, p: float, quad: RadialQuadrature):
    """(sum_j w_j |u(r_j)|^p)^{1/p}."""
    if not p >= 1.0:
        raise DomainError(f"L^p norm needs p >= 1, got p={p}")
    coeffs = as_coeffs(state)
    quad.require(coeffs.shape[-1])
    value = lebesgue_power(coeffs, p, quad) ** (1.0 / p)
    return float(value) if np.ndim(value) == 0 else value


def wave_fields(state: StateLike, quad: RadialQuadrature):
    """
    Physical fields on the grid: displacement w = Re u and velocity
    w_t = sqrt(-Laplacian) Im u.
    """
    coeffs = as_coeffs(state)
    quad.require(coeffs.shape[-1])
    w = grid_values(coeffs.real, quad)
    w_t = grid_values(eigenvalues(coeffs.shape[-1]) * coeffs.imag, quad)
    return w, w_t
