"""
Radial Dirichlet eigenbasis of the unit ball and coefficient-space operations.

    e_n(r) = sqrt(2) sin(pi n r) / r,    -Laplacian e_n = z_n^2 e_n,   z_n = pi n

The inner product is <f, g> = int_0^1 f(r) conj(g(r)) r^2 dr, which makes the
e_n exactly orthonormal, so everything in this module works on coefficients
alone (Parseval form). Grid-level work lives in ``quadrature``.

States are stored as complex arrays whose trailing axis indexes modes
(n = 1..N); any leading axes index independent samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from gibbswave.core.errors import DomainError

SQRT2 = math.sqrt(2.0)

# Below this radius e_n is evaluated through sin(x)/x.
NEAR_ORIGIN = 1e-8


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SpectralState:
    """
    Galerkin coefficients c_n = a_n + i b_n of u = sum_n c_n e_n.

    ``coeffs`` may carry leading batch axes; ``n_modes`` is always the
    length of the trailing axis.
    """

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.ndim == 0 or coeffs.shape[-1] < 1:
            raise DomainError("a state needs at least one mode")
        if not np.all(np.isfinite(coeffs)):
            raise DomainError("state coefficients must be finite")
        object.__setattr__(self, "coeffs", _frozen(coeffs))

    @classmethod
    def zeros(cls, n_modes: int, batch: tuple = ()) -> "SpectralState":
        return cls(np.zeros(tuple(batch) + (int(n_modes),), dtype=np.complex128))

    @classmethod
    def mode(cls, n: int, n_modes: int, value: complex = 1.0) -> "SpectralState":
        """The state value * e_n inside E_N."""
        if not 1 <= n <= n_modes:
            raise DomainError(f"mode index {n} outside 1..{n_modes}")
        coeffs = np.zeros(n_modes, dtype=np.complex128)
        coeffs[n - 1] = value
        return cls(coeffs)

    @property
    def n_modes(self) -> int:
        return int(self.coeffs.shape[-1])

    @property
    def batch_shape(self) -> tuple:
        return tuple(self.coeffs.shape[:-1])

    @property
    def a(self) -> np.ndarray:
        """Real parts a_n (displacement coordinates)."""
        return self.coeffs.real

    @property
    def b(self) -> np.ndarray:
        """Imaginary parts b_n (velocity coordinates)."""
        return self.coeffs.imag

    def __getitem__(self, index) -> "SpectralState":
        if not self.batch_shape:
            raise IndexError("state is not batched")
        return SpectralState(self.coeffs[index])

    def __len__(self) -> int:
        if not self.batch_shape:
            raise TypeError("state is not batched")
        return self.batch_shape[0]


@dataclass(frozen=True, eq=False)
class WaveDataPair:
    """Real coefficient sequences of the wave data (f1, f2) = (w, w_t) at t = 0."""

    f1_coeffs: np.ndarray
    f2_coeffs: np.ndarray

    def __post_init__(self) -> None:
        f1 = np.asarray(self.f1_coeffs, dtype=np.float64)
        f2 = np.asarray(self.f2_coeffs, dtype=np.float64)
        if f1.shape != f2.shape:
            raise DomainError(f"f1 and f2 lengths differ: {f1.shape} vs {f2.shape}")
        if not (np.all(np.isfinite(f1)) and np.all(np.isfinite(f2))):
            raise DomainError("wave data must be finite")
        object.__setattr__(self, "f1_coeffs", _frozen(f1))
        object.__setattr__(self, "f2_coeffs", _frozen(f2))

    @property
    def n_modes(self) -> int:
        return int(self.f1_coeffs.shape[-1])


@dataclass(frozen=True)
class SobolevIndex:
    """Regularity exponent s of H^s."""

    s: float

    def __float__(self) -> float:
        return float(self.s)

    def require_measure_range(self) -> "SobolevIndex":
        """The Gaussian measures only live on H^s for s < 1/2."""
        if not float(self.s) < 0.5:
            raise DomainError(f"measure operations need s < 1/2, got s={self.s}")
        return self


SobolevLike = Union[float, SobolevIndex]
StateLike = Union[SpectralState, np.ndarray]


def as_coeffs(state: StateLike) -> np.ndarray:
    if isinstance(state, SpectralState):
        return state.coeffs
    return np.asarray(state, dtype=np.complex128)


# ---------------------------------------------------------------------------
# Eigenvalues and eigenfunctions
# ---------------------------------------------------------------------------


def eigenvalue(n: int) -> float:
    """z_n = pi n, square root of the n-th radial Dirichlet eigenvalue."""
    if int(n) != n or n < 1:
        raise DomainError(f"mode index must be a positive integer, got {n!r}")
    return math.pi * int(n)


def eigenvalues(n_modes: int) -> np.ndarray:
    """Vector (z_1, ..., z_N)."""
    if n_modes < 1:
        raise DomainError(f"n_modes must be >= 1, got {n_modes}")
    return math.pi * np.arange(1, n_modes + 1, dtype=np.float64)


def eval_basis(n: int, r):
    """
    e_n(r) for r in (0, 1]. Scalars give a float, arrays give an array.
    """
    z = eigenvalue(n)
    r_arr = np.asarray(r, dtype=np.float64)
    if np.any(~(r_arr > 0.0)) or np.any(r_arr > 1.0):
        raise DomainError("eval_basis needs 0 < r <= 1")
    near = r_arr < NEAR_ORIGIN
    safe_r = np.where(near, 1.0, r_arr)
    far_value = SQRT2 * np.sin(z * safe_r) / safe_r
    near_value = SQRT2 * z * np.sinc(n * r_arr)
    out = np.where(near, near_value, far_value)
    if out.ndim == 0:
        return float(out)
    return out


# ---------------------------------------------------------------------------
# Coefficient-space operations
# ---------------------------------------------------------------------------


def inner_product(x: StateLike, y: StateLike):
    """<x, y> = sum_n c_n(x) conj(c_n(y)); second argument conjugated."""
    cx, cy = as_coeffs(x), as_coeffs(y)
    if cx.shape[-1] != cy.shape[-1]:
        raise DomainError(f"dimension mismatch: {cx.shape[-1]} vs {cy.shape[-1]}")
    value = np.sum(cx * np.conj(cy), axis=-1)
    return complex(value) if np.ndim(value) == 0 else value


def sobolev_norm(state: StateLike, s: SobolevLike):
    """||u||_{H^s} = (sum_n z_n^{2s} |c_n|^2)^{1/2}."""
    coeffs = as_coeffs(state)
    z = eigenvalues(coeffs.shape[-1])
    value = np.sqrt(np.sum(z ** (2.0 * float(s)) * np.abs(coeffs) ** 2, axis=-1))
    return float(value) if np.ndim(value) == 0 else value


def sqrt_laplacian_pow(state: StateLike, gamma: float) -> SpectralState:
    """Apply (sqrt(-Laplacian))^gamma: c_n -> z_n^gamma c_n."""
    coeffs = as_coeffs(state)
    if gamma == 0:
        return SpectralState(coeffs)
    return SpectralState(coeffs * eigenvalues(coeffs.shape[-1]) ** gamma)


def project(state: StateLike, n_modes: int) -> SpectralState:
    """
    S_N: zero every mode above N while keeping the storage length, so the
    result still lives in the caller's E_{N'} (N' >= N).
    """
    if n_modes < 1:
        raise DomainError(f"projection rank must be >= 1, got {n_modes}")
    coeffs = np.array(as_coeffs(state), copy=True)
    coeffs[..., n_modes:] = 0.0
    return SpectralState(coeffs)


def truncate(state: StateLike, n_modes: int) -> SpectralState:
    """Drop storage above N (E_{N'} -> E_N)."""
    if n_modes < 1:
        raise DomainError(f"truncation rank must be >= 1, got {n_modes}")
    return SpectralState(as_coeffs(state)[..., :n_modes])


def embed(state: StateLike, n_modes: int) -> SpectralState:
    """Zero-pad into a larger space E_{N'} (inverse of truncate on E_N)."""
    coeffs = as_coeffs(state)
    current = coeffs.shape[-1]
    if n_modes < current:
        raise DomainError(f"cannot embed N={current} into smaller N'={n_modes}")
    pad = [(0, 0)] * (coeffs.ndim - 1) + [(0, n_modes - current)]
    return SpectralState(np.pad(coeffs, pad))


def real_part(state: StateLike) -> SpectralState:
    """The state Re(u) = sum a_n e_n."""
    return SpectralState(as_coeffs(state).real.astype(np.complex128))


def complexify(data: WaveDataPair) -> SpectralState:
    """u_0 = f1 + i (sqrt(-Laplacian))^{-1} f2, i.e. c_n = f1_n + i f2_n / z_n."""
    z = eigenvalues(data.n_modes)
    return SpectralState(data.f1_coeffs + 1j * data.f2_coeffs / z)


def decomplexify(state: StateLike) -> WaveDataPair:
    """Inverse of complexify: f1_n = Re c_n, f2_n = z_n Im c_n."""
    coeffs = as_coeffs(state)
    z = eigenvalues(coeffs.shape[-1])
    return WaveDataPair(coeffs.real, z * coeffs.imag)
