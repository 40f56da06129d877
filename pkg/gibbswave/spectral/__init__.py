"""Radial eigenbasis, quadrature grids and norms."""

from gibbswave.spectral.basis import (
    NEAR_ORIGIN,
    SobolevIndex,
    SpectralState,
    WaveDataPair,
    complexify,
    decomplexify,
    eigenvalue,
    eigenvalues,
    embed,
    eval_basis,
    inner_product,
    project,
    real_part,
    sobolev_norm,
    sqrt_laplacian_pow,
    truncate,
)
from gibbswave.spectral.quadrature import (
    QuadratureKind,
    RadialQuadrature,
    analyze,
    lebesgue_norm,
    synthesize,
    wave_fields,
)

__all__ = [
    "NEAR_ORIGIN",
    "QuadratureKind",
    "RadialQuadrature",
    "SobolevIndex",
    "SpectralState",
    "WaveDataPair",
    "analyze",
    "complexify",
    "decomplexify",
    "eigenvalue",
    "eigenvalues",
    "embed",
    "eval_basis",
    "inner_product",
    "lebesgue_norm",
    "project",
    "real_part",
    "sobolev_norm",
    "sqrt_laplacian_pow",
    "synthesize",
    "truncate",
    "wave_fields",
]
