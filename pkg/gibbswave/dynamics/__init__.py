"""Truncated flow Phi_N: splitting integrator, energy, Picard cross-check."""

from gibbswave.dynamics.flow import (
    FlowParams,
    FlowScheme,
    Observers,
    TrajectoryRecord,
    divergence_partials,
    divergence_probe,
    energy_drift,
    evolve,
    evolve_to,
    hamiltonian,
    hamiltonian_complex_form,
    lie_step,
    linear_substep,
    local_time_bound,
    nonlinear_substep,
    strang_step,
    vector_field,
    wave_propagate,
)
from gibbswave.dynamics.picard import PicardSolution, picard_solve

__all__ = [
    "FlowParams",
    "FlowScheme",
    "Observers",
    "PicardSolution",
    "TrajectoryRecord",
    "divergence_partials",
    "divergence_probe",
    "energy_drift",
    "evolve",
    "evolve_to",
    "hamiltonian",
    "hamiltonian_complex_form",
    "lie_step",
    "linear_substep",
    "local_time_bound",
    "nonlinear_substep",
    "picard_solve",
    "strang_step",
    "vector_field",
    "wave_propagate",
]
