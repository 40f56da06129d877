"""
Exception types raised by gibbswave.

Everything derives from GibbswaveError so the CLI can report any library
failure in one place. The ValueError / RuntimeError mix-ins keep plain
``except ValueError`` call sites working.
"""
from __future__ import annotations

from typing import Optional, Sequence


class GibbswaveError(Exception):
    """Base class for every error raised by this package."""


class CapacityError(GibbswaveError, ValueError):
    """A quadrature grid is too coarse for the requested number of modes."""

    def __init__(self, n_modes: int, capacity: int, m_points: int) -> None:
        super().__init__(
            f"grid with M={m_points} supports at most N={capacity} modes, got N={n_modes}"
        )
        self.n_modes = n_modes
        self.capacity = capacity
        self.m_points = m_points


class DomainError(GibbswaveError, ValueError):
    """Argument outside the domain where the operation is defined."""


class ConfigError(GibbswaveError, ValueError):
    """Invalid configuration file or value. Names the offending key."""

    def __init__(self, key: str, constraint: str) -> None:
        super().__init__(f"config key '{key}': {constraint}")
        self.key = key
        self.constraint = constraint


class IntegratorAbort(GibbswaveError, RuntimeError):
    """
    The time integrator produced non-finite values or tripped a drift guard.

    The truncated flow is globally defined, so this always signals a numerical
    problem (step too large, bad input), never a genuine blow-up.
    """

    def __init__(
        self,
        message: str,
        *,
        step: Optional[int] = None,
        time: Optional[float] = None,
        sample_indices: Sequence[int] = (),
    ) -> None:
        indices = tuple(int(i) for i in sample_indices)
        detail = message
        if step is not None:
            detail += f" (step {step}, t={time!r})"
        if indices:
            shown = ", ".join(str(i) for i in indices[:10])
            detail += f" samples [{shown}{', ...' if len(indices) > 10 else ''}]"
        super().__init__(detail)
        self.reason = message
        self.step = step
        self.time = time
        self.sample_indices = indices


class ContractionError(GibbswaveError, RuntimeError):
    """Picard iteration failed to contract; carries successive-difference norms."""

    def __init__(self, differences: Sequence[float]) -> None:
        diffs = ", ".join(f"{d:.3e}" for d in differences)
        super().__init__(f"Picard iteration is not contracting: differences [{diffs}]")
        self.differences = tuple(float(d) for d in differences)
