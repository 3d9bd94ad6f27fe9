"""Exception types shared across the package."""

from __future__ import annotations


class PropermapError(Exception):
    """Base class for all package-specific errors."""


class RegionError(PropermapError, ValueError):
    """Invalid region parameters."""


class SampleModeError(RegionError):
    """Sampling mode incompatible with the region kind."""


class GridMismatchError(PropermapError, ValueError):
    """Two families live over different parameter grids."""


class DomainError(PropermapError, ValueError):
    """A fiberwise computation hit an empty fiber or an out-of-range value."""

    def __init__(self, message: str, b: float | None = None, value: float | None = None):
        super().__init__(message)
        self.b = b
        self.value = value


class InsufficientSamplesError(PropermapError, ValueError):
    """Fewer samples than the basis degree can support."""


class RankDeficiencyError(PropermapError, ArithmeticError):
    """Orthogonalization broke down: samples lie on a low-degree variety."""


class TargetMismatchError(PropermapError, ValueError):
    """Piecewise target disagrees with itself on an overlap."""


class NoConvergence(PropermapError, RuntimeError):
    """Degree escalation exhausted without meeting the tolerance."""

    def __init__(self, b: float, best_error: float, degree: int, schedule=None,
                 note: str = ""):
        super().__init__(
            f"no convergence at b={b!r}: best sup error {best_error:.6g} "
            f"at degree {degree}{note}"
        )
        self.b = b
        self.best_error = best_error
        self.degree = degree
        self.schedule = list(schedule or [])
        self.note = note


class PreconditionError(PropermapError, ValueError):
    """A lower-bound constraint is not strictly cleared by the target itself."""

    def __init__(self, message: str, b: float | None = None, label: str | None = None,
                 value: float | None = None):
        super().__init__(message)
        self.b = b
        self.label = label
        self.value = value


class PostCheckFailed(PropermapError, RuntimeError):
    """The fitted polynomial violates a constraint it was built to keep."""

    def __init__(self, message: str, b: float | None = None, label: str | None = None,
                 margin: float | None = None):
        super().__init__(message)
        self.b = b
        self.label = label
        self.margin = margin


class CollarError(PropermapError, RuntimeError):
    """Collar width collapsed to zero or a sector scan came back empty."""


class CertificateError(PropermapError, RuntimeError):
    """A previously recorded certificate no longer holds on re-evaluation."""


class StepRejected(PropermapError, RuntimeError):
    """An induction step failed its exit certificate; state was not advanced."""

    def __init__(self, n: int, rows):
        super().__init__(f"step n={n} rejected by its exit certificate")
        self.n = n
        self.rows = rows


class ConfigError(PropermapError, ValueError):
    """Run configuration failed validation."""
