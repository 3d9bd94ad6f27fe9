"""Run configuration: parsing, validation, defaults."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

# Seeds must clear the first growth certificate with room to spare.
SEED_MARGIN = 1e-6

_FLOAT_FIELDS = ("budget_scale", "fit_density", "validation_density",
                 "minorant_rho", "delta_cap_fraction")


def parse_real(v) -> float:
    if isinstance(v, bool):
        raise ConfigError(f"expected a real number, got {v!r}")
    try:
        return float(v)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"expected a real number, got {v!r}") from exc


def _parse_seed_entry(v) -> complex:
    if isinstance(v, dict):
        extra = set(v) - {"re", "im"}
        if extra:
            raise ConfigError(f"seed entry has unknown keys {sorted(extra)}")
        return complex(parse_real(v.get("re", 0.0)), parse_real(v.get("im", 0.0)))
    return complex(parse_real(v), 0.0)


@dataclass(frozen=True)
class RunConfig:
    steps: int = 3
    param_grid: tuple[float, ...] = (0.0,)
    seed: tuple[complex, ...] = (2.0 + 0.0j,)
    budget_scale: float = 1.0
    max_degree: int = 400
    fit_density: float = 12.0
    validation_density: float = 24.0
    minorant_rho: float = 0.1
    delta_cap_fraction: float = 0.999999

    def __post_init__(self):
        if not isinstance(self.steps, int) or self.steps < 1:
            raise ConfigError(f"steps must be a positive integer, got {self.steps!r}")
        if not self.param_grid:
            raise ConfigError("param_grid must be nonempty")
        arr = np.asarray(self.param_grid, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ConfigError("param_grid entries must be finite")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise ConfigError("param_grid must be strictly increasing")
        if len(self.seed) not in (1, len(self.param_grid)):
            raise ConfigError(
                f"seed needs 1 or {len(self.param_grid)} entries, got {len(self.seed)}"
            )
        for s in self.seed:
            if not (s.real > 1.0 + SEED_MARGIN):
                raise ConfigError(
                    f"seed {s!r} rejected: real part must exceed 1 + {SEED_MARGIN}"
                )
        if not 0.0 < self.budget_scale <= 1.0:
            raise ConfigError(f"budget_scale must lie in (0, 1], got {self.budget_scale!r}")
        if not isinstance(self.max_degree, int) or self.max_degree < 1:
            raise ConfigError(f"max_degree must be a positive integer, got {self.max_degree!r}")
        if self.fit_density <= 0.0 or self.validation_density <= 0.0:
            raise ConfigError("densities must be positive")
        if self.validation_density < 2.0 * self.fit_density:
            raise ConfigError(
                f"validation_density {self.validation_density!r} must be at least "
                f"twice fit_density {self.fit_density!r}"
            )
        if not 0.0 < self.minorant_rho < 1.0:
            raise ConfigError(f"minorant_rho must lie in (0, 1), got {self.minorant_rho!r}")
        if not 0.0 < self.delta_cap_fraction < 1.0:
            raise ConfigError(
                f"delta_cap_fraction must lie in (0, 1), got {self.delta_cap_fraction!r}"
            )

    @property
    def seeds(self) -> np.ndarray:
        """One complex seed per parameter label."""
        if len(self.seed) == len(self.param_grid):
            return np.asarray(self.seed, dtype=complex)
        return np.full(len(self.param_grid), self.seed[0], dtype=complex)

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "param_grid": list(self.param_grid),
            "seed": [{"re": s.real, "im": s.imag} for s in self.seed],
            "budget_scale": self.budget_scale,
            "max_degree": self.max_degree,
            "fit_density": self.fit_density,
            "validation_density": self.validation_density,
            "minorant_rho": self.minorant_rho,
            "delta_cap_fraction": self.delta_cap_fraction,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError(f"config must be a mapping, got {type(d).__name__}")
        known = {"steps", "param_grid", "seed", "budget_scale", "max_degree",
                 "fit_density", "validation_density", "minorant_rho",
                 "delta_cap_fraction"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        kw: dict = {}
        if "steps" in d:
            try:
                kw["steps"] = int(d["steps"])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"steps must be an integer, got {d['steps']!r}") from exc
        if "param_grid" in d:
            if not isinstance(d["param_grid"], (list, tuple)):
                raise ConfigError("param_grid must be a list")
            kw["param_grid"] = tuple(parse_real(x) for x in d["param_grid"])
        if "max_degree" in d:
            try:
                kw["max_degree"] = int(d["max_degree"])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"max_degree must be an integer, got {d['max_degree']!r}") from exc
        for name in _FLOAT_FIELDS:
            if name in d:
                kw[name] = parse_real(d[name])
        if "seed" in d:
            raw = d["seed"]
            if isinstance(raw, (list, tuple)):
                kw["seed"] = tuple(_parse_seed_entry(v) for v in raw)
            else:
                kw["seed"] = (_parse_seed_entry(raw),)
        return cls(**kw)
