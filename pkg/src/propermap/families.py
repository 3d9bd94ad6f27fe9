"""Families of compact sets indexed by a finite parameter grid.

A family assigns one region fiber to each grid label.  The flags mirror what
the construction needs to know about a family: ``wide`` promises every fiber
is nonempty, ``runge`` records that the fibers were built with connected
complement (a structural fact of the construction, never re-derived here).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry
from .errors import DomainError, GridMismatchError, RegionError

_LABEL_ATOL = 1e-12


@dataclass(frozen=True)
class ParamGrid:
    labels: tuple[float, ...]

    def __post_init__(self):
        if not self.labels:
            raise RegionError("parameter grid needs at least one label")
        arr = np.asarray(self.labels, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise RegionError("parameter labels must be finite")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise RegionError("parameter labels must be strictly increasing")

    @property
    def size(self) -> int:
        return len(self.labels)

    def index_of(self, b: float) -> int:
        for i, lab in enumerate(self.labels):
            if math.isclose(lab, b, rel_tol=0.0, abs_tol=_LABEL_ATOL):
                return i
        raise DomainError(f"parameter {b!r} not on grid {self.labels!r}", b=b)


def grid_of(labels) -> ParamGrid:
    return ParamGrid(tuple(float(x) for x in labels))


@dataclass(frozen=True)
class CompactFamily:
    grid: ParamGrid
    fibers: tuple[geometry.RegionSpec, ...]
    wide: bool = False
    runge: bool = False

    def __post_init__(self):
        if len(self.fibers) != self.grid.size:
            raise RegionError(
                f"family has {len(self.fibers)} fibers for {self.grid.size} labels"
            )
        if self.wide and any(f.is_empty for f in self.fibers):
            raise RegionError("family declared wide but has an empty fiber")

    def fiber(self, b: float) -> geometry.RegionSpec:
        return self.fibers[self.grid.index_of(b)]


def constant_family(grid: ParamGrid, spec: geometry.RegionSpec, *,
                    wide: bool = False, runge: bool = False) -> CompactFamily:
    return CompactFamily(grid, (spec,) * grid.size, wide=wide, runge=runge)


def family_from(grid: ParamGrid, fn, *, wide: bool = False,
                runge: bool = False) -> CompactFamily:
    """Build a family by evaluating fn at every grid label."""
    return CompactFamily(grid, tuple(fn(b) for b in grid.labels),
                         wide=wide, runge=runge)


def union(f1: CompactFamily, f2: CompactFamily, *, runge: bool = False) -> CompactFamily:
    """Fiberwise union.  The runge flag is never inferred; callers that know
    the combined complement stays connected pass it explicitly."""
    if f1.grid.labels != f2.grid.labels:
        raise GridMismatchError(
            f"grids differ: {f1.grid.labels!r} vs {f2.grid.labels!r}"
        )
    merged = tuple(geometry.union_of([a, b]) for a, b in zip(f1.fibers, f2.fibers))
    wide = all(not f.is_empty for f in merged)
    return CompactFamily(f1.grid, merged, wide=wide, runge=runge)


@dataclass(frozen=True)
class FamilyReport:
    ok: bool
    wide_ok: bool
    rows: tuple[dict, ...] = field(default=())


def is_valid_proper_family(fam: CompactFamily) -> FamilyReport:
    """Per-fiber structural report; constructors already reject malformed specs,
    so this mostly audits emptiness against the wide claim."""
    rows = []
    wide_ok = True
    for b, fib in zip(fam.grid.labels, fam.fibers):
        row = {"b": b, "kind": fib.kind, "empty": fib.is_empty}
        if fam.wide and fib.is_empty:
            wide_ok = False
            row["issue"] = "declared wide but fiber is empty"
        rows.append(row)
    return FamilyReport(ok=wide_ok, wide_ok=wide_ok, rows=tuple(rows))


def min_over_fibers(eta, fam: CompactFamily, density: float) -> np.ndarray:
    """Per-parameter minimum of a real evaluator over sampled fibers.

    eta is vectorized: eta(b, zs) -> real array.  Empty fibers are a domain
    error; the minimum of nothing has no meaning here.
    """
    out = np.empty(fam.grid.size, dtype=float)
    for i, b in enumerate(fam.grid.labels):
        fib = fam.fibers[i]
        if fib.is_empty:
            raise DomainError(f"empty fiber at b={b!r}", b=b)
        pts = geometry.sample(fib, density)
        if pts.size == 0:
            raise DomainError(f"fiber sampling came back empty at b={b!r}", b=b)
        vals = np.asarray(eta(b, pts), dtype=float)
        if vals.shape != pts.shape:
            raise DomainError(f"evaluator shape mismatch at b={b!r}", b=b)
        if not np.all(np.isfinite(vals)):
            raise DomainError(f"non-finite evaluator values at b={b!r}", b=b)
        out[i] = vals.min()
    return out


def continuous_minorant(mins, rho: float = 0.1) -> np.ndarray:
    """Shrink strictly positive per-parameter minima by the safety factor rho.

    The result extends to a positive continuous function of the parameter by
    piecewise-linear interpolation, which is all the construction needs.
    """
    if not 0.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (0, 1), got {rho!r}")
    arr = np.asarray(mins, dtype=float)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise DomainError("minima must be a nonempty finite array")
    if not np.all(arr > 0.0):
        bad = float(arr.min())
        raise DomainError(f"minima must be strictly positive, got {bad!r}", value=bad)
    return (1.0 - rho) * arr


def validate_per_param(grid: ParamGrid, values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (grid.size,):
        raise DomainError(f"per-parameter data has shape {arr.shape}, "
                          f"expected ({grid.size},)")
    if not np.all(np.isfinite(arr)):
        raise DomainError("per-parameter data must be finite")
    return arr


def with_flags(fam: CompactFamily, *, wide: bool | None = None,
               runge: bool | None = None) -> CompactFamily:
    kw = {}
    if wide is not None:
        kw["wide"] = wide
    if runge is not None:
        kw["runge"] = runge
    return replace(fam, **kw)
