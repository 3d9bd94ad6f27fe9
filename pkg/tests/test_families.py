import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from propermap import families as fam
from propermap import geometry as g
from propermap.errors import DomainError, GridMismatchError, RegionError

GRID = fam.grid_of([0.0, 1.0, 2.0])


def test_grid_validation():
    with pytest.raises(RegionError):
        fam.grid_of([])
    with pytest.raises(RegionError):
        fam.grid_of([0.0, 0.0])
    with pytest.raises(RegionError):
        fam.grid_of([1.0, 0.5])
    assert fam.grid_of([0.5]).size == 1


def test_grid_index_of():
    assert GRID.index_of(1.0) == 1
    with pytest.raises(DomainError):
        GRID.index_of(0.5)


def test_constant_family_and_fiber():
    f = fam.constant_family(GRID, g.disk_k(2), wide=True, runge=True)
    assert f.fiber(2.0).kind == "disk"
    assert f.wide and f.runge


def test_wide_claim_rejected_on_empty_fiber():
    with pytest.raises(RegionError):
        fam.CompactFamily(GRID, (g.disk_k(1), g.empty(), g.disk_k(1)), wide=True)


def test_union_fiberwise():
    f1 = fam.constant_family(GRID, g.disk_k(1))
    f2 = fam.family_from(GRID, lambda b: g.sector(1, 0.0, 1.0 + b))
    u = fam.union(f1, f2)
    assert u.wide
    for fib in u.fibers:
        assert fib.kind == "union"
        assert len(fib.members) == 2


def test_union_with_empty_fiber_passes_through():
    f1 = fam.constant_family(GRID, g.empty())
    f2 = fam.constant_family(GRID, g.disk_k(1))
    u = fam.union(f1, f2)
    assert all(fib.kind == "disk" for fib in u.fibers)
    assert u.wide


def test_union_grid_mismatch():
    f1 = fam.constant_family(GRID, g.disk_k(1))
    f2 = fam.constant_family(fam.grid_of([0.0, 1.0]), g.disk_k(1))
    with pytest.raises(GridMismatchError):
        fam.union(f1, f2)


def test_union_does_not_claim_runge():
    f1 = fam.constant_family(GRID, g.disk_k(1), runge=True)
    f2 = fam.constant_family(GRID, g.arc(2, 0.0, 1.0), runge=True)
    assert not fam.union(f1, f2).runge
    assert fam.union(f1, f2, runge=True).runge


def test_validity_report():
    ok = fam.is_valid_proper_family(fam.constant_family(GRID, g.disk_k(1), wide=True))
    assert ok.ok and ok.wide_ok and len(ok.rows) == 3
    mixed = fam.CompactFamily(GRID, (g.disk_k(1), g.empty(), g.disk_k(1)))
    rep = fam.is_valid_proper_family(mixed)
    assert rep.ok  # no wide claim, empties allowed
    assert rep.rows[1]["empty"]


def test_min_over_fibers_ring_distance():
    # ring between radii 1 and 2 built from two half-band sectors
    ring = g.union_of([g.sector(1, 0.0, math.pi), g.sector(1, math.pi, g.TAU)])
    f = fam.constant_family(GRID, ring, wide=True)
    mins = fam.min_over_fibers(lambda b, zs: np.abs(zs), f, density=16.0)
    assert mins.shape == (3,)
    assert np.all(np.abs(mins - 1.0) <= 1e-3)


def test_min_over_fibers_depends_on_parameter():
    f = fam.family_from(GRID, lambda b: g.disk_k(1))
    mins = fam.min_over_fibers(lambda b, zs: np.real(zs) + 2.0 + b, f, density=12.0)
    assert np.all(np.diff(mins) > 0.9)


def test_min_over_fibers_empty_fiber_rejected():
    f = fam.constant_family(GRID, g.empty())
    with pytest.raises(DomainError):
        fam.min_over_fibers(lambda b, zs: np.abs(zs), f, density=8.0)


def test_min_over_fibers_nonfinite_rejected():
    f = fam.constant_family(GRID, g.disk_k(1))
    with pytest.raises(DomainError):
        fam.min_over_fibers(lambda b, zs: np.full(zs.shape, np.nan), f, density=8.0)


def test_continuous_minorant_basics():
    out = fam.continuous_minorant([1.0, 0.5, 2.0], rho=0.1)
    assert np.allclose(out, [0.9, 0.45, 1.8])
    with pytest.raises(DomainError):
        fam.continuous_minorant([1.0, 0.0], rho=0.1)
    with pytest.raises(DomainError):
        fam.continuous_minorant([1.0], rho=1.0)
    with pytest.raises(DomainError):
        fam.continuous_minorant([1.0], rho=0.0)


@given(st.lists(st.floats(min_value=1e-8, max_value=1e8), min_size=1, max_size=8),
       st.floats(min_value=1e-3, max_value=0.999))
@settings(max_examples=80, deadline=None)
def test_continuous_minorant_strictly_below_minima(vals, rho):
    out = fam.continuous_minorant(vals, rho=rho)
    arr = np.asarray(vals)
    assert np.all(out > 0.0)
    assert np.all(out < arr)
    # scaling equivariance keeps the minorant continuous in the data
    out2 = fam.continuous_minorant(2.0 * arr, rho=rho)
    assert np.allclose(out2, 2.0 * out, rtol=1e-12)


def test_validate_per_param():
    arr = fam.validate_per_param(GRID, [1.0, 2.0, 3.0])
    assert arr.dtype == float
    with pytest.raises(DomainError):
        fam.validate_per_param(GRID, [1.0, 2.0])
    with pytest.raises(DomainError):
        fam.validate_per_param(GRID, [1.0, np.inf, 3.0])
