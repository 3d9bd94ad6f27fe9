import math

import numpy as np
import pytest

from propermap import engine as eng
from propermap import families as fam
from propermap import geometry as g
from propermap.errors import (
    ConfigError,
    DomainError,
    InsufficientSamplesError,
    NoConvergence,
    PreconditionError,
    RankDeficiencyError,
    TargetMismatchError,
)

ONE = fam.grid_of([0.0])


def _disk_target(radius, fn, grid=ONE):
    family = fam.constant_family(grid, g.disk_k(radius), wide=True, runge=True)
    return eng.PiecewiseTarget(grid, [eng.TargetPiece(family, lambda b, zs: fn(zs))])


# -- basis -------------------------------------------------------------------

def test_fit_basis_orthonormal_and_well_conditioned():
    rng = np.random.default_rng(5)
    zs = rng.uniform(-2, 2, 240) + 1j * rng.uniform(-2, 2, 240)
    basis = eng.fit_basis(zs, 20)
    G = basis.Q.conj().T @ (basis.weights[:, None] * basis.Q)
    assert np.abs(G - np.eye(21)).max() < 1e-12
    assert basis.condition() <= 1e3


def test_fit_basis_reproduces_monomial():
    rng = np.random.default_rng(6)
    zs = rng.uniform(-2, 2, 120) + 1j * rng.uniform(-2, 2, 120)
    basis = eng.fit_basis(zs, 6)
    chat = basis.project(zs ** 2)
    coeffs = basis.monomial_coeffs(chat)
    expected = np.zeros(7, dtype=complex)
    expected[2] = 1.0
    assert np.abs(coeffs - expected).max() < 1e-11


def test_fit_basis_insufficient_samples():
    zs = np.exp(2j * np.pi * np.arange(20) / 20)
    with pytest.raises(InsufficientSamplesError):
        eng.fit_basis(zs, 10)


def test_fit_basis_rank_deficiency():
    # 60 nodes but only 5 distinct locations: degree 5 cannot exist
    zs = np.tile(np.exp(2j * np.pi * np.arange(5) / 5), 12)
    with pytest.raises(RankDeficiencyError):
        eng.fit_basis(zs, 8)


def test_polyval_matches_power_sum():
    rng = np.random.default_rng(7)
    coeffs = (rng.normal(size=51) + 1j * rng.normal(size=51)) / 3.0 ** np.arange(51)
    zs = 2.0 * np.exp(1j * rng.uniform(0, 2 * np.pi, 40)) * rng.uniform(0, 1, 40)
    direct = sum(c * zs ** k for k, c in enumerate(coeffs))
    assert np.abs(eng.polyval(coeffs, zs) - direct).max() < 1e-10


# -- unconstrained approximation --------------------------------------------

def test_limits_validation():
    with pytest.raises(ConfigError):
        eng.EngineLimits(fit_density=40.0, validation_density=50.0)
    with pytest.raises(ConfigError):
        eng.EngineLimits(max_degree=0)
    with pytest.raises(ConfigError):
        eng.EngineLimits(fit_density=-1.0)


def test_approximate_recovers_cubic():
    target = _disk_target(2, lambda zs: zs ** 3)
    family, report = eng.approximate(target, 1e-9, eng.EngineLimits(
        max_degree=16, fit_density=6.0, validation_density=12.0))
    fr = report.fibers[0]
    assert fr.sup_error < 1e-9
    assert fr.condition <= 1e3
    coeffs = family.coeffs[0]
    expected = np.zeros(coeffs.size, dtype=complex)
    expected[3] = 1.0
    assert np.abs(coeffs - expected).max() < 1e-9


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_approximate_reproduces_random_polynomials(seed):
    rng = np.random.default_rng(seed)
    deg = int(rng.integers(5, 51))
    coeffs = (rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
    coeffs /= 2.0 ** np.arange(deg + 1)          # keep values O(1) on the disk
    target = _disk_target(2, lambda zs: eng.polyval(coeffs, zs))
    family, report = eng.approximate(target, 1e-9, eng.EngineLimits(
        max_degree=64, fit_density=10.0, validation_density=20.0))
    assert report.fibers[0].sup_error < 1e-9
    zs = 2.0 * np.exp(1j * np.linspace(0, 2 * np.pi, 50, endpoint=False))
    assert np.abs(family.eval(0.0, zs) - eng.polyval(coeffs, zs)).max() < 1e-8


def test_approximate_exponential_modest_degree():
    target = _disk_target(2, np.exp)
    family, report = eng.approximate(target, 1e-8, eng.EngineLimits(
        max_degree=64, fit_density=8.0, validation_density=16.0))
    fr = report.fibers[0]
    assert fr.sup_error < 1e-8
    assert fr.accepted_degree <= 30


def test_schedule_errors_nearly_monotone():
    target = _disk_target(2, np.exp)
    with pytest.raises(NoConvergence) as exc:
        eng.approximate(target, 1e-16, eng.EngineLimits(
            max_degree=64, fit_density=8.0, validation_density=16.0))
    sched = exc.value.schedule
    assert len(sched) >= 3
    errs = [e for _, e in sched]
    for a, b in zip(errs, errs[1:]):
        assert b <= a * 1.05


def test_no_convergence_reports_best_error():
    grid = ONE
    inner = fam.constant_family(grid, g.disk_k(1), wide=True)
    outer = fam.constant_family(grid, g.lblock(1, 0.3, 0.5, 2.5), wide=True)
    target = eng.PiecewiseTarget(grid, [
        eng.TargetPiece(inner, lambda b, zs: np.zeros(zs.shape, dtype=complex)),
        eng.TargetPiece(outer, lambda b, zs: np.ones(zs.shape, dtype=complex)),
    ])
    with pytest.raises(NoConvergence) as exc:
        eng.approximate(target, 1e-6, eng.EngineLimits(
            max_degree=8, fit_density=8.0, validation_density=16.0))
    assert exc.value.b == 0.0
    assert exc.value.degree == 8
    assert exc.value.best_error > 1e-6


def test_report_sup_error_is_reproducible():
    target = _disk_target(2, np.exp)
    limits = eng.EngineLimits(max_degree=64, fit_density=8.0, validation_density=16.0)
    family, report = eng.approximate(target, 1e-8, limits)
    fr = report.fibers[0]
    pts = g.sample(g.disk_k(2), limits.validation_density)
    err = float(np.abs(family.eval(0.0, pts) - np.exp(pts)).max())
    assert abs(err - fr.sup_error) <= 1e-12
    assert fr.val_count == pts.size


def test_overlapping_pieces_must_agree():
    grid = ONE
    a = fam.constant_family(grid, g.disk_k(2), wide=True)
    b_ = fam.constant_family(grid, g.disk_k(1), wide=True)
    target = eng.PiecewiseTarget(grid, [
        eng.TargetPiece(a, lambda b, zs: np.zeros(zs.shape, dtype=complex)),
        eng.TargetPiece(b_, lambda b, zs: np.ones(zs.shape, dtype=complex)),
    ])
    with pytest.raises(TargetMismatchError):
        eng.approximate(target, 0.5, eng.EngineLimits(
            max_degree=8, fit_density=8.0, validation_density=16.0))


def test_target_eval_outside_domain_rejected():
    target = _disk_target(1, np.exp)
    with pytest.raises(DomainError):
        eng.target_eval(target, 0.0, np.array([3.0 + 0j]))


def test_tolerance_shape_validation():
    target = _disk_target(1, np.exp)
    with pytest.raises(DomainError):
        eng.approximate(target, [0.1, 0.2], eng.EngineLimits(
            max_degree=8, fit_density=6.0, validation_density=12.0))
    with pytest.raises(DomainError):
        eng.approximate(target, -0.1, eng.EngineLimits(
            max_degree=8, fit_density=6.0, validation_density=12.0))


# -- lower-bound constraints -------------------------------------------------

def test_constant_five_keeps_margin():
    grid = ONE
    domain = fam.constant_family(grid, g.disk_k(2), wide=True, runge=True)
    target = eng.PiecewiseTarget(grid, [
        eng.TargetPiece(domain, lambda b, zs: np.full(zs.shape, 5.0 + 0j))])
    family, report = eng.approximate_with_lower_bounds(
        target, [(domain, 4.0)], 0.5,
        eng.EngineLimits(max_degree=16, fit_density=6.0, validation_density=12.0))
    fr = report.fibers[0]
    assert fr.margins["lb0"] >= 0.5
    assert fr.delta == pytest.approx(0.5)
    assert np.abs(family.eval(0.0, np.array([0.5 + 0.5j])) - 5.0).max() < 1e-10


def test_identity_with_point_constraint():
    grid = ONE
    domain = fam.constant_family(grid, g.disk_k(1), wide=True, runge=True)
    pin = fam.constant_family(grid, g.points(1, (0.0,)), wide=True)
    target = eng.PiecewiseTarget(grid, [eng.TargetPiece(domain, lambda b, zs: zs)])
    family, report = eng.approximate_with_lower_bounds(
        target, [(pin, 0.5, "anchor")], 0.1,
        eng.EngineLimits(max_degree=16, fit_density=6.0, validation_density=12.0))
    fr = report.fibers[0]
    assert fr.margins["anchor"] == pytest.approx(0.5, abs=1e-9)
    # delta shrank below the requested tolerance to protect the bound
    assert fr.delta <= 0.45 + 1e-12


def test_precondition_failure_names_constraint():
    grid = ONE
    domain = fam.constant_family(grid, g.disk_k(1), wide=True)
    target = eng.PiecewiseTarget(grid, [eng.TargetPiece(domain, lambda b, zs: zs)])
    with pytest.raises(PreconditionError) as exc:
        eng.approximate_with_lower_bounds(
            target, [(domain, 2.0, "wall")], 0.1,
            eng.EngineLimits(max_degree=8, fit_density=6.0, validation_density=12.0))
    assert exc.value.label == "wall"
    assert exc.value.b == 0.0
    assert exc.value.value is not None and exc.value.value <= 0.0


def test_constraint_outside_target_domain():
    grid = ONE
    domain = fam.constant_family(grid, g.disk_k(1), wide=True)
    beyond = fam.constant_family(grid, g.disk_k(2), wide=True)
    target = eng.PiecewiseTarget(grid, [
        eng.TargetPiece(domain, lambda b, zs: np.full(zs.shape, 5.0 + 0j))])
    with pytest.raises(PreconditionError):
        eng.approximate_with_lower_bounds(
            target, [(beyond, 1.0)], 0.1,
            eng.EngineLimits(max_degree=8, fit_density=6.0, validation_density=12.0))


def test_empty_constraint_fiber_is_vacuous():
    grid = ONE
    domain = fam.constant_family(grid, g.disk_k(1), wide=True)
    hole = fam.constant_family(grid, g.empty())
    target = eng.PiecewiseTarget(grid, [
        eng.TargetPiece(domain, lambda b, zs: np.full(zs.shape, 5.0 + 0j))])
    family, report = eng.approximate_with_lower_bounds(
        target, [(hole, 100.0)], 0.5,
        eng.EngineLimits(max_degree=8, fit_density=6.0, validation_density=12.0))
    assert report.fibers[0].margins == {}


def test_per_parameter_fits_are_independent():
    grid = fam.grid_of([0.0, 1.0])
    domain = fam.constant_family(grid, g.disk_k(1), wide=True)
    target = eng.PiecewiseTarget(grid, [
        eng.TargetPiece(domain, lambda b, zs: np.full(zs.shape, 2.0 + b + 0j))])
    family, report = eng.approximate(target, 1e-10, eng.EngineLimits(
        max_degree=8, fit_density=6.0, validation_density=12.0))
    assert family.eval(0.0, np.array([0j]))[0] == pytest.approx(2.0)
    assert family.eval(1.0, np.array([0j]))[0] == pytest.approx(3.0)
    assert len(report.fibers) == 2
