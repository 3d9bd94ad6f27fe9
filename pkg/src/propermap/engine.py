"""Constrained polynomial approximation on compact families.

The fit works in the scaled variable w = z/R (R = outer radius of the sample
cloud) with an orthonormal graded basis built by Arnoldi iteration on the
weighted sample inner product.  Because the basis is orthonormal, the degree-d
least-squares solution is a truncation of one coefficient vector, so a whole
degree-escalation schedule costs a single basis pass.

Every accepted fit is certified against the monomial-coefficient form that
gets serialized, not against internal basis vectors: the sup error reported is
the sup error of the exact object a later verification run will re-evaluate.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import geometry
from .errors import (
    ConfigError,
    DomainError,
    GridMismatchError,
    InsufficientSamplesError,
    NoConvergence,
    PostCheckFailed,
    PreconditionError,
    RankDeficiencyError,
    TargetMismatchError,
)
from .families import CompactFamily, ParamGrid

# Least-squares sample support required per basis column.
SAMPLES_PER_DEGREE = 3

# Curve pieces are one-dimensional and would otherwise be drowned out by area
# samples; they carry the hard endpoint data, so they get extra weight.
CURVE_WEIGHT = 4.0

OVERLAP_TOL = 1e-9

# Dual-ascent step for one-sided floor enforcement, as a fraction of the
# leverage-preconditioned shortfall.  Below ~0.5 the multiplier build-up is
# monotone; much above it neighboring samples overshoot collectively.
LIFT_GAIN = 0.3

_BREAKDOWN_TOL = 1e-13


def polyval(coeffs, zs):
    """Evaluate an ascending coefficient vector at complex points."""
    return npoly.polyval(np.asarray(zs, dtype=complex), np.asarray(coeffs, dtype=complex))


@dataclass
class EngineLimits:
    max_degree: int = 400
    fit_density: float = 12.0
    validation_density: float = 24.0
    schedule_start: int = 8
    threads: int = 1
    lift_iterations: int = 16

    def __post_init__(self):
        if self.max_degree < 1:
            raise ConfigError(f"max_degree must be >= 1, got {self.max_degree!r}")
        if self.lift_iterations < 1:
            raise ConfigError("lift_iterations must be >= 1")
        if self.fit_density <= 0 or self.validation_density <= 0:
            raise ConfigError("densities must be positive")
        if self.validation_density < 2.0 * self.fit_density:
            raise ConfigError(
                f"validation density {self.validation_density!r} must be at least "
                f"twice the fit density {self.fit_density!r}"
            )
        if self.schedule_start < 1:
            raise ConfigError("schedule_start must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


class ArnoldiBasis:
    """Orthonormal graded polynomial basis over weighted sample nodes.

    Columns of Q hold basis values at the nodes; the upper-triangular matrix
    P holds monomial coefficients of each basis polynomial in w = z/scale.
    """

    def __init__(self, nodes, weights=None, scale: float | None = None):
        z = np.asarray(nodes, dtype=complex).ravel()
        if z.size < SAMPLES_PER_DEGREE:
            raise InsufficientSamplesError(f"need at least {SAMPLES_PER_DEGREE} samples")
        w = np.ones(z.size) if weights is None else np.asarray(weights, dtype=float).ravel()
        if w.shape != z.shape or np.any(w <= 0):
            raise DomainError("weights must be positive and match the nodes")
        self.nodes = z
        self.weights = w / w.sum()
        self.scale = float(scale) if scale is not None else max(1.0, float(np.abs(z).max()))
        self._wvar = z / self.scale
        m = z.size
        q0 = np.ones(m, dtype=complex)
        n0 = np.sqrt(np.real(np.vdot(q0 * self.weights, q0)))
        self.Q = (q0 / n0).reshape(m, 1)
        self.P = np.array([[1.0 / n0]], dtype=complex)
        self._q0 = 1.0 / n0
        # recurrence data (projection coefficients and normalizer per step);
        # replaying it at new points evaluates the basis without ever forming
        # monomial coefficients, which stops being faithful at high degree
        self._rec: list[tuple[np.ndarray, float]] = []

    @property
    def degree(self) -> int:
        return self.Q.shape[1] - 1

    def max_supported_degree(self) -> int:
        return self.nodes.size // SAMPLES_PER_DEGREE - 1

    def extend_to(self, degree: int) -> None:
        if degree <= self.degree:
            return
        if self.nodes.size < SAMPLES_PER_DEGREE * (degree + 1):
            raise InsufficientSamplesError(
                f"{self.nodes.size} samples cannot support degree {degree} "
                f"(need {SAMPLES_PER_DEGREE * (degree + 1)})"
            )
        m = self.nodes.size
        old = self.degree + 1
        Q = np.empty((m, degree + 1), dtype=complex)
        Q[:, :old] = self.Q
        P = np.zeros((degree + 1, degree + 1), dtype=complex)
        P[:old, :old] = self.P
        wts = self.weights
        for k in range(old - 1, degree):
            v = self._wvar * Q[:, k]
            # classical Gram-Schmidt with one reorthogonalization pass
            h = Q[:, :k + 1].conj().T @ (wts * v)
            v = v - Q[:, :k + 1] @ h
            h2 = Q[:, :k + 1].conj().T @ (wts * v)
            v = v - Q[:, :k + 1] @ h2
            h = h + h2
            beta = float(np.sqrt(np.real(np.vdot(v * wts, v))))
            if beta <= _BREAKDOWN_TOL:
                raise RankDeficiencyError(
                    f"basis breakdown at degree {k + 1}: samples lie on a "
                    f"degree-{k} variety"
                )
            Q[:, k + 1] = v / beta
            self._rec.append((h, beta))
            pcol = np.zeros(degree + 1, dtype=complex)
            pcol[1:k + 2] = P[:k + 1, k]          # multiply by w shifts powers
            pcol[:degree + 1] -= P[:, :k + 1] @ h
            P[:, k + 1] = pcol / beta
        self.Q = Q
        self.P = P

    def eval_columns(self, zs, degree: int | None = None) -> np.ndarray:
        """Basis values at arbitrary points by replaying the recurrence.

        Exact in the polynomial sense at any degree the basis holds; the
        change-of-basis route through monomial coefficients is not, once the
        triangular factor grows past what doubles can cancel.
        """
        d = self.degree if degree is None else degree
        if d > self.degree:
            raise DomainError(f"basis holds degree {self.degree}, asked {d}")
        z = np.asarray(zs, dtype=complex).ravel()
        w = z / self.scale
        V = np.empty((z.size, d + 1), dtype=complex)
        V[:, 0] = self._q0
        for k in range(d):
            h, beta = self._rec[k]
            V[:, k + 1] = (w * V[:, k] - V[:, :k + 1] @ h) / beta
        return V

    def project(self, values) -> np.ndarray:
        """Weighted least-squares coefficients in the orthonormal basis."""
        f = np.asarray(values, dtype=complex).ravel()
        if f.shape != self.nodes.shape:
            raise DomainError("values must match the fit nodes")
        return self.Q.conj().T @ (self.weights * f)

    def monomial_coeffs(self, chat, degree: int | None = None) -> np.ndarray:
        """Ascending z-monomial coefficients of the degree-d truncation."""
        d = self.degree if degree is None else degree
        a = self.P[:d + 1, :d + 1] @ np.asarray(chat, dtype=complex)[:d + 1]
        return a / self.scale ** np.arange(d + 1)

    def condition(self) -> float:
        G = self.Q.conj().T @ (self.weights[:, None] * self.Q)
        return float(max(1.0, np.sqrt(np.linalg.cond(G))))


def fit_basis(samples, degree: int, weights=None) -> ArnoldiBasis:
    """Orthonormal basis up to the given degree over the sample nodes."""
    basis = ArnoldiBasis(samples, weights)
    basis.extend_to(degree)
    return basis


# -- polynomial families -----------------------------------------------------

@dataclass(frozen=True)
class PolyFamily:
    grid: ParamGrid
    coeffs: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.grid.size:
            raise DomainError("one coefficient vector per grid label required")

    def eval(self, b: float, zs) -> np.ndarray:
        return self.eval_index(self.grid.index_of(b), zs)

    def eval_index(self, ib: int, zs) -> np.ndarray:
        return polyval(self.coeffs[ib], zs)

    def degree(self, b: float) -> int:
        return len(self.coeffs[self.grid.index_of(b)]) - 1


@dataclass(frozen=True)
class BasisFamily:
    """Polynomial family kept in its orthonormal fit basis.

    Evaluation replays the basis recurrence, so it stays faithful at degrees
    where the monomial form does not.  Intermediates that never leave the
    process (extensions consumed by the next stage) live here; anything
    serialized still goes through coefficient lists.
    """
    grid: ParamGrid
    fibers: tuple[tuple[ArnoldiBasis, np.ndarray], ...]

    def __post_init__(self):
        if len(self.fibers) != self.grid.size:
            raise DomainError("one (basis, coefficients) pair per grid label required")

    def eval(self, b: float, zs) -> np.ndarray:
        return self.eval_index(self.grid.index_of(b), zs)

    def eval_index(self, ib: int, zs) -> np.ndarray:
        basis, chat = self.fibers[ib]
        shape = np.asarray(zs).shape
        out = basis.eval_columns(zs, len(chat) - 1) @ chat
        return out.reshape(shape)

    def degree(self, b: float) -> int:
        return len(self.fibers[self.grid.index_of(b)][1]) - 1


def constant_poly(grid: ParamGrid, values) -> PolyFamily:
    """Degree-zero family; values is a scalar or one scalar per grid label."""
    arr = np.asarray(values, dtype=complex).ravel()
    if arr.size == 1:
        arr = np.repeat(arr, grid.size)
    if arr.size != grid.size:
        raise DomainError("constant family needs one value per label")
    return PolyFamily(grid, tuple(np.array([v]) for v in arr))


# -- piecewise targets -------------------------------------------------------

@dataclass
class TargetPiece:
    family: CompactFamily
    evaluate: object                     # (b, zs) -> complex array
    kind: str = "area"                   # "area" | "curve"
    weight: float | None = None
    label: str = ""
    certify: bool = True                 # guidance pieces set False: they steer
                                         # the fit but stay out of the sup check
    lift_floor: object = None            # one-sided piece: ask only Re >= floor
                                         # here, leaving Im free to relax; a
                                         # float or a (b, zs) -> levels callable
    free_imag: bool = False              # two-sided on Re only: the imaginary
                                         # part refreshes from the fit itself,
                                         # so a prescribed Re profile never
                                         # carries a conjugate it contradicts
    density_mult: float = 1.0

    def __post_init__(self):
        if self.kind not in ("area", "curve"):
            raise DomainError(f"piece kind must be area or curve, got {self.kind!r}")
        if self.lift_floor is not None and self.certify:
            raise DomainError("a lifted piece cannot be certified: its data is "
                              "clamped, not the target")
        if self.free_imag and self.certify:
            raise DomainError("a free-imag piece cannot be certified: its "
                              "imaginary data is the fit's own")
        if self.free_imag and self.lift_floor is not None:
            raise DomainError("free_imag is redundant on a lifted piece")
        if self.density_mult <= 0:
            raise DomainError("density_mult must be positive")

    def lift_levels(self, b: float, zs) -> np.ndarray:
        z = np.asarray(zs, dtype=complex).ravel()
        if callable(self.lift_floor):
            lv = np.asarray(self.lift_floor(b, z), dtype=float).ravel()
            if lv.shape != z.shape:
                raise DomainError("lift_floor callable must return one level per point")
            return lv
        return np.full(z.shape, float(self.lift_floor))

    @property
    def fit_weight(self) -> float:
        if self.weight is not None:
            return self.weight
        return CURVE_WEIGHT if self.kind == "curve" else 1.0

    @property
    def sample_mode(self) -> str:
        return "curve" if self.kind == "curve" else "auto"

    def target_values(self, b: float, zs) -> np.ndarray:
        """Piece data at zs; lifted pieces clamp the real part up to the floor."""
        v = np.asarray(self.evaluate(b, zs), dtype=complex)
        if self.lift_floor is not None:
            v = np.maximum(np.real(v), self.lift_levels(b, zs)) + 1j * np.imag(v)
        return v


@dataclass
class PiecewiseTarget:
    grid: ParamGrid
    pieces: list[TargetPiece]

    def __post_init__(self):
        if not self.pieces:
            raise DomainError("target needs at least one piece")
        for p in self.pieces:
            if p.family.grid.labels != self.grid.labels:
                raise GridMismatchError("target piece lives on a different grid")


def target_eval(target: PiecewiseTarget, b: float, zs) -> np.ndarray:
    """Evaluate the target at arbitrary points via the first covering piece."""
    z = np.asarray(zs, dtype=complex).ravel()
    out = np.full(z.shape, np.nan + 0j)
    todo = np.ones(z.shape, dtype=bool)
    for piece in target.pieces:
        fib = piece.family.fiber(b)
        if fib.is_empty or not todo.any():
            continue
        hit = todo & geometry.contains_many(fib, z)
        if hit.any():
            out[hit] = piece.target_values(b, z[hit])
            todo &= ~hit
    if todo.any():
        k = int(np.argmax(todo))
        raise DomainError(
            f"point {z[k]!r} lies outside every target piece at b={b!r}", b=b
        )
    return out


def _certified_cover(target: PiecewiseTarget, b: float, zs
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Mask of points covered by certified pieces, with those pieces' values."""
    z = np.asarray(zs, dtype=complex).ravel()
    out = np.zeros(z.shape, dtype=complex)
    todo = np.ones(z.shape, dtype=bool)
    for piece in target.pieces:
        if not piece.certify:
            continue
        fib = piece.family.fiber(b)
        if fib.is_empty or not todo.any():
            continue
        hit = todo & geometry.contains_many(fib, z)
        if hit.any():
            out[hit] = np.asarray(piece.evaluate(b, z[hit]), dtype=complex)
            todo &= ~hit
    return ~todo, out


def check_overlap_consistency(target: PiecewiseTarget, density: float,
                              tol: float = OVERLAP_TOL) -> None:
    """Pieces that overlap must agree there; otherwise the target is ill-posed.

    Only certified two-sided pieces are held to this: one-sided (lifted)
    pieces disagree with unclamped data below their floor on purpose, and
    uncertified pieces are steering scaffolds whose seams the declared piece
    order already resolves.
    """
    for b in target.grid.labels:
        for i, pi in enumerate(target.pieces):
            if pi.lift_floor is not None or not pi.certify:
                continue
            fib_i = pi.family.fiber(b)
            if fib_i.is_empty:
                continue
            pts = geometry.sample(fib_i, density, pi.sample_mode)
            vi = None
            for j, pj in enumerate(target.pieces):
                if j == i or pj.lift_floor is not None or not pj.certify:
                    continue
                fib_j = pj.family.fiber(b)
                if fib_j.is_empty:
                    continue
                shared = geometry.contains_many(fib_j, pts)
                if not shared.any():
                    continue
                if vi is None:
                    vi = np.asarray(pi.evaluate(b, pts), dtype=complex)
                vj = np.asarray(pj.evaluate(b, pts[shared]), dtype=complex)
                gap = float(np.abs(vi[shared] - vj).max())
                if gap > tol:
                    raise TargetMismatchError(
                        f"pieces {i} and {j} disagree by {gap:.3g} on their "
                        f"overlap at b={b!r}"
                    )


# -- reports -----------------------------------------------------------------

@dataclass
class DegreePoint:
    degree: int
    sup_error: float


@dataclass
class FiberReport:
    b: float
    accepted_degree: int
    sup_error: float
    fit_residual: float
    condition: float
    fit_count: int
    val_count: int
    tol: float
    schedule: list[DegreePoint] = field(default_factory=list)
    margins: dict[str, float] = field(default_factory=dict)
    delta: float | None = None

    def to_dict(self) -> dict:
        return {
            "b": self.b,
            "accepted_degree": self.accepted_degree,
            "sup_error": self.sup_error,
            "fit_residual": self.fit_residual,
            "condition": self.condition,
            "fit_count": self.fit_count,
            "val_count": self.val_count,
            "tol": self.tol,
            "schedule": [[p.degree, p.sup_error] for p in self.schedule],
            "margins": dict(self.margins),
            "delta": self.delta,
        }


@dataclass
class ApproxReport:
    fit_density: float
    validation_density: float
    fibers: list[FiberReport] = field(default_factory=list)

    def fiber(self, b: float) -> FiberReport:
        for fr in self.fibers:
            if fr.b == b:
                return fr
        raise DomainError(f"no fiber report for b={b!r}", b=b)

    def to_dict(self) -> dict:
        return {
            "fit_density": self.fit_density,
            "validation_density": self.validation_density,
            "fibers": [fr.to_dict() for fr in self.fibers],
        }


# -- unconstrained approximation ---------------------------------------------

def _degree_schedule(start: int, cap: int) -> list[int]:
    if cap < 1:
        raise InsufficientSamplesError("not enough samples for any fit degree")
    d = min(start, cap)
    out = [d]
    while out[-1] < cap:
        out.append(min(2 * out[-1], cap))
    return out


def _assemble(target: PiecewiseTarget, b: float, density: float, with_weights: bool,
              certified_only: bool = False):
    nodes, weights, values, lifts, clamps = [], [], [], [], []
    count = 0
    for piece in target.pieces:
        if certified_only and not piece.certify:
            continue
        fib = piece.family.fiber(b)
        if fib.is_empty:
            continue
        pts = geometry.sample(fib, density * piece.density_mult, piece.sample_mode)
        if pts.size == 0:
            continue
        nodes.append(pts)
        vals = piece.target_values(b, pts)
        values.append(vals)
        if piece.lift_floor is not None:
            lifts.append((slice(count, count + pts.size), piece.lift_levels(b, pts)))
        elif piece.free_imag:
            clamps.append((slice(count, count + pts.size), np.real(vals)))
        count += pts.size
        if with_weights:
            weights.append(np.full(pts.size, piece.fit_weight))
    if not nodes:
        what = "certified piece" if certified_only else "sampleable piece"
        raise DomainError(f"target has no {what} at b={b!r}", b=b)
    z = np.concatenate(nodes)
    f = np.concatenate(values)
    w = np.concatenate(weights) if with_weights else None
    return z, w, f, lifts, clamps


def _fit_fiber(target: PiecewiseTarget, b: float, tol_b: float,
               limits: EngineLimits,
               floors: list[tuple[np.ndarray, float, str]] | None = None,
               representation: str = "monomial",
               ) -> tuple[object, FiberReport]:
    """One fiber's fit.  Acceptance needs the certified sup error below tol_b
    and, when floors are given, a strictly positive margin on every floor at
    the same degree; otherwise the schedule keeps escalating.

    Errors and margins are judged in the fit basis itself, which is exact at
    every scheduled degree.  A fiber exported as monomial coefficients must
    additionally reproduce those basis values, or the degree is rejected: a
    coefficient list that cannot restate what was certified is no result.
    """
    fit_z, fit_w, fit_f, lifts, clamps = _assemble(target, b, limits.fit_density, True)
    val_z, _, val_f, _, _ = _assemble(target, b, limits.validation_density, False,
                                      certified_only=True)
    cap = min(limits.max_degree, fit_z.size // SAMPLES_PER_DEGREE - 1)
    schedule = _degree_schedule(limits.schedule_start, cap)
    basis = ArnoldiBasis(fit_z, fit_w)
    trace: list[DegreePoint] = []
    best = np.inf
    floor_block = ""
    coeffs = None
    accepted = -1
    margins: dict[str, float] = {}
    work = fit_f.copy() if (lifts or clamps) else fit_f
    for d in schedule:
        basis.extend_to(d)
        chat = basis.project(work)
        if lifts or clamps:
            # One-sided pieces: the data asks for Re >= floor and nothing
            # else.  A per-sample multiplier raises the ask while its point
            # sags and decays once clear, so floors are enforced without
            # loading the least-squares mass anywhere they are slack.  The
            # step divides by a Gershgorin bound on the span's influence
            # matrix row: neighboring samples inside one basis resolution
            # cell respond as a block, and the row sum is what keeps a
            # block-sized update from overshooting.  Multipliers restart at
            # each degree because the influence they were scaled against
            # changes with the basis.  Free-imag spans carry no multiplier:
            # their Re data stands as given and only the conjugate part is
            # rewritten from the current fit.
            lams, steps = [], []
            for span, _ in lifts:
                qs = basis.Q[span]
                infl = np.abs(qs @ (qs.conj() * basis.weights[span][:, None]).T)
                rowsum = np.maximum(infl.sum(axis=1), 1e-14)
                steps.append(LIFT_GAIN / rowsum)
                lams.append(np.zeros(qs.shape[0]))
            for _ in range(limits.lift_iterations - 1):
                fitted = basis.Q @ chat
                for (span, floor_level), lam, step in zip(lifts, lams, steps):
                    v = fitted[span]
                    re = np.real(v)
                    lam += step * (floor_level - re)
                    np.maximum(lam, 0.0, out=lam)
                    work[span] = (np.maximum(re, floor_level) + lam
                                  + 1j * np.imag(v))
                for span, re_data in clamps:
                    work[span] = re_data + 1j * np.imag(fitted[span])
                chat = basis.project(work)
        cand = basis.monomial_coeffs(chat, d)
        err = float(np.abs(polyval(cand, val_z) - val_f).max())
        trace.append(DegreePoint(d, err))
        best = min(best, err)
        if err >= tol_b:
            continue
        cand_margins = {}
        for pts, level, lab in floors or ():
            cand_margins[lab] = float(np.real(polyval(cand, pts)).min() - level)
        bad = [lab for lab, m in cand_margins.items() if m <= 0.0]
        if bad:
            floor_block = (f"; floors {bad} not cleared at degree {d} "
                           f"(margins { {k: round(v, 6) for k, v in cand_margins.items()} })")
            continue
        coeffs, accepted, margins = cand, d, cand_margins
        break
    if coeffs is None:
        raise NoConvergence(b, best, cap,
                            [(p.degree, p.sup_error) for p in trace],
                            note=floor_block)
    resid_num = np.sqrt(np.sum(basis.weights * np.abs(polyval(coeffs, fit_z) - fit_f) ** 2))
    resid_den = max(1e-300, np.sqrt(np.sum(basis.weights * np.abs(fit_f) ** 2)))
    report = FiberReport(
        b=b, accepted_degree=accepted, sup_error=trace[-1].sup_error,
        fit_residual=float(resid_num / resid_den), condition=basis.condition(),
        fit_count=fit_z.size, val_count=val_z.size, tol=float(tol_b),
        schedule=trace, margins=margins,
    )
    return coeffs, report


def _per_b_tol(grid: ParamGrid, tol) -> np.ndarray:
    arr = np.asarray(tol, dtype=float).ravel()
    if arr.size == 1:
        arr = np.repeat(arr, grid.size)
    if arr.size != grid.size:
        raise DomainError("tolerance must be scalar or one value per label")
    if not np.all(arr > 0):
        raise DomainError("tolerances must be strictly positive")
    return arr


def approximate(target: PiecewiseTarget, tol, limits: EngineLimits | None = None,
                validate: bool = True,
                floors: list[list[tuple[np.ndarray, float, str]]] | None = None,
                ) -> tuple[PolyFamily, ApproxReport]:
    """Fit one polynomial per parameter to tolerance tol on validation grids.

    floors, when given, holds one list of (points, level, label) per parameter;
    the fit at that parameter is only accepted once Re > level on every point
    set.  Raises NoConvergence for the first parameter whose schedule exhausts.
    """
    limits = limits or EngineLimits()
    tols = _per_b_tol(target.grid, tol)
    if floors is not None and len(floors) != target.grid.size:
        raise DomainError("floors must hold one entry per grid label")
    if validate:
        check_overlap_consistency(target, max(2.0, limits.fit_density / 4.0))
    labels = target.grid.labels
    results: list[tuple[np.ndarray, FiberReport] | None] = [None] * len(labels)

    def work(i: int):
        return _fit_fiber(target, labels[i], tols[i], limits,
                          floors[i] if floors is not None else None)

    if limits.threads > 1 and len(labels) > 1:
        with ThreadPoolExecutor(max_workers=limits.threads) as pool:
            for i, res in enumerate(pool.map(work, range(len(labels)))):
                results[i] = res
    else:
        for i in range(len(labels)):
            results[i] = work(i)

    fam = PolyFamily(target.grid, tuple(r[0] for r in results))
    report = ApproxReport(limits.fit_density, limits.validation_density,
                          [r[1] for r in results])
    return fam, report


# -- approximation with strict lower bounds ----------------------------------

def approximate_with_lower_bounds(target: PiecewiseTarget, constraints, tol,
                                  limits: EngineLimits | None = None,
                                  rho: float = 0.1,
                                  validate: bool = True) -> tuple[PolyFamily, ApproxReport]:
    """Approximate while keeping Re F > level on each constraint family.

    constraints is an iterable of (family, level) or (family, level, label).
    The target values must clear every bound with positive margin up front.
    Where constraint points fall inside certified pieces, the tolerance is
    additionally shrunk below (1 - rho) times the certified margin there, so
    closeness alone implies that part of the bound; elsewhere the bound is
    carried by the degree-acceptance test, which rejects any fit whose floor
    margins are not strictly positive.  Either way the returned family
    verifiably satisfies every bound on the constraint samples.
    """
    limits = limits or EngineLimits()
    if not 0.0 < rho < 1.0:
        raise DomainError(f"rho must lie in (0, 1), got {rho!r}")
    tols = _per_b_tol(target.grid, tol)
    norm: list[tuple[CompactFamily, float, str]] = []
    for idx, c in enumerate(constraints):
        famc, level = c[0], float(c[1])
        label = c[2] if len(c) > 2 else f"lb{idx}"
        if famc.grid.labels != target.grid.labels:
            raise GridMismatchError(f"constraint {label} lives on a different grid")
        norm.append((famc, level, label))

    labels = target.grid.labels
    floors: list[list[tuple[np.ndarray, float, str]]] = [[] for _ in labels]
    deltas = tols.copy()
    for ib, b in enumerate(labels):
        for ic, (famc, level, lab) in enumerate(norm):
            fib = famc.fibers[ib]
            if fib.is_empty:
                continue
            pts = geometry.sample(fib, limits.validation_density)
            floors[ib].append((pts, level, lab))
            try:
                vals = target_eval(target, b, pts)
            except DomainError as exc:
                raise PreconditionError(
                    f"constraint {lab} leaves the target domain at b={b!r}",
                    b=b, label=lab,
                ) from exc
            margin = float(np.real(vals).min() - level)
            if margin <= 0.0:
                raise PreconditionError(
                    f"target fails constraint {lab} at b={b!r}: margin {margin:.6g}",
                    b=b, label=lab, value=margin,
                )
            covered, cvals = _certified_cover(target, b, pts)
            if covered.any():
                cmargin = float(np.real(cvals[covered]).min() - level)
                if cmargin <= 0.0:
                    raise PreconditionError(
                        f"certified data fails constraint {lab} at b={b!r}: "
                        f"margin {cmargin:.6g}",
                        b=b, label=lab, value=cmargin,
                    )
                deltas[ib] = min(deltas[ib], (1.0 - rho) * cmargin)

    family, report = approximate(target, deltas, limits, validate=validate,
                                 floors=floors)

    for ib, b in enumerate(labels):
        fr = report.fibers[ib]
        fr.delta = float(deltas[ib])
        for pts, level, lab in floors[ib]:
            vals = family.eval_index(ib, pts)
            post = float(np.real(vals).min() - level)
            fr.margins[lab] = post
            if post <= 0.0:
                raise PostCheckFailed(
                    f"fitted polynomial violates {lab} at b={b!r}: margin {post:.6g}",
                    b=b, label=lab, margin=post,
                )
    return family, report
