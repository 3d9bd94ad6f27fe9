"""The inductive construction of the proper-map approximant pair.

Each step widens the certified zone by one annulus.  Part 1 extends the
current pair along radial slits and re-approximates; the collar scan then
chooses how thin the next angular subdivision must be to quarantine every
observed real-part violation; part 3 pushes the pair across the annulus with
the quarantined collar-and-pad geometry as hard lower-bound constraints.

Budgets: a step into zone n+1 spends half its convergence budget in part 1
and half in part 3, so consecutive pairs differ by less than
budget_scale * 2^-n on the previous zone.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import engine, families, geometry
from .config import RunConfig
from .engine import EngineLimits, PiecewiseTarget, PolyFamily, TargetPiece
from .errors import (
    CertificateError,
    CollarError,
    ConfigError,
    PropermapError,
    StepRejected,
)
from .families import CompactFamily, ParamGrid

TOOL_NAME = "propermap"
TOOL_VERSION = "0.1.0"

# Certificate grids deliberately use a density off the fit/validation lattice.
CERT_DENSITY_MULT = 1.31

# Collar widths below this are a geometry bug, not a thin margin.
MIN_COLLAR = 1e-12

# Target shaping shared by both fit stages.  The certified disk carries most
# of the least-squares mass; one-sided steering pieces get just enough weight
# to seed their multipliers, and clamp levels sit a little above each floor
# so the margin survives refitting and fresh validation samples.
ZONE_WEIGHT = 2.0
STEER_WEIGHT = 0.1
# Curve data at the fit lattice undersamples high degrees; thin pieces whose
# clamp must survive validation are sampled denser by this factor.
CURVE_DENSITY_MULT = 4.0

# Slit-extension stage.
FRAME_WEIGHT = 0.05
PIN_LIFT = 0.2
PIN_CLIMB_DEPTH = 0.3
# The frame clamp grades from just under the inherited base margin up to this
# level over this much radial depth: a full-height clamp at the disk join
# would contradict the certified data there, and the inherited arc floor
# only guarantees a thin margin at the base.
SLIT_LIFT_TOP = 0.1
SLIT_GRADE_DEPTH = 0.3
SLIT_BASE_FRACTION = 0.8

# Annulus-correction stage.
BAND_WEIGHT = 0.3
# The accepted polynomial is the next step's base, and beyond its own annulus
# it swings by the power of its degree, so every stage must accept at the
# lowest degree that clears its floors; steering data beyond the step's own
# annulus only escalates the accepted degree and is disabled.
TAIL_WEIGHT = 0.0
# The sector anchor stops short of the outer rim by this depth.  The annulus
# mean-value identity forces lifted boundary mass back onto the disk unless
# the real part may dip somewhere off the floors; this gap is that outlet.
FREE_CHANNEL_DEPTH = 0.25
PAD_BASE = 0.1
W_LIFT = 0.1
ARC_LIFT = 0.2

# Multiplier sweeps per fitted degree.  The slit stage converges slowly along
# the one-dimensional rays and profits from long ascent; the correction stage
# must keep the lift mass small enough to accept at the lowest feasible
# degree, so it runs short.
SLIT_LIFT_ITERS = 64
CORRECTION_LIFT_ITERS = 16

INITIAL_ANGLES = (0.0, math.pi, geometry.TAU)


def step_budget(n: int, scale: float) -> float:
    """Convergence allowance |F_n - F_{n-1}| on the zone n-1 disk."""
    return scale * 2.0 ** (-(n - 1))


@dataclass
class StepRecord:
    n: int
    angles: tuple[tuple[float, ...], ...]     # one angle array per parameter
    polys: tuple[PolyFamily, PolyFamily]
    delta: np.ndarray | None                  # collar width that produced these angles


@dataclass
class InductionState:
    config: RunConfig
    grid: ParamGrid
    steps: list[StepRecord]
    certificates: list[dict]
    engine_log: list[dict] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.steps[-1].n

    @property
    def current(self) -> StepRecord:
        return self.steps[-1]

    def record(self, n: int) -> StepRecord:
        for rec in self.steps:
            if rec.n == n:
                return rec
        raise CertificateError(f"no record for step n={n}")


def _limits(config: RunConfig, threads: int | None = None) -> EngineLimits:
    if threads is None:
        raw = os.environ.get("PROPERMAP_THREADS", "")
        try:
            threads = max(1, int(raw)) if raw else 1
        except ValueError:
            raise ConfigError(f"PROPERMAP_THREADS must be an integer, got {raw!r}")
    return EngineLimits(
        max_degree=config.max_degree,
        fit_density=config.fit_density,
        validation_density=config.validation_density,
        threads=threads,
    )


# -- certificate measurement -------------------------------------------------

def measure_step(grid: ParamGrid, prev: tuple[PolyFamily, PolyFamily] | None,
                 polys: tuple[PolyFamily, PolyFamily], n: int,
                 angles: tuple[tuple[float, ...], ...], density: float) -> list[dict]:
    """Raw certificate quantities for the pair at zone n on the given grids.

    Deterministic in all arguments; verification replays it bit for bit.
    """
    rows = []
    ring = geometry.annulus(n)
    ring_pts = geometry.sample(ring, density)
    prev_pts = geometry.sample(geometry.disk_k(n - 1), density) if n >= 2 else None
    for ib, b in enumerate(grid.labels):
        ang = angles[ib]
        re1 = np.real(polys[0].eval_index(ib, ring_pts))
        re2 = np.real(polys[1].eval_index(ib, ring_pts))
        annulus_min = float(np.maximum(re1, re2).min())
        arc_min = []
        for comp, maker in ((0, geometry.odd_union), (1, geometry.even_union)):
            arcs = maker(geometry.ARC, n, ang)
            pts = geometry.sample(arcs, density)
            arc_min.append(float(np.real(polys[comp].eval_index(ib, pts)).min()))
        conv = None
        if prev is not None and prev_pts is not None:
            conv = [
                float(np.abs(polys[i].eval_index(ib, prev_pts)
                             - prev[i].eval_index(ib, prev_pts)).max())
                for i in (0, 1)
            ]
        rows.append({"b": b, "annulus_min": annulus_min,
                     "arc_min": arc_min, "conv_sup": conv})
    return rows


def _certify(rows: list[dict], n: int, budget: float | None) -> list[str]:
    """Return the list of threshold violations (empty means the step stands)."""
    bad = []
    for row in rows:
        if not row["annulus_min"] > n - 1:
            bad.append(f"b={row['b']}: annulus floor {row['annulus_min']:.6g} <= {n - 1}")
        for i, v in enumerate(row["arc_min"]):
            if not v > n:
                bad.append(f"b={row['b']}: component {i + 1} arc minimum {v:.6g} <= {n}")
        if budget is not None and row["conv_sup"] is not None:
            for i, v in enumerate(row["conv_sup"]):
                if not v < budget:
                    bad.append(
                        f"b={row['b']}: component {i + 1} drift {v:.6g} >= budget {budget:.6g}"
                    )
    return bad


# -- initialization ----------------------------------------------------------

def init(config: RunConfig) -> InductionState:
    """Zone-1 state: both components constant at the seed, half-plane split."""
    grid = families.grid_of(config.param_grid)
    seeds = config.seeds
    polys = (engine.constant_poly(grid, seeds), engine.constant_poly(grid, seeds))
    angles = tuple(INITIAL_ANGLES for _ in grid.labels)
    density = config.validation_density * CERT_DENSITY_MULT
    rows = measure_step(grid, None, polys, 1, angles, density)
    bad = _certify(rows, 1, None)
    if bad:
        raise StepRejected(1, bad)
    cert = {"n": 1, "budget": None, "density": density, "rows": rows}
    return InductionState(config=config, grid=grid, steps=[
        StepRecord(n=1, angles=angles, polys=polys, delta=None)
    ], certificates=[cert])


# -- part 1: slit extension --------------------------------------------------

def extend_along_segments(state: InductionState, component: int) -> PiecewiseTarget:
    """Target that keeps F on the zone disk and steers a collar frame upward.

    Only the zone disk is certified and prescribed.  The component's own
    sectors get clamped one-sided data on a frame: a strip above the
    inherited arcs plus a strip along each bounding slit, all as wide as the
    refinement cap.  Width is the point.  A floor held on a thin set buys
    nothing, because the fit may dip arbitrarily close to either side of it
    and the collar scan then quarantines almost nothing; held on a cap-wide
    frame, every dip the scan can see sits at least a frame width inside the
    sector and the quarantine reaches the cap.  The clamp grades up from
    just under the inherited arc margin (the certified join leaves only a
    thin one) and climbs above n+1 where the slit strips meet the outer rim,
    which is the level the refined edge arcs inherit.  Everything off the
    disk leaves the imaginary part free: two-sided data out there
    over-determines the fit and drags the certified disk error with it.
    """
    if component not in (0, 1):
        raise ConfigError(f"component must be 0 or 1, got {component!r}")
    rec = state.current
    n, grid, cfg = rec.n, state.grid, state.config
    poly = rec.polys[component]
    pair_fn = geometry.odd_pairs if component == 0 else geometry.even_pairs
    own = geometry.odd_union if component == 0 else geometry.even_union

    base_lifts, widths = [], []
    for ib, b in enumerate(grid.labels):
        ang = rec.angles[ib]
        arc_pts = geometry.sample(own(geometry.ARC, n, ang), cfg.validation_density)
        floor = float(np.real(poly.eval_index(ib, arc_pts)).min())
        if not floor > n:
            raise CertificateError(
                f"inherited arc floor {floor:.6g} <= {n} at b={b!r}; "
                f"the zone-{n} certificate no longer holds"
            )
        base_lifts.append(min(SLIT_LIFT_TOP, SLIT_BASE_FRACTION * (floor - n)))
        widths.append(cfg.delta_cap_fraction * geometry.max_refinement_width(ang))

    disk_fam = families.constant_family(grid, geometry.disk_k(n), wide=True, runge=True)

    def frame_region(ib):
        w = widths[ib]
        return geometry.union_of(
            [geometry.wblock(n, w, a, b_hi) for a, b_hi in pair_fn(rec.angles[ib])])

    frame_fam = families.family_from(
        grid, lambda b: frame_region(grid.index_of(b)), wide=True)

    def on_disk(b, zs):
        return poly.eval(b, zs)

    def frame_data(b, zs):
        z = np.asarray(zs, dtype=complex).ravel()
        r = np.abs(z)
        base = poly.eval(b, n * z / np.maximum(r, 1e-9))
        t = np.clip(r - n, 0.0, 1.0)
        return (1.0 - t) * np.real(base) + t * (n + 2.0) + 1j * np.imag(base)

    def frame_levels(b, zs):
        lo = base_lifts[grid.index_of(b)]
        r = np.abs(np.asarray(zs, dtype=complex).ravel())
        t = np.clip((r - n) / SLIT_GRADE_DEPTH, 0.0, 1.0)
        lev = lo + (SLIT_LIFT_TOP - lo) * t
        c = np.clip((r - (n + 1.0 - PIN_CLIMB_DEPTH)) / PIN_CLIMB_DEPTH, 0.0, 1.0)
        return n + lev + (1.0 + PIN_LIFT - lev) * c

    pieces = [
        TargetPiece(disk_fam, on_disk, kind="area", weight=ZONE_WEIGHT,
                    label="zone_disk"),
        TargetPiece(frame_fam, frame_data, kind="area", weight=FRAME_WEIGHT,
                    label="collar_frame", certify=False,
                    lift_floor=frame_levels, density_mult=CURVE_DENSITY_MULT),
    ]
    return PiecewiseTarget(grid, pieces)


def part1_approximate(state: InductionState, targets, limits: EngineLimits | None = None):
    """Fit both components to their slit extensions with boundary floors kept.

    Constraints per component: Re > n on the slits and that component's arcs,
    Re > n+1 at the outer slit endpoints.  Spends half the step budget.
    """
    rec = state.current
    n, grid = rec.n, state.grid
    cfg = state.config
    limits = limits or _limits(cfg)
    tol = step_budget(n + 1, cfg.budget_scale) / 2.0

    slit_fam = families.family_from(
        grid, lambda b: geometry.gamma(n, rec.angles[grid.index_of(b)][:-1]), wide=True)
    pins = families.family_from(
        grid, lambda b: geometry.points(n + 1, rec.angles[grid.index_of(b)][:-1]),
        wide=True)

    out, reports = [], []
    for comp, maker in ((0, geometry.odd_union), (1, geometry.even_union)):
        arcs = families.family_from(
            grid, lambda b: maker(geometry.ARC, n, rec.angles[grid.index_of(b)]),
            wide=True)
        constraints = [
            (families.union(slit_fam, arcs), float(n), "slit_arc_floor"),
            (pins, float(n + 1), "outer_pins"),
        ]
        famc, rep = engine.approximate_with_lower_bounds(
            targets[comp], constraints, tol,
            replace(limits, lift_iterations=SLIT_LIFT_ITERS),
            rho=cfg.minorant_rho)
        out.append(famc)
        reports.append(rep)
    return tuple(out), tuple(reports)


# -- part 2: collar scan -----------------------------------------------------

def compute_collar_delta(state: InductionState, extended) -> tuple[np.ndarray, tuple, list[dict]]:
    """Collar width per parameter from the violation scan, plus refined angles.

    For each sector of a component's own parity the scan collects every grid
    point where that component's real part fails the sector floor (interior
    test against n, outer closing arc against n+1), always augmented by the
    outer midpoint so the margin never degenerates.  The collar is the
    minorant of the worst margin, capped strictly below a third of the
    smallest gap.
    """
    rec = state.current
    n, grid, cfg = rec.n, state.grid, state.config
    density = cfg.validation_density
    deltas = np.empty(grid.size)
    refined = []
    diag = []
    for ib, b in enumerate(grid.labels):
        ang = rec.angles[ib]
        worst = math.inf
        counts = [0, 0]
        for comp, pair_fn in ((0, geometry.odd_pairs), (1, geometry.even_pairs)):
            for a, b_hi in pair_fn(ang):
                sec_pts = geometry.sample(geometry.sector(n, a, b_hi), density)
                arc_pts = geometry.sample(geometry.arc(n + 1, a, b_hi), density)
                if sec_pts.size == 0 or arc_pts.size == 0:
                    raise CollarError(f"empty sector scan at b={b!r}")
                re_sec = np.real(extended[comp].eval_index(ib, sec_pts))
                re_arc = np.real(extended[comp].eval_index(ib, arc_pts))
                viol = np.concatenate([
                    sec_pts[re_sec <= n],
                    arc_pts[re_arc <= n + 1],
                    [(n + 1) * np.exp(0.5j * (a + b_hi))],
                ])
                counts[comp] += viol.size - 1
                rel = np.mod(np.angle(viol) - a, geometry.TAU)
                margins = np.minimum(np.abs(viol) - n,
                                     np.minimum(rel, (b_hi - a) - rel))
                m = float(margins.min())
                if m <= 0.0:
                    raise CollarError(
                        f"violation margin {m:.3g} at b={b!r}, component {comp + 1}, "
                        f"sector ({a:.4g}, {b_hi:.4g}): a floor failure touches the "
                        f"sector edge"
                    )
                worst = min(worst, m)
        cap = cfg.delta_cap_fraction * geometry.max_refinement_width(ang)
        delta = min((1.0 - cfg.minorant_rho) * worst, cap)
        if not delta > MIN_COLLAR:
            raise CollarError(f"collar width collapsed to {delta:.3g} at b={b!r}")
        deltas[ib] = delta
        refined.append(geometry.refine_angles(ang, delta))
        diag.append({"b": b, "delta": delta, "cap": cap, "worst_margin": worst,
                     "violations": counts})
    return deltas, tuple(refined), diag


# -- part 3: annulus correction ----------------------------------------------

def part3_correct(state: InductionState, extended, deltas: np.ndarray,
                  refined, limits: EngineLimits | None = None):
    """Push each component across the annulus, pinned above n off its core.

    The target keeps the part-1 extension on the zone disk; that is the only
    certified piece and all the budget ledger consumes.  Every annulus duty is
    a one-sided requirement, and uniform closeness to any prescribed field
    across the collar channels is exactly what a fixed-degree fit cannot do,
    so the annulus pieces steer instead: clamped data on the opposite pads,
    the component's own collar, and the refined outer arcs asks for Re at or
    above each floor while leaving the imaginary part free, and an anchor on
    the component's own sectors holds a rising Re profile, again with the
    conjugate left to the fit, so the data-free middle cannot grow poles.  No
    piece prescribes both parts off the zone disk: a profile invented
    pointwise carries a conjugate no polynomial can follow, and its misfit
    would bleed into the certified rim.  The extension itself is only
    consulted on sets its own fit pinned down, the zone disk and the collar
    frames.  The anchor also stops short of the rim: the lifted boundary
    mass has to push the disk average up unless the real part can dive
    somewhere, and the rim gap between the floors is where it may.  What the
    construction relies on is then checked directly, not inferred: the
    collar-and-pad union must clear the floor n and the refined outer arcs
    the floor n+1 at every accepted degree.  Spends the other half of the
    step budget.
    """
    rec = state.current
    n, grid, cfg = rec.n, state.grid, state.config
    limits = limits or _limits(cfg)
    tol = step_budget(n + 1, cfg.budget_scale) / 2.0

    def per_b(fn):
        return families.family_from(grid, lambda b: fn(grid.index_of(b)), wide=True)

    out, reports = [], []
    for comp in (0, 1):
        own = geometry.odd_union if comp == 0 else geometry.even_union
        opp = geometry.even_union if comp == 0 else geometry.odd_union
        own_pairs = geometry.odd_pairs if comp == 0 else geometry.even_pairs

        zone = families.constant_family(grid, geometry.disk_k(n), wide=True,
                                        runge=True)
        band = per_b(lambda ib: own(geometry.ARC, n + 1, refined[ib]))
        pads = per_b(lambda ib: opp(geometry.LBLOCK, n, rec.angles[ib],
                                    delta=float(deltas[ib])))
        collar = per_b(lambda ib: own(geometry.WBLOCK, n, rec.angles[ib],
                                      delta=float(deltas[ib])))
        anchor = per_b(lambda ib: geometry.union_of(
            [geometry.band(n, n + 1.0 - FREE_CHANNEL_DEPTH, a, b_hi)
             for a, b_hi in own_pairs(rec.angles[ib])]))
        guard = per_b(lambda ib: geometry.union_of([
            own(geometry.WBLOCK, n, rec.angles[ib], delta=float(deltas[ib])),
            opp(geometry.LBLOCK, n, rec.angles[ib], delta=float(deltas[ib]))]))
        next_arcs = per_b(lambda ib: own(geometry.ARC, n + 1, refined[ib]))
        future_w = [cfg.delta_cap_fraction * geometry.max_refinement_width(refined[ib])
                    for ib in range(grid.size)]
        tail = per_b(lambda ib: geometry.union_of(
            [geometry.wblock(n + 1, future_w[ib], a, b_hi)
             for a, b_hi in own_pairs(refined[ib])]))  # next step's frames

        src = extended[comp]

        def on_src(b, zs, f=src):
            return f.eval(b, zs)

        # The extension is only trustworthy where its fit pinned it: the
        # certified disk, the densely sampled collar frames, and the floor-
        # checked inner arcs.  In the data-free middles a high-degree
        # extension may swing arbitrarily, so every piece that leaves the
        # controlled set takes synthetic data instead: the previous accepted
        # polynomial on the zone rim, blended radially to the rim level.
        def scaffold(b, zs, f=rec.polys[comp]):
            z = np.asarray(zs, dtype=complex).ravel()
            r = np.abs(z)
            ring = f.eval(b, n * z / np.maximum(r, 1e-9))
            t = np.clip(r - n, 0.0, 1.0)
            return (1.0 - t) * np.real(ring) + t * (n + 2.0) + 1j * np.imag(ring)

        base_lifts = []
        for ib, b in enumerate(grid.labels):
            arc_pts = geometry.sample(own(geometry.ARC, n, rec.angles[ib]),
                                      cfg.validation_density)
            floor = float(np.real(src.eval_index(ib, arc_pts)).min())
            if not floor > n:
                raise CertificateError(
                    f"extension arc floor {floor:.6g} <= {n} at b={b!r}")
            base_lifts.append(min(W_LIFT, SLIT_BASE_FRACTION * (floor - n)))

        # the pad clamp rises from just above the annulus floor at the pad's
        # inner edge to just above n+1 at the rim, so the wide refined arcs
        # along the pad tops carry their floor with real margin and the rim
        # band asks the same level where the two pieces overlap
        def pad_levels(b, zs):
            d = float(deltas[grid.index_of(b)])
            r = np.abs(np.asarray(zs, dtype=complex).ravel())
            t = np.clip((r - n - d) / max(1.0 - d, 1e-9), 0.0, 1.0)
            return (n + PAD_BASE) * (1.0 - t) + (n + 1.0 + ARC_LIFT) * t

        def collar_levels(b, zs):
            lo = base_lifts[grid.index_of(b)]
            r = np.abs(np.asarray(zs, dtype=complex).ravel())
            t = np.clip((r - n) / SLIT_GRADE_DEPTH, 0.0, 1.0)
            return n + lo + (W_LIFT - lo) * t

        pieces = [
            TargetPiece(zone, on_src, kind="area", weight=ZONE_WEIGHT,
                        label="zone_disk"),
            TargetPiece(band, scaffold, kind="curve", weight=BAND_WEIGHT,
                        label="outer_band", certify=False,
                        lift_floor=n + 1.0 + ARC_LIFT,
                        density_mult=CURVE_DENSITY_MULT),
            TargetPiece(pads, scaffold, kind="area", weight=STEER_WEIGHT,
                        label="pads", certify=False, lift_floor=pad_levels),
            TargetPiece(collar, on_src, kind="area", weight=STEER_WEIGHT,
                        label="collar", certify=False, lift_floor=collar_levels),
            TargetPiece(anchor, scaffold, kind="area", weight=STEER_WEIGHT,
                        label="sector_anchor", certify=False, free_imag=True),
        ]
        if TAIL_WEIGHT > 0.0:
            pieces.append(TargetPiece(
                tail, lambda b, zs: np.full(np.asarray(zs).shape, n + 2.0,
                                            dtype=complex),
                kind="area", weight=TAIL_WEIGHT, label="tail_leash",
                certify=False, lift_floor=n + 1.0,
                density_mult=CURVE_DENSITY_MULT))
        target = PiecewiseTarget(grid, pieces)
        constraints = [
            (guard, float(n), "annulus_floor"),
            (next_arcs, float(n + 1), "next_arcs"),
        ]
        famc, rep = engine.approximate_with_lower_bounds(
            target, constraints, tol,
            replace(limits, lift_iterations=CORRECTION_LIFT_ITERS),
            rho=cfg.minorant_rho)
        out.append(famc)
        reports.append(rep)
    return tuple(out), tuple(reports)


# -- the full step and the driver --------------------------------------------

def _summarize(reports) -> list[dict]:
    return [rep.to_dict() for rep in reports]


def advance(state: InductionState, limits: EngineLimits | None = None) -> InductionState:
    """One full induction step; returns the extended state or raises."""
    cfg = state.config
    limits = limits or _limits(cfg)
    rec = state.current
    n = rec.n

    targets = (extend_along_segments(state, 0), extend_along_segments(state, 1))
    extended, p1_reports = part1_approximate(state, targets, limits)
    deltas, refined, collar_diag = compute_collar_delta(state, extended)
    polys, p3_reports = part3_correct(state, extended, deltas, refined, limits)

    m = n + 1
    density = cfg.validation_density * CERT_DENSITY_MULT
    rows = measure_step(state.grid, rec.polys, polys, m, refined, density)
    budget = step_budget(m, cfg.budget_scale)
    for ib in range(state.grid.size):
        rows[ib]["delta"] = float(deltas[ib])
        rows[ib]["degrees"] = {
            "part1": [r.fibers[ib].accepted_degree for r in p1_reports],
            "part3": [r.fibers[ib].accepted_degree for r in p3_reports],
        }
    bad = _certify(rows, m, budget)
    if bad:
        raise StepRejected(m, bad)

    cert = {"n": m, "budget": budget, "density": density, "rows": rows}
    log = {"n": m, "collar": collar_diag,
           "part1": _summarize(p1_reports), "part3": _summarize(p3_reports)}
    return InductionState(
        config=cfg, grid=state.grid,
        steps=state.steps + [StepRecord(n=m, angles=refined, polys=polys,
                                        delta=deltas.copy())],
        certificates=state.certificates + [cert],
        engine_log=state.engine_log + [log],
    )


def final_growth(state: InductionState, density: float | None = None) -> list[dict]:
    """Growth of the last pair across every completed annulus (floor n-2)."""
    if density is None:
        density = state.config.validation_density * CERT_DENSITY_MULT
    last = state.current.polys
    rows = []
    for n in range(1, state.n + 1):
        pts = geometry.sample(geometry.annulus(n), density)
        for ib, b in enumerate(state.grid.labels):
            re1 = np.real(last[0].eval_index(ib, pts))
            re2 = np.real(last[1].eval_index(ib, pts))
            measured = float(np.maximum(re1, re2).min())
            rows.append({"n": n, "b": b, "measured": measured,
                         "threshold": float(n - 2), "pass": measured > n - 2})
    return rows


@dataclass
class ProperMapApproximant:
    state: InductionState
    manifest: dict

    def evaluate(self, b: float, z: complex):
        return evaluate(self.state, b, z)

    def harmonic_map(self) -> "HarmonicMap":
        return harmonic_map(self.state)


class HarmonicMap:
    """Pair of harmonic coordinates (Re F_1, Re F_2) with growth certificates."""

    def __init__(self, state: InductionState):
        self._state = state
        self.growth = final_growth(state)

    def __call__(self, b: float, zs):
        polys = self._state.current.polys
        return (np.real(polys[0].eval(b, zs)), np.real(polys[1].eval(b, zs)))


def evaluate(state: InductionState, b: float, z: complex):
    """Value pair at one point plus its certification note."""
    polys = state.current.polys
    v1 = complex(polys[0].eval(b, np.asarray([z]))[0])
    v2 = complex(polys[1].eval(b, np.asarray([z]))[0])
    r = abs(z)
    big_n = state.n
    certified = r <= big_n + geometry.MEMBERSHIP_TOL
    zone = min(max(1, math.ceil(r - geometry.MEMBERSHIP_TOL)), big_n)
    note = {
        "certified": bool(certified),
        "zone": int(zone),
        "steps": big_n,
        "tail_bound": step_budget(big_n, state.config.budget_scale),
    }
    return (v1, v2), note


def run(config: RunConfig, threads: int | None = None) -> ProperMapApproximant:
    """Run the construction to config.steps zones and assemble the manifest.

    On abort the partial manifest is attached to the raised error.
    """
    limits = _limits(config, threads)
    timings = []
    t0 = time.monotonic()
    state = init(config)
    timings.append({"stage": "init", "seconds": time.monotonic() - t0})
    try:
        while state.n < config.steps:
            t1 = time.monotonic()
            state = advance(state, limits)
            timings.append({"stage": f"step_{state.n}",
                            "seconds": time.monotonic() - t1})
    except PropermapError as exc:
        exc.manifest = _manifest(state, timings, status="aborted",
                                 failure=str(exc))
        raise
    growth = final_growth(state)
    manifest = _manifest(state, timings, status="complete", growth=growth)
    return ProperMapApproximant(state=state, manifest=manifest)


def _manifest(state: InductionState, timings, status: str,
              growth=None, failure: str | None = None) -> dict:
    out = {
        "schema": "1",
        "kind": "manifest",
        "tool": f"{TOOL_NAME} {TOOL_VERSION}",
        "status": status,
        "config": state.config.to_dict(),
        "param_grid": list(state.grid.labels),
        "steps_completed": state.n,
        "certificates": state.certificates,
        "engine": state.engine_log,
        "timings": timings,
    }
    if growth is not None:
        out["final_growth"] = growth
    if failure is not None:
        out["failure"] = failure
    return out
