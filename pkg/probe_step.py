"""Diagnose the step 1->2 failure: where does part 3 lose convergence."""
import numpy as np

import propermap.induction as ind
import propermap.engine as engine
import propermap.geometry as geometry
import propermap.families as families
from propermap.config import RunConfig
from propermap.errors import NoConvergence

cfg = RunConfig(steps=2, budget_scale=0.5)
state = ind.init(cfg)
limits = ind._limits(cfg)
rec = state.current
n, grid = rec.n, state.grid

targets = (ind.extend_along_segments(state, 0), ind.extend_along_segments(state, 1))
extended, p1_reports = ind.part1_approximate(state, targets, limits)
for comp in (0, 1):
    f = p1_reports[comp].fibers[0]
    print(f"part1 comp{comp}: degree={f.accepted_degree} sup={f.sup_error:.3e} "
          f"delta={f.delta:.4g} margins={ {k: round(v, 4) for k, v in f.margins.items()} }")

# value survey of the extension off the fitted set
ang = rec.angles[0]
for name, spec in [
    ("D_odd", geometry.odd_union(geometry.SECTOR, n, ang)),
    ("D_even", geometry.even_union(geometry.SECTOR, n, ang)),
    ("outer_arc", geometry.arc(n + 1, 0.0, geometry.TAU - 1e-9)),
]:
    pts = geometry.sample(spec, 16.0)
    for comp in (0, 1):
        v = extended[comp].eval_index(0, pts)
        print(f"  F~{comp} on {name}: |v| in [{np.abs(v).min():.3g}, {np.abs(v).max():.3g}] "
              f"Re in [{np.real(v).min():.3g}, {np.real(v).max():.3g}]")

deltas, refined, diag = ind.compute_collar_delta(state, extended)
print("collar:", diag)

# part-3 precondition margins by hand for comp 0
comp = 0
own, opp = geometry.odd_union, geometry.even_union
d = float(deltas[0])
guard = geometry.union_of([own(geometry.WBLOCK, n, ang, delta=d),
                           opp(geometry.LBLOCK, n, ang, delta=d)])
next_arcs = own(geometry.ARC, n + 1, refined[0])
core_spec = geometry.union_of([geometry.disk_k(n), own(geometry.SECTOR, n, ang)])
pads_spec = opp(geometry.LBLOCK, n, ang, delta=d)

def target_val(zs):
    zs = np.asarray(zs, dtype=complex)
    out = np.empty(zs.shape, dtype=complex)
    in_core = geometry.contains_many(core_spec, zs)
    out[in_core] = extended[comp].eval_index(0, zs[in_core])
    out[~in_core] = n + 2.0
    cov = in_core | geometry.contains_many(pads_spec, zs)
    return out, cov

for label, spec, level in [("annulus_floor", guard, n), ("next_arcs", next_arcs, n + 1)]:
    pts = geometry.sample(spec, cfg.validation_density)
    vals, cov = target_val(pts)
    print(f"margin {label}: min Re - {level} = {np.real(vals).min() - level:.4g} "
          f"covered={cov.all()} npts={pts.size}")

# now the raw fit difficulty: core+pads target with NO constraints, full budget
tol = ind.step_budget(n + 1, cfg.budget_scale) / 2.0
core_fam = families.with_flags(families.constant_family(grid, core_spec, wide=True), runge=True)
pads_fam = families.constant_family(grid, pads_spec, wide=True)
target = engine.PiecewiseTarget(grid, [
    engine.TargetPiece(core_fam, lambda b, zs: extended[comp].eval(b, zs),
                       kind="area", label="core"),
    engine.TargetPiece(pads_fam, lambda b, zs: np.full(np.asarray(zs).shape, n + 2.0,
                                                        dtype=complex),
                       kind="area", label="pads"),
])
try:
    fam, rep = engine.approximate(target, np.array([tol]), limits)
    f = rep.fibers[0]
    print(f"unconstrained part3 fit: degree={f.accepted_degree} sup={f.sup_error:.3e}")
except NoConvergence as exc:
    print(f"unconstrained part3 fit FAILS: best={exc.best_error:.4g}")
    print("  trace:", [(dg, f"{e:.3g}") for dg, e in exc.schedule])
