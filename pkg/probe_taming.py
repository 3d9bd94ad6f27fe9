"""Temp probe: taming-ray spacing vs band dips, with disk-only certification."""
import numpy as np

from propermap import engine, families, geometry, induction
from propermap.config import RunConfig
from propermap.engine import PiecewiseTarget, TargetPiece

cfg = RunConfig(steps=2, budget_scale=0.5, param_grid=(0.0,), seed=(2.0 + 0j,))

def build_state():
    return induction.init(cfg)

def disk_only(target):
    pieces = []
    for p in target.pieces:
        cert = p.label == "zone_disk"
        pieces.append(TargetPiece(p.family, p.evaluate, kind=p.kind,
                                  weight=p.weight, label=p.label, certify=cert))
    return PiecewiseTarget(target.grid, pieces)

b = 0.0
th = np.linspace(0, geometry.TAU, 3000, endpoint=False)
rr = np.linspace(1.0, 2.0, 400)
R, T = np.meshgrid(rr, th)
band = (R * np.exp(1j * T)).ravel()

for ts in (1.7, 1.0, 0.7, 0.5):
    induction.TAME_SPACING = ts
    st = build_state()
    rec = st.current
    n = rec.n
    targets = (disk_only(induction.extend_along_segments(st, 0)),
               disk_only(induction.extend_along_segments(st, 1)))
    try:
        extended, p1rep = induction.part1_approximate(st, targets)
    except Exception as e:
        print(f"TS={ts}: part1 FAILED: {e}")
        continue
    deg = p1rep[0].fibers[0].accepted_degree
    sup = p1rep[0].fibers[0].sup_error
    src = extended[0]
    vals = np.real(src.eval(b, band))
    deltas, refined, diag = induction.compute_collar_delta(st, extended)
    own, opp = geometry.odd_union, geometry.even_union
    guard = geometry.union_of([
        own(geometry.WBLOCK, n, rec.angles[0], delta=float(deltas[0])),
        opp(geometry.LBLOCK, n, rec.angles[0], delta=float(deltas[0]))])
    arcs = own(geometry.ARC, n + 1, refined[0])
    gp = geometry.sample(guard, cfg.validation_density, "auto")
    ap = geometry.sample(arcs, cfg.validation_density, "curve")
    g = float(np.real(src.eval(b, gp)).min())
    a = float(np.real(src.eval(b, ap)).min())
    print(f"TS={ts}: deg={deg} sup={sup:.4f} band Re [{vals.min():+.3f},{vals.max():+.3f}] "
          f"delta={deltas[0]:.4f} guard_min={g:+.3f} arc_min={a:+.3f} "
          f"(need g>1, a>2 at F~)")
