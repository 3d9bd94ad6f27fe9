"""Temp probe: deficiency-style pad steering for part 3 at step 1 -> 2."""
import numpy as np

from propermap import engine, families, geometry, induction
from propermap.config import RunConfig
from propermap.engine import (ArnoldiBasis, PiecewiseTarget, TargetPiece,
                              polyval, _assemble)

cfg = RunConfig(steps=2, budget_scale=0.5, param_grid=(0.0,), seed=(2.0 + 0j,))
st = induction.init(cfg)
rec = st.current
n, grid = rec.n, st.grid


def disk_only(target):
    pieces = []
    for p in target.pieces:
        cert = p.label == "zone_disk"
        pieces.append(TargetPiece(p.family, p.evaluate, kind=p.kind,
                                  weight=p.weight, label=p.label, certify=cert))
    return PiecewiseTarget(target.grid, pieces)


targets = (disk_only(induction.extend_along_segments(st, 0)),
           disk_only(induction.extend_along_segments(st, 1)))
extended, p1rep = induction.part1_approximate(st, targets)
deltas, refined, diag = induction.compute_collar_delta(st, extended)
print("part1 deg:", p1rep[0].fibers[0].accepted_degree,
      "sup:", round(p1rep[0].fibers[0].sup_error, 5), "delta:", deltas)

comp = 0
own, opp = geometry.odd_union, geometry.even_union
b = 0.0
src = extended[comp]
tol = induction.step_budget(n + 1, cfg.budget_scale) / 2.0

zone = families.constant_family(grid, geometry.disk_k(n), wide=True, runge=True)
sectors = families.family_from(grid, lambda bb: own(geometry.SECTOR, n, rec.angles[0]), wide=True)
pads = families.family_from(grid, lambda bb: opp(geometry.LBLOCK, n, rec.angles[0], delta=float(deltas[0])), wide=True)
guard = families.family_from(grid, lambda bb: geometry.union_of([
    own(geometry.WBLOCK, n, rec.angles[0], delta=float(deltas[0])),
    opp(geometry.LBLOCK, n, rec.angles[0], delta=float(deltas[0]))]), wide=True)
next_arcs = families.family_from(grid, lambda bb: own(geometry.ARC, n + 1, refined[0]), wide=True)

guard_pts = geometry.sample(guard.fiber(b), cfg.validation_density, "auto")
arc_pts = geometry.sample(next_arcs.fiber(b), cfg.validation_density, "curve")
print("F~ guard min Re:", round(float(np.real(src.eval(b, guard_pts)).min()), 4),
      "| F~ arcs min Re:", round(float(np.real(src.eval(b, arc_pts)).min()), 4))


def deficiency(level_fn):
    def ev(bb, zs):
        z = np.asarray(zs, dtype=complex).ravel()
        f = np.asarray(src.eval(bb, z), dtype=complex)
        lift = np.maximum(0.0, level_fn(z) - np.real(f))
        return f + lift
    return ev


profiles = {
    "const3": lambda z: np.full(z.shape, 3.0),
    "r+0.4": lambda z: np.abs(z) + 0.4,
    "c2.4": lambda z: np.full(z.shape, 2.4),
}
for name, lf in profiles.items():
    for ws_sec, ws in ((0.03, 0.1), (0.03, 0.3), (0.1, 0.1), (0.1, 0.3)):
        target = PiecewiseTarget(grid, [
            TargetPiece(zone, lambda bb, zs: src.eval(bb, zs), kind="area", label="zone"),
            TargetPiece(sectors, lambda bb, zs: src.eval(bb, zs), kind="area",
                        label="sect", certify=False, weight=ws_sec),
            TargetPiece(pads, deficiency(lf), kind="area", label="pads",
                        certify=False, weight=ws),
        ])
        fit_z, fit_w, fit_f = _assemble(target, b, cfg.fit_density, True)
        val_z, _, val_f = _assemble(target, b, cfg.validation_density, False, certified_only=True)
        basis = ArnoldiBasis(fit_z, fit_w)
        line = [f"{name:6s} sec={ws_sec:4.2f} pad={ws:4.2f}"]
        for d in (16, 32, 64, 96):
            basis.extend_to(d)
            chat = basis.project(fit_f)
            cand = basis.monomial_coeffs(chat, d)
            err = float(np.abs(polyval(cand, val_z) - val_f).max())
            mg = float(np.real(polyval(cand, guard_pts)).min() - n)
            ma = float(np.real(polyval(cand, arc_pts)).min() - (n + 1))
            ok = "OK" if (err < tol and mg > 0 and ma > 0) else "  "
            line.append(f"d{d}: e={err:.4f} g={mg:+.3f} a={ma:+.3f}{ok}")
        print(" | ".join(line))
