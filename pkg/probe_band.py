"""Temp probe: dense outer-arc lift data for part 3 at step 1 -> 2."""
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
delta = float(deltas[0])
print("part1 deg:", p1rep[0].fibers[0].accepted_degree, "delta:", round(delta, 5))

comp = 0
own, opp = geometry.odd_union, geometry.even_union
b = 0.0
src = extended[comp]
tol = induction.step_budget(n + 1, cfg.budget_scale) / 2.0

zone = families.constant_family(grid, geometry.disk_k(n), wide=True, runge=True)
sectors = families.family_from(grid, lambda bb: own(geometry.SECTOR, n, rec.angles[0]), wide=True)
pads = families.family_from(grid, lambda bb: opp(geometry.LBLOCK, n, rec.angles[0], delta=delta), wide=True)
guard = families.family_from(grid, lambda bb: geometry.union_of([
    own(geometry.WBLOCK, n, rec.angles[0], delta=delta),
    opp(geometry.LBLOCK, n, rec.angles[0], delta=delta)]), wide=True)
next_arcs = families.family_from(grid, lambda bb: own(geometry.ARC, n + 1, refined[0]), wide=True)

guard_pts = geometry.sample(guard.fiber(b), cfg.validation_density, "auto")
arc_pts = geometry.sample(next_arcs.fiber(b), cfg.validation_density, "curve")

# dense nodes on the own-parity arcs at radius n+1, spacing ~(n+1)/density_hi
density_hi = 48.0
band_nodes = []
for piece in next_arcs.fiber(b).pieces():
    a0, b0 = piece.phi_a, piece.phi_b
    m = max(8, int(np.ceil((b0 - a0) * (n + 1) * density_hi)))
    th = np.linspace(a0, b0, m)
    band_nodes.append((n + 1) * np.exp(1j * th))
band_nodes = np.concatenate(band_nodes)
print("band nodes:", band_nodes.size)


def deficiency_vals(zs, level):
    f = np.asarray(src.eval(b, zs), dtype=complex)
    return f + np.maximum(0.0, level - np.real(f))


pad_pts = geometry.sample(pads.fiber(b), cfg.fit_density, "auto")
sect_all = geometry.sample(sectors.fiber(b), cfg.fit_density, "auto")
zone_target = PiecewiseTarget(grid, [
    TargetPiece(zone, lambda bb, zs: src.eval(bb, zs), kind="area", label="zone")])
fit_z0, fit_w0, fit_f0 = _assemble(zone_target, b, cfg.fit_density, True)
val_z, _, val_f = _assemble(zone_target, b, cfg.validation_density, False, certified_only=True)

wfam = families.family_from(grid, lambda bb: own(geometry.WBLOCK, n, rec.angles[0], delta=delta), wide=True)
w_pts = geometry.sample(wfam.fiber(b), cfg.fit_density, "auto")

# free-channel diagnostic nodes: own-gap circle stretch away from rays
free_th = np.linspace(0.35, np.pi - 0.35, 200)
free_nodes = 2.0 * np.exp(1j * free_th)

h_free = 0.25
iters = 16
for zone_w, band_w, pad_level, w_level, band_level in (
        (1.0, 0.3, 1.15, 1.1, 2.3), (2.0, 0.3, 1.15, 1.1, 2.3),
        (1.0, 0.3, 1.2, 1.15, 2.4), (2.0, 0.5, 1.2, 1.15, 2.4)):
    sect_pts = sect_all[np.abs(sect_all) <= 2.0 - h_free]
    sect_f = np.asarray(src.eval(b, sect_pts), dtype=complex)
    fit_z = np.concatenate([fit_z0, sect_pts, pad_pts, w_pts, band_nodes])
    fit_w = np.concatenate([np.full(fit_w0.size, zone_w),
                            np.full(sect_pts.size, 0.1),
                            np.full(pad_pts.size, 0.1),
                            np.full(w_pts.size, 0.1),
                            np.full(band_nodes.size, band_w)])
    basis = ArnoldiBasis(fit_z, fit_w)
    line = [f"zw={zone_w:3.1f} bw={band_w:3.1f} pl={pad_level:4.2f} bl={band_level:3.1f}"]
    for d in (16, 24, 32, 48):
        basis.extend_to(d)
        v_pad = np.asarray(src.eval(b, pad_pts), dtype=complex)
        v_w = np.asarray(src.eval(b, w_pts), dtype=complex)
        v_band = np.asarray(src.eval(b, band_nodes), dtype=complex)
        for _ in range(iters):
            t_pad = np.maximum(np.real(v_pad), pad_level) + 1j * np.imag(v_pad)
            t_w = np.maximum(np.real(v_w), w_level) + 1j * np.imag(v_w)
            t_band = np.maximum(np.real(v_band), band_level) + 1j * np.imag(v_band)
            fit_f = np.concatenate([fit_f0, sect_f, t_pad, t_w, t_band])
            chat = basis.project(fit_f)
            cand = basis.monomial_coeffs(chat, d)
            v_pad = polyval(cand, pad_pts)
            v_w = polyval(cand, w_pts)
            v_band = polyval(cand, band_nodes)
        err = float(np.abs(polyval(cand, val_z) - val_f).max())
        mg = float(np.real(polyval(cand, guard_pts)).min() - n)
        ma = float(np.real(polyval(cand, arc_pts)).min() - (n + 1))
        dive = float(np.real(polyval(cand, free_nodes)).min())
        ok = "OK" if (err < tol and mg > 0 and ma > 0) else "  "
        line.append(f"d{d}: e={err:.4f} g={mg:+.3f} a={ma:+.3f} dv={dive:+.2f}{ok}")
    print(" | ".join(line))
