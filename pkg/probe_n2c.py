"""Dissect the n=2 part-3 fit: piece residuals and val-error location."""
import numpy as np

import propermap.induction as ind
import propermap.engine as engine
import propermap.geometry as geometry
import propermap.families as families
from propermap.engine import ArnoldiBasis, TargetPiece, PiecewiseTarget, polyval
from propermap.config import RunConfig

cfg = RunConfig(steps=3, budget_scale=0.5)
limits = ind._limits(cfg)
state = ind.init(cfg)
state = ind.advance(state, limits)
rec = state.current
n, grid = rec.n, state.grid
print("n =", n)

targets = (ind.extend_along_segments(state, 0), ind.extend_along_segments(state, 1))
extended, _ = ind.part1_approximate(state, targets, limits)
deltas, refined, diag = ind.compute_collar_delta(state, extended)

# rebuild comp0's target exactly as part3_correct does, but keep piece handles
comp = 0
own = geometry.odd_union
opp = geometry.even_union
own_pairs = geometry.odd_pairs
anchor_hi = n + 1.0 - ind.FREE_CHANNEL_DEPTH

def per_b(fn):
    return families.family_from(grid, lambda b: fn(grid.index_of(b)), wide=True)

zone = families.constant_family(grid, geometry.disk_k(n), wide=True, runge=True)
band = per_b(lambda ib: own(geometry.ARC, n + 1, refined[ib]))
pads = per_b(lambda ib: opp(geometry.LBLOCK, n, rec.angles[ib], delta=float(deltas[ib])))
collar = per_b(lambda ib: own(geometry.WBLOCK, n, rec.angles[ib], delta=float(deltas[ib])))
anchor = per_b(lambda ib: geometry.union_of(
    [geometry.band(n, anchor_hi, a, b_hi) for a, b_hi in own_pairs(rec.angles[ib])]))

src = extended[comp]

def on_src(b, zs, f=src):
    return f.eval(b, zs)

def scaffold(b, zs, f=rec.polys[comp]):
    z = np.asarray(zs, dtype=complex).ravel()
    r = np.abs(z)
    ring = f.eval(b, n * z / np.maximum(r, 1e-9))
    t = np.clip(r - n, 0.0, 1.0)
    return (1.0 - t) * np.real(ring) + t * (n + 2.0) + 1j * np.imag(ring)

base_lifts = []
for ib, b in enumerate(grid.labels):
    arc_pts = geometry.sample(own(geometry.ARC, n, rec.angles[ib]), cfg.validation_density)
    floor = float(np.real(src.eval_index(ib, arc_pts)).min())
    base_lifts.append(min(ind.W_LIFT, ind.SLIT_BASE_FRACTION * (floor - n)))
print("base_lifts:", base_lifts)

def pad_levels(b, zs):
    d = float(deltas[grid.index_of(b)])
    r = np.abs(np.asarray(zs, dtype=complex).ravel())
    t = np.clip((r - n - d) / max(1.0 - d, 1e-9), 0.0, 1.0)
    return (n + ind.PAD_BASE) * (1.0 - t) + (n + 1.0 + ind.ARC_LIFT) * t

def collar_levels(b, zs):
    lo = base_lifts[grid.index_of(b)]
    r = np.abs(np.asarray(zs, dtype=complex).ravel())
    t = np.clip((r - n) / ind.SLIT_GRADE_DEPTH, 0.0, 1.0)
    return n + lo + (ind.W_LIFT - lo) * t

pieces = [
    TargetPiece(zone, on_src, kind="area", weight=ind.ZONE_WEIGHT, label="zone_disk"),
    TargetPiece(band, scaffold, kind="curve", weight=ind.BAND_WEIGHT, label="outer_band",
                certify=False, lift_floor=n + 1.0 + ind.ARC_LIFT,
                density_mult=ind.CURVE_DENSITY_MULT),
    TargetPiece(pads, scaffold, kind="area", weight=ind.STEER_WEIGHT, label="pads",
                certify=False, lift_floor=pad_levels),
    TargetPiece(collar, on_src, kind="area", weight=ind.STEER_WEIGHT, label="collar",
                certify=False, lift_floor=collar_levels),
    TargetPiece(anchor, scaffold, kind="area", weight=ind.STEER_WEIGHT,
                label="sector_anchor", certify=False),
]
target = PiecewiseTarget(grid, pieces)

b = grid.labels[0]
fit_z, fit_w, fit_f, lifts = engine._assemble(target, b, limits.fit_density, True)
val_z, _, val_f, _ = engine._assemble(target, b, limits.validation_density, False,
                                      certified_only=True)
print("fit samples:", fit_z.size, "val samples:", val_z.size,
      "lift spans:", [(sp.start, sp.stop) for sp, _ in lifts])
print("fit data |f| max:", float(np.abs(fit_f).max()))

basis = ArnoldiBasis(fit_z, fit_w)
spans = []
start = 0
for p in pieces:
    pts = geometry.sample(p.family.fiber(b), limits.fit_density * p.density_mult,
                          p.sample_mode)
    spans.append((p.label, slice(start, start + pts.size)))
    start += pts.size
assert start == fit_z.size

for iters in (1, 2, 16):
    for d in (8, 64, 256):
        basis.extend_to(d)
        work = fit_f.copy()
        chat = basis.project(work)
        lams = [np.zeros(sp.stop - sp.start) for sp, _ in lifts]
        steps = []
        for sp, _ in lifts:
            qs = basis.Q[sp]
            infl = np.abs(qs @ (qs.conj() * basis.weights[sp][:, None]).T)
            steps.append(engine.LIFT_GAIN / np.maximum(infl.sum(axis=1), 1e-14))
        for _ in range(iters - 1):
            fitted = basis.Q @ chat
            for (sp, fl), lam, step in zip(lifts, lams, steps):
                v = fitted[sp]
                re = np.real(v)
                lam += step * (fl - re)
                np.maximum(lam, 0.0, out=lam)
                work[sp] = np.maximum(re, fl) + lam + 1j * np.imag(v)
            chat = basis.project(work)
        cand = basis.monomial_coeffs(chat, d)
        resid = np.abs(polyval(cand, val_z) - val_f)
        j = int(np.argmax(resid))
        z_bad = val_z[j]
        print(f"iters={iters} d={d}: val err {resid.max():.4g} at r={abs(z_bad):.3f} "
              f"phi={np.angle(z_bad) % (2 * np.pi):.3f}")
        fitted = polyval(cand, fit_z)
        for lab, sp in spans:
            seg = np.abs(fitted[sp] - fit_f[sp])
            lam_note = ""
            for (lsp, fl), lam in zip(lifts, lams):
                if lsp.start == sp.start:
                    lam_note = f" lam_max {lam.max():.4g}"
            print(f"    {lab:14s} raw-misfit max {seg.max():9.4g} mean {seg.mean():9.4g}{lam_note}")
