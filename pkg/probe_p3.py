"""Locate the thin next_arcs margin in step 1->2 part 3."""
import numpy as np

import propermap.induction as ind
import propermap.geometry as geometry
from propermap.config import RunConfig

cfg = RunConfig(steps=2, budget_scale=0.5)
limits = ind._limits(cfg)
state = ind.init(cfg)
rec = state.current
n, grid = rec.n, state.grid

targets = (ind.extend_along_segments(state, 0), ind.extend_along_segments(state, 1))
extended, _ = ind.part1_approximate(state, targets, limits)
deltas, refined, diag = ind.compute_collar_delta(state, extended)
print("delta:", deltas, "cap diag:", diag[0]["cap"])
polys, p3_reports = ind.part3_correct(state, extended, deltas, refined, limits)

density = cfg.validation_density * ind.CERT_DENSITY_MULT
for comp in (0, 1):
    own = geometry.odd_union if comp == 0 else geometry.even_union
    arcs = own(geometry.ARC, n + 1, refined[0])
    pts = geometry.sample(arcs, density)
    re = np.real(polys[comp].eval_index(0, pts))
    j = int(np.argmin(re))
    z = pts[j]
    print(f"comp{comp}: next_arcs min {re.min():.5f} at r={abs(z):.4f} "
          f"phi={np.angle(z) % (2*np.pi):.4f}")
    # per refined arc minima
    pairs = (geometry.odd_pairs if comp == 0 else geometry.even_pairs)(refined[0])
    for a, b_hi in pairs:
        apts = geometry.sample(geometry.arc(n + 1, a, b_hi), density)
        are = np.real(polys[comp].eval_index(0, apts))
        print(f"   arc ({a:.4f},{b_hi:.4f}) width {b_hi-a:.4f}: "
              f"min {are.min():.5f} at phi={np.angle(apts[np.argmin(are)]) % (2*np.pi):.4f}")
