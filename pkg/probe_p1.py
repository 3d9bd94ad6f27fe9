"""Step 2->3 part-1 diagnostics: trace, floor notes, extension survey."""
import numpy as np

import propermap.induction as ind
import propermap.geometry as geometry
from propermap.config import RunConfig
from propermap.errors import NoConvergence

cfg = RunConfig(steps=3, budget_scale=0.5)
limits = ind._limits(cfg)
state = ind.init(cfg)
state = ind.advance(state, limits)
rec = state.current
n, grid = rec.n, state.grid
print("at n =", n, "angles:", [round(a, 4) for a in rec.angles[0]])

# survey the inherited pair beyond its disk
for r in (2.0, 2.2, 2.5, 3.0):
    th = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    pts = r * np.exp(1j * th)
    for comp in (0, 1):
        re = np.real(rec.polys[comp].eval_index(0, pts))
        print(f"  r={r}: comp{comp} Re range [{re.min():.3g}, {re.max():.3g}]")

targets = (ind.extend_along_segments(state, 0), ind.extend_along_segments(state, 1))
try:
    extended, reps = ind.part1_approximate(state, targets, limits)
    for comp in (0, 1):
        f = reps[comp].fibers[0]
        print(f"part1 comp{comp}: deg={f.accepted_degree} sup={f.sup_error:.4g} "
              f"margins={f.margins}")
except NoConvergence as exc:
    print("part1 FAILED:", exc)
    print("trace:", [(d, round(e, 4)) for d, e in exc.schedule])
    print("note:", exc.note)
