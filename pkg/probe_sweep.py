"""Sweep part-3 knobs at step 1->2 for low-degree acceptance with margin."""
import numpy as np

import propermap.induction as ind
import propermap.engine as engine
import propermap.geometry as geometry
from propermap.config import RunConfig
from propermap.errors import NoConvergence, PropermapError

cfg = RunConfig(steps=2, budget_scale=0.5)
limits = ind._limits(cfg)
base = ind.init(cfg)
targets = (ind.extend_along_segments(base, 0), ind.extend_along_segments(base, 1))
extended, _ = ind.part1_approximate(base, targets, limits)
deltas, refined, _ = ind.compute_collar_delta(base, extended)

import dataclasses

for tail_on in (False, True):
    for iters in (16, 64, 128):
        for arc_lift in (0.2, 0.3):
            ind.ARC_LIFT = arc_lift
            lim = dataclasses.replace(limits, lift_iterations=iters)
            if not tail_on:
                ind.TAIL_WEIGHT = 0.0
            else:
                ind.TAIL_WEIGHT = 0.02
            try:
                polys, reps = ind.part3_correct(base, extended, deltas, refined, lim)
                f = reps[0].fibers[0]
                # swing of accepted poly at r=3
                th = np.linspace(0, 2 * np.pi, 1440, endpoint=False)
                re3 = np.real(polys[0].eval_index(0, 3.0 * np.exp(1j * th)))
                print(f"tail={tail_on} iters={iters} arc={arc_lift}: "
                      f"deg={f.accepted_degree} err={f.sup_error:.4g} "
                      f"margins={ {k: round(v, 4) for k, v in f.margins.items()} } "
                      f"swing_r3=[{re3.min():.3g},{re3.max():.3g}]")
            except PropermapError as exc:
                print(f"tail={tail_on} iters={iters} arc={arc_lift}: FAIL {exc}")
