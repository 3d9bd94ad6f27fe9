"""Sweep part-3 lift iterations at n=2 to separate lift divergence from misfit."""
import sys

import numpy as np

import propermap.induction as ind
from propermap.config import RunConfig
from propermap.errors import PropermapError

cfg = RunConfig(steps=3, budget_scale=0.5)
limits = ind._limits(cfg)
state = ind.init(cfg)
state = ind.advance(state, limits)

targets = (ind.extend_along_segments(state, 0), ind.extend_along_segments(state, 1))
extended, _ = ind.part1_approximate(state, targets, limits)
deltas, refined, diag = ind.compute_collar_delta(state, extended)

for iters in (2, 4, 8, 16):
    ind.CORRECTION_LIFT_ITERS = iters
    try:
        polys, reps = ind.part3_correct(state, extended, deltas, refined, limits)
    except PropermapError as exc:
        sched = getattr(exc, "schedule", None) or []
        line = " ".join(f"d{d}:{e:.4g}" for d, e in sched)
        print(f"iters={iters}: FAIL {line}  note={getattr(exc, 'note', '')[:120]}")
        continue
    f = reps[0].to_dict()["fibers"][0]
    print(f"iters={iters}: deg={f['accepted_degree']} sup={f['sup_error']:.4g} "
          f"margins={ {k: round(v, 4) for k, v in f['margins'].items()} }")
