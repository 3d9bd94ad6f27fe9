"""Phase-by-phase drive of the n=2 step to find where the chain fails."""
import numpy as np

import propermap.induction as ind
import propermap.geometry as geometry
from propermap.config import RunConfig
from propermap.errors import PropermapError

cfg = RunConfig(steps=3, budget_scale=0.5)
limits = ind._limits(cfg)
state = ind.init(cfg)
state = ind.advance(state, limits)
print("advanced to n =", state.n)

targets = (ind.extend_along_segments(state, 0), ind.extend_along_segments(state, 1))
extended, p1_reports = ind.part1_approximate(state, targets, limits)
for comp, rep in enumerate(p1_reports):
    f = rep.to_dict()["fibers"][0]
    print(f"part1 comp{comp}: deg={f['accepted_degree']} sup={f['sup_error']:.4g} "
          f"margins={f['margins']}")

deltas, refined, diag = ind.compute_collar_delta(state, extended)
print("collar:", [f"{d['delta']:.5g} cap={d['cap']:.5g} worst={d['worst_margin']:.5g} "
                  f"violations={d['violations']}" for d in diag])

try:
    polys, p3_reports = ind.part3_correct(state, extended, deltas, refined, limits)
except PropermapError as exc:
    print("part3 FAIL:", type(exc).__name__, exc)
    sched = getattr(exc, "schedule", None)
    if sched:
        for deg, err in sched:
            print(f"   deg={deg}: err={err:.5g}")
    note = getattr(exc, "note", None)
    if note:
        print("   note:", note)
    raise SystemExit(1)
for comp, rep in enumerate(p3_reports):
    f = rep.to_dict()["fibers"][0]
    print(f"part3 comp{comp}: deg={f['accepted_degree']} sup={f['sup_error']:.4g} "
          f"margins={f['margins']}")
