"""End-to-end chain probe: step diagnostics up to N."""
import sys
import time

import numpy as np

import propermap.induction as ind
from propermap.config import RunConfig
from propermap.errors import PropermapError

N = int(sys.argv[1]) if len(sys.argv) > 1 else 3
cfg = RunConfig(steps=N, budget_scale=0.5)
limits = ind._limits(cfg)
state = ind.init(cfg)
t0 = time.monotonic()
while state.n < N:
    t1 = time.monotonic()
    try:
        state = ind.advance(state, limits)
    except PropermapError as exc:
        print(f"FAIL at n->{state.n + 1}: {type(exc).__name__} {exc}")
        log = getattr(exc, "manifest", {}) or {}
        for entry in log.get("engine", []):
            print(" log n=", entry.get("n"))
        sys.exit(1)
    cert = state.certificates[-1]
    log = state.engine_log[-1]
    row = cert["rows"][0]
    print(f"n={state.n}: {time.monotonic()-t1:.1f}s  annulus_min={row['annulus_min']:.4f} "
          f"arc_min={[round(v,4) for v in row['arc_min']]} conv={[round(v,4) for v in row['conv_sup']]} "
          f"budget={cert['budget']:.4g} delta={row['delta']:.5g} deg={row['degrees']}")
    for d in log["collar"]:
        print(f"   collar: delta={d['delta']:.5g} cap={d['cap']:.5g} "
              f"worst={d['worst_margin']:.5g} violations={d['violations']}")
    for part in ("part1", "part3"):
        for comp, rep in enumerate(log[part]):
            f = rep[0]["fibers"][0] if isinstance(rep, list) else rep["fibers"][0]
            print(f"   {part} comp{comp}: deg={f['accepted_degree']} sup={f['sup_error']:.4g} "
                  f"margins={ {k: round(v, 4) for k, v in f['margins'].items()} }")
print(f"total {time.monotonic()-t0:.1f}s")
