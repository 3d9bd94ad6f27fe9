"""Watch dual ascent on the step 2->3 part-1 fit at fixed degrees."""
import numpy as np

import propermap.induction as ind
import propermap.engine as engine
from propermap.config import RunConfig

cfg = RunConfig(steps=3, budget_scale=0.5)
limits = ind._limits(cfg)
state = ind.init(cfg)
state = ind.advance(state, limits)

target = ind.extend_along_segments(state, 0)
b = 0.0
fit_z, fit_w, fit_f, lifts = engine._assemble(target, b, limits.fit_density, True)
val_z, _, val_f, _ = engine._assemble(target, b, limits.validation_density, False,
                                      certified_only=True)
print("fit nodes:", fit_z.size, "val:", val_z.size,
      "lift spans:", [(s.stop - s.start) for s, _ in lifts])
basis = engine.ArnoldiBasis(fit_z, fit_w)
work = fit_f.copy()
for d in (8, 16, 32, 64, 128):
    basis.extend_to(d)
    chat = basis.project(work)
    lams, steps = [], []
    for span, _ in lifts:
        qs = basis.Q[span]
        infl = np.abs(qs @ (qs.conj() * basis.weights[span][:, None]).T)
        rowsum = np.maximum(infl.sum(axis=1), 1e-14)
        steps.append(engine.LIFT_GAIN / rowsum)
        lams.append(np.zeros(qs.shape[0]))
    for it in range(limits.lift_iterations - 1):
        fitted = basis.Q @ chat
        for (span, floor_level), lam, step in zip(lifts, lams, steps):
            v = fitted[span]
            re = np.real(v)
            lam += step * (floor_level - re)
            np.maximum(lam, 0.0, out=lam)
            work[span] = np.maximum(re, floor_level) + lam + 1j * np.imag(v)
        chat = basis.project(work)
        if it in (0, 7, 31, 62):
            fitted = basis.Q @ chat
            span, fl = lifts[0]
            short = fl - np.real(fitted[span])
            cand = basis.monomial_coeffs(chat, d)
            err = float(np.abs(engine.polyval(cand, val_z) - val_f).max())
            print(f"d={d} it={it}: max shortfall={short.max():.4g} "
                  f"mean shortfall={np.maximum(short, 0).mean():.4g} "
                  f"max lam={lams[0].max():.4g} val err={err:.4g}")
