"""A shear profile spreading under heat diffusion, in closed form.

The profile is Couette flow plus two odd Gaussian-bump quadratures whose
variances grow linearly in time.  This script samples the profile, its
curvature, and the Schrodinger potential b''/b at several times, verifies
that the closed forms satisfy the heat equation to finite-difference
accuracy, and prints the dissipation diagnostics of the narrow bump.

Outputs: profile.csv, potential.svg in ./demo_out.
"""

from pathlib import Path

import numpy as np

from viscoshear import FlowParams, FlowState, eval_b_derivs, eval_potential, heat_residual
from viscoshear.flow import h1_diagnostics
from viscoshear.report import csv_text, svg_line_plot

OUT = Path("demo_out")
OUT.mkdir(exist_ok=True)

params = FlowParams(M=0.7, gamma0=0.15, gamma1=0.03, gamma2=0.8, nu=1e-3)
T = params.horizon
print(f"diffusion horizon of the narrow bump: T = {T:.5f}")

ys = np.linspace(-1.0, 1.0, 401)
rows = []
series_v = []
for frac in (0.0, 0.25, 1.0):
    state = FlowState(params, frac * T)
    b, b1, b2, _ = eval_b_derivs(state, ys)
    v = eval_potential(state, ys)
    for y, bb, vv in zip(ys, b, v):
        rows.append((frac * T, y, bb, vv))
    series_v.append((f"t = {frac:g} T", list(ys), list(v)))
    resid = heat_residual(state, 0.05, T / 500) if state.t >= 2 * T / 500 else 0.0
    print(f"t = {frac:4.2f} T:  b'(0) = {b1[len(ys)//2]:.6f},  V(0) = {v[len(ys)//2]:+.4f},"
          f"  heat residual at y=0.05: {resid:.2e}")

(OUT / "profile.csv").write_text(csv_text(("t", "y", "b", "V"), rows))
(OUT / "potential.svg").write_text(svg_line_plot(series_v, "y", "V", "potential well vs time"))
print(f"wrote {OUT/'profile.csv'} and {OUT/'potential.svg'}")

print("\nnarrow-bump dissipation diagnostics (h1):")
for frac in (0.25, 0.5, 1.0):
    d = h1_diagnostics(params, frac * T)
    print(f"  t = {frac:4.2f} T: total = {d.total_integral:+.4e}, "
          f"zero point / (gamma0*gamma1) = {d.zero_point / (params.gamma0 * params.gamma1):.3f}")
print("\nThe total is negative and grows with t: the narrow bump's dip fills in,")
print("deepening the effective potential well near the origin as the flow diffuses.")
