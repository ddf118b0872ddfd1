"""Solitary wave hitting a partially immersed object: fixed vs floating.

The same incoming wave is run twice, once with the object held fixed
(forced-motion coupling with zero trajectory) and once freely floating.
A floating object lets the wave push it upward and re-radiate: the
transmitted and reflected waves are preceded by a depression that is
absent in the fixed case.
"""

import os

import numpy as np

from wavefloat import ScenarioSpec, build_solver
from wavefloat.stepper import advance

OUT = os.path.join(os.path.dirname(__file__), "out_fixed_floating")
os.makedirs(OUT, exist_ok=True)

runs = {}
for kind in ("fixed_nonlinear", "free_floating"):
    spec = ScenarioSpec(kind=kind, epsilon=0.3, mu=0.3, ell=4.0, L=30.0,
                        h_eq=0.7, scheme="mc", dt_ratio=0.7, t_final=20.0,
                        n_list=(400,), n_ref=2400,
                        params={"zeta_max": 0.2, "x0": -15.0})
    asm = build_solver(spec, 400)
    res = advance(asm.solver, 20.0)
    runs[kind] = res
    x, zeta, q = asm.solver.state.interior_fields()
    np.savetxt(os.path.join(OUT, f"profile_{kind}.csv"),
               np.column_stack([x, zeta, q]), delimiter=",",
               header="x,zeta,q", comments="")
    print(f"{kind}: delta(T) = {res.delta[-1]:+.5f}  qi(T) = {res.qi_avg[-1]:+.5f}  "
          f"max qi over run = {np.abs(res.qi_avg).max():.4f}")

# depression ahead of the transmitted wave only for the floating object
for kind, res in runs.items():
    x, zeta, _ = res.solver.state.interior_fields()
    ahead = (x > 10.0) & (x < 25.0)
    print(f"{kind}: min zeta ahead of object = {zeta[ahead].min():+.5f}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(9, 3.4))
    for kind, style in (("fixed_nonlinear", "b-"), ("free_floating", "r--")):
        x, zeta, _ = runs[kind].solver.state.interior_fields()
        ax.plot(x, zeta, style, label=kind)
    ax.axvspan(-4, 4, color="0.85", label="object")
    ax.set_xlabel("x")
    ax.set_ylabel("surface elevation at T = 20")
    ax.legend()
    fig.savefig(os.path.join(OUT, "profiles.png"), dpi=140, bbox_inches="tight")
    print(f"wrote {OUT}/profiles.png")
except ImportError:
    print("matplotlib not available; CSV profiles written instead")
