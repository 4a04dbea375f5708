"""The singlet's Tsirelson-violating behavior, and which model class can reproduce it.

Run: python demos/02_quantum_feasibility.py
"""
# %%
import math

import numpy as np

from bellarrow import bell, search
from bellarrow.quantum import correlation, quantum_behavior, singlet_state

rho = singlet_state()
angles = dict(alice_angles=(0.0, math.pi / 2), bob_angles=(math.pi / 4, -math.pi / 4))

# %% Correlation follows -cos(theta_a - theta_b)
for d in np.linspace(0, math.pi, 5):
    print(f"theta_a - theta_b = {d:.3f}   E = {correlation(rho, d, 0.0):+.6f}   -cos = {-math.cos(d):+.6f}")

# %% Canonical CHSH angles
table = quantum_behavior(rho, **angles)
print("\nS =", bell.chsh_statistic(table), " 2*sqrt(2) =", 2 * math.sqrt(2))
print("no-signalling:", bell.check_no_signalling(table).passed)

# %% Local polytope: infeasible, with a Bell functional as certificate
loc = search.feasibility_local(table)
print("\nlocal model reproduces the singlet?", loc.feasible)
print("separating functional margin:", loc.margin)
y = loc.separator
worst = max(y @ bell.behavior(search.strategy_model(k)).p.ravel() for k in range(16))
print("largest value over the 16 deterministic strategies:", worst)

# %% Retro class: feasible, with an explicit witness
ret = search.feasibility_retro(table)
print("\nretro model reproduces the singlet?", ret.feasible, " residual:", ret.residual)
print("witness CHSH:", bell.chsh_statistic(bell.behavior(ret.model)))

# %% Sampling the witness like an experiment would
for i in range(2):
    for j in range(2):
        mean, se = bell.mc_estimate(ret.model, i, j, trials=50_000, seed=2016)
        print(f"context ({i},{j})  MC {mean:+.4f} +- {se:.4f}   exact {table.correlator(i, j):+.4f}")
