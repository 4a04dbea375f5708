"""Local hidden variables cap CHSH at 2; outcome-dependent source weights do not.

Run: python demos/01_local_vs_retro_bound.py
"""
# %% Every deterministic local strategy, scored by brute force
from bellarrow import bell, search

enum = search.enumerate_deterministic_local()
for strat, s in zip(enum.strategies, enum.chsh_values):
    print(f"(a0, a1, b0, b1) = {tuple(int(v) for v in strat)}  S = {s:+.0f}")
print("max |S| over deterministic strategies:", enum.max_abs_chsh)
print("max CH over detect/no-detect strategies:", enum.max_ch)

# %% The same bound from a linear program over mixtures of strategies
local = search.max_chsh_local_lp()
print("\nlocal LP optimum:", local.optimum, "support:", local.extra["support"])
print("with no-signalling rows added:", search.max_chsh_local_lp(no_signalling=True).optimum)

# %% Let the source weight depend on the outcomes (a, b) each party will see
retro = search.max_chsh_retro_lp()
print("\nretro LP optimum (16-atom canonical class):", retro.optimum)
print("correlators re-evaluated from the witness:", retro.extra["correlators"])

# The witness only uses a handful of atoms
w = retro.model.weight
for k in range(16):
    if w[k].any():
        print(f"  atom {k:2d} plays {tuple(int(v) for v in search.deterministic_strategies()[k])}, "
              f"w(a, b) = {w[k].tolist()}")

# %% The witness signals: Bob's marginal depends on Alice's setting
rep = bell.check_no_signalling(bell.behavior(retro.model))
print("\nno-signalling passed?", rep.passed, "  max marginal drift:", rep.max_difference)

# %% Demanding no-signalling of the observed statistics
ns = search.max_chsh_retro_lp(no_signalling=True)
print("retro LP optimum with no-signalling:", ns.optimum)
