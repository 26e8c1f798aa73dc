"""Riemann invariants, characteristic speeds and the classical limit."""
# %%
import numpy as np

from relshock import eos as E, riemann as R

gas = E.EosSpec.polytropic(1.0, 2.0, 10.0)
state = R.PrimState(rho=1.0, u=0.3)
inv = R.to_riemann(gas, state)
print("w, z      ", inv.w, inv.z)
print("back      ", R.from_riemann(gas, inv))
print("speeds    ", R.char_speeds(gas, state))

# %% Admissible data: w_max - z_min below the threshold keeps every state sub-luminal
print("threshold ", R.light_speed_threshold(gas))
print("|u| bound for M0 = 4:", R.velocity_bound(gas.c, 4.0))

# %% The weights h1, h2 turn the gradient equations into Riccati equations
d = R.coefficient_arrays(gas, inv.w, inv.z, "relativistic")
for key in ("lambda1", "lambda2", "h1", "h2", "riccati1", "riccati2", "calY"):
    print(f"{key:9s}", float(d[key]))

# %% Relativistic speeds approach the classical ones like c^-2
for c in (1e2, 1e3, 1e4):
    g = E.EosSpec.polytropic(1.0, 2.0, c)
    rel = np.array(R.char_speeds(g, state, "relativistic"))
    clas = np.array(R.char_speeds(g, state, "classical"))
    print(f"c = {c:8.0f}  max |lambda_rel - lambda_clas| = {np.max(np.abs(rel - clas)):.3e}")
