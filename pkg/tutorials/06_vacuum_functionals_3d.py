"""Three-dimensional functionals on fields with compact support.

Exact pressureless dust streams move rigidly and expand affinely, which makes
them a clean check of the conservation laws the blowup arguments rest on.
"""
# %%
import numpy as np

from relshock import eos as E, multid as M

c = 10.0
snaps = [M.compute_functionals(M.dust_stream(c, amplitude=1.0, radius=1.0, center=(0.5, 0, 0),
                                             velocity=(1.0, 0.5, 0.0), expansion=0.2, t=t))
         for t in (0.0, 0.5, 1.0, 1.5)]
for s in snaps:
    print(f"t={s.t:.1f}  m={s.m:.12f}  X*={np.round(s.X_star, 6)}  M={s.M:.6f}  F={s.F_rad:.6f}")
print(M.conservation_check(snaps))

# %% The momentum sets a floor on the largest speed of any regular solution
print("velocity floor |P|/(2m) =", M.velocity_floor(snaps[0]))

# %% An isolated mass group with positive pressure must break down by T
gas = E.EosSpec.polytropic(1.0, 2.0, c)
ball = M.uniform_ball(gas, density=1.0, radius=1.0)
group = M.MassGroupSpec.from_field(ball, A0=((0, 0, 0), 1.0), B0=((0, 0, 0), 1.5), R0=2.0)
print("D0, D =", M.mass_group_constants(group, gas), " T =", M.mass_group_blowup_bound(group, gas))

# %% Free streaming: the velocity gradient solves a matrix Riccati equation
G = np.diag([-1.0, 0.0, 0.0])
print("focusing time", M.free_stream_time(G))
print("grad u at t = 0.5\n", M.free_stream_gradient(G, 0.5)[0])
