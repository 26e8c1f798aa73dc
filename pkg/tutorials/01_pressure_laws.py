"""Pressure laws, the invariant integral and the structural audit.

Run with ``python tutorials/01_pressure_laws.py``.
"""
# %% A polytropic gas P = k^2 rho^gamma with light speed c
import numpy as np

from relshock import eos as E

gas = E.EosSpec.polytropic(k=1.0, gamma=2.0, c=10.0)
rho = np.array([0.1, 1.0, 10.0, 40.0])
P, dP, d2P, d3P = E.pressure_derivatives(gas, rho)
a, subluminal = E.sound_speed(gas, rho)
print("rho        ", rho)
print("sqrt(P')   ", a)
print("sub-luminal", subluminal)

# %% The sound speed reaches c at a finite density; J stays bounded
print("density ceiling      ", E.density_ceiling(gas))
print("J at the ceiling     ", E.invariant_integral(gas, E.density_ceiling(gas)))
print("sup J (rho -> inf)   ", E.invariant_supremum(gas))
print("classical J(1)       ", E.invariant_integral(gas, 1.0, "classical"))

# %% Inverting J recovers the density; asking for more than sup J is an error
J = E.invariant_integral(gas, 3.0)
print("J^-1(J(3))           ", E.invariant_integral_inverse(gas, J))
try:
    E.invariant_integral_inverse(gas, 1.01 * E.invariant_supremum(gas))
except ValueError as exc:
    print("beyond the ceiling:  ", exc)

# %% A general law goes through adaptive quadrature
cubic = E.EosSpec.from_polynomial([0.0, 0.0, 1.0, 0.01], c=10.0)
print("P = rho^2 + rho^3/100: ceiling", E.density_ceiling(cubic), " J(1)", E.invariant_integral(cubic, 1.0))

# %% The audit certifies positivity, the finite tail and the smallest admissible A
for law, rng in ((gas, (0.01, 10.0)), (cubic, (0.01, 30.0)), (E.EosSpec.polytropic(1.0, 3.0, 10.0), (0.01, 10.0))):
    rep = E.check_pressure_assumptions(law, rng)
    print(law.to_dict(), "-> structural", rep.assumption2, " A_min", rep.A_min_grid, " tail", rep.tail_finite)
