"""The same pipeline for a non-polytropic law, P = rho^2 + rho^3/100.

All weights come from quadrature tables; the Riccati coefficient is
proportional to H1 + H2, which we compare with its classical counterpart
G1 + G2.
"""
# %%
import numpy as np

from relshock import blowup as B, eos as E, riemann as R, solver1d as S

law = E.EosSpec.from_polynomial([0.0, 0.0, 1.0, 0.01], c=10.0)
print("audit A_min:", E.check_pressure_assumptions(law, (0.01, 30.0)).A_min_grid)

f = S.init_field(S.Grid1D(-10, 10, 1024), law, "relativistic", S.InitialProfile.gauss_z(1.0, 1.0))
tracer = B.seed_tracer(f)
ser = S.evolve(f, 5.0, monitors=[tracer], gradient_blowup_factor=10, history_every=20)
rep = B.predict_blowup(ser)
print("observed", ser.observed_t_star, " predicted", rep.predicted_t_star)

# %% H1 = 2 G1 exactly and H2 >= 2 G2, so H1 + H2 >= 2 (G1 + G2)
_, w, z = ser.history[-1]
d = R.coefficient_arrays(law, w, z, "relativistic", f.epsilon)
ratio = (d["H1"] + d["H2"]) / (d["G1"] + d["G2"])
gh = float(np.max(np.sqrt(E.pressure_derivatives(law, d["rho"])[1]))) / law.c
print("(H1+H2)/(G1+G2) in [", ratio.min(), ",", ratio.max(), "]")
print("2 (1+g^2)/(1-g^2) with g = max sqrt(P')/c:", 2 * (1 + gh ** 2) / (1 - gh ** 2))
