"""Lower bound on the density before blowup.

On mixed data (a rarefactive ramp in ``w`` and a compressive dip in ``z``) the
floor variable calY along a family-1 characteristic stays above
``1/(C1 + C2 t)``, and calY obeys ``calY' >= -C calY^2``.
"""
# %%
from relshock import blowup as B, eos as E, solver1d as S

gas = E.EosSpec.polytropic(1.0, 2.0, 10.0)
prof = S.InitialProfile.mixed(w_amplitude=0.5, w_width=2.0, z_amplitude=0.3, z_width=1.0, z_center=3.0)
f = S.init_field(S.Grid1D(-16, 16, 2048), gas, "relativistic", prof)
tracer = B.seed_tracer(f)
ser = S.evolve(f, 50.0, monitors=[tracer], gradient_blowup_factor=20, history_every=0)
print("run ended at t =", round(ser.field.t, 3), "because", ser.halt_reason)

# %% Affine fit of 1/calY along the first family-1 trace
rep = B.predict_blowup(ser)
fam1 = [t for t in rep.traces if t.family == 1]
fit = B.verify_density_floor(ser, fam1[0])
print("C1, C2 =", fit.C1, fit.C2, " min calY (C1 + C2 t) =", round(fit.min_residual, 4))
print("rho_min decay exponent", round(fit.exponent, 3), "(bound", fit.exponent_bound, ")")

# %% Forward differences of calY against the Riccati-type lower bound
Q1, Q2 = B.gradient_caps(f)
ineq = B.floor_riccati_check(rep.traces, Q2)
print("caps Q1, Q2 =", Q1, Q2, " C_hat =", round(ineq.C_hat, 4), " fraction satisfied =", ineq.fraction)
print("largest excess of traced gradients over their caps:", B.cap_excess(rep.traces, Q1, Q2))
