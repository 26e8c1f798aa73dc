import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relshock import eos as E, riemann as R
from relshock.errors import DomainError

C = 10.0
POLY2 = E.EosSpec.polytropic(1.0, 2.0, C)
POLY53 = E.EosSpec.polytropic(1.0, 5 / 3, C)
CUBIC = E.EosSpec.from_polynomial([0.0, 0.0, 1.0, 0.01], C)

rho_st = st.floats(0.05, 20.0)
u_st = st.floats(-9.0, 9.0)


@settings(max_examples=60, deadline=None)
@given(rho_st, u_st, st.sampled_from(["relativistic", "classical"]))
def test_invariant_roundtrip(rho, u, kind):
    r = R.to_riemann(POLY2, R.PrimState(rho, u), kind)
    p = R.from_riemann(POLY2, r)
    assert p.rho == pytest.approx(rho, rel=1e-9)
    assert p.u == pytest.approx(u, rel=1e-9, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(rho_st, u_st)
def test_relativistic_speeds_subluminal_and_ordered(rho, u):
    l1, l2 = R.char_speeds(POLY2, R.PrimState(rho, u))
    assert -C < l1 < l2 < C


@settings(max_examples=40, deadline=None)
@given(rho_st, u_st, st.sampled_from([POLY2, POLY53]))
def test_speed_from_invariants_matches_primitives(rho, u, eos):
    r = R.to_riemann(eos, R.PrimState(rho, u))
    a = R.char_speeds_from_invariants(eos, r.w, r.z, "relativistic")
    b = R.char_speeds(eos, R.PrimState(rho, u))
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


def test_speed_closed_form():
    # rho = 1, u = 0.3, gamma = 2: sound speed sqrt(2), relativistic velocity addition
    a = math.sqrt(2.0)
    l1, l2 = R.char_speeds(POLY2, R.PrimState(1.0, 0.3))
    assert l1 == pytest.approx((0.3 - a) / (1 - 0.3 * a / C ** 2), rel=1e-14)
    assert l2 == pytest.approx((0.3 + a) / (1 + 0.3 * a / C ** 2), rel=1e-14)


def test_classical_limit_slope():
    diffs = []
    cs = [1e2, 1e3, 1e4]
    for c in cs:
        eos = E.EosSpec.polytropic(1.0, 2.0, c)
        rel = R.char_speeds(eos, R.PrimState(1.0, 0.3), "relativistic")[1]
        clas = R.char_speeds(eos, R.PrimState(1.0, 0.3), "classical")[1]
        diffs.append(abs(rel - clas))
    slope = np.polyfit(np.log(cs), np.log(diffs), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.1)


def _fd_identities(eos, w, z, kind, eps):
    e = 1e-5
    f = lambda a, b: R.coefficient_arrays(eos, a, b, kind, eps)
    d = f(w, z)
    l1, l2 = d["lambda1"], d["lambda2"]
    l1z = (f(w, z + e)["lambda1"] - f(w, z - e)["lambda1"]) / (2 * e)
    l2w = (f(w + e, z)["lambda2"] - f(w - e, z)["lambda2"]) / (2 * e)
    l1w = (f(w + e, z)["lambda1"] - f(w - e, z)["lambda1"]) / (2 * e)
    l2z = (f(w, z + e)["lambda2"] - f(w, z - e)["lambda2"]) / (2 * e)
    h1w = (f(w + e, z)["h1"] - f(w - e, z)["h1"]) / (2 * e)
    h2z = (f(w, z + e)["h2"] - f(w, z - e)["h2"]) / (2 * e)
    return {
        "h1": h1w - l1w / (l1 - l2),
        "h2": h2z - l2z / (l2 - l1),
        "r1": d["riccati1"] / (np.exp(-d["h1"]) * l1z) - 1,
        "r2": d["riccati2"] / (np.exp(-d["h2"]) * l2w) - 1,
    }


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(-3.0, 3.0), st.sampled_from(["relativistic", "classical"]),
       st.sampled_from([POLY2, POLY53]))
def test_weight_identities_polytropic(rho, u, kind, eos):
    r = R.to_riemann(eos, R.PrimState(rho, u), kind)
    res = _fd_identities(eos, r.w, r.z, kind, None)
    assert abs(res["h1"]) < 1e-6 and abs(res["h2"]) < 1e-6
    assert abs(res["r1"]) < 1e-6 and abs(res["r2"]) < 1e-6


@pytest.mark.parametrize("kind", ["relativistic", "classical"])
@pytest.mark.parametrize("w,z", [(3.5, -2.0), (2.0, -1.0), (6.0, -4.0)])
def test_weight_identities_general_law(kind, w, z):
    res = _fd_identities(CUBIC, w, z, kind, 2.0)
    for v in res.values():
        assert abs(v) < 1e-5


def test_general_law_matches_polytropic_riccati():
    # P = rho^2 through the quadrature path; the weights may differ from the closed
    # form only by a function of z (resp. w), so the ratio is frozen along that level set
    gen = E.EosSpec.from_polynomial([0.0, 0.0, 1.0], C)
    f = lambda eos, w, z, eps: R.coefficient_arrays(eos, w, z, "relativistic", eps)
    r1 = [f(gen, w, -2.0, 1.0)["riccati1"] / f(POLY2, w, -2.0, None)["riccati1"] for w in (2.5, 3.5)]
    r2 = [f(gen, 3.0, z, 1.0)["riccati2"] / f(POLY2, 3.0, z, None)["riccati2"] for z in (-1.0, -2.0)]
    assert r1[0] == pytest.approx(r1[1], rel=1e-6)
    assert r2[0] == pytest.approx(r2[1], rel=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 49.0))
def test_floor_variable_forms_agree(rho):
    assert R.cal_y(POLY2, rho) == pytest.approx(R.cal_y_product_form(POLY2, rho), rel=1e-12)


def test_floor_variable_gamma2_closed_form():
    # gamma = 2: exponent (3-g)/(2g-2) = 1/2, y = rho^(1/2) / c
    y = math.sqrt(4.0) / C
    assert R.cal_y(POLY2, 4.0) == pytest.approx(math.sqrt(y) * math.sqrt(1 + y * y), rel=1e-14)
    with pytest.raises(DomainError):
        R.cal_y(POLY2, 60.0)


def test_threshold_and_velocity_bound():
    g = 2.0
    assert R.light_speed_threshold(POLY2) == pytest.approx(4 * C * math.sqrt(g) / (g - 1) * math.atan(1 / math.sqrt(g)))
    assert R.velocity_bound(C, 5.0) == pytest.approx(C * math.tanh(0.5))


def test_threshold_reaches_ceiling():
    # w - z = threshold with u = 0 sits exactly at the sound-speed ceiling
    thr = R.light_speed_threshold(POLY2)
    rho = E.invariant_integral_inverse(POLY2, thr / 2 * (1 - 1e-12))
    assert rho == pytest.approx(E.density_ceiling(POLY2), rel=1e-9)


def test_admissibility_rejects_large_spread():
    thr = R.light_speed_threshold(POLY2)
    rep = R.admissibility_check(POLY2, R.DataBounds(0.6 * thr, -0.6 * thr, 0.6 * thr, 0.1))
    assert not rep.passed and rep.reasons


def test_admissibility_rejects_vacuum():
    rep = R.admissibility_check(POLY2, R.DataBounds(1.0, -1.0, 1.0, 0.0))
    assert not rep.passed


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 30.0), st.floats(-5.0, 5.0))
def test_general_law_sandwich_lower(rho, u):
    r = R.to_riemann(CUBIC, R.PrimState(rho, u))
    d = R.coefficient_arrays(CUBIC, r.w, r.z, "relativistic", 0.5)
    assert d["H1"] == pytest.approx(2 * d["G1"], rel=1e-10)
    assert d["H1"] + d["H2"] >= 2 * (d["G1"] + d["G2"]) * (1 - 1e-12)


def test_velocity_bound_holds_on_states():
    M0 = 4.0
    for w in np.linspace(-M0, M0, 9):
        for z in np.linspace(-M0, w, 5):
            u = R.velocity_from_sum(w + z, C, "relativistic")
            assert abs(u) <= R.velocity_bound(C, M0) + 1e-12
