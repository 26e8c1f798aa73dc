import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from relshock import eos as E
from relshock.errors import DomainError

C = 10.0
POLY2 = E.EosSpec.polytropic(1.0, 2.0, C)
POLY53 = E.EosSpec.polytropic(1.0, 5 / 3, C)
CUBIC = E.EosSpec.from_polynomial([0.0, 0.0, 1.0, 0.01], C)


def test_relativistic_integral_gamma3_closed_form():
    # k = c = 1: J(1) = (2 sqrt3 / 2) arctan(1) = sqrt(3) pi / 4
    eos = E.EosSpec.polytropic(1.0, 3.0, 1.0)
    assert E.invariant_integral(eos, 1.0) == pytest.approx(math.sqrt(3) * math.pi / 4, rel=1e-14)


def test_classical_integral():
    assert E.invariant_integral(POLY2, 4.0, "classical") == pytest.approx(2 * math.sqrt(2) * 2, rel=1e-14)


@pytest.mark.parametrize("rho", [1e-3, 0.5, 2.0, 30.0])
def test_quadrature_agrees_with_closed_form(rho):
    # P = rho^2 written as a polynomial takes the quadrature path
    gen = E.EosSpec.from_polynomial([0.0, 0.0, 1.0], C)
    for kind in ("relativistic", "classical"):
        assert E.invariant_integral(gen, rho, kind) == pytest.approx(E.invariant_integral(POLY2, rho, kind), rel=1e-9)


def test_density_ceiling_values():
    assert E.density_ceiling(POLY2) == pytest.approx(50.0, rel=1e-14)
    # 2 rho + 0.03 rho^2 = 100 -> rho = 100/3
    assert E.density_ceiling(CUBIC) == pytest.approx(100 / 3, rel=1e-12)


def test_sound_speed_flag():
    a, ok = E.sound_speed(POLY2, 2.0)
    assert a == pytest.approx(2.0)
    assert ok
    _, ok = E.sound_speed(POLY2, 60.0)
    assert not ok


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-6, 49.0), st.sampled_from([POLY2, POLY53]))
def test_inverse_roundtrip(rho, eos):
    J = E.invariant_integral(eos, rho)
    assert E.invariant_integral_inverse(eos, J) == pytest.approx(rho, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-3, 30.0))
def test_general_inverse_roundtrip(rho):
    J = E.invariant_integral(CUBIC, rho)
    assert E.invariant_integral_inverse(CUBIC, J) == pytest.approx(rho, rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-4, 40.0), st.floats(1e-4, 40.0))
def test_integral_monotone(a, b):
    lo, hi = sorted((a, b))
    assert E.invariant_integral(POLY2, lo) <= E.invariant_integral(POLY2, hi)


def test_inverse_beyond_supremum():
    sup = E.invariant_supremum(POLY2)
    with pytest.raises(DomainError, match="light-speed ceiling"):
        E.invariant_integral_inverse(POLY2, sup * 1.01)


@pytest.mark.parametrize("gamma", [1.0, 0.5])
def test_gamma_must_exceed_one(gamma):
    with pytest.raises(DomainError, match="gamma > 1"):
        E.EosSpec.polytropic(1.0, gamma, C)


def test_json_roundtrip():
    for eos in (POLY2, CUBIC):
        back = E.EosSpec.from_dict(eos.to_dict())
        assert E.pressure_derivatives(back, 1.7) == pytest.approx(E.pressure_derivatives(eos, 1.7))


def test_table_law_close_to_polynomial():
    rho = np.linspace(0.0, 40.0, 401)
    tab = E.EosSpec.from_table(rho, rho ** 2, C)
    assert E.pressure_derivatives(tab, 3.05)[1] == pytest.approx(6.1, rel=1e-3)


def test_particle_number_paths_agree():
    gen = E.EosSpec.from_polynomial([0.0, 0.0, 1.0], C)
    for r in (0.2, 1.0, 5.0):
        assert E.particle_number(gen, r) == pytest.approx(E.particle_number(POLY2, r), rel=1e-9)


def _symbolic_A_min(gamma):
    """Smallest A making the audit expression non-negative for P = rho**gamma."""
    r = sp.Symbol("rho", positive=True)
    A = sp.Symbol("A")
    g = sp.nsimplify(gamma)
    P = r ** g
    d1, d2, d3 = (sp.diff(P, r, n) for n in (1, 2, 3))
    expr = (5 + A) * r ** 8 * d2 ** 2 - 4 * r ** 8 * d1 * d3 + (4 * A - 4) * r ** 6 * d1 ** 2 \
        + (4 * A - 4) * r ** 7 * d1 * d2
    # every term scales as rho**(2 gamma + 4): divide it out
    reduced = sp.simplify(sp.expand(expr / r ** (2 * g + 4)))
    slope, icpt = sp.Poly(reduced, A).all_coeffs()
    return float(-icpt / slope)


def test_audit_gamma2_matches_symbolic():
    oracle = _symbolic_A_min(2)
    assert oracle == pytest.approx(1 / 3)
    rep = E.check_pressure_assumptions(POLY2, (0.01, 10.0))
    assert rep.assumption2 and rep.assumption3
    assert abs(rep.A_min_grid - oracle) <= 1e-3
    assert rep.A_min_continuous == pytest.approx(oracle, rel=1e-9)


@pytest.mark.parametrize("gamma", [1.4, 5 / 3, 3.0])
def test_audit_other_gammas(gamma):
    oracle = max(_symbolic_A_min(gamma), 0.0)
    rep = E.check_pressure_assumptions(E.EosSpec.polytropic(1.0, gamma, C), (0.01, 5.0))
    assert rep.A_min_continuous == pytest.approx(oracle, abs=1e-9)


def test_gamma3_tail():
    rep = E.check_pressure_assumptions(E.EosSpec.polytropic(1.0, 3.0, C), (0.01, 5.0))
    assert rep.assumption2 and rep.tail_finite


def test_linear_law_tail_diverges():
    lin = E.EosSpec.from_polynomial([0.0, 1.0], C)
    rep = E.check_pressure_assumptions(lin, (0.1, 5.0))
    assert not rep.tail_finite and not rep.assumption2


def test_cubic_law_audit():
    rep = E.check_pressure_assumptions(CUBIC, (0.01, 30.0))
    assert rep.assumption2 and rep.assumption3 and rep.tail_finite


def test_bad_range():
    with pytest.raises(DomainError):
        E.check_pressure_assumptions(POLY2, (2.0, 1.0))
