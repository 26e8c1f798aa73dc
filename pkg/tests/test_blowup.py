import json

import numpy as np
import pytest

from relshock import blowup as B, eos as E, solver1d as S
from relshock.errors import DomainError

C = 10.0
POLY2 = E.EosSpec.polytropic(1.0, 2.0, C)


def _field(prof, n=512, lo=-10.0, hi=10.0):
    return S.init_field(S.Grid1D(lo, hi, n), POLY2, "relativistic", prof)


@pytest.fixture(scope="module")
def gauss_run():
    f = _field(S.InitialProfile.gauss_z(1.0, 1.0), 1024)
    tr = B.seed_tracer(f)
    ser = S.evolve(f, 5.0, monitors=[tr], gradient_blowup_factor=10)
    return f, ser, B.predict_blowup(ser)


@pytest.fixture(scope="module")
def mixed_run():
    f = _field(S.InitialProfile.mixed(0.5, 2.0, 0.3, 1.0, z_center=3.0), 1024, -16, 16)
    tr = B.seed_tracer(f)
    ser = S.evolve(f, 50.0, monitors=[tr], gradient_blowup_factor=20, history_every=0)
    return f, ser, B.predict_blowup(ser)


def test_rc_labels():
    f = _field(S.InitialProfile.tanh_ramp(0.5, 0.5, 2.0))
    rc = B.classify_rc(f)
    assert not rc.compression_present
    assert rc.counts["forward-C"] == 0 and rc.counts["backward-C"] == 0
    g = _field(S.InitialProfile.gauss_z(1.0, 1.0))
    rc = B.classify_rc(g)
    assert rc.compression_present and rc.counts["forward-C"] == 0 and rc.counts["backward-C"] > 0


def test_dead_band_treats_flat_as_neutral():
    rc = B.classify_rc(_field(S.InitialProfile.constant()))
    assert rc.counts["forward-neutral"] == rc.forward.size and not rc.compression_present


def test_default_seeds_empty_without_compression():
    pos, fam = B.default_seeds(_field(S.InitialProfile.tanh_ramp(0.5, 0.5, 2.0)))
    assert pos.size == 0 and fam.size == 0


def test_default_seeds_include_argmin():
    f = _field(S.InitialProfile.gauss_z(1.0, 1.0))
    pos, fam = B.default_seeds(f)
    xi0, _ = B.initial_weighted_gradients(f)
    assert pos[0] == f.grid.x[int(np.argmin(xi0))] and fam[0] == 1
    assert np.all(fam == 1)


def test_prediction_matches_observation(gauss_run):
    _, ser, rep = gauss_run
    assert ser.blowup
    # coarse grid with a low detector threshold; the refined comparison lives in the acceptance suite
    assert abs(rep.predicted_t_star - rep.observed_t_star) / rep.observed_t_star <= 0.2
    # frozen-coefficient bound uses the smallest coefficient, so it is the later time
    assert rep.frozen_bound >= rep.predicted_t_star * (1 - 1e-9)


def test_verdict_rules(gauss_run):
    f, _, rep = gauss_run
    passed, verdict, _ = B.dichotomy_verdict(B.classify_rc(f), rep)
    assert passed and verdict == B.VERDICT_SINGULAR
    rc = B.classify_rc(_field(S.InitialProfile.constant()))
    ok, v, diag = B.dichotomy_verdict(rc, B.BlowupReport(False, 0))
    assert ok and v == B.VERDICT_GLOBAL
    ok, _, diag = B.dichotomy_verdict(rc, B.BlowupReport(False, 0, observed_t_star=1.0))
    assert not ok and diag


def test_report_json_roundtrip(gauss_run):
    d = json.loads(gauss_run[2].to_json())
    assert d["predicted_t_star"] == pytest.approx(gauss_run[2].predicted_t_star)
    assert len(d["seeds"]) == len(gauss_run[2].seeds)


def test_caps_hold(gauss_run):
    f, _, rep = gauss_run
    Q1, Q2 = B.gradient_caps(f)
    tol = 5 * f.grid.dx * max(np.abs(f.wx0).max(), np.abs(f.zx0).max())
    assert B.cap_excess(rep.traces, Q1, Q2) <= tol


def test_floor_fit_on_mixed(mixed_run):
    _, ser, rep = mixed_run
    fam1 = [t for t in rep.traces if t.family == 1]
    fit = B.verify_density_floor(ser, fam1[0])
    assert fit.floor_ok and fit.min_residual >= 0.95
    assert fit.exponent_ok and fit.exponent_bound == pytest.approx(4.2)


def test_floor_inequality_on_mixed(mixed_run):
    f, _, rep = mixed_run
    _, Q2 = B.gradient_caps(f)
    res = B.floor_riccati_check(rep.traces, Q2)
    assert res.fraction >= 0.99 and res.C_hat > 0


def test_floor_inequality_needs_family1():
    t = np.linspace(0, 1, 4)
    tr = S.CharTrace(2, t, t, t, t + 1, t, t, t, t)
    with pytest.raises(DomainError):
        B.floor_riccati_check([tr], 1.0)


def test_fit_helpers_exact():
    t = np.linspace(0.0, 10.0, 50)
    C1, C2, res = B.fit_floor(t, 1.0 / (2.0 + 0.5 * t))
    assert (C1, C2) == pytest.approx((2.0, 0.5)) and res == pytest.approx(1.0)
    assert B.fit_decay_exponent(t, (1 + t) ** -1.5) == pytest.approx(1.5)


def test_floor_inconclusive_on_short_series():
    f = _field(S.InitialProfile.gauss_z(1.0, 1.0), 64)
    ser = S.evolve(f, 0.05)
    fit = B.verify_density_floor(ser)
    assert fit.inconclusive and fit.floor_ok is None
