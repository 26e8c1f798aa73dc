"""Compression detection, Riccati blowup prediction and decay diagnostics.

A discrete run can falsify the global-existence/blowup dichotomy inside a
finite horizon but never prove global existence, so the "global" verdict is
always labelled as holding within the horizon.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import riemann as rm
from .errors import DomainError, NumericError
from .solver1d import CharTrace, Field1D, TimeSeries, Tracer, integrate_riccati, trace_characteristic

DEAD_BAND = 1e-12
VERDICT_GLOBAL = "global(within-horizon)"
VERDICT_SINGULAR = "finite-time singularity"


@dataclass
class RCCharacterMap:
    """Per-cell R/C labels: +1 rarefactive, -1 compressive, 0 neutral."""

    forward: np.ndarray
    backward: np.ndarray

    @property
    def counts(self) -> dict:
        f, b = self.forward, self.backward
        return {"forward-R": int(np.sum(f > 0)), "forward-C": int(np.sum(f < 0)),
                "backward-R": int(np.sum(b > 0)), "backward-C": int(np.sum(b < 0)),
                "forward-neutral": int(np.sum(f == 0)), "backward-neutral": int(np.sum(b == 0))}

    @property
    def compression_cells(self) -> int:
        return int(np.sum((self.forward < 0) | (self.backward < 0)))

    @property
    def compression_present(self) -> bool:
        return self.compression_cells > 0


def classify_rc(field0: Field1D, dead_band: float = DEAD_BAND) -> RCCharacterMap:
    """Label cells by the signs of the initial gradients ``w0_x`` (forward) and ``z0_x`` (backward)."""
    g = field0.grid
    _, w0, z0 = field0.history[0] if field0.history else (0.0, field0.w, field0.z)

    def lab(q):
        d = g.gradient(q)
        return np.where(np.abs(d) < dead_band, 0, np.sign(d)).astype(int)

    return RCCharacterMap(lab(w0), lab(z0))


# -- seeds and prediction ------------------------------------------------------
def initial_weighted_gradients(field0: Field1D):
    """``(xi0, zeta0)`` on the grid at the first stored level."""
    _, w0, z0 = field0.history[0]
    d = rm.coefficient_arrays(field0.eos, w0, z0, field0.kind, field0._gauge())
    g = field0.grid
    return np.exp(d["h1"]) * g.gradient(z0), np.exp(d["h2"]) * g.gradient(w0)


def default_seeds(field0: Field1D, n_uniform: int = 8):
    """Argmin cells of ``xi0``/``zeta0`` plus ``n_uniform`` evenly spaced negative cells.

    Returns ``(positions, families)``; empty when nothing is compressive.
    """
    xi0, ze0 = initial_weighted_gradients(field0)
    x = field0.grid.x
    pos, fam = [], []
    for fam_id, q in ((1, xi0), (2, ze0)):
        if np.min(q) < -DEAD_BAND:
            pos.append(x[int(np.argmin(q))])
            fam.append(fam_id)
    pool = [(i, 1) for i in np.nonzero(xi0 < -DEAD_BAND)[0]] + [(i, 2) for i in np.nonzero(ze0 < -DEAD_BAND)[0]]
    if pool:
        pick = np.unique(np.linspace(0, len(pool) - 1, min(n_uniform, len(pool))).round().astype(int))
        for j in pick:
            i, f = pool[j]
            pos.append(x[i])
            fam.append(f)
    return np.array(pos, dtype=float), np.array(fam, dtype=int)


def seed_tracer(field0: Field1D, seeds=None, families=None, n_uniform: int = 8) -> Tracer:
    """Build an online :class:`Tracer` for :func:`evolve` on the default seeds."""
    if seeds is None:
        seeds, families = default_seeds(field0, n_uniform)
    return Tracer(field0, seeds, families)


@dataclass
class SeedPrediction:
    x0: float
    family: int
    xi0: float
    t_star: float | None
    extrapolated: bool
    frozen_bound: float | None
    max_rel_error: float


@dataclass
class BlowupReport:
    compression_present: bool
    compression_cells: int
    predicted_t_star: float | None = None
    observed_t_star: float | None = None
    seeds: list = field(default_factory=list)
    frozen_bound: float | None = None
    floor_fit: dict | None = None
    exponent_fit: dict | None = None
    T_m: float | None = None
    verdict: str | None = None
    passed: bool | None = None
    diagnostics: list = field(default_factory=list)
    traces: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "passed": self.passed,
            "compression_present": self.compression_present,
            "compression_cells": self.compression_cells,
            "predicted_t_star": self.predicted_t_star,
            "observed_t_star": self.observed_t_star,
            "frozen_coefficient_bound": self.frozen_bound,
            "floor_fit": self.floor_fit,
            "exponent_fit": self.exponent_fit,
            "T_m": self.T_m,
            "seeds": [s.__dict__ for s in self.seeds],
            "diagnostics": list(self.diagnostics),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _tracer_of(series: TimeSeries):
    for m in series.monitors:
        if isinstance(m, Tracer):
            return m
    return None


def collect_traces(series: TimeSeries, seeds=None, families=None) -> list:
    """Traces for the requested seeds, from an attached tracer if possible."""
    f = series.field
    tr = _tracer_of(series)
    if seeds is None:
        if tr is not None:
            return tr.traces()
        seeds, families = default_seeds(f)
    seeds = np.atleast_1d(np.asarray(seeds, dtype=float))
    if families is None:
        families = np.ones(seeds.shape, dtype=int)
    families = np.broadcast_to(np.asarray(families, dtype=int), seeds.shape)
    out = []
    have = tr.traces() if tr is not None else []
    for x0, fam in zip(seeds, families):
        hit = [t for t in have if t.family == fam and abs(t.x0 - x0) <= 1e-12 * max(1.0, abs(x0))]
        out.append(hit[0] if hit else trace_characteristic(series, float(x0), int(fam)))
    return out


def predict_from_traces(traces) -> tuple:
    """Riccati blowup times per trace; returns ``(seed_predictions, t_min, frozen_min)``."""
    preds = []
    for tr in traces:
        xi0 = float(tr.xi_field[0])
        if not xi0 < -DEAD_BAND:
            continue
        res = integrate_riccati(tr, xi0)
        mhat = float(np.min(tr.coeff_samples))
        frozen = -1.0 / (mhat * xi0) if mhat > 0 else None
        preds.append(SeedPrediction(tr.x0, tr.family, xi0, res.blowup_time, res.extrapolated,
                                    frozen, res.max_rel_error))
    times = [p.t_star for p in preds if p.t_star is not None]
    frozen = [p.frozen_bound for p in preds if p.frozen_bound is not None]
    return preds, (min(times) if times else None), (min(frozen) if frozen else None)


def predict_blowup(series: TimeSeries, seeds=None, families=None) -> BlowupReport:
    """Partial report: Riccati-predicted ``t*`` over seeds plus the observed PDE time."""
    rc = classify_rc(series.field)
    traces = collect_traces(series, seeds, families)
    preds, t_min, frozen = predict_from_traces(traces)
    return BlowupReport(rc.compression_present, rc.compression_cells, t_min,
                        series.observed_t_star if series.blowup else None, preds, frozen, traces=traces)


# -- density floor ----------------------------------------------------------------
@dataclass
class FloorFit:
    C1: float | None
    C2: float | None
    min_residual: float | None
    floor_ok: bool | None
    exponent: float | None
    exponent_bound: float
    exponent_ok: bool | None
    n_samples: int
    inconclusive: bool

    def floor_dict(self):
        return {"C1": self.C1, "C2": self.C2, "min_residual": self.min_residual, "passed": self.floor_ok}

    def exponent_dict(self):
        return {"p": self.exponent, "bound": self.exponent_bound, "passed": self.exponent_ok}


def fit_floor(t, calY):
    """Least-squares ``1/calY ~ C1 + C2 t``; returns ``(C1, C2, min calY (C1 + C2 t))``."""
    t = np.asarray(t, dtype=float)
    y = 1.0 / np.asarray(calY, dtype=float)
    C2, C1 = np.polyfit(t, y, 1)
    return float(C1), float(C2), float(np.min(np.asarray(calY) * (C1 + C2 * t)))


def fit_decay_exponent(t, rho_min):
    """``p`` in ``rho_min ~ (1+t)**(-p)`` by least squares in log-log coordinates."""
    slope, _ = np.polyfit(np.log1p(np.asarray(t, dtype=float)), np.log(np.asarray(rho_min, dtype=float)), 1)
    return float(-slope)


def verify_density_floor(series: TimeSeries, trace: CharTrace | None = None, gamma: float | None = None,
                         tol: float = 0.05, exponent_slack: float = 0.2, min_samples: int = 10) -> FloorFit:
    """Check ``calY >= 1/(C1 + C2 t)`` and the density decay rate.

    Uses ``calY`` along ``trace`` when given, else the series minimum.
    """
    eos = series.field.eos
    if gamma is None:
        gamma = eos.gamma if eos.kind == "polytropic" else None
    bound = 4.0 / (3.0 - gamma) + exponent_slack if gamma is not None and gamma < 3 else math.inf
    if trace is not None:
        t, cy = trace.t_samples, trace.calY_samples
    else:
        t, cy = series.column("t"), series.column("calY_min")
    tr, rho = series.column("t"), series.column("rho_min")
    n = min(len(t), len(tr))
    if n < min_samples:
        return FloorFit(None, None, None, None, None, bound, None, n, True)
    C1, C2, mres = fit_floor(t, cy)
    p = fit_decay_exponent(tr, rho)
    return FloorFit(C1, C2, mres, mres >= 1 - tol, p, bound, p <= bound, n, False)


# -- the weighted-gradient caps and the floor Riccati inequality -------------------
def gradient_caps(field0: Field1D):
    """``Q1, Q2 = max(0, sup xi0), max(0, sup zeta0)``."""
    xi0, ze0 = initial_weighted_gradients(field0)
    return max(0.0, float(np.max(xi0))), max(0.0, float(np.max(ze0)))


def cap_excess(traces, Q1, Q2) -> float:
    """Largest ``xi - Q1`` (family 1) or ``zeta - Q2`` (family 2) along traces."""
    worst = -math.inf
    for tr in traces:
        Q = Q1 if tr.family == 1 else Q2
        if len(tr.xi_field):
            worst = max(worst, float(np.max(tr.xi_field)) - Q)
    return worst


@dataclass
class FloorInequality:
    C_hat: float
    fraction: float
    n_samples: int
    n_violations: int
    worst: float


def floor_riccati_check(traces, Q2, tol: float = 1e-3) -> FloorInequality:
    """Forward differences of ``calY`` along family-1 traces against ``-C_hat calY**2 - tol``.

    ``C_hat = Q2 * max(rate / calY**2)`` over all family-1 samples, with
    ``rate`` the factor returned by :func:`riemann.floor_rate_factor`.
    """
    fam1 = [tr for tr in traces if tr.family == 1 and len(tr.t_samples) > 1]
    if not fam1:
        raise DomainError("no family-1 traces with at least two samples")
    ratios = np.concatenate([tr.rate_samples / tr.calY_samples ** 2 for tr in fam1])
    if np.any(np.isnan(ratios)):
        raise NumericError("floor rate factor unavailable for this pressure law")
    C_hat = Q2 * float(np.max(ratios))
    n = viol = 0
    worst = math.inf
    for tr in fam1:
        t, Y = tr.t_samples, tr.calY_samples
        dt = np.diff(t)
        ok = dt > 0
        lhs = np.diff(Y)[ok] / dt[ok]
        rhs = -C_hat * Y[:-1][ok] ** 2 - tol
        n += int(ok.sum())
        viol += int(np.sum(lhs < rhs))
        if ok.any():
            worst = min(worst, float(np.min(lhs - rhs)))
    return FloorInequality(C_hat, 1 - viol / n if n else 1.0, n, viol, worst)


# -- verdict ------------------------------------------------------------------
def dichotomy_verdict(rc: RCCharacterMap, report: BlowupReport):
    """Rule table for the blowup-iff-compression dichotomy.

    Returns ``(passed, verdict, diagnostics)`` and fills the report in place.
    """
    pred, obs = report.predicted_t_star, report.observed_t_star
    diag = []
    if rc.compression_present:
        verdict = VERDICT_SINGULAR
        passed = pred is not None or obs is not None
        if not passed:
            diag.append("compression present but no blowup found: horizon too short")
        elif pred is None:
            diag.append("PDE blowup observed but no Riccati prediction available")
        elif obs is None:
            diag.append("Riccati prediction without PDE blowup flag before the horizon")
    else:
        verdict = VERDICT_GLOBAL
        passed = pred is None and obs is None
        if not passed:
            diag.append("blowup detected on data without compression contradicts the dichotomy")
    report.verdict, report.passed = verdict, passed
    report.diagnostics.extend(diag)
    return passed, verdict, diag
