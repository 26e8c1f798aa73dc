"""Upwind solver for the diagonal transport system and characteristic tracing.

The invariants obey ``w_t + lambda2 w_x = 0`` and ``z_t + lambda1 z_x = 0``.
Each equation has a single signed speed per cell, so first-order upwinding per
cell is the natural scheme; a minmod-limited second-order variant with Heun
time stepping is available via ``scheme="muscl"``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import eos as eosm
from . import riemann as rm
from .eos import EosSpec, InvariantKind, as_kind
from .errors import ConfigError, DomainError, NumericError, SolverError

SERIES_COLUMNS = ("t", "rho_min", "calY_min", "max_abs_wx", "max_abs_zx", "u_max", "dt")
TRACE_COLUMNS = ("t", "x", "coeff", "inv_xi", "calY")


def format_float(v) -> str:
    """Locale-independent shortest round-trip representation."""
    return repr(float(v))


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_cells: int
    boundary: str = "constant-extrapolation"

    def __post_init__(self):
        if not self.x_max > self.x_min or self.n_cells < 3:
            raise DomainError("grid needs x_max > x_min and at least 3 cells")
        if self.boundary not in ("periodic", "constant-extrapolation"):
            raise DomainError(f"unknown boundary {self.boundary!r}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def x(self):
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def periodic(self) -> bool:
        return self.boundary == "periodic"

    def gradient(self, q):
        """Central differences inside, one-sided at non-periodic boundaries."""
        if self.periodic:
            return (np.roll(q, -1) - np.roll(q, 1)) / (2 * self.dx)
        return np.gradient(q, self.dx)

    def interp(self, xs, q):
        if self.periodic:
            L = self.x_max - self.x_min
            xc = self.x
            xp = np.concatenate([[xc[-1] - L], xc, [xc[0] + L]])
            qp = np.concatenate([[q[-1]], q, [q[0]]])
            return np.interp(self.wrap(xs), xp, qp)
        return np.interp(xs, self.x, q)

    def wrap(self, xs):
        if not self.periodic:
            return xs
        L = self.x_max - self.x_min
        return self.x_min + np.mod(np.asarray(xs) - self.x_min, L)

    def to_dict(self):
        return {"x_min": self.x_min, "x_max": self.x_max, "n_cells": self.n_cells, "boundary": self.boundary}


# -- initial data ------------------------------------------------------------
_SHAPES = {
    "gauss": lambda s: np.exp(-s * s),
    "tanh": np.tanh,
}


@dataclass(frozen=True)
class InitialProfile:
    """Background state ``(rho, u)`` plus perturbations of ``w`` and ``z``.

    Each perturbation term is ``(shape, amplitude, width, center)`` with shape
    ``"gauss"`` or ``"tanh"``, added as ``amplitude * shape((x-center)/width)``.
    ``w_fn``/``z_fn`` override the invariants entirely when given.
    """

    rho: float = 1.0
    u: float = 0.0
    w_terms: tuple = ()
    z_terms: tuple = ()
    w_fn: Callable | None = None
    z_fn: Callable | None = None
    name: str = "custom"

    @classmethod
    def constant(cls, rho=1.0, u=0.0):
        return cls(rho, u, name="constant")

    @classmethod
    def gauss_z(cls, amplitude=1.0, width=1.0, center=0.0, rho=1.0, u=0.0):
        """``z0 = zbar - a exp(-(x-x0)^2/s^2)``, ``w0 = wbar``."""
        return cls(rho, u, z_terms=(("gauss", -amplitude, width, center),), name="gauss-z")

    @classmethod
    def gauss_w(cls, amplitude=1.0, width=1.0, center=0.0, rho=1.0, u=0.0):
        return cls(rho, u, w_terms=(("gauss", amplitude, width, center),), name="gauss-w")

    @classmethod
    def tanh_ramp(cls, w_amplitude=0.5, z_amplitude=0.5, width=1.0, center=0.0, rho=1.0, u=0.0):
        """Nondecreasing ramps in both invariants when both amplitudes are >= 0."""
        return cls(rho, u, w_terms=(("tanh", w_amplitude, width, center),),
                   z_terms=(("tanh", z_amplitude, width, center),), name="tanh-ramp")

    @classmethod
    def mixed(cls, w_amplitude=0.5, w_width=2.0, z_amplitude=0.2, z_width=1.0,
              w_center=0.0, z_center=0.0, rho=1.0, u=0.0):
        """Rarefactive ramp in ``w`` plus a compressive Gaussian dip in ``z``."""
        return cls(rho, u, w_terms=(("tanh", w_amplitude, w_width, w_center),),
                   z_terms=(("gauss", -z_amplitude, z_width, z_center),), name="mixed")

    _TYPES = ("constant", "gauss-z", "gauss-w", "tanh-ramp", "mixed", "custom")

    @classmethod
    def from_dict(cls, d: dict) -> "InitialProfile":
        d = dict(d)
        kind = d.pop("type", "custom")
        try:
            if kind == "constant":
                return cls.constant(**d)
            if kind == "gauss-z":
                return cls.gauss_z(**d)
            if kind == "gauss-w":
                return cls.gauss_w(**d)
            if kind == "tanh-ramp":
                return cls.tanh_ramp(**d)
            if kind == "mixed":
                return cls.mixed(**d)
            if kind == "custom":
                return cls(d.get("rho", 1.0), d.get("u", 0.0),
                           tuple(tuple(t) for t in d.get("w_terms", ())),
                           tuple(tuple(t) for t in d.get("z_terms", ())))
        except TypeError as exc:
            raise ConfigError(f"profile: {exc}") from None
        raise ConfigError(f"profile.type: unknown profile {kind!r}")

    def invariants(self, x, eos: EosSpec, kind):
        if self.w_fn is not None and self.z_fn is not None:
            return np.asarray(self.w_fn(x), dtype=float), np.asarray(self.z_fn(x), dtype=float)
        wb, zb = rm.riemann_arrays(eos, self.rho, self.u, kind)
        w = np.full_like(x, float(wb))
        z = np.full_like(x, float(zb))
        for terms, q in ((self.w_terms, w), (self.z_terms, z)):
            for shape, amp, width, center in terms:
                if shape not in _SHAPES:
                    raise ConfigError(f"profile: unknown shape {shape!r}")
                q += amp * _SHAPES[shape]((x - center) / width)
        return w, z


@dataclass
class Field1D:
    grid: Grid1D
    eos: EosSpec
    kind: InvariantKind
    t: float
    w: np.ndarray
    z: np.ndarray
    bounds: rm.DataBounds
    admissibility: rm.AdmissibilityReport
    wx0: np.ndarray
    zx0: np.ndarray
    history: list = field(default_factory=list)

    @property
    def epsilon(self):
        return self.bounds.epsilon

    def coefficients(self, w=None, z=None):
        return rm.coefficient_arrays(self.eos, self.w if w is None else w, self.z if z is None else z,
                                     self.kind, self._gauge())

    def _gauge(self):
        return None if self.eos.kind == "polytropic" else self.bounds.epsilon

    def weighted_gradients(self):
        """``(xi, zeta) = (exp(h1) z_x, exp(h2) w_x)`` on the grid."""
        d = self.coefficients()
        return np.exp(d["h1"]) * self.grid.gradient(self.z), np.exp(d["h2"]) * self.grid.gradient(self.w)


def init_field(grid: Grid1D, eos: EosSpec, kind, profile: InitialProfile) -> Field1D:
    kind = as_kind(kind)
    w, z = profile.invariants(grid.x, eos, kind)
    bounds = rm.DataBounds.from_arrays(w, z)
    rep = rm.admissibility_check(eos, bounds, kind)
    if not rep.passed:
        raise ConfigError("inadmissible initial data: " + "; ".join(rep.reasons), exit_code=4)
    f = Field1D(grid, eos, kind, 0.0, w, z, bounds, rep, grid.gradient(w), grid.gradient(z))
    f.history.append((0.0, w.copy(), z.copy()))
    return f


# -- time series -------------------------------------------------------------
@dataclass
class TimeSeries:
    field: Field1D
    rows: dict
    blowup: bool
    observed_t_star: float | None
    halt_reason: str
    steps: int
    max_gradient_ratio: float
    invariant_margin: dict
    monitors: list = field(default_factory=list)

    @property
    def history(self):
        return self.field.history

    def column(self, name):
        return np.asarray(self.rows[name])

    def csv_text(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(SERIES_COLUMNS)
        for i in range(len(self.rows["t"])):
            wr.writerow([format_float(self.rows[c][i]) for c in SERIES_COLUMNS])
        return buf.getvalue()

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())


def _shift(q, periodic, direction):
    if periodic:
        return np.roll(q, direction)
    if direction == 1:
        return np.concatenate([q[:1], q[:-1]])
    return np.concatenate([q[1:], q[-1:]])


def _minmod(a, b):
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _upwind_rate(q, lam, dx, periodic, second_order):
    qm = _shift(q, periodic, 1)
    qp = _shift(q, periodic, -1)
    dm = q - qm
    dp = qp - q
    if second_order:
        s = _minmod(dm, dp)
        sm = _shift(s, periodic, 1)
        sp = _shift(s, periodic, -1)
        dm = dm + 0.5 * (s - sm)
        dp = dp - 0.5 * (sp - s)
    return -(np.maximum(lam, 0.0) * dm + np.minimum(lam, 0.0) * dp) / dx


def _speeds(f: Field1D, w, z):
    return rm.char_speeds_from_invariants(f.eos, w, z, f.kind)


def evolve(field: Field1D, t_end: float, cfl: float = 0.9, monitors: Sequence = (),
           scheme: str = "upwind", gradient_blowup_factor: float = 1e3,
           dt_collapse: float = 1e-12, history_every: int = 1,
           max_steps: int | None = None) -> TimeSeries:
    """Advance ``field`` in place to ``t_end`` or until a blowup criterion fires.

    Parameters
    ----------
    cfl : float
        Courant number in ``(0, 0.9]``.
    monitors : sequence
        Objects with ``update(field, t_prev, w_prev, z_prev)`` (or plain
        callables of the same signature) invoked after every step.
    gradient_blowup_factor : float
        Halt with a blowup flag once ``max(|w_x|, |z_x|)`` exceeds this
        multiple of its initial value.
    history_every : int
        Store every n-th level in ``field.history`` (0 keeps only the ends).
    """
    if not 0 < cfl <= 0.9:
        raise DomainError("cfl must lie in (0, 0.9]")
    if scheme not in ("upwind", "muscl"):
        raise DomainError(f"unknown scheme {scheme!r}")
    g = field.grid
    dx = g.dx
    second = scheme == "muscl"
    eos, kind = field.eos, field.kind
    rel = kind is InvariantKind.RELATIVISTIC
    vb = field.admissibility.velocity_bound
    ceiling = field.admissibility.density_ceiling
    c = eos.c

    rows = {k: [] for k in SERIES_COLUMNS}
    margin = {"u_over_bound": -math.inf, "sound_over_c": -math.inf, "rho_over_ceiling": -math.inf,
              "rho_min": math.inf}

    def check(d, t):
        rho, u = d["rho"], d["u"]
        if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(u))):
            raise NumericError(f"non-finite state at t={t:.6g}")
        imin = int(np.argmin(rho))
        if rho[imin] <= 0:
            raise SolverError("non-positive density", imin, t)
        margin["rho_min"] = min(margin["rho_min"], float(rho[imin]))
        if rel:
            au = np.abs(u)
            i = int(np.argmax(au))
            margin["u_over_bound"] = max(margin["u_over_bound"], float(au[i] - vb))
            if au[i] > vb + 1e-12:
                raise SolverError(f"|u| = {au[i]:.15g} exceeds c tanh(M0/c) = {vb:.15g}", i, t)
            a = np.sqrt(np.asarray(eosm.pressure_derivatives(eos, rho)[1]))
            i = int(np.argmax(a))
            margin["sound_over_c"] = max(margin["sound_over_c"], float(a[i] / c))
            if a[i] >= c:
                raise SolverError("sound speed reached light speed", i, t)
            i = int(np.argmax(rho))
            margin["rho_over_ceiling"] = max(margin["rho_over_ceiling"], float(rho[i] / ceiling))
            if rho[i] >= ceiling:
                raise SolverError("density reached light-speed ceiling", i, t)

    def record(d, t, dt, wx, zx):
        rows["t"].append(t)
        rows["rho_min"].append(float(np.min(d["rho"])))
        rows["calY_min"].append(float(np.min(d["calY"])))
        rows["max_abs_wx"].append(float(np.max(np.abs(wx))))
        rows["max_abs_zx"].append(float(np.max(np.abs(zx))))
        rows["u_max"].append(float(np.max(np.abs(d["u"]))))
        rows["dt"].append(dt)

    d = field.coefficients()
    check(d, field.t)
    wx, zx = g.gradient(field.w), g.gradient(field.z)
    G0 = max(np.max(np.abs(wx)), np.max(np.abs(zx)))
    record(d, field.t, 0.0, wx, zx)
    blowup, t_obs, reason = False, None, "t_end reached"
    dt0 = None
    steps = 0
    gmax_ratio = 1.0 if G0 > 0 else 0.0
    while field.t < t_end * (1 - 1e-14):
        l1, l2 = d["lambda1"], d["lambda2"]
        smax = max(np.max(np.abs(l1)), np.max(np.abs(l2)))
        dt = cfl * dx / smax if smax > 0 else t_end - field.t
        if dt0 is None:
            dt0 = dt
        if dt < dt_collapse * dt0:
            blowup, t_obs, reason = True, field.t, "time step collapse"
            break
        dt = min(dt, t_end - field.t)
        w0, z0, t0 = field.w, field.z, field.t
        w1 = w0 + dt * _upwind_rate(w0, l2, dx, g.periodic, second)
        z1 = z0 + dt * _upwind_rate(z0, l1, dx, g.periodic, second)
        if second:
            m1, m2 = _speeds(field, w1, z1)
            w1 = 0.5 * (w0 + w1 + dt * _upwind_rate(w1, m2, dx, g.periodic, True))
            z1 = 0.5 * (z0 + z1 + dt * _upwind_rate(z1, m1, dx, g.periodic, True))
        field.w, field.z, field.t = w1, z1, t0 + dt
        steps += 1
        try:
            d = field.coefficients()
        except Exception as exc:
            raise SolverError(f"state left admissible cone ({exc})", -1, field.t) from exc
        check(d, field.t)
        wx, zx = g.gradient(field.w), g.gradient(field.z)
        record(d, field.t, dt, wx, zx)
        for mon in monitors:
            (mon.update if hasattr(mon, "update") else mon)(field, t0, w0, z0)
        if history_every and steps % history_every == 0:
            field.history.append((field.t, field.w.copy(), field.z.copy()))
        if G0 > 0:
            G = max(np.max(np.abs(wx)), np.max(np.abs(zx)))
            gmax_ratio = max(gmax_ratio, G / G0)
            if G > gradient_blowup_factor * G0:
                blowup, t_obs, reason = True, field.t, "gradient blowup factor exceeded"
                break
        if max_steps is not None and steps >= max_steps:
            reason = "max_steps reached"
            break
    if field.history[-1][0] != field.t:
        field.history.append((field.t, field.w.copy(), field.z.copy()))
    return TimeSeries(field, rows, blowup, t_obs, reason, steps, gmax_ratio, margin, list(monitors))


# -- characteristic tracing ------------------------------------------------
@dataclass
class CharTrace:
    """Samples along one characteristic.

    ``xi_field`` is the field-derived weighted gradient (``exp(h1) z_x`` for
    family 1, ``exp(h2) w_x`` for family 2) interpolated at the path.
    ``inv_xi`` is filled by :func:`integrate_riccati`.
    """

    family: int
    t_samples: np.ndarray
    x_samples: np.ndarray
    coeff_samples: np.ndarray
    calY_samples: np.ndarray
    xi_field: np.ndarray
    w_samples: np.ndarray
    z_samples: np.ndarray
    rate_samples: np.ndarray
    exited: bool = False
    inv_xi: np.ndarray | None = None
    blowup_time: float | None = None

    @property
    def x0(self):
        return float(self.x_samples[0])

    def csv_text(self) -> str:
        inv = self.inv_xi if self.inv_xi is not None else np.full_like(self.t_samples, np.nan)
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(TRACE_COLUMNS)
        for row in zip(self.t_samples, self.x_samples, self.coeff_samples, inv, self.calY_samples):
            wr.writerow([format_float(v) for v in row])
        return buf.getvalue()

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())


class Tracer:
    """Vectorised RK4 tracer of several characteristics.

    Works as an :func:`evolve` monitor (advancing with each solver step) and
    is reused by :func:`trace_characteristic` to replay stored history.  The
    field between two levels is interpolated linearly in ``x`` and ``t``.
    """

    def __init__(self, field: Field1D, seeds, families):
        self.grid = field.grid
        self.eos = field.eos
        self.kind = field.kind
        self.gauge = field._gauge()
        self.poly_rel = field.eos.kind == "polytropic" and field.kind is InvariantKind.RELATIVISTIC
        seeds = np.atleast_1d(np.asarray(seeds, dtype=float))
        fam = np.broadcast_to(np.asarray(families, dtype=int), seeds.shape).copy()
        if np.any((fam != 1) & (fam != 2)):
            raise DomainError("family must be 1 or 2")
        if np.any(seeds < self.grid.x_min) or np.any(seeds > self.grid.x_max):
            raise DomainError("seed outside the domain")
        self.family = fam
        self.x = seeds.copy()
        self.active = np.ones(seeds.shape, dtype=bool)
        self.n_valid = np.full(seeds.shape, -1)
        self._samples = {k: [] for k in ("t", "x", "coeff", "calY", "xi", "w", "z", "rate")}
        self._sample(field.t, field.w, field.z)

    def _at(self, xs, w, z):
        return self.grid.interp(xs, w), self.grid.interp(xs, z)

    def _lam(self, t, xs, lev0, lev1):
        t0, w0, z0 = lev0
        t1, w1, z1 = lev1
        th = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
        wa, za = self._at(xs, w0, z0)
        wb, zb = self._at(xs, w1, z1)
        wi = (1 - th) * wa + th * wb
        zi = (1 - th) * za + th * zb
        l1, l2 = rm.char_speeds_from_invariants(self.eos, wi, zi, self.kind)
        return np.where(self.family == 1, l1, l2)

    def _sample(self, t, w, z):
        g = self.grid
        xs = self.x
        wi, zi = self._at(xs, w, z)
        d = rm.coefficient_arrays(self.eos, wi, zi, self.kind, self.gauge)
        wx = g.interp(xs, g.gradient(w))
        zx = g.interp(xs, g.gradient(z))
        f1 = self.family == 1
        s = self._samples
        s["t"].append(np.full(xs.shape, t))
        s["x"].append(xs.copy())
        s["coeff"].append(np.where(f1, d["riccati1"], d["riccati2"]))
        s["calY"].append(d["calY"])
        s["xi"].append(np.where(f1, np.exp(d["h1"]) * zx, np.exp(d["h2"]) * wx))
        s["w"].append(wi)
        s["z"].append(zi)
        if self.eos.kind == "polytropic":
            s["rate"].append(rm.floor_rate_factor(self.eos, wi, zi, self.kind))
        else:
            s["rate"].append(np.full(xs.shape, np.nan))

    def advance(self, lev0, lev1):
        t0, t1 = lev0[0], lev1[0]
        span = t1 - t0
        if span <= 0:
            return
        lam = self._lam(t0, self.x, lev0, lev1)
        smax = float(np.max(np.abs(lam))) if lam.size else 0.0
        nsub = max(1, int(math.ceil(smax * span / self.grid.dx)))
        h = span / nsub
        t = t0
        x = self.x
        for _ in range(nsub):
            k1 = self._lam(t, x, lev0, lev1)
            k2 = self._lam(t + h / 2, self.grid.wrap(x + h / 2 * k1), lev0, lev1)
            k3 = self._lam(t + h / 2, self.grid.wrap(x + h / 2 * k2), lev0, lev1)
            k4 = self._lam(t + h, self.grid.wrap(x + h * k3), lev0, lev1)
            xn = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            # frozen once outside a non-periodic domain
            if not self.grid.periodic:
                out = (xn < self.grid.x_min) | (xn > self.grid.x_max)
                self.active &= ~out
                xn = np.where(self.active, xn, x)
            x = self.grid.wrap(xn)
            t += h
        self.x = x
        gone = ~self.active & (self.n_valid < 0)
        self.n_valid[gone] = len(self._samples["t"])
        self._sample(t1, lev1[1], lev1[2])

    def update(self, field, t_prev, w_prev, z_prev):
        if not np.any(self.active):
            return
        self.advance((t_prev, w_prev, z_prev), (field.t, field.w, field.z))

    def traces(self) -> list:
        s = {k: np.array(v) for k, v in self._samples.items()}
        out = []
        for j in range(self.x.size):
            n = len(s["t"]) if self.n_valid[j] < 0 else int(self.n_valid[j])
            valid = slice(0, n)
            out.append(CharTrace(int(self.family[j]), s["t"][valid, j], s["x"][valid, j],
                                 s["coeff"][valid, j], s["calY"][valid, j], s["xi"][valid, j],
                                 s["w"][valid, j], s["z"][valid, j], s["rate"][valid, j],
                                 exited=not bool(self.active[j])))
        return out


def trace_characteristic(series: TimeSeries, x0, family: int) -> CharTrace:
    """Trace one characteristic through the stored history of ``series``."""
    hist = series.history
    if len(hist) < 2:
        raise DomainError("series holds fewer than two history levels")
    f = series.field
    probe = Field1D(f.grid, f.eos, f.kind, hist[0][0], hist[0][1], hist[0][2], f.bounds,
                    f.admissibility, f.wx0, f.zx0)
    tr = Tracer(probe, [x0], [family])
    for lev0, lev1 in zip(hist[:-1], hist[1:]):
        if not tr.active[0]:
            break
        tr.advance(lev0, lev1)
    return tr.traces()[0]


# -- Riccati integration ------------------------------------------------------
@dataclass
class RiccatiResult:
    t: np.ndarray
    inv_xi: np.ndarray
    xi_rk4: np.ndarray
    max_rel_error: float
    blowup_time: float | None
    extrapolated: bool
    xi0: float

    @property
    def xi(self):
        with np.errstate(divide="ignore"):
            return 1.0 / self.inv_xi


def _rk4_riccati(t, a, xi0):
    """RK4 for ``xi' = -a(t) xi**2`` with ``a`` linear between samples."""
    xi = np.empty_like(t)
    xi[0] = xi0
    x = float(xi0)
    tl, al = t.tolist(), a.tolist()
    for i in range(len(tl) - 1):
        h = tl[i + 1] - tl[i]
        a0, a1 = al[i], al[i + 1]
        am = 0.5 * (a0 + a1)
        k1 = -a0 * x * x
        y = x + h / 2 * k1
        k2 = -am * y * y
        y = x + h / 2 * k2
        k3 = -am * y * y
        y = x + h * k3
        k4 = -a1 * y * y
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not math.isfinite(x):
            xi[i + 1:] = np.nan
            break
        xi[i + 1] = x
    return xi


def integrate_riccati(trace: CharTrace, initial_weighted_gradient=None, rtol: float = 1e-6,
                      bounded_factor: float = 10.0) -> RiccatiResult:
    """Closed-form accumulation ``1/xi = 1/xi0 + int coeff`` versus direct RK4.

    The two are compared where ``|xi| <= bounded_factor * |xi0|``; a
    disagreement beyond ``rtol`` raises :class:`NumericError`.  When ``1/xi``
    does not reach zero within the trace, the blowup time is extrapolated with
    the last coefficient and flagged.
    """
    t = np.asarray(trace.t_samples, dtype=float)
    a = np.asarray(trace.coeff_samples, dtype=float)
    xi0 = float(trace.xi_field[0] if initial_weighted_gradient is None else initial_weighted_gradient)
    if xi0 == 0:
        raise DomainError("initial weighted gradient is zero")
    if np.any(np.diff(t) < 0):
        raise DomainError("trace times must be nondecreasing")
    acc = np.concatenate([[0.0], np.cumsum(0.5 * (a[1:] + a[:-1]) * np.diff(t))])
    inv = 1.0 / xi0 + acc
    xi_rk = _rk4_riccati(t, a, xi0)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi_cf = 1.0 / inv
        ok = (np.abs(xi_cf) <= bounded_factor * abs(xi0)) & (inv * (1 / xi0) > 0) & np.isfinite(xi_rk)
        rel = np.abs(xi_rk[ok] - xi_cf[ok]) / np.abs(xi_cf[ok])
    err = float(rel.max()) if rel.size else 0.0
    if err > rtol:
        raise NumericError(f"Riccati closed form and RK4 disagree (max relative error {err:.3e})")
    t_star, extra = None, False
    if xi0 < 0:
        cross = np.nonzero(inv >= 0)[0]
        if cross.size:
            i = int(cross[0])
            t_star = float(t[i - 1] + (t[i] - t[i - 1]) * (-inv[i - 1]) / (inv[i] - inv[i - 1]))
        elif a[-1] > 0:
            t_star = float(t[-1] - inv[-1] / a[-1])
            extra = True
    trace.inv_xi = inv
    trace.blowup_time = t_star
    return RiccatiResult(t, inv, xi_rk, err, t_star, extra, xi0)
