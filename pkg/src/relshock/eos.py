"""Barotropic pressure laws and the integrals built on them.

Two families are supported:

* polytropic ``P(rho) = k**2 * rho**gamma`` with closed forms everywhere;
* general laws given by ``P, P', P'', P'''`` callables (polynomial or
  tabulated laws can be built from JSON), evaluated by quadrature.

All functions broadcast over numpy arrays of densities.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from scipy import interpolate, optimize

from . import quadrature as quad
from .errors import DomainError


class InvariantKind(str, enum.Enum):
    RELATIVISTIC = "relativistic"
    CLASSICAL = "classical"


def as_kind(kind) -> InvariantKind:
    try:
        return InvariantKind(kind)
    except ValueError:
        raise DomainError(f"unknown invariant kind {kind!r}") from None


@dataclass(frozen=True)
class EosSpec:
    """Pressure law plus light speed.

    Use :meth:`polytropic` or :meth:`general` rather than the raw constructor.
    """

    kind: str
    c: float
    k: float | None = None
    gamma: float | None = None
    law: tuple | None = None
    assumption_A: float | None = None
    descriptor: dict | None = field(default=None, compare=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise DomainError("light speed c must be positive and finite")
        if self.kind == "polytropic":
            if self.k is None or self.gamma is None or not self.k > 0:
                raise DomainError("polytropic law needs k > 0")
            if not self.gamma > 1:
                raise DomainError("gamma > 1 required (polytropic gas, gamma = 1 unsupported)")
        elif self.kind == "general":
            if self.law is None or len(self.law) != 4:
                raise DomainError("general law needs the four maps P, P', P'', P'''")
        else:
            raise DomainError(f"unknown eos kind {self.kind!r}")
        if self.assumption_A is not None and not self.assumption_A > 0:
            raise DomainError("assumption_A must be positive")

    # -- constructors -----------------------------------------------------
    @classmethod
    def polytropic(cls, k, gamma, c, assumption_A=None):
        return cls("polytropic", float(c), k=float(k), gamma=float(gamma), assumption_A=assumption_A)

    @classmethod
    def general(cls, P, dP, d2P, d3P, c, assumption_A=None, descriptor=None):
        return cls("general", float(c), law=(P, dP, d2P, d3P), assumption_A=assumption_A,
                   descriptor=descriptor)

    @classmethod
    def from_polynomial(cls, coeffs, c, assumption_A=None):
        """``P(rho) = sum_i coeffs[i] * rho**i``."""
        p = Polynomial(np.asarray(coeffs, dtype=float))
        law = (p, p.deriv(1), p.deriv(2), p.deriv(3))
        desc = {"kind": "general", "polynomial": [float(a) for a in coeffs], "c": float(c)}
        return cls.general(*law, c=c, assumption_A=assumption_A, descriptor=desc)

    @classmethod
    def from_table(cls, rho, P, c, assumption_A=None):
        """Tabulated law; monotone cubic (PCHIP) interpolant of ``P``."""
        rho = np.asarray(rho, dtype=float)
        P = np.asarray(P, dtype=float)
        if rho.ndim != 1 or rho.shape != P.shape or len(rho) < 3:
            raise DomainError("table needs matching 1-D rho and P arrays of length >= 3")
        if np.any(np.diff(rho) <= 0):
            raise DomainError("table densities must be strictly increasing")
        spl = interpolate.PchipInterpolator(rho, P, extrapolate=True)
        law = (spl, spl.derivative(1), spl.derivative(2), spl.derivative(3))
        desc = {"kind": "general", "table": {"rho": rho.tolist(), "P": P.tolist()}, "c": float(c)}
        return cls.general(*law, c=c, assumption_A=assumption_A, descriptor=desc)

    @classmethod
    def dust(cls, c):
        """Pressureless matter, ``P = 0``."""
        zero = np.zeros_like
        return cls.general(zero, zero, zero, zero, c=c,
                           descriptor={"kind": "general", "polynomial": [0.0], "c": float(c)})

    # -- JSON -------------------------------------------------------------
    def to_dict(self) -> dict:
        if self.kind == "polytropic":
            out = {"kind": "polytropic", "k": self.k, "gamma": self.gamma, "c": self.c}
        elif self.descriptor is not None:
            out = dict(self.descriptor)
        else:
            raise DomainError("general law built from bare callables has no JSON form")
        if self.assumption_A is not None:
            out["assumption_A"] = self.assumption_A
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "EosSpec":
        kind = d.get("kind")
        A = d.get("assumption_A")
        if kind == "polytropic":
            return cls.polytropic(d["k"], d["gamma"], d["c"], assumption_A=A)
        if kind == "general":
            if "polynomial" in d:
                return cls.from_polynomial(d["polynomial"], d["c"], assumption_A=A)
            if "table" in d:
                return cls.from_table(d["table"]["rho"], d["table"]["P"], d["c"], assumption_A=A)
            raise DomainError("general eos JSON needs 'polynomial' or 'table'")
        raise DomainError(f"unknown eos kind {kind!r}")


def _check_rho(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0) or np.any(np.isnan(rho)):
        raise DomainError("density must be non-negative")
    return rho


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def pressure_derivatives(eos: EosSpec, rho):
    """Return ``(P, P', P'', P''')`` at ``rho``."""
    rho = _check_rho(rho)
    if eos.kind == "polytropic":
        k2, g = eos.k ** 2, eos.gamma
        with np.errstate(divide="ignore", invalid="ignore"):
            out = []
            coef = k2
            for n in range(4):
                # coef * rho**(g - n), with a vanishing coefficient winning over 0**negative
                term = np.where(coef == 0.0, 0.0, coef * rho ** (g - n))
                out.append(_out(term))
                coef *= g - n
        return tuple(out)
    return tuple(_out(np.asarray(f(rho), dtype=float)) for f in eos.law)


def _P(eos, rho):
    return pressure_derivatives(eos, rho)[0]


def _dP(eos, rho):
    return pressure_derivatives(eos, rho)[1]


def sound_speed(eos: EosSpec, rho):
    """Return ``(sqrt(P'), sqrt(P') < c)``."""
    a = np.sqrt(np.maximum(np.asarray(_dP(eos, rho), dtype=float), 0.0))
    return _out(a), _out(a < eos.c) if np.ndim(a) else bool(a < eos.c)


# -- invariant integrals ---------------------------------------------------
def _integrand(eos, kind):
    c2 = eos.c ** 2

    if kind is InvariantKind.RELATIVISTIC:
        def f(s):
            P, dP = eos.law[0](s), eos.law[1](s)
            return np.sqrt(np.maximum(dP, 0.0)) / (s + P / c2)
    else:
        def f(s):
            return np.sqrt(np.maximum(eos.law[1](s), 0.0)) / s
    return f


def _poly_prefactor(eos, kind):
    g = eos.gamma
    if kind is InvariantKind.RELATIVISTIC:
        return 2.0 * eos.c * math.sqrt(g) / (g - 1.0)
    return 2.0 * eos.k * math.sqrt(g) / (g - 1.0)


def invariant_integral(eos: EosSpec, rho, kind=InvariantKind.RELATIVISTIC):
    """``J(rho) = int_0^rho sqrt(P')/(sigma + P/c^2)`` (relativistic) or ``int sqrt(P')/sigma``."""
    kind = as_kind(kind)
    rho = _check_rho(rho)
    if eos.kind == "polytropic":
        g, k, c = eos.gamma, eos.k, eos.c
        A = _poly_prefactor(eos, kind)
        if kind is InvariantKind.RELATIVISTIC:
            return _out(A * np.arctan(k * rho ** ((g - 1) / 2) / c))
        return _out(A * rho ** ((g - 1) / 2))
    f = _integrand(eos, kind)
    vals = np.vectorize(lambda r: quad.integrate_from_zero(f, r), otypes=[float])(rho)
    return _out(vals)


def invariant_supremum(eos: EosSpec, kind=InvariantKind.RELATIVISTIC) -> float:
    """``lim_{rho -> inf} J(rho)``; ``inf`` when the integral diverges."""
    kind = as_kind(kind)
    key = ("sup", kind)
    if key in eos._cache:
        return eos._cache[key]
    if eos.kind == "polytropic":
        val = _poly_prefactor(eos, kind) * math.pi / 2 if kind is InvariantKind.RELATIVISTIC else math.inf
    else:
        rep = _tail_test(eos, kind)
        val = rep[1] if rep[0] else math.inf
    eos._cache[key] = val
    return val


def invariant_integral_inverse(eos: EosSpec, value, kind=InvariantKind.RELATIVISTIC):
    """Density ``rho`` with ``invariant_integral(rho) = value``."""
    kind = as_kind(kind)
    value = np.asarray(value, dtype=float)
    if np.any(value < 0) or np.any(np.isnan(value)):
        raise DomainError("invariant value must be non-negative")
    sup = invariant_supremum(eos, kind)
    if np.any(value >= sup):
        raise DomainError("state beyond light-speed ceiling: invariant exceeds its supremum")
    if eos.kind == "polytropic":
        g, k, c = eos.gamma, eos.k, eos.c
        A = _poly_prefactor(eos, kind)
        if kind is InvariantKind.RELATIVISTIC:
            return _out((c * np.tan(value / A) / k) ** (2 / (g - 1)))
        return _out((value / A) ** (2 / (g - 1)))
    f = _integrand(eos, kind)

    def solve(v):
        if v == 0:
            return 0.0
        J = lambda r: quad.integrate_from_zero(f, r)
        lo, hi = 0.0, 1.0
        while J(hi) < v:
            lo, hi = hi, 2 * hi
            if hi > 1e300:
                raise DomainError("could not bracket invariant inverse")
        return quad.bisect_newton(J, lambda r: float(f(r)), v, lo, hi)

    return _out(np.vectorize(solve, otypes=[float])(value))


def _tail_test(eos, kind, cutoff=1e8):
    """Estimate convergence of ``J`` at infinity for a general law.

    Returns ``(finite, value, slope)`` where ``slope`` is the log-log slope of
    the integrand at ``cutoff``.  Finite means slope < -1 and the improper
    quadrature converges.
    """
    f = _integrand(eos, kind)
    x1, x2 = cutoff, 10 * cutoff
    f1, f2 = float(f(x1)), float(f(x2))
    if f1 <= 0 or f2 <= 0:
        slope = -math.inf
    else:
        slope = math.log(f2 / f1) / math.log(x2 / x1)
    if slope >= -1.0 - 1e-3:
        return False, math.inf, slope
    try:
        val = quad.integrate_from_zero(f, 1.0) + quad.integrate_interval(f, 1.0, math.inf)
    except Exception:
        return False, math.inf, slope
    return True, val, slope


# -- particle number ---------------------------------------------------------
def particle_number(eos: EosSpec, rho):
    """``n(rho) = exp(int_1^rho dsigma / (sigma + P/c^2))`` normalised by ``n(1) = 1``."""
    rho = _check_rho(rho)
    c2 = eos.c ** 2
    if eos.kind == "polytropic":
        g, k2 = eos.gamma, eos.k ** 2
        return _out(rho * ((1 + k2 / c2) / (1 + k2 * rho ** (g - 1) / c2)) ** (1 / (g - 1)))
    P = eos.law[0]

    # n = rho * exp(-int_1^rho (P/c^2) / (sigma (sigma + P/c^2))), regular at 0 when P = O(sigma)
    def corr(s):
        p = P(s) / c2
        return p / (s * (s + p))

    def one(r):
        if r == 0:
            return 0.0
        if r < 1:
            val = -quad.integrate_from_zero(corr, 1.0) + quad.integrate_from_zero(corr, r)
        else:
            val = quad.integrate_interval(corr, 1.0, r)
        return r * math.exp(-val)

    return _out(np.vectorize(one, otypes=[float])(rho))


def density_ceiling(eos: EosSpec) -> float:
    """Density at which the sound speed reaches ``c`` (``inf`` if never)."""
    if eos.kind == "polytropic":
        g = eos.gamma
        return (eos.c ** 2 / (eos.k ** 2 * g)) ** (1 / (g - 1))
    key = "ceiling"
    if key in eos._cache:
        return eos._cache[key]
    c2 = eos.c ** 2
    h = lambda r: float(eos.law[1](r)) - c2
    lo, hi = 0.0, 1.0
    while h(hi) < 0:
        lo, hi = hi, 2 * hi
        if hi > 1e15:
            eos._cache[key] = math.inf
            return math.inf
    val = optimize.brentq(h, lo, hi, xtol=1e-14, rtol=1e-14) if h(lo) < 0 else lo
    eos._cache[key] = val
    return val


# -- vectorised tables for the grid solver ----------------------------------
class LawTables:
    """Tabulated invariant integrals of a general law.

    ``J`` is the cumulative invariant integral; ``K1``/``K2`` are cumulative
    integrals of ``(1 +/- sqrt(P')/c)**2 / (2 (x + P/c^2))`` (relativistic) or
    ``1/(2x)`` (classical), from which the weight integrals are differences.
    """

    def __init__(self, eos: EosSpec, kind: InvariantKind, lo=1e-8, hi=None, n=4096):
        self.eos = eos
        self.kind = kind
        if hi is None:
            ceil = density_ceiling(eos)
            hi = ceil if (kind is InvariantKind.RELATIVISTIC and math.isfinite(ceil)) else 1e6
        f = _integrand(eos, kind)
        self.J = quad.CumulativeTable(f, lo, hi, k0=quad.integrate_from_zero(f, lo), n=n)
        c, c2 = eos.c, eos.c ** 2
        P, dP = eos.law[0], eos.law[1]
        if kind is InvariantKind.RELATIVISTIC:
            def psi(sign):
                return lambda x: (1 + sign * np.sqrt(np.maximum(dP(x), 0)) / c) ** 2 / (2 * (x + P(x) / c2))
            self.K1 = quad.CumulativeTable(psi(+1), lo, hi, n=n)
            self.K2 = quad.CumulativeTable(psi(-1), lo, hi, n=n)
        else:
            self.K1 = self.K2 = None

    def rho_of(self, half_diff):
        """Density from ``(w - z)/2``."""
        return self.J.inverse(half_diff)


def law_tables(eos: EosSpec, kind) -> LawTables:
    kind = as_kind(kind)
    key = ("tables", kind)
    if key not in eos._cache:
        eos._cache[key] = LawTables(eos, kind)
    return eos._cache[key]


def rho_from_half_difference(eos: EosSpec, half_diff, kind):
    """Vectorised ``J^{-1}`` used on grids (closed form or tables)."""
    kind = as_kind(kind)
    if eos.kind == "polytropic":
        return invariant_integral_inverse(eos, half_diff, kind)
    return law_tables(eos, kind).rho_of(half_diff)


def invariant_integral_fast(eos: EosSpec, rho, kind):
    kind = as_kind(kind)
    if eos.kind == "polytropic":
        return invariant_integral(eos, rho, kind)
    return law_tables(eos, kind).J(rho)


# -- assumption audit ----------------------------------------------------------
@dataclass
class AssumptionReport:
    rho_range: tuple
    n_samples: int
    P_positive: bool
    dP_positive: bool
    d2P_positive: bool
    P_zero_at_origin: bool
    tail_finite: bool
    tail_value: float
    tail_slope: float
    assumption2: bool
    A_min_continuous: float | None
    A_min_grid: float | None
    addend_signs: dict

    @property
    def assumption3(self) -> bool:
        return self.A_min_grid is not None

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["rho_range"] = list(self.rho_range)
        d["assumption3"] = self.assumption3
        d["assumption_A"] = self.A_min_grid
        return d


def assumption3_terms(eos, rho):
    """Split the Assumption-3 expression as ``a(rho) + A * b(rho)``."""
    _, d1, d2, d3 = (np.asarray(v, dtype=float) for v in pressure_derivatives(eos, rho))
    r6 = rho ** 6
    mix = r6 * d1 ** 2 + rho * r6 * d1 * d2
    a = rho ** 8 * (5 * d2 ** 2 - 4 * d1 * d3) - 4 * mix
    b = rho ** 8 * d2 ** 2 + 4 * mix
    return a, b


def check_pressure_assumptions(eos: EosSpec, rho_range, A_candidates=None,
                               n_samples=10_000) -> AssumptionReport:
    """Numerical certificate of the structural pressure assumptions on a range.

    Positivity of ``P, P', P''`` and the Assumption-3 inequality are checked on
    ``n_samples`` geometric points; this certifies the range only.
    """
    lo, hi = (float(v) for v in rho_range)
    if not (0 < lo < hi and math.isfinite(hi)):
        raise DomainError("rho_range must be a non-empty interval inside (0, inf)")
    if A_candidates is None:
        A_candidates = np.round(np.arange(1, 100_001) * 1e-4, 10)
    A_candidates = np.asarray(A_candidates, dtype=float)
    rho = np.geomspace(lo, hi, n_samples)
    P, d1, d2, d3 = (np.asarray(v, dtype=float) for v in pressure_derivatives(eos, rho))
    P0 = float(np.asarray(pressure_derivatives(eos, 0.0)[0]))

    if eos.kind == "polytropic":
        tail = (True, invariant_supremum(eos), -(eos.gamma + 1) / 2)
    else:
        tail = _tail_test(eos, InvariantKind.RELATIVISTIC)

    a, b = assumption3_terms(eos, rho)
    if np.all(b > 0):
        A_cont = float(max(np.max(-a / b), 0.0))
    else:
        A_cont = None
    A_grid = None
    for A in A_candidates:
        if A > 0 and np.all(a + A * b >= -1e-12 * np.abs(b)):
            A_grid = float(A)
            break
    A_ref = A_grid if A_grid is not None else 1.0
    addends = {
        "(5+A) rho^8 P''^2": rho ** 8 * (5 + A_ref) * d2 ** 2,
        "-4 rho^8 P' P'''": -4 * rho ** 8 * d1 * d3,
        "(4A-4) rho^6 P'^2": (4 * A_ref - 4) * rho ** 6 * d1 ** 2,
        "(4A-4) rho^7 P' P''": (4 * A_ref - 4) * rho ** 7 * d1 * d2,
    }
    signs = {}
    for name, v in addends.items():
        if np.all(v > 0):
            signs[name] = "positive"
        elif np.all(v < 0):
            signs[name] = "negative"
        elif np.all(v == 0):
            signs[name] = "zero"
        else:
            signs[name] = "mixed"

    pos = (bool(np.all(P > 0)), bool(np.all(d1 > 0)), bool(np.all(d2 > 0)))
    p_zero = abs(P0) < 1e-14
    return AssumptionReport(
        rho_range=(lo, hi), n_samples=n_samples,
        P_positive=pos[0], dP_positive=pos[1], d2P_positive=pos[2],
        P_zero_at_origin=p_zero,
        tail_finite=bool(tail[0]), tail_value=float(tail[1]), tail_slope=float(tail[2]),
        assumption2=all(pos) and p_zero and bool(tail[0]),
        A_min_continuous=A_cont, A_min_grid=A_grid, addend_signs=signs,
    )
