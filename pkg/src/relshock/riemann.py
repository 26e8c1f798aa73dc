"""Riemann invariants, characteristic speeds and Riccati coefficients.

All array functions broadcast over numpy arrays of ``(w, z)``; the small
dataclasses wrap one-point states for callers that prefer named records.

Conventions
-----------
``w = V(u) + J(rho)`` and ``z = V(u) - J(rho)`` where ``V`` is the velocity
potential (``(c/2) ln((c+u)/(c-u))`` relativistically, ``u`` classically) and
``J`` the invariant integral of the chosen kind.  ``w`` is transported with
``lambda2`` and ``z`` with ``lambda1``.  The weight exponents ``h1, h2``
satisfy ``dh1/dw = lambda1_w / (lambda1 - lambda2)`` and
``dh2/dz = lambda2_z / (lambda2 - lambda1)``, so that ``xi = exp(h1) z_x`` and
``zeta = exp(h2) w_x`` obey ``xi' = -exp(-h1) lambda1_z xi**2`` (and the
analogue for ``zeta``) along their characteristics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import eos as eosm
from .eos import EosSpec, InvariantKind, as_kind
from .errors import DomainError, InvariantViolation


@dataclass(frozen=True)
class PrimState:
    rho: float
    u: float


@dataclass(frozen=True)
class RiemState:
    w: float
    z: float
    kind: InvariantKind = InvariantKind.RELATIVISTIC

    def to_json(self):
        return [float(self.w), float(self.z)]


@dataclass(frozen=True)
class CharCoeffs:
    lambda1: float
    lambda2: float
    h1: float
    h2: float
    riccati1: float
    riccati2: float
    calH: float
    calY: float
    y: float | None = None
    Y: float | None = None
    rho_ref: float | None = None


@dataclass(frozen=True)
class DataBounds:
    """Sup-norm bounds of initial invariants.

    ``epsilon = inf (w0 - z0)`` must be positive.
    """

    w_max: float
    z_min: float
    M0: float
    epsilon: float

    @classmethod
    def from_arrays(cls, w, z):
        w = np.asarray(w, dtype=float)
        z = np.asarray(z, dtype=float)
        return cls(float(w.max()), float(z.min()),
                   float(max(np.abs(w).max(), np.abs(z).max())), float((w - z).min()))

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class AdmissibilityReport:
    threshold: float
    spread: float
    velocity_bound: float
    density_ceiling: float
    passed: bool
    reasons: list = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


def _arr(x):
    return np.asarray(x, dtype=float)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def _is_poly(eos):
    return eos.kind == "polytropic"


def _poly_A(eos):
    g = eos.gamma
    return 2.0 * eos.c * math.sqrt(g) / (g - 1.0)


# -- transforms ------------------------------------------------------------
def velocity_potential(u, c, kind):
    kind = as_kind(kind)
    u = _arr(u)
    if kind is InvariantKind.CLASSICAL:
        return u
    if np.any(np.abs(u) >= c):
        raise DomainError("relativistic velocity must satisfy |u| < c")
    return c * np.arctanh(u / c)


def velocity_from_sum(s, c, kind):
    """Velocity from ``w + z``."""
    if as_kind(kind) is InvariantKind.CLASSICAL:
        return 0.5 * _arr(s)
    return c * np.tanh(_arr(s) / (2.0 * c))


def riemann_arrays(eos: EosSpec, rho, u, kind):
    kind = as_kind(kind)
    V = velocity_potential(u, eos.c, kind)
    J = _arr(eosm.invariant_integral_fast(eos, rho, kind))
    return V + J, V - J


def primitive_arrays(eos: EosSpec, w, z, kind):
    """Return ``(rho, u)`` from invariant arrays."""
    kind = as_kind(kind)
    w = _arr(w)
    z = _arr(z)
    d = w - z
    if np.any(d <= 0) or np.any(np.isnan(d)):
        raise DomainError("w - z must be positive (vacuum or negative density)")
    rho = eosm.rho_from_half_difference(eos, 0.5 * d, kind)
    return _arr(rho), velocity_from_sum(w + z, eos.c, kind)


def to_riemann(eos: EosSpec, prim: PrimState, kind=InvariantKind.RELATIVISTIC) -> RiemState:
    kind = as_kind(kind)
    w, z = riemann_arrays(eos, prim.rho, prim.u, kind)
    return RiemState(_out(w), _out(z), kind)


def from_riemann(eos: EosSpec, riem: RiemState) -> PrimState:
    rho, u = primitive_arrays(eos, riem.w, riem.z, riem.kind)
    return PrimState(_out(rho), _out(u))


def speeds_arrays(eos: EosSpec, rho, u, kind):
    kind = as_kind(kind)
    a = np.sqrt(np.maximum(_arr(eosm.pressure_derivatives(eos, rho)[1]), 0.0))
    u = _arr(u)
    if kind is InvariantKind.CLASSICAL:
        return u - a, u + a
    c2 = eos.c ** 2
    d1 = 1.0 - u * a / c2
    d2 = 1.0 + u * a / c2
    if np.any(d1 <= 0) or np.any(d2 <= 0):
        raise InvariantViolation("relativistic speed denominator non-positive (state not sub-luminal)")
    return (u - a) / d1, (u + a) / d2


def char_speeds(eos: EosSpec, prim: PrimState, kind=InvariantKind.RELATIVISTIC):
    l1, l2 = speeds_arrays(eos, prim.rho, prim.u, kind)
    return _out(l1), _out(l2)


def char_speeds_from_invariants(eos: EosSpec, w, z, kind):
    """Speeds as functions of ``(w, z)``.

    Relativistic polytropic laws use ``lambda = c (e^f - 1)/(e^f + 1)``.
    """
    kind = as_kind(kind)
    if kind is InvariantKind.RELATIVISTIC and _is_poly(eos):
        w, z = _arr(w), _arr(z)
        sg = math.sqrt(eos.gamma)
        t = np.tan((w - z) / (2 * _poly_A(eos)))
        f = (w + z) / eos.c + np.log((1 - sg * t) / (1 + sg * t))
        g = (w + z) / eos.c - np.log((1 - sg * t) / (1 + sg * t))
        return eos.c * np.tanh(f / 2), eos.c * np.tanh(g / 2)
    rho, u = primitive_arrays(eos, w, z, kind)
    return speeds_arrays(eos, rho, u, kind)


# -- weights and Riccati coefficients --------------------------------------
def reference_density(eos: EosSpec, epsilon, kind):
    """Lower integration limit ``J^{-1}(epsilon/2)`` of the general-law weights."""
    if epsilon is None:
        return 1.0
    if not epsilon > 0:
        raise DomainError("epsilon = inf(w0 - z0) must be positive")
    return float(eosm.rho_from_half_difference(eos, 0.5 * epsilon, kind))


def _log_pos(x, what):
    if np.any(~(x > 0)):
        raise InvariantViolation(f"logarithm argument of {what} is not positive (state outside admissible cone)")
    return np.log(x)


def coefficient_arrays(eos: EosSpec, w, z, kind, epsilon=None):
    """Vectorised characteristic data on invariant arrays.

    Returns a dict with keys ``rho, u, lambda1, lambda2, h1, h2, riccati1,
    riccati2, calY, calH1, calH2`` plus law-specific extras (``y``, ``Y``,
    ``H1``, ``H2``, ``G1``, ``G2``, ``rho_ref``).
    """
    kind = as_kind(kind)
    w, z = _arr(w), _arr(z)
    rho, u = primitive_arrays(eos, w, z, kind)
    c = eos.c
    out = {"rho": rho, "u": u}
    if kind is InvariantKind.CLASSICAL:
        l1, l2 = speeds_arrays(eos, rho, u, kind)
        if _is_poly(eos):
            g = eos.gamma
            th = w - z
            p = (3 - g) / (2 * g - 2)
            h = (g - 3) / (2 * g - 2) * np.log(th)
            calY = th ** p
            val = (g + 1) / 4 * calY
            out.update(h1=h, h2=h, riccati1=val, riccati2=val, calY=calY,
                       calH1=np.full_like(val, (g + 1) / 4), calH2=np.full_like(val, (g + 1) / 4))
        else:
            _, d1, d2, _ = (_arr(v) for v in eosm.pressure_derivatives(eos, rho))
            rref = reference_density(eos, epsilon, kind)
            G1 = 0.5 * d1 ** -0.25
            G2 = 0.25 * rho * d2 * d1 ** -1.25
            h = 0.25 * np.log(d1) - 0.5 * np.log(rho / rref)
            val = np.sqrt(rho / rref) * (G1 + G2)
            out.update(h1=h, h2=h, riccati1=val, riccati2=val, calY=val,
                       calH1=np.ones_like(val), calH2=np.ones_like(val), G1=G1, G2=G2, rho_ref=rref)
        out.update(lambda1=l1, lambda2=l2)
        return out

    if _is_poly(eos):
        g = eos.gamma
        sg = math.sqrt(g)
        Y = (w - z) / (2 * _poly_A(eos))
        t = np.tan(Y)
        if np.any(g * t * t >= 1):
            raise InvariantViolation("sound speed reached light speed (tan Y >= 1/sqrt(gamma))")
        s = (w + z) / c
        lnq = np.log((1 - sg * t) / (1 + sg * t))
        l1 = c * np.tanh((s + lnq) / 2)
        l2 = c * np.tanh((s - lnq) / 2)
        fz = 1 / c + (g - 1) / (np.cos(Y) ** 2 * 2 * c * (1 - g * t * t))
        l1z = 0.5 * c * (1 - (l1 / c) ** 2) * fz
        l2w = 0.5 * c * (1 - (l2 / c) ** 2) * fz
        base = (3 * g - 1) / (2 * g - 2) * np.log(np.cos(Y)) + (g - 3) / (2 * g - 2) * np.log(np.sin(Y)) \
            + (w - z) / (2 * c)
        # (1+E)cosY - (E-1) sqrt(g) sinY = 2 e^{s/2} cosY (cosh(s/2) - sinh(s/2) sqrt(g) tanY)
        arg1 = np.cosh(s / 2) - np.sinh(s / 2) * sg * t
        arg2 = np.cosh(s / 2) + np.sinh(s / 2) * sg * t
        lc = np.log(2 * np.cos(Y)) + s / 2
        h1 = base - lc - _log_pos(arg1, "h1")
        h2 = base - (w - z) / c - lc - _log_pos(arg2, "h2")
        r1 = np.exp(-h1) * l1z
        r2 = np.exp(-h2) * l2w
        calY = t ** ((3 - g) / (2 * g - 2)) * np.sqrt(1 + t * t)
        out.update(lambda1=l1, lambda2=l2, h1=h1, h2=h2, riccati1=r1, riccati2=r2, calY=calY,
                   calH1=r1 / calY, calH2=r2 / calY, y=t, Y=Y)
        return out

    # general relativistic law
    c2 = c * c
    P, d1, d2, _ = (_arr(v) for v in eosm.pressure_derivatives(eos, rho))
    sp = np.sqrt(d1)
    if np.any(sp >= c):
        raise InvariantViolation("sound speed reached light speed")
    q = (c - sp) / (c + sp)
    s = (w + z) / c
    Fz = 1 / c + (2 * c / (c2 - d1)) * d2 * (rho + P / c2) / (4 * d1)
    lnq = np.log(q)
    l1 = c * np.tanh((s + lnq) / 2)
    l2 = c * np.tanh((s - lnq) / 2)
    l1z = 0.5 * c * (1 - (l1 / c) ** 2) * Fz
    l2w = 0.5 * c * (1 - (l2 / c) ** 2) * Fz
    tab = eosm.law_tables(eos, kind)
    rref = reference_density(eos, epsilon, kind)
    I1 = tab.K1(rho) - tab.K1(rref)
    I2 = tab.K2(rho) - tab.K2(rref)
    h1 = -np.logaddexp(0, s + lnq) + s + 0.5 * np.log1p(-q * q) - I1
    h2 = -np.logaddexp(0, s - lnq) + s + 0.5 * np.log(1 / (q * q) - 1) - I2
    r1 = np.exp(-h1) * l1z
    r2 = np.exp(-h2) * l2w
    H1 = d1 ** -0.25
    H2 = d2 * (rho + P / c2) / (2 * (1 - d1 / c2) * d1 ** 1.25)
    calY = np.exp(I1) * (H1 + H2)
    out.update(lambda1=l1, lambda2=l2, h1=h1, h2=h2, riccati1=r1, riccati2=r2, calY=calY,
               calH1=r1 / calY, calH2=r2 / calY, H1=H1, H2=H2,
               G1=0.5 * d1 ** -0.25, G2=0.25 * rho * d2 * d1 ** -1.25, rho_ref=rref)
    return out


def gradient_weights(eos: EosSpec, riem: RiemState, epsilon=None):
    """Weight exponents ``(h1, h2)``.

    Defined up to an additive constant; general laws use the lower limit
    ``J^{-1}(epsilon/2)`` (density 1 when ``epsilon`` is omitted).
    """
    d = coefficient_arrays(eos, riem.w, riem.z, riem.kind, epsilon)
    return _out(d["h1"]), _out(d["h2"])


def riccati_coefficient(eos: EosSpec, riem: RiemState, family: int, epsilon=None):
    """Return ``(value, calH, calY)`` with ``value = calH * calY > 0``.

    Family 1 gives ``exp(-h1) d(lambda1)/dz``, family 2 ``exp(-h2) d(lambda2)/dw``.
    """
    if family not in (1, 2):
        raise DomainError("family must be 1 or 2")
    d = coefficient_arrays(eos, riem.w, riem.z, riem.kind, epsilon)
    return _out(d[f"riccati{family}"]), _out(d[f"calH{family}"]), _out(d["calY"])


def char_coeffs(eos: EosSpec, riem: RiemState, epsilon=None) -> CharCoeffs:
    d = coefficient_arrays(eos, riem.w, riem.z, riem.kind, epsilon)
    return CharCoeffs(_out(d["lambda1"]), _out(d["lambda2"]), _out(d["h1"]), _out(d["h2"]),
                      _out(d["riccati1"]), _out(d["riccati2"]), _out(d["calH1"]), _out(d["calY"]),
                      y=_out(d["y"]) if "y" in d else None, Y=_out(d["Y"]) if "Y" in d else None,
                      rho_ref=d.get("rho_ref"))


def cal_y(eos: EosSpec, rho):
    """Floor variable ``y**((3-g)/(2g-2)) * sqrt(1 + y**2)`` with ``y = k rho**((g-1)/2) / c``."""
    if not _is_poly(eos):
        raise DomainError("cal_y is defined for polytropic laws")
    rho = _arr(rho)
    if np.any(rho <= 0):
        raise DomainError("density must be positive")
    if np.any(rho >= eosm.density_ceiling(eos)):
        raise DomainError("density at or beyond the light-speed ceiling")
    g = eos.gamma
    y = eos.k * rho ** ((g - 1) / 2) / eos.c
    return _out(y ** ((3 - g) / (2 * g - 2)) * np.sqrt(1 + y * y))


def cal_y_product_form(eos: EosSpec, rho):
    """Same quantity written as a product of powers of ``y/sqrt(1+y^2)`` and ``1+y^2``."""
    rho = _arr(rho)
    g = eos.gamma
    y2 = eos.k ** 2 * rho ** (g - 1) / eos.c ** 2
    return _out((np.sqrt(y2) / np.sqrt(1 + y2)) ** ((3 - g) / (2 * g - 2)) * (1 + y2) ** ((g + 1) / (4 * g - 4)))


def floor_rate_factor(eos: EosSpec, w, z, kind=InvariantKind.RELATIVISTIC):
    """``(d calY / d(w-z)) (lambda2 - lambda1) exp(-h2)`` for polytropic laws.

    Along a family-1 characteristic ``calY' = -factor * zeta``, so with
    ``zeta <= Q2`` one gets ``calY' >= -Q2 * factor``.
    """
    kind = as_kind(kind)
    if not _is_poly(eos):
        raise DomainError("floor_rate_factor is defined for polytropic laws")
    d = coefficient_arrays(eos, w, z, kind)
    g = eos.gamma
    if kind is InvariantKind.RELATIVISTIC:
        y = d["y"]
        dYdy = y ** ((5 - 3 * g) / (2 * g - 2)) * ((g + 1) * y * y + (3 - g)) / ((2 * g - 2) * np.sqrt(1 + y * y))
        dcal = dYdy * (1 + y * y) / (2 * _poly_A(eos))
    else:
        th = _arr(w) - _arr(z)
        p = (3 - g) / (2 * g - 2)
        dcal = p * th ** (p - 1)
    return dcal * (d["lambda2"] - d["lambda1"]) * np.exp(-d["h2"])


# -- admissibility ------------------------------------------------------------
def light_speed_threshold(eos: EosSpec) -> float:
    """Upper bound on ``w_max - z_min`` keeping every state sub-luminal."""
    if _is_poly(eos):
        g = eos.gamma
        return 4 * eos.c * math.sqrt(g) / (g - 1) * math.atan(1 / math.sqrt(g))
    ceil = eosm.density_ceiling(eos)
    if math.isfinite(ceil):
        return 2 * float(eosm.invariant_integral(eos, ceil))
    return 2 * eosm.invariant_supremum(eos)


def velocity_bound(c, M0) -> float:
    """``|u| <= c tanh(M0/c)`` implied by ``|w|, |z| <= M0``."""
    return c * math.tanh(M0 / c)


def admissibility_check(eos: EosSpec, bounds: DataBounds, kind=InvariantKind.RELATIVISTIC):
    kind = as_kind(kind)
    reasons = []
    spread = bounds.w_max - bounds.z_min
    if not bounds.epsilon > 0:
        reasons.append("inf(w0 - z0) > 0 violated (vacuum or negative density)")
    if kind is InvariantKind.RELATIVISTIC:
        thr = light_speed_threshold(eos)
        vb = velocity_bound(eos.c, bounds.M0)
        ceil = eosm.density_ceiling(eos)
        if not spread < thr:
            reasons.append(f"w_max - z_min = {spread:.6g} exceeds sub-luminal threshold {thr:.6g}")
    else:
        thr, vb, ceil = math.inf, math.inf, math.inf
    return AdmissibilityReport(thr, spread, vb, ceil, not reasons, reasons)
