"""Three-dimensional vacuum diagnostics on sampled or analytic fields.

Covers effective densities, the energy/momentum/moment functionals, the
second-moment blowup time of an isolated mass group, the free-streaming
velocity-gradient resolvent, the velocity floor and particle-number transport
along a path.  No 3-D time integrator is involved: evolutions are either
synthetic or exact (pressureless dust streams).
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import eos as eosm
from .eos import EosSpec
from .errors import DomainError, InvariantViolation, SingularityError


# -- effective densities ---------------------------------------------------
@dataclass(frozen=True)
class EffectiveDensities:
    rho_hat: float
    rho_tilde: float


def _speed2(u):
    u = np.asarray(u, dtype=float)
    if u.ndim and u.shape[-1] == 3:
        return np.sum(u * u, axis=-1)
    return u * u


def _effective(eos, rho, u2):
    c2 = eos.c ** 2
    if np.any(u2 >= c2):
        raise DomainError("|u| < c required")
    P = np.asarray(eosm.pressure_derivatives(eos, rho)[0], dtype=float)
    lor = 1.0 - u2 / c2
    rho_hat = (rho + P * u2 / c2 ** 2) / lor
    return rho_hat, rho_hat + P / c2


def effective_densities(eos: EosSpec, rho, u) -> EffectiveDensities:
    """``rho_hat = (rho + P |u|^2/c^4)/(1 - |u|^2/c^2)`` and ``rho_tilde = rho_hat + P/c^2``.

    ``u`` is a velocity vector (last axis of length 3) or a speed.
    """
    rho = np.asarray(rho, dtype=float)
    rh, rt = _effective(eos, rho, _speed2(u))
    cv = (lambda a: float(a)) if np.ndim(rh) == 0 else (lambda a: a)
    return EffectiveDensities(cv(rh), cv(rt))


# -- fields ----------------------------------------------------------------
@dataclass
class Field3D:
    """Density and velocity on a box grid or as analytic closures.

    Analytic fields carry ``support = (center, radius)``, a ball outside which
    the density vanishes (or is negligible).  Grid fields store ``rho`` with
    shape ``(nx, ny, nz)`` and ``u`` with shape ``(nx, ny, nz, 3)`` at cell
    centres ``origin + (i + 1/2) * spacing``.
    """

    eos: EosSpec
    t: float = 0.0
    rho_fn: Callable | None = None
    u_fn: Callable | None = None
    support: tuple | None = None
    rho: np.ndarray | None = None
    u: np.ndarray | None = None
    origin: tuple = (0.0, 0.0, 0.0)
    spacing: tuple = (1.0, 1.0, 1.0)
    descriptor: dict | None = None

    @property
    def is_grid(self) -> bool:
        return self.rho is not None

    def cell_centers(self):
        nx, ny, nz = self.rho.shape
        ax = [self.origin[i] + (np.arange(n) + 0.5) * self.spacing[i] for i, n in enumerate((nx, ny, nz))]
        X, Y, Z = np.meshgrid(*ax, indexing="ij")
        return np.stack([X, Y, Z], axis=-1)

    def sample(self, x):
        """``(rho, u)`` at points ``x`` of shape ``(..., 3)`` (analytic fields only)."""
        if self.rho_fn is None:
            raise DomainError("field has no analytic closures")
        return np.asarray(self.rho_fn(x), dtype=float), np.asarray(self.u_fn(x), dtype=float)

    def check_subluminal(self):
        if self.is_grid:
            u2 = _speed2(self.u)
        else:
            ctr, R = self.support
            pts = _sphere_points(np.asarray(ctr, float), R, 12)[0]
            u2 = _speed2(self.sample(pts)[1])
        if np.any(u2 >= self.eos.c ** 2):
            raise DomainError("|u| < c violated")


def _bump(s):
    return np.where(s < 1, (1 - s * s) ** 2, 0.0)


def gaussian_ball(eos, amplitude=1.0, width=1.0, center=(0, 0, 0), velocity=(0, 0, 0), expansion=0.0, t=0.0):
    """``rho = a exp(-|x - x0|^2/s^2)``, ``u = V + expansion (x - x0)`` (static closure)."""
    ctr = np.asarray(center, dtype=float)
    V = np.asarray(velocity, dtype=float)
    return Field3D(eos, t, lambda x: amplitude * np.exp(-np.sum((x - ctr) ** 2, axis=-1) / width ** 2),
                   lambda x: V + expansion * (x - ctr), support=(ctr, 8.0 * width),
                   descriptor={"type": "gaussian-ball", "amplitude": amplitude, "width": width,
                               "center": list(map(float, ctr)), "velocity": list(map(float, V)),
                               "expansion": expansion})


def uniform_ball(eos, density=1.0, radius=1.0, center=(0, 0, 0), velocity=(0, 0, 0)):
    ctr = np.asarray(center, dtype=float)
    V = np.asarray(velocity, dtype=float)

    def rho(x):
        return np.where(np.sum((x - ctr) ** 2, axis=-1) <= radius ** 2, density, 0.0)

    return Field3D(eos, 0.0, rho, lambda x: np.broadcast_to(V, np.shape(x)).copy(), support=(ctr, radius),
                   descriptor={"type": "uniform-ball", "density": density, "radius": radius,
                               "center": list(map(float, ctr)), "velocity": list(map(float, V))})


def dust_stream(c, amplitude=1.0, radius=1.0, center=(0, 0, 0), velocity=(0, 0, 0), expansion=0.0, t=0.0):
    """Exact pressureless flow with affine initial velocity ``u0 = V + expansion (x - x0)``.

    Particles move on straight lines, so ``x = x0 + (1 + e t)(a - x0) + t V``
    for label ``a``; the energy density ``rho_hat`` is transported as
    ``rho_hat0(a) / (1 + e t)**3`` with ``rho_hat0 = amplitude * (1 - r^2/R^2)^2``.
    """
    eos = eosm.EosSpec.dust(c)
    ctr = np.asarray(center, dtype=float)
    V = np.asarray(velocity, dtype=float)
    J = 1.0 + expansion * t
    if not J > 0:
        raise DomainError("dust stream has focused (1 + expansion * t <= 0)")
    vmax = np.linalg.norm(V) + abs(expansion) * radius
    if vmax >= c:
        raise DomainError("dust stream velocity reaches c on its support")

    def label(x):
        return ctr + (x - ctr - t * V) / J

    def u(x):
        return V + expansion * (label(x) - ctr)

    def rho(x):
        a = label(x)
        rh = amplitude * _bump(np.sqrt(np.sum((a - ctr) ** 2, axis=-1)) / radius) / J ** 3
        return rh * (1.0 - _speed2(u(x)) / c ** 2)

    return Field3D(eos, t, rho, u, support=(ctr + t * V, radius * J),
                   descriptor={"type": "dust-stream", "c": c, "amplitude": amplitude, "radius": radius,
                               "center": list(map(float, ctr)), "velocity": list(map(float, V)),
                               "expansion": expansion, "t": t})


def field_from_descriptor(d: dict, eos: EosSpec | None = None) -> Field3D:
    d = dict(d)
    kind = d.pop("type", None)
    if kind == "dust-stream":
        return dust_stream(**d)
    if eos is None:
        raise DomainError("an eos is required for this field descriptor")
    if kind == "gaussian-ball":
        return gaussian_ball(eos, **d)
    if kind == "uniform-ball":
        return uniform_ball(eos, **d)
    if kind == "grid":
        return load_grid_file(d["header"], eos)
    raise DomainError(f"unknown field descriptor type {kind!r}")


def write_grid_file(path_header, rho, u, spacing, origin=(0.0, 0.0, 0.0)):
    """Write a raw little-endian float64 grid (x fastest) and its JSON header.

    The binary holds ``rho, ux, uy, uz`` back to back.
    """
    rho = np.asarray(rho, dtype="<f8")
    u = np.asarray(u, dtype="<f8")
    base = os.path.splitext(os.path.basename(path_header))[0] + ".f64"
    data_path = os.path.join(os.path.dirname(os.path.abspath(path_header)), base)
    with open(data_path, "wb") as fh:
        for arr in (rho, u[..., 0], u[..., 1], u[..., 2]):
            fh.write(np.asfortranarray(arr).tobytes(order="F"))
    header = {"shape": list(rho.shape), "spacing": list(map(float, spacing)), "origin": list(map(float, origin)),
              "order": "x-fastest", "dtype": "float64-le", "fields": ["rho", "ux", "uy", "uz"], "data": base}
    with open(path_header, "w") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
    return data_path


def load_grid_file(path_header, eos: EosSpec) -> Field3D:
    with open(path_header) as fh:
        h = json.load(fh)
    if h.get("order", "x-fastest") != "x-fastest" or h.get("dtype", "float64-le") != "float64-le":
        raise DomainError("grid files must be x-fastest little-endian float64")
    shape = tuple(int(n) for n in h["shape"])
    if len(shape) != 3:
        raise DomainError("grid header shape must have three entries")
    npts = int(np.prod(shape))
    data_path = os.path.join(os.path.dirname(os.path.abspath(path_header)), h["data"])
    raw = np.fromfile(data_path, dtype="<f8")
    if raw.size != 4 * npts:
        raise DomainError(f"grid data holds {raw.size} values, expected {4 * npts}")
    parts = [raw[i * npts:(i + 1) * npts].reshape(shape, order="F") for i in range(4)]
    u = np.stack(parts[1:], axis=-1)
    return Field3D(eos, 0.0, rho=parts[0], u=u, origin=tuple(h.get("origin", (0, 0, 0))),
                   spacing=tuple(h["spacing"]), descriptor={"type": "grid", "header": str(path_header)})


# -- functionals ------------------------------------------------------------
@dataclass
class Functionals3D:
    m: float
    P_vec: np.ndarray
    X_star: np.ndarray | None
    M: float
    F_rad: float
    t: float = 0.0
    domain: dict = field(default_factory=dict)
    kinetic: float = 0.0
    pressure_integral: float = 0.0
    rest_mass: float = 0.0

    def to_dict(self):
        return {"t": self.t, "m": self.m, "P_vec": list(map(float, self.P_vec)),
                "X_star": None if self.X_star is None else list(map(float, self.X_star)),
                "M": self.M, "F_rad": self.F_rad, "domain": self.domain}


def _sphere_points(center, R, n):
    """Gauss-Legendre in ``r`` and ``cos(theta)``, uniform in ``phi``; returns points and weights."""
    xr, wr = np.polynomial.legendre.leggauss(n)
    r = 0.5 * R * (xr + 1)
    wr = 0.5 * R * wr * r * r
    mu, wmu = np.polynomial.legendre.leggauss(n)
    nphi = 2 * n
    phi = 2 * np.pi * np.arange(nphi) / nphi
    wphi = np.full(nphi, 2 * np.pi / nphi)
    Rr, MU, PH = np.meshgrid(r, mu, phi, indexing="ij")
    st = np.sqrt(1 - MU * MU)
    pts = center + np.stack([Rr * st * np.cos(PH), Rr * st * np.sin(PH), Rr * MU], axis=-1)
    w = wr[:, None, None] * wmu[None, :, None] * wphi[None, None, :]
    return pts, w


def _moments(eos, x, rho, u, w):
    u2 = _speed2(u)
    rh, rt = _effective(eos, rho, u2)
    P = np.asarray(eosm.pressure_derivatives(eos, rho)[0], dtype=float)
    m = np.sum(w * rh)
    first = np.sum((w * rh)[..., None] * x, axis=tuple(range(x.ndim - 1)))
    Pv = np.sum((w * rt)[..., None] * u, axis=tuple(range(u.ndim - 1)))
    M = np.sum(w * rh * np.sum(x * x, axis=-1))
    F = np.sum(w * rt * np.sum(u * x, axis=-1))
    kin = np.sum(w * rt * u2) / eos.c ** 2
    return np.concatenate([[m], first, Pv, [M, F, kin, np.sum(w * P), np.sum(w * rho)]])


def _pack(v, t, domain):
    m = float(v[0])
    X = v[1:4] / m if m > 0 else None
    return Functionals3D(m, v[4:7].copy(), X, float(v[7]), float(v[8]), t, domain,
                         float(v[9]), float(v[10]), float(v[11]))


def _ball_region(region):
    if region is None:
        return None
    if "ball" in region:
        ctr, R = region["ball"]
        return np.asarray(ctr, dtype=float), float(R)
    raise DomainError("region must be None or {'ball': (center, radius)}")


def compute_functionals(field: Field3D, region=None, rtol: float = 1e-8, max_order: int = 128) -> Functionals3D:
    """Energy ``m``, momentum, centroid, second moment ``M`` and radial momentum ``F``.

    Grid fields use the midpoint rule over cells whose centres lie in
    ``region``; analytic fields integrate over ``region`` (default: the field
    support ball) in spherical coordinates, doubling the Gauss order until the
    relative change drops below ``rtol``.
    """
    ball = _ball_region(region)
    if field.is_grid:
        x = field.cell_centers()
        mask = np.ones(field.rho.shape, dtype=bool)
        if ball is not None:
            mask = np.sum((x - ball[0]) ** 2, axis=-1) <= ball[1] ** 2
        if not mask.any():
            raise DomainError("region contains no grid cells")
        vol = float(np.prod(field.spacing))
        v = _moments(field.eos, x[mask], field.rho[mask], field.u[mask], np.full(mask.sum(), vol))
        return _pack(v, field.t, {"grid": True, "region": region, "cells": int(mask.sum())})
    if ball is None:
        if field.support is None:
            raise DomainError("analytic field needs a support ball or explicit region")
        ball = (np.asarray(field.support[0], dtype=float), float(field.support[1]))
    if not ball[1] > 0:
        raise DomainError("empty integration region")
    prev = None
    n = 16
    while True:
        pts, w = _sphere_points(ball[0], ball[1], n)
        rho, u = field.sample(pts)
        v = _moments(field.eos, pts, rho, u, w)
        if prev is not None:
            # components that vanish by symmetry are judged against a floor tied to the largest one
            floor = 1e-4 * float(np.max(np.abs(v)))
            if np.all(np.abs(v - prev) <= rtol * np.maximum(np.abs(v), floor)):
                break
        if n >= max_order:
            break
        prev = v
        n *= 2
    return _pack(v, field.t, {"ball": [list(map(float, ball[0])), ball[1]], "order": n})


@dataclass
class DriftReport:
    times: list
    m_drift: float
    p_drift: float
    x_star_drift: float
    moment_rate_error: float
    passed: bool
    tolerances: dict

    def to_dict(self):
        return dict(self.__dict__)


def conservation_check(snapshots, tol_m=1e-3, tol_p=1e-3, tol_x=1e-3, tol_rate=1e-3) -> DriftReport:
    """Relative drifts of ``m``, momentum and centroid, and ``dM/dt`` versus ``2F``.

    The centroid is compared with ``X*(0) + t P(0)/m(0)`` (which reduces to
    invariance when the momentum vanishes).  ``dM/dt`` is the central
    difference at interior snapshots.
    """
    snaps = list(snapshots)
    if len(snaps) < 3:
        raise DomainError("conservation_check needs at least 3 snapshots")
    t = np.array([s.t for s in snaps])
    f0 = snaps[0]
    m0 = f0.m
    if not m0 > 0:
        raise DomainError("initial energy must be positive")
    m = np.array([s.m for s in snaps])
    P = np.array([s.P_vec for s in snaps])
    m_drift = float(np.max(np.abs(m - m0)) / m0)
    pscale = np.linalg.norm(f0.P_vec)
    if pscale == 0:
        pscale = m0 * snaps[0].domain.get("c", 1.0)
    p_drift = float(np.max(np.linalg.norm(P - f0.P_vec, axis=1)) / pscale)
    xs = [s.X_star for s in snaps]
    pred = [f0.X_star + (s.t - f0.t) * f0.P_vec / m0 for s in snaps]
    size = max(1.0, float(np.max([np.linalg.norm(p) for p in pred])))
    x_drift = float(max(np.linalg.norm(a - b) for a, b in zip(xs, pred)) / size)
    rate_err = 0.0
    if len(np.unique(t)) == len(t):
        errs = []
        for i in range(1, len(snaps) - 1):
            dM = (snaps[i + 1].M - snaps[i - 1].M) / (t[i + 1] - t[i - 1])
            twoF = 2 * snaps[i].F_rad
            errs.append(abs(dM - twoF) / max(abs(twoF), 1e-300) if twoF != 0 else abs(dM))
        rate_err = float(max(errs))
    tols = {"m": tol_m, "p": tol_p, "x_star": tol_x, "moment_rate": tol_rate}
    ok = m_drift <= tol_m and p_drift <= tol_p and x_drift <= tol_x and rate_err <= tol_rate
    return DriftReport(t.tolist(), m_drift, p_drift, x_drift, rate_err, ok, tols)


# -- isolated mass group -------------------------------------------------------
@dataclass
class MassGroupSpec:
    """Isolated mass group ``(A0, B0)`` with ``A0``, ``B0`` balls ``(center, radius)``."""

    A0: tuple
    B0: tuple
    R0: float
    u_bar0: np.ndarray
    m0: float
    M0: float
    F0: float
    m_bar0: float
    A0_volume: float
    X_star0: np.ndarray

    @property
    def R1(self) -> float:
        return float(np.linalg.norm(self.X_star0)) + 2 * self.R0

    @classmethod
    def from_field(cls, field: Field3D, A0, B0, R0, mom_rtol=1e-8, shell_samples=6):
        """Measure the mass group of an analytic field and check its definition.

        Conditions: closure of ``A0`` inside ``B0``, ``B0`` inside the ball of
        radius ``R0``, no density on ``B0 \\ A0``, a single velocity there, and
        vanishing momentum on ``A0`` to relative tolerance ``mom_rtol``.
        """
        ca, ra = np.asarray(A0[0], float), float(A0[1])
        cb, rb = np.asarray(B0[0], float), float(B0[1])
        if not np.linalg.norm(ca - cb) + ra < rb:
            raise InvariantViolation("closure of A0 is not inside B0")
        if not np.linalg.norm(cb) + rb <= R0:
            raise InvariantViolation("B0 is not inside the ball of radius R0")
        f = compute_functionals(field, {"ball": (ca, ra)})
        if not f.m > 0:
            raise InvariantViolation("A0 carries no energy")
        # shell B0 \ A0 between the two spheres, sampled on rays from the centre of A0
        pts, _ = _sphere_points(ca, 1.0, shell_samples)
        dirs = (pts - ca) / np.maximum(np.linalg.norm(pts - ca, axis=-1, keepdims=True), 1e-300)
        dirs = dirs.reshape(-1, 3)
        # distance to exit B0 along each ray
        oc = ca - cb
        b = np.sum(dirs * oc, axis=-1)
        exitd = -b + np.sqrt(b * b - (np.sum(oc * oc) - rb * rb))
        fr = np.linspace(0.05, 0.95, 5)
        shell = ca + dirs[:, None, :] * (ra + fr[None, :, None] * (exitd[:, None, None] - ra))
        rho_s, u_s = field.sample(shell)
        if np.any(np.abs(rho_s) > 0):
            raise InvariantViolation("density does not vanish on B0 \\ A0")
        ubar = u_s.reshape(-1, 3)[0]
        if np.max(np.abs(u_s.reshape(-1, 3) - ubar)) > 1e-12 * max(1.0, np.linalg.norm(ubar)):
            raise InvariantViolation("velocity is not constant on B0 \\ A0")
        scale = f.m * field.eos.c
        if np.linalg.norm(f.P_vec) > mom_rtol * scale:
            raise InvariantViolation(f"momentum on A0 is {np.linalg.norm(f.P_vec):.3e}, not zero")
        vol = 4.0 / 3.0 * math.pi * ra ** 3
        return cls((ca, ra), (cb, rb), float(R0), ubar, f.m, f.M, f.F_rad, f.rest_mass / vol, vol,
                   f.X_star)


def blowup_time_from_constants(m0, M0, F0, D, R1) -> float:
    """Positive root of ``D m0 t^2/2 + 2 F0 t + (M0 - R1^2 m0) = 0``."""
    a = 0.5 * D * m0
    b = 2.0 * F0
    cc = M0 - R1 * R1 * m0
    if not a > 0:
        raise InvariantViolation("D m0 must be positive")
    if not cc < 0:
        raise InvariantViolation("second moment already exceeds R1^2 m0: hypotheses violated")
    disc = b * b - 4 * a * cc
    sq = math.sqrt(disc)
    # cancellation-free form of (-b + sq)/(2a)
    return (-b + sq) / (2 * a) if b <= 0 else (2 * cc) / (-b - sq)


def mass_group_constants(spec: MassGroupSpec, eos: EosSpec):
    """``(D0, D)`` with ``D0 = 3 |A0| P(m_bar0)/(c^2 m0)`` and ``D = 2 c^2 min(1/2, D0)``."""
    c2 = eos.c ** 2
    P = float(np.asarray(eosm.pressure_derivatives(eos, spec.m_bar0)[0]))
    if not P > 0:
        raise InvariantViolation("P(m_bar0) must be positive")
    D0 = 3 * spec.A0_volume * P / (c2 * spec.m0)
    return D0, 2 * c2 * min(0.5, D0)


def mass_group_blowup_bound(spec: MassGroupSpec, eos: EosSpec) -> float:
    """Time by which a regular solution with this mass group must break down."""
    _, D = mass_group_constants(spec, eos)
    return blowup_time_from_constants(spec.m0, spec.M0, spec.F0, D, spec.R1)


# -- free streaming -----------------------------------------------------------
def eigenvalues3(G):
    G = np.asarray(G, dtype=float)
    if G.shape != (3, 3):
        raise DomainError("expected a 3x3 matrix")
    return list(np.linalg.eigvals(G))


def free_stream_time(grad_u0, imag_tol=1e-6):
    """``min(-1/lambda)`` over real negative eigenvalues of ``grad_u0`` or ``None``.

    Defective repeated roots come back split by ``O(sqrt(eps))`` into a complex
    pair, hence the loose ``imag_tol`` (relative to ``max |G_ij|``).
    """
    G = np.asarray(grad_u0, dtype=float)
    scale = max(1.0, float(np.max(np.abs(G))))
    cand = []
    for lam in eigenvalues3(G):
        lam = complex(lam)
        if abs(lam.imag) > imag_tol * scale:
            continue
        r = lam.real
        if r < -1e-12 * scale:
            cand.append(-1.0 / r)
    return min(cand) if cand else None


def free_stream_gradient(grad_u0, t):
    """``(I + t G)^{-1} G`` and the focusing time of ``G``.

    Raises :class:`SingularityError` at or beyond the focusing time.
    """
    G = np.asarray(grad_u0, dtype=float)
    ts = free_stream_time(G)
    if ts is not None and t >= ts:
        raise SingularityError(f"I + tG is singular for t >= {ts:.15g}")
    A = np.eye(3) + t * G
    if np.linalg.cond(A) > 1e14:
        raise SingularityError("I + tG is numerically singular")
    return np.linalg.solve(A, G), ts


# -- velocity floor ------------------------------------------------------------
def velocity_floor(f0: Functionals3D) -> float:
    """``C_u = |P(0)| / (2 m(0))``."""
    if not f0.m > 0:
        raise DomainError("m(0) must be positive")
    return float(np.linalg.norm(f0.P_vec)) / (2 * f0.m)


def check_velocity_floor(f0: Functionals3D, sup_speeds) -> dict:
    """Necessary condition: every ``sup |u(t)|`` of a claimed solution is at least ``C_u``."""
    Cu = velocity_floor(f0)
    s = np.asarray(sup_speeds, dtype=float)
    bad = np.nonzero(s < Cu)[0]
    return {"C_u": Cu, "passed": bad.size == 0, "violations": bad.tolist()}


# -- particle number transport ---------------------------------------------------
def particle_transport_residual(path_samples, eos: EosSpec) -> float:
    """``max |N(t) / (N(0) exp(-int_0^t div u)) - 1|`` with ``N = n(rho)/sqrt(1 - |u|^2/c^2)``.

    ``path_samples`` is a sequence of ``(t, rho, u, div_u)`` along one particle
    path, with ``u`` a vector or a speed.  A path that stays in vacuum has
    residual 0; leaving vacuum gives ``inf``.
    """
    rows = list(path_samples)
    if not rows:
        raise DomainError("no samples")
    t = np.array([r[0] for r in rows], dtype=float)
    if np.any(np.diff(t) <= 0):
        raise DomainError("sample times must be strictly increasing")
    rho = np.array([r[1] for r in rows], dtype=float)
    u2 = np.array([float(_speed2(r[2])) for r in rows])
    div = np.array([r[3] for r in rows], dtype=float)
    if np.any(u2 >= eos.c ** 2):
        raise DomainError("|u| < c required")
    N = np.asarray(eosm.particle_number(eos, rho), dtype=float) / np.sqrt(1 - u2 / eos.c ** 2)
    if N[0] == 0:
        return 0.0 if np.all(N == 0) else math.inf
    integ = np.concatenate([[0.0], np.cumsum(0.5 * (div[1:] + div[:-1]) * np.diff(t))])
    return float(np.max(np.abs(N / (N[0] * np.exp(-integ)) - 1)))
