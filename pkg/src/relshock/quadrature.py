"""Quadrature and root-finding helpers.

Scalar integrals go through QUADPACK (``scipy.integrate.quad``) after a
square-root endpoint substitution that removes the ``sigma**(-1/2)``-type
singularities of the invariant integrands at zero density.  Vectorised
evaluation for the grid solver uses :class:`CumulativeTable`, which stores
cumulative integrals on a geometric node set and fills partial segments with
fixed Gauss-Legendre rules.
"""
import math

import numpy as np
from scipy import integrate

from .errors import QuadratureError, DomainError

ABS_TOL = 1e-10
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def integrate_from_zero(f, upper, abs_tol=ABS_TOL, rel_tol=1e-12):
    """Integrate ``f`` over ``(0, upper]`` allowing an integrable singularity at 0.

    Uses the substitution ``sigma = upper * s**2``.
    """
    if upper < 0:
        raise DomainError("upper limit must be non-negative")
    if upper == 0:
        return 0.0

    def g(s):
        if s == 0.0:
            return 0.0
        return f(upper * s * s) * 2.0 * upper * s

    val, err = integrate.quad(g, 0.0, 1.0, epsabs=abs_tol, epsrel=rel_tol, limit=1000)
    if not np.isfinite(val) or err > max(10 * abs_tol, 1e-9 * abs(val)):
        raise QuadratureError("quadrature from 0 did not converge", err)
    return val


def integrate_interval(f, a, b, abs_tol=ABS_TOL, rel_tol=1e-12):
    """Integrate a regular integrand over ``[a, b]`` (``b`` may be ``inf``)."""
    if a == b:
        return 0.0
    val, err = integrate.quad(f, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=1000)
    if not np.isfinite(val) or err > max(10 * abs_tol, 1e-8 * abs(val)):
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge", err)
    return val


def gauss_legendre(f, a, b):
    """Vectorised 10-point Gauss-Legendre integral of ``f`` over ``[a, b]``.

    ``a`` and ``b`` may be arrays; ``f`` must accept arrays.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = mid[..., None] + half[..., None] * _GL_X
    return half * np.sum(f(nodes) * _GL_W, axis=-1)


def bisect_newton(func, dfunc, target, lo, hi, rtol=1e-12, polish=2):
    """Solve ``func(x) = target`` for increasing ``func`` on ``[lo, hi]``.

    Bracketed bisection to relative width ``rtol`` followed by ``polish``
    Newton steps (kept only while they stay inside the bracket).
    """
    flo = func(lo) - target
    fhi = func(hi) - target
    if flo > 0 or fhi < 0:
        raise DomainError("target not bracketed")
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * max(abs(mid), 1e-300):
            break
        if func(mid) - target > 0:
            hi = mid
        else:
            lo = mid
    x = 0.5 * (lo + hi)
    for _ in range(polish):
        d = dfunc(x)
        if d <= 0 or not math.isfinite(d):
            break
        step = (func(x) - target) / d
        if lo <= x - step <= hi:
            x -= step
    return x


class CumulativeTable:
    """Cumulative integral ``K(x) = int_{x0}^{x} f`` on a geometric node set.

    Parameters
    ----------
    f : callable
        Vectorised, smooth on ``[x0, x1]``.
    x0, x1 : float
        Table range, ``0 < x0 < x1``.
    k0 : float
        Value assigned to ``K(x0)`` (e.g. the integral from 0 to ``x0``).
    n : int
        Number of nodes.
    """

    def __init__(self, f, x0, x1, k0=0.0, n=2048):
        self.f = f
        self.nodes = np.geomspace(x0, x1, n)
        seg = gauss_legendre(f, self.nodes[:-1], self.nodes[1:])
        self.values = k0 + np.concatenate([[0.0], np.cumsum(seg)])
        self._log_nodes = np.log(self.nodes)
        self.lo = x0
        self.hi = x1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < self.lo) or np.any(x > self.hi):
            raise DomainError(f"argument outside tabulated range [{self.lo:g}, {self.hi:g}]")
        idx = np.clip(np.searchsorted(self.nodes, x) - 1, 0, len(self.nodes) - 2)
        return self.values[idx] + gauss_legendre(self.f, self.nodes[idx], x)

    def inverse(self, v, iters=4):
        """Invert an increasing table: ``x`` with ``K(x) = v`` (vectorised Newton)."""
        v = np.asarray(v, dtype=float)
        if np.any(v < self.values[0]) or np.any(v > self.values[-1]):
            raise DomainError("value outside tabulated range")
        x = np.exp(np.interp(v, self.values, self._log_nodes))
        for _ in range(iters):
            x = np.clip(x - (self(x) - v) / self.f(x), self.lo, self.hi)
        return x
