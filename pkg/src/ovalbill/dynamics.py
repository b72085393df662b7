"""The billiard map on the phase cylinder ``(phi, p)``, ``p = cos(alpha)``.

Given an impact at tangent angle ``phi`` and outgoing angle ``alpha``
(measured from the tangent), the ray leaves along direction angle
``theta = phi + alpha``.  By strict convexity the chord from ``Gamma(phi)``
to ``Gamma(psi)`` has a direction strictly between ``phi`` and ``psi``, and
its reverse direction lies strictly between ``psi`` and ``phi + 2 pi``.
Hence the next impact ``psi`` lies in ``(theta, theta + pi)``, where

    f(psi) = cross(v, Gamma(psi) - Gamma(phi))

is strictly increasing (``f' = R(psi) sin(psi - theta) > 0``).  The new
outgoing angle is ``psi - theta`` by the reflection law.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import GrazingOrbit, NotCritical, RootNotBracketed, StepError
from .geometry import TWO_PI, wrap_angle

GRAZING_CUTOFF = 1.0 - 1e-12


class PhasePoint(NamedTuple):
    phi: float
    p: float

    @property
    def alpha(self):
        return math.acos(self.p)


class QuotientPoint(NamedTuple):
    phi: float
    p: float
    m: int


def _check_grazing(p):
    if np.any(np.abs(p) >= GRAZING_CUTOFF):
        raise GrazingOrbit(f"|p| >= {GRAZING_CUTOFF}: next impact not resolvable")


def _chord_residual(oval, phi, theta, psi):
    """``cross(v, Gamma(psi) - Gamma(phi))`` and its psi-derivative."""
    p0 = oval.point(phi)
    d = oval.curve.derivs(psi, 2)
    c, s = np.cos(psi), np.sin(psi)
    x1 = d[0] * s + d[1] * c
    y1 = -d[0] * c + d[1] * s
    ct, st = np.cos(theta), np.sin(theta)
    f = ct * (y1 - p0[..., 1]) - st * (x1 - p0[..., 0])
    fp = (d[0] + d[2]) * np.sin(psi - theta)
    return f, fp


def billiard_step(oval, x):
    """One bounce. Returns ``(PhasePoint, chord length)``."""
    phi, p = float(x[0]), float(x[1])
    _check_grazing(p)
    alpha = math.acos(p)
    theta = phi + alpha

    def f(psi):
        return float(_chord_residual(oval, phi, theta, psi)[0])

    lo, hi = theta, theta + math.pi
    flo, fhi = f(lo), f(hi)
    if not (flo < 0.0 < fhi):
        raise RootNotBracketed(f"no sign change on [{lo}, {hi}] (f={flo}, {fhi})")
    psi = brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    # one Newton polish on the (monotone) residual
    fv, fpv = _chord_residual(oval, phi, theta, psi)
    if fpv > 0:
        cand = psi - float(fv) / float(fpv)
        if lo < cand < hi:
            psi = cand
    p1 = math.cos(psi - theta)
    chord = float(np.linalg.norm(oval.point(psi) - oval.point(phi)))
    return PhasePoint(float(wrap_angle(psi)), p1), chord


def step_batch(oval, phi, p, maxiter=100):
    """Vectorized billiard map for arrays of phase points.

    Safeguarded Newton on the monotone chord residual inside the bracket
    ``(theta, theta + pi)``.  Each element converges independently, so the
    result for one point does not depend on the others in the batch.
    Returns ``(phi1, p1)`` with ``phi1`` unreduced (``phi1 > phi``).
    """
    phi = np.asarray(phi, dtype=float)
    p = np.asarray(p, dtype=float)
    _check_grazing(p)
    alpha = np.arccos(p)
    theta = phi + alpha
    lo = theta.copy()
    hi = theta + np.pi
    psi = phi + 2.0 * alpha
    p0 = oval.point(phi)
    ct, st = np.cos(theta), np.sin(theta)
    active = np.ones(psi.shape, dtype=bool)
    for _ in range(maxiter):
        idx = np.nonzero(active)
        if not idx[0].size:
            break
        ps = psi[idx]
        d = oval.curve.derivs(ps, 2)
        c, s = np.cos(ps), np.sin(ps)
        x1 = d[0] * s + d[1] * c
        y1 = -d[0] * c + d[1] * s
        f = ct[idx] * (y1 - p0[..., 1][idx]) - st[idx] * (x1 - p0[..., 0][idx])
        fp = (d[0] + d[2]) * np.sin(ps - theta[idx])
        neg = f < 0
        lo_i = np.where(neg, ps, lo[idx])
        hi_i = np.where(neg, hi[idx], ps)
        lo[idx] = lo_i
        hi[idx] = hi_i
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = ps - f / fp
        ok = (newton >= lo_i) & (newton <= hi_i) & np.isfinite(newton)
        exact = f == 0.0
        new = np.where(exact, ps, np.where(ok, newton, 0.5 * (lo_i + hi_i)))
        step = np.abs(new - ps)
        psi[idx] = new
        scale = np.maximum(np.abs(new), 1.0)  # psi can sit near 0 for lifted angles
        done = exact | (step <= 1e-15 * scale) | (hi_i - lo_i <= 4e-16 * scale)
        active[idx] = ~done
    else:
        raise RootNotBracketed("chord solver did not converge")
    return psi, np.cos(psi - theta)


def billiard_inverse(oval, x):
    """``T^-1 = I T I`` with the reversal ``I(phi, p) = (phi, -p)``."""
    y, _ = billiard_step(oval, (x[0], -x[1]))
    return PhasePoint(y.phi, -y.p)


def inverse_batch(oval, phi, p):
    phi1, p1 = step_batch(oval, phi, -np.asarray(p, dtype=float))
    return phi1, -p1


def iterate(oval, x0, steps):
    """Orbit ``[x0, T x0, ..., T^steps x0]``."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    x = PhasePoint(float(wrap_angle(x0[0])), float(x0[1]))
    out = [x]
    for i in range(steps):
        try:
            x, _ = billiard_step(oval, x)
        except (GrazingOrbit, RootNotBracketed) as exc:
            raise StepError(i, exc) from exc
        out.append(x)
    return out


def quotient_step(oval, q):
    """The map on the quotient cylinder ``[0, 2 pi / n) x (-1, 1)``."""
    if not 1 <= q.m <= oval.n - 1:
        raise ValueError(f"m must be in 1..{oval.n - 1}")
    y, _ = billiard_step(oval, (q.phi, q.p))
    return QuotientPoint(float(wrap_angle(y.phi, TWO_PI / oval.n)), y.p, q.m)


def _unwrap_delta(d):
    return (d + np.pi) % TWO_PI - np.pi


def jacobian_numeric(oval, x, h=1e-6):
    """Central-difference Jacobian of ``T`` in ``(phi, p)`` coordinates,
    Richardson-extrapolated from steps ``h`` and ``h/2``."""
    phi, p = float(x[0]), float(x[1])
    if abs(p) + h >= GRAZING_CUTOFF:
        raise GrazingOrbit("point within h of grazing")

    def diff(step):
        ph = np.array([phi + step, phi - step, phi, phi])
        pp = np.array([p, p, p + step, p - step])
        phi1, p1 = step_batch(oval, ph, pp)
        return np.array(
            [
                [_unwrap_delta(phi1[0] - phi1[1]), _unwrap_delta(phi1[2] - phi1[3])],
                [p1[0] - p1[1], p1[2] - p1[3]],
            ]
        ) / (2 * step)

    return (4.0 * diff(0.5 * h) - diff(h)) / 3.0


def jacobian_sp(oval, x, h=1e-6):
    """Numeric Jacobian in the canonical ``(s, p)`` coordinates."""
    J = jacobian_numeric(oval, x, h)
    phi1, _ = step_batch(oval, np.array([x[0]]), np.array([x[1]]))
    R0 = float(oval.radius(x[0]))
    R1 = float(oval.radius(phi1[0]))
    return np.array([[J[0, 0] * R1 / R0, J[0, 1] * R1], [J[1, 0] / R0, J[1, 1]]])


def dt_symmetric_fixed_point(oval, phi0, m, tol=1e-9):
    """Closed-form ``(phi, p)`` Jacobian of the quotient map at the fixed
    point ``(phi0, cos(m pi / n))`` over a critical point of ``g``."""
    n = oval.n
    if not 1 <= m <= n - 1:
        raise ValueError(f"m must be in 1..{n - 1}")
    d = oval.curve.derivs(float(phi0))
    if abs(d[1]) > tol:
        raise NotCritical(f"g'({phi0}) = {d[1]:.3e} is not zero")
    g0, R0 = float(d[0]), float(d[0] + d[2])
    sa = math.sin(m * math.pi / n)
    L = 2.0 * g0 * sa
    a = (L - R0 * sa) / (R0 * sa)
    return np.array([[a, -L / (R0 * sa**2)], [-(L - 2.0 * R0 * sa) / R0, a]])


def to_sp(J, R0, R1=None):
    """Convert a ``(phi, p)`` Jacobian to ``(s, p)`` given the radii at the
    source and target points."""
    R1 = R0 if R1 is None else R1
    return np.array([[J[0, 0] * R1 / R0, J[0, 1] * R1], [J[1, 0] / R0, J[1, 1]]])
