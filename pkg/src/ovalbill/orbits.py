"""Families of symmetric periodic orbits and their stability.

Every critical point ``phi0`` of the support function carries, for each
``m = 1..n-1``, a periodic orbit along the regular polygon with vertices
``phi0 + 2 k m pi / n``; the outgoing angle is ``alpha_m = m pi / n``.  In
the quotient cylinder these are fixed points of the billiard map, and their
linearization depends only on ``g(phi0)``, ``R(phi0)`` and ``alpha_m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import dt_symmetric_fixed_point, jacobian_numeric, step_batch, to_sp
from .errors import BilliardError, EscapedNeighborhood, NotCritical, NotElliptic, Resonant
from .geometry import TWO_PI, arclength_derivatives, critical_points, wrap_centered

PARABOLIC_TOL = 1e-9
RESONANCE_TOL = 1e-9
CRITICAL_TOL = 1e-9


@dataclass
class FamilyMember:
    m: int
    period: int
    alpha: float
    p: float
    count: int
    L: float
    reverse_m: int
    closure_error: float = float("nan")
    note: str = ""


@dataclass
class OrbitFamily:
    phi0: float
    kind: str  # elliptic | hyperbolic | parabolic
    critical_kind: str  # minimum | maximum | degenerate
    g_value: float
    R_value: float
    members: list = field(default_factory=list)

    def member(self, m):
        for mem in self.members:
            if mem.m == m:
                return mem
        raise KeyError(m)


@dataclass
class StabilityReport:
    m: int
    kind: str
    trace: float
    det: float
    eigenvalues: tuple
    zeta: Optional[float]
    numeric_mismatch: float = float("nan")


@dataclass
class TwistReport:
    phi0: float
    resonance3: bool
    resonance4: bool
    tau: dict
    tau_zero_m: Optional[int]
    tau_zero_sin2: Optional[float]


def polygon_vertices(oval, phi, m):
    """Impact angles of the regular polygon ``P_m(phi)``, reduced mod 2 pi."""
    n = oval.n
    if not 1 <= m <= n - 1:
        raise ValueError(f"m must be in 1..{n - 1}")
    nt = n // math.gcd(n, m)
    return np.mod(phi + 2.0 * np.pi * m * np.arange(nt) / n, TWO_PI)


def side_length(oval, phi, m):
    """Side ``L_m(phi)`` of the inscribed polygon and ``dL_m/dphi``.

    Rotating ``Gamma(phi)`` by ``2 alpha_m`` gives the next vertex, so
    ``L**2 = 4 (g**2 + g'**2) sin(alpha_m)**2`` for every ``phi``.
    """
    n = oval.n
    alpha = m * math.pi / n
    a = oval.point(phi)
    b = oval.point(phi + 2.0 * alpha)
    L = float(np.linalg.norm(b - a))
    d = oval.derivs(phi, 2)
    dL = 4.0 * float(d[1] * (d[0] + d[2])) * math.sin(alpha) ** 2 / L
    return L, dL


def _kind_from(g0, R0, tol=PARABOLIC_TOL):
    if abs(g0 - R0) < tol:
        return "parabolic"
    return "elliptic" if g0 < R0 else "hyperbolic"


def _closure_errors(oval, phi0, m):
    n = oval.n
    gcd = math.gcd(n, m)
    nt = n // gcd
    start = phi0 + TWO_PI * np.arange(gcd) / n
    phi = start.copy()
    p = np.full(gcd, math.cos(m * math.pi / n))
    for _ in range(nt):
        phi, p = step_batch(oval, phi, p)
    dphi = wrap_centered(phi - start)
    return float(np.max(np.hypot(dphi, p - math.cos(m * math.pi / n))))


def find_families(oval, verify=True, closure_tol=1e-8, parabolic_tol=PARABOLIC_TOL):
    """One :class:`OrbitFamily` per critical point of ``g`` in ``[0, 2 pi/n)``.

    With ``verify`` every member is iterated around its polygon and must
    return to its start within ``closure_tol``.
    """
    n = oval.n
    out = []
    for cp in critical_points(oval.curve):
        d = oval.derivs(cp.phi0, 2)
        g0, R0 = float(d[0]), float(d[0] + d[2])
        fam = OrbitFamily(cp.phi0, _kind_from(g0, R0, parabolic_tol), cp.kind, g0, R0)
        for m in range(1, n):
            gcd = math.gcd(n, m)
            alpha = m * math.pi / n
            mem = FamilyMember(
                m=m,
                period=n // gcd,
                alpha=alpha,
                p=math.cos(alpha),
                count=2 * gcd,
                L=2.0 * g0 * math.sin(alpha),
                reverse_m=n - m,
            )
            if m > 1 and fam.kind == "elliptic":
                mem.note = "orbit multipliers are lambda**m; the orbit can be resonant while the fixed point is not"
            if verify:
                mem.closure_error = _closure_errors(oval, cp.phi0, m)
                if not mem.closure_error < closure_tol:
                    raise BilliardError(
                        f"family at phi0={cp.phi0} m={m} does not close: error {mem.closure_error:.3e}"
                    )
            fam.members.append(mem)
        out.append(fam)
    return out


def classify(oval, family, m, numeric_check=True, parabolic_tol=PARABOLIC_TOL):
    """Linear stability of the member ``m`` of a family."""
    J = dt_symmetric_fixed_point(oval, family.phi0, m, tol=CRITICAL_TOL)
    tr = float(np.trace(J))
    det = float(np.linalg.det(J))
    disc = tr * tr - 4.0
    if disc > 0:
        r = math.sqrt(disc)
        # larger-magnitude root first; the small one as 1/big avoids cancellation
        big = 0.5 * (tr + math.copysign(r, tr))
        eig = (complex(big), complex(1.0 / big))
        zeta = None
    else:
        zeta = math.acos(max(-1.0, min(1.0, 0.5 * tr)))
        eig = (complex(math.cos(zeta), math.sin(zeta)), complex(math.cos(zeta), -math.sin(zeta)))
    if abs(tr) < 2.0 - parabolic_tol:
        kind = "elliptic"
    elif abs(tr) > 2.0 + parabolic_tol:
        kind = "hyperbolic"
    else:
        kind = "parabolic"
    mismatch = float("nan")
    if numeric_check:
        N = jacobian_numeric(oval, (family.phi0, math.cos(m * math.pi / oval.n)))
        mismatch = float(np.max(np.abs(N - J) / np.maximum(np.abs(J), 1e-12)))
    return StabilityReport(m, kind, tr, det, eig, zeta, mismatch)


def resonance_check(curve, phi0, tol=RESONANCE_TOL):
    """Flags for multipliers that are cube or fourth roots of unity:
    ``3 g - g'' = 0`` and ``g - g'' = 0`` at ``phi0``."""
    d = curve.derivs(float(phi0), 2)
    g0, g2 = float(d[0]), float(d[2])
    return abs(3.0 * g0 - g2) < tol, abs(g0 - g2) < tol


def twist_from_parts(R0, L, alpha, dR, d2R):
    """First Birkhoff coefficient of the symmetric fixed point.

    ``R0`` curvature radius, ``L`` polygon side, ``alpha`` outgoing angle,
    ``dR`` and ``d2R`` the arclength derivatives of the curvature radius.
    """
    sa, ca = math.sin(alpha), math.cos(alpha)
    rs = R0 * sa
    return (
        -1.0 / (8.0 * R0 * sa**3)
        + 3.0 * ca**2 / (8.0 * sa**2 * (2.0 * L - rs))
        - L / (8.0 * (L - 2.0 * rs) ** 2) * (3.0 + (L - rs) / (2.0 * L - rs)) * dR**2
        - L / (8.0 * sa * (L - 2.0 * rs)) * d2R
    )


def _fixed_point_data(oval, phi0):
    d = oval.derivs(float(phi0))
    if abs(d[1]) > CRITICAL_TOL:
        raise NotCritical(f"g'({phi0}) = {d[1]:.3e} is not zero")
    R0, dR, d2R = (float(v) for v in arclength_derivatives(oval, float(phi0)))
    return float(d[0]), R0, dR, d2R


def twist_coefficient(oval, phi0, m, resonance_tol=RESONANCE_TOL):
    """Twist coefficient of the quotient map at ``(phi0, cos(m pi / n))``."""
    g0, R0, dR, d2R = _fixed_point_data(oval, phi0)
    if _kind_from(g0, R0) != "elliptic":
        raise NotElliptic(f"phi0={phi0}: g={g0} is not below R={R0}")
    res3, res4 = resonance_check(oval.curve, phi0, resonance_tol)
    if res4:
        raise Resonant(f"resonant: g(phi0)=g''(phi0) at phi0={phi0}")
    if res3:
        raise Resonant(f"resonant: 3g(phi0)=g''(phi0) at phi0={phi0}")
    alpha = m * math.pi / oval.n
    return twist_from_parts(R0, 2.0 * g0 * math.sin(alpha), alpha, dR, d2R)


def tau_zero_sin2(oval, phi0):
    """Value of ``sin(alpha)**2`` at which the twist coefficient of the
    family vanishes, or ``None`` when the linear equation is degenerate."""
    g0, R0, dR, d2R = _fixed_point_data(oval, phi0)
    const = 4.0 * (g0 - R0) / (R0 * (4.0 * g0 - R0))
    slope = (
        3.0 / (4.0 * g0 - R0)
        + g0 / (2.0 * (g0 - R0) ** 2) * (3.0 + (2.0 * g0 - R0) / (4.0 * g0 - R0)) * dR**2
        + g0 * d2R / (g0 - R0)
    )
    if slope == 0.0:
        return None
    return -const / slope


def tau_zero_m(oval, phi0, tol=1e-9):
    """The ``m`` in ``1..n//2`` whose twist coefficient vanishes, if any."""
    s2 = tau_zero_sin2(oval, phi0)
    if s2 is None or not 0.0 < s2 <= 1.0:
        return None
    for m in range(1, oval.n // 2 + 1):
        if abs(math.sin(m * math.pi / oval.n) ** 2 - s2) < tol:
            return m
    return None


def twist_report(oval, phi0, resonance_tol=RESONANCE_TOL):
    res3, res4 = resonance_check(oval.curve, phi0, resonance_tol)
    g0, R0, _, _ = _fixed_point_data(oval, phi0)
    taus = {}
    zero_m = zero_s2 = None
    if _kind_from(g0, R0) == "elliptic":
        if not (res3 or res4):
            taus = {m: twist_coefficient(oval, phi0, m, resonance_tol) for m in range(1, oval.n)}
        zero_s2 = tau_zero_sin2(oval, phi0)
        zero_m = tau_zero_m(oval, phi0)
    return TwistReport(phi0, res3, res4, taus, zero_m, zero_s2)


# ---------------------------------------------------------------------------
# Independent check of the twist coefficient


@dataclass
class OracleFit:
    zeta_fit: float
    tau_fit: float
    zeta: float
    mean_r2: np.ndarray
    advance: np.ndarray


def jordan_frame(M):
    """Symplectic ``P`` (det 1) with ``P^-1 M P`` a rotation by ``zeta``
    for an elliptic unit-determinant 2x2 matrix ``M``.

    The orientation is fixed by ``det P = 1``, which makes ``zeta`` signed.
    """
    c = 0.5 * float(np.trace(M))
    if not abs(c) < 1.0:
        raise NotElliptic(f"trace {2 * c} is not elliptic")
    s = math.sqrt(1.0 - c * c)
    J = (M - c * np.eye(2)) / s
    if J[1, 0] < 0:
        J, s = -J, -s
    P = np.array([[1.0, J[0, 0]], [0.0, J[1, 0]]]) / math.sqrt(J[1, 0])
    return P, math.atan2(s, c)


def _birkhoff_weights(n):
    t = (np.arange(n) + 0.5) / n
    w = np.exp(-1.0 / (t * (1.0 - t)))
    return w / w.sum()


def rotation_number_oracle(oval, phi0, m, radii=(1e-4, 3e-4, 6e-4, 1e-3), iters=10_000, angles=8):
    """Fit ``advance = zeta + tau * r**2`` from orbits near an elliptic fixed point.

    Rings of initial conditions are placed at each radius in the symplectic
    normal coordinates of the linearized map (canonical ``(s, p)``
    variables).  The mean angular advance per iterate and the mean squared
    radius are taken as smoothly weighted Birkhoff averages, which converge
    much faster than plain averages on quasi-periodic orbits.
    """
    n = oval.n
    period = TWO_PI / n
    pm = math.cos(m * math.pi / n)
    R0 = float(oval.radius(phi0))
    M = to_sp(dt_symmetric_fixed_point(oval, phi0, m, tol=CRITICAL_TOL), R0)
    P, zeta = jordan_frame(M)
    Pinv = np.linalg.inv(P)
    radii = np.asarray(radii, dtype=float)
    theta = TWO_PI * np.arange(angles) / angles
    r = np.repeat(radii, angles)
    th = np.tile(theta, len(radii))
    ds, dp = P @ np.stack([r * np.cos(th), r * np.sin(th)])
    s0 = oval.arclength(phi0)
    phi = oval.phi_of_s(s0 + ds)
    p = pm + dp
    base = np.full_like(r, float(phi0))

    def normal_coords(phi, p):
        d = wrap_centered(phi - phi0, period)
        x, y = Pinv @ np.stack([oval.arc_between(base, base + d), p - pm])
        return base + d, x, y

    phi, x, y = normal_coords(phi, p)
    ang = np.arctan2(y, x)
    w = _birkhoff_weights(iters)
    adv = np.zeros_like(r)
    r2 = np.zeros_like(r)
    for k in range(iters):
        phi, p = step_batch(oval, phi, p)
        phi, x, y = normal_coords(phi, p)
        rad2 = x * x + y * y
        if np.any((rad2 > 4.0 * r * r) | (rad2 < 0.25 * r * r)):
            raise EscapedNeighborhood(f"orbit left the fitting annulus at iterate {k}")
        new = np.arctan2(y, x)
        adv += w[k] * np.mod(new - ang, TWO_PI)
        r2 += w[k] * rad2
        ang = new
    # keep the advance on the branch of zeta
    if zeta < 0:
        adv -= TWO_PI
    A = np.stack([np.ones_like(r2), r2], axis=1)
    (zeta_fit, tau_fit), *_ = np.linalg.lstsq(A, adv, rcond=None)
    return OracleFit(float(zeta_fit), float(tau_fit), zeta, r2, adv)
