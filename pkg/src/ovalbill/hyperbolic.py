"""Stable and unstable manifolds of hyperbolic symmetric fixed points.

Manifolds live in the quotient cylinder ``[0, 2 pi / n) x (-1, 1)``.  A branch
is parameterized by ``u >= 0``::

    W(u) = F^k(x0 + side * d * Lambda**(u - k) * v),   k = floor(u)

where ``F`` is the billiard map (unstable branch) or its inverse (stable
branch), ``v`` the eigenvector, ``d`` the seed distance and ``Lambda`` the
expansion factor of ``F`` along ``v``.  Thus ``W(u + 1) = F(W(u))`` and each
unit interval of ``u`` is one fundamental domain.  Polylines store a
continuous lift of the quotient angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    GRAZING_CUTOFF,
    dt_symmetric_fixed_point,
    inverse_batch,
    step_batch,
)
from .errors import NotHyperbolic, RefinementLimit, SupportTooWide
from .geometry import TWO_PI, perturb_bump, wrap_angle, wrap_centered

TANGENCY_TOL = 1e-4


@dataclass
class EigenDirections:
    lambda_u: float
    v_u: np.ndarray
    lambda_s: float
    v_s: np.ndarray


def _unit(v):
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    return v if v[0] > 0 or (v[0] == 0 and v[1] > 0) else -v


def eigen_directions(oval, phi0, m):
    """Eigenpairs of the closed-form ``(phi, p)`` Jacobian at a hyperbolic
    symmetric fixed point."""
    J = dt_symmetric_fixed_point(oval, phi0, m)
    tr = float(np.trace(J))
    if abs(tr) <= 2.0:
        raise NotHyperbolic(f"trace {tr} at phi0={phi0}, m={m} is not hyperbolic")
    r = math.sqrt(tr * tr - 4.0)
    lam_u = 0.5 * (tr + math.copysign(r, tr))
    lam_s = 1.0 / lam_u
    a, b = J[0]
    c, d = J[1]
    # (J - lam I) v = 0 using the better-conditioned row
    def vec(lam):
        if abs(b) >= abs(c):
            return _unit([b, lam - a])
        return _unit([lam - d, c])

    return EigenDirections(lam_u, vec(lam_u), lam_s, vec(lam_s))


@dataclass
class ManifoldSegment:
    oval: object = field(repr=False)
    phi0: float
    p0: float
    m: int
    branch: str  # "unstable" | "stable"
    side: int  # +1 | -1
    eigenvalue: float
    direction: np.ndarray
    seed_distance: float
    u: np.ndarray
    phi: np.ndarray
    p: np.ndarray
    truncated: bool = False

    @property
    def period(self):
        return TWO_PI / self.oval.n

    @property
    def points(self):
        return np.stack([self.phi, self.p], axis=1)

    @property
    def arclength(self):
        return float(np.sum(np.hypot(np.diff(self.phi), np.diff(self.p))))

    def _maps_per_domain(self):
        return 1 if self.eigenvalue > 0 else 2

    def evaluate(self, u):
        """``W(u)`` with the angle reduced around the anchor (not lifted)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        q = self._maps_per_domain()
        lam = abs(self.eigenvalue) ** q
        if self.branch == "stable":
            lam = 1.0 / lam
        k = np.floor(u).astype(int)
        frac = u - k
        amp = self.side * self.seed_distance * lam**frac
        phi = self.phi0 + amp * self.direction[0]
        p = self.p0 + amp * self.direction[1]
        fmap = step_batch if self.branch == "unstable" else inverse_batch
        kmax = int(k.max()) if k.size else 0
        for j in range(kmax * q):
            sel = k * q > j
            phi_s, p_s = fmap(self.oval, phi[sel], p[sel])
            phi[sel] = phi_s
            p[sel] = p_s
        return self.phi0 + wrap_centered(phi - self.phi0, self.period), p


def _lift(phi, ref, period):
    """Shift ``phi`` by multiples of ``period`` to be nearest ``ref``."""
    return phi - period * np.round((phi - ref) / period)


def _needs_refinement(phi, p, arc_step, angle_tol):
    dx = np.diff(phi)
    dy = np.diff(p)
    long_edges = np.hypot(dx, dy) > arc_step
    ang = np.arctan2(dy, dx)
    turn = np.abs(np.mod(np.diff(ang) + np.pi, TWO_PI) - np.pi)
    sharp = np.zeros_like(long_edges)
    # a sharp turn at a vertex flags both adjacent edges
    sharp[:-1] |= turn > angle_tol
    sharp[1:] |= turn > angle_tol
    return long_edges | sharp


def grow_manifold(
    oval,
    phi0,
    m,
    branch="unstable",
    side=1,
    seed_distance=1e-7,
    max_arc=5.0,
    max_points=50_000,
    arc_step=0.01,
    angle_tol=0.1,
    initial_samples=16,
    min_du=1e-12,
):
    """Grow one branch of ``W^u`` or ``W^s`` of the fixed point
    ``(phi0, cos(m pi / n))`` until its arclength reaches ``max_arc``.

    Each new fundamental domain is the image of the previous one; points are
    inserted (by bisecting ``u``) wherever consecutive polyline points are
    farther apart than ``arc_step`` or the polyline turns by more than
    ``angle_tol`` radians.  Growth stops early, with ``truncated=True``, if
    ``max_points`` is reached.
    """
    if branch not in ("stable", "unstable"):
        raise ValueError("branch must be 'stable' or 'unstable'")
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    eig = eigen_directions(oval, phi0, m)
    lam, vec = (eig.lambda_u, eig.v_u) if branch == "unstable" else (eig.lambda_s, eig.v_s)
    p0 = math.cos(m * math.pi / oval.n)
    seg = ManifoldSegment(
        oval, float(phi0), p0, m, branch, side, lam, vec, seed_distance,
        np.empty(0), np.empty(0), np.empty(0),
    )
    period = seg.period
    q = seg._maps_per_domain()
    fmap = step_batch if branch == "unstable" else inverse_batch

    u_all = []
    phi_all = []
    p_all = []
    total = 0.0
    # first fundamental domain straight from the linearization
    u_dom = np.linspace(0.0, 1.0, initial_samples + 1)
    phi_dom, p_dom = seg.evaluate(u_dom)
    prev_ref = float(phi0)
    truncated = False
    while True:
        phi_dom = _lift(phi_dom, prev_ref, period)
        # continuous lift along the domain
        phi_dom = phi_dom[0] + np.concatenate([[0.0], np.cumsum(wrap_centered(np.diff(phi_dom), period))])
        for _ in range(60):
            bad = _needs_refinement(phi_dom, p_dom, arc_step, angle_tol)
            if not bad.any():
                break
            idx = np.nonzero(bad)[0]
            du = u_dom[idx + 1] - u_dom[idx]
            if np.any(du < min_du):
                raise RefinementLimit(f"cannot resolve manifold near u={u_dom[idx[du < min_du][0]]:.15g}")
            u_new = 0.5 * (u_dom[idx] + u_dom[idx + 1])
            phi_new, p_new = seg.evaluate(u_new)
            phi_new = phi_dom[idx] + wrap_centered(phi_new - phi_dom[idx], period)
            u_dom = np.insert(u_dom, idx + 1, u_new)
            phi_dom = np.insert(phi_dom, idx + 1, phi_new)
            p_dom = np.insert(p_dom, idx + 1, p_new)
            if sum(len(a) for a in u_all) + len(u_dom) > max_points:
                truncated = True
                break
        else:
            raise RefinementLimit("refinement did not settle within 60 passes")
        start = 0 if not u_all else 1  # domain endpoints are shared
        seg_len = np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(phi_dom), np.diff(p_dom)))])
        if total + seg_len[-1] >= max_arc:
            cut = int(np.searchsorted(seg_len, max_arc - total)) + 1
            u_all.append(u_dom[start:cut])
            phi_all.append(phi_dom[start:cut])
            p_all.append(p_dom[start:cut])
            break
        u_all.append(u_dom[start:])
        phi_all.append(phi_dom[start:])
        p_all.append(p_dom[start:])
        total += seg_len[-1]
        if truncated:
            break
        if np.any(np.abs(p_dom) > GRAZING_CUTOFF - 1e-6):
            truncated = True
            break
        # image of this domain is the next one
        prev_ref = float(phi_dom[-1])
        u_dom = u_dom + 1.0
        phi_next, p_next = phi_dom.copy(), p_dom.copy()
        for _ in range(q):
            phi_next, p_next = fmap(oval, phi_next, p_next)
        phi_dom = float(phi0) + wrap_centered(phi_next - float(phi0), period)
        p_dom = p_next
    seg.u = np.concatenate(u_all)
    seg.phi = np.concatenate(phi_all)
    seg.p = np.concatenate(p_all)
    seg.truncated = truncated
    return seg


# ---------------------------------------------------------------------------
# Crossings


@dataclass
class CrossingReport:
    phi: float
    p: float
    kind: str  # transversal | tangent
    slopes: tuple  # (d alpha / d phi along W^u, along W^s)
    focusing: tuple  # (d_plus, d_minus)
    slope_difference: float
    tolerance: float
    u_unstable: float
    u_stable: float
    shift: int

    @property
    def alpha(self):
        return math.acos(self.p)


def _segment_hits(ax, ay, bx, by):
    """Index pairs (i, j) where edge i of polyline a crosses edge j of b."""
    hits = []
    a0x, a0y, a1x, a1y = ax[:-1], ay[:-1], ax[1:], ay[1:]
    b0x, b0y, b1x, b1y = bx[:-1], by[:-1], bx[1:], by[1:]
    bminx, bmaxx = np.minimum(b0x, b1x), np.maximum(b0x, b1x)
    bminy, bmaxy = np.minimum(b0y, b1y), np.maximum(b0y, b1y)
    chunk = 512
    for s in range(0, len(a0x), chunk):
        sl = slice(s, s + chunk)
        aminx = np.minimum(a0x[sl], a1x[sl])[:, None]
        amaxx = np.maximum(a0x[sl], a1x[sl])[:, None]
        aminy = np.minimum(a0y[sl], a1y[sl])[:, None]
        amaxy = np.maximum(a0y[sl], a1y[sl])[:, None]
        box = (aminx <= bmaxx) & (amaxx >= bminx) & (aminy <= bmaxy) & (amaxy >= bminy)
        ii, jj = np.nonzero(box)
        if not ii.size:
            continue
        ii = ii + s
        d1 = _orient(a0x[ii], a0y[ii], a1x[ii], a1y[ii], b0x[jj], b0y[jj])
        d2 = _orient(a0x[ii], a0y[ii], a1x[ii], a1y[ii], b1x[jj], b1y[jj])
        d3 = _orient(b0x[jj], b0y[jj], b1x[jj], b1y[jj], a0x[ii], a0y[ii])
        d4 = _orient(b0x[jj], b0y[jj], b1x[jj], b1y[jj], a1x[ii], a1y[ii])
        ok = (d1 * d2 < 0) & (d3 * d4 < 0)
        hits.extend(zip(ii[ok].tolist(), jj[ok].tolist()))
    return hits


def _orient(x0, y0, x1, y1, x, y):
    return (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0)


def _intersect(a0, a1, b0, b1):
    """Parameters (s, t) of the intersection of two straight edges."""
    da = a1 - a0
    db = b1 - b0
    den = da[0] * db[1] - da[1] * db[0]
    w = b0 - a0
    return (w[0] * db[1] - w[1] * db[0]) / den, (w[0] * da[1] - w[1] * da[0]) / den


def _refine_crossing(seg_u, seg_s, ua, ub, shift, rounds=5, sub=8):
    """Shrink the parameter intervals around one crossing by resampling."""
    period = seg_u.period
    for _ in range(rounds):
        us = np.linspace(ua[0], ua[1], sub + 1)
        vs = np.linspace(ub[0], ub[1], sub + 1)
        pa, qa = seg_u.evaluate(us)
        pb, qb = seg_s.evaluate(vs)
        ref = 0.5 * (pa[0] + pa[-1])
        pa = _lift(pa, ref, period)
        pb = _lift(pb, ref, period)
        hits = _segment_hits(pa, qa, pb, qb)
        if not hits:
            break
        i, j = hits[0]
        ua = (us[i], us[i + 1])
        ub = (vs[j], vs[j + 1])
    a0, a1 = np.array([pa[i], qa[i]]), np.array([pa[i + 1], qa[i + 1]])
    b0, b1 = np.array([pb[j], qb[j]]), np.array([pb[j + 1], qb[j + 1]])
    s, t = _intersect(a0, a1, b0, b1)
    point = a0 + s * (a1 - a0)
    u_star = ua[0] + s * (ua[1] - ua[0])
    v_star = ub[0] + t * (ub[1] - ub[0])
    return point, u_star, v_star


def _slope_alpha(seg, u, p_star, du=1e-7):
    """``d alpha / d phi`` along a manifold at parameter ``u``."""
    phi, p = seg.evaluate(np.array([u - du, u + du]))
    dphi = float(wrap_centered(phi[1] - phi[0], seg.period))
    dp_dphi = (p[1] - p[0]) / dphi
    return -dp_dphi / math.sqrt(1.0 - p_star**2)


def find_crossings(seg_u, seg_s, tol=TANGENCY_TOL, exclude_radius=None):
    """Intersections of an unstable and a stable polyline in the quotient
    cylinder, refined and classified as transversal or tangent.

    Crossings within ``exclude_radius`` (default ten seed distances) of
    either anchor are skipped: both branches start there.
    """
    if seg_u.branch != "unstable" or seg_s.branch != "stable":
        raise ValueError("need an unstable and a stable segment")
    if seg_u.oval.n != seg_s.oval.n:
        raise ValueError("segments live in different quotient cylinders")
    period = seg_u.period
    if exclude_radius is None:
        exclude_radius = 10.0 * max(seg_u.seed_distance, seg_s.seed_distance)
    lo = math.floor((seg_u.phi.min() - seg_s.phi.max()) / period) - 1
    hi = math.ceil((seg_u.phi.max() - seg_s.phi.min()) / period) + 1
    out = []
    seen = []
    oval = seg_u.oval
    for shift in range(lo, hi + 1):
        bphi = seg_s.phi + shift * period
        for i, j in _segment_hits(seg_u.phi, seg_u.p, bphi, seg_s.p):
            point, u_star, v_star = _refine_crossing(
                seg_u, seg_s, (seg_u.u[i], seg_u.u[i + 1]), (seg_s.u[j], seg_s.u[j + 1]), shift
            )
            phi_q = float(wrap_angle(point[0], period))
            near_anchor = False
            for anchor in ((seg_u.phi0, seg_u.p0), (seg_s.phi0, seg_s.p0)):
                dphi = float(wrap_centered(phi_q - anchor[0], period))
                if math.hypot(dphi, point[1] - anchor[1]) < exclude_radius:
                    near_anchor = True
            if near_anchor:
                continue
            if any(abs(float(wrap_centered(phi_q - a, period))) < 1e-12 and abs(point[1] - b) < 1e-12 for a, b in seen):
                continue
            seen.append((phi_q, point[1]))
            su = _slope_alpha(seg_u, u_star, point[1])
            ss = _slope_alpha(seg_s, v_star, point[1])
            R = float(oval.radius(phi_q))
            sa = math.sqrt(1.0 - point[1] ** 2)
            d_plus = R * sa / (1.0 + ss)
            d_minus = R * sa / (1.0 - su)
            diff = abs(su - ss)
            out.append(
                CrossingReport(
                    phi_q, float(point[1]), "tangent" if diff < tol else "transversal",
                    (su, ss), (d_plus, d_minus), diff, tol, u_star, v_star, shift,
                )
            )
    out.sort(key=lambda c: c.u_unstable)
    return out


def orbit_impacts(oval, phi, p, horizon):
    """Impact angles of ``horizon`` forward and backward iterates
    (excluding the starting point itself)."""
    out = []
    fphi, fp = np.array([phi]), np.array([p])
    bphi, bp = fphi.copy(), fp.copy()
    for _ in range(horizon):
        fphi, fp = step_batch(oval, fphi, fp)
        bphi, bp = inverse_batch(oval, bphi, bp)
        out.extend([float(fphi[0]), float(bphi[0])])
    return np.array(out)


def tangency_break(oval, crossing, eps, delta1, delta2, horizon=40, require_tangent=True):
    """Power-2 bump of the support function centered at the crossing angle.

    The curvature radius at ``phi*`` grows by ``2 eps`` while the impact
    point and tangent stay put, splitting the manifold slopes there by about
    ``4 eps / R*``.  The bump support must miss the ``horizon`` forward and
    backward impacts of the crossing orbit and every symmetric periodic
    point (rotated copies included); otherwise :class:`SupportTooWide`.
    """
    if require_tangent and crossing.kind != "tangent":
        raise ValueError("crossing is not tangent")
    period = TWO_PI / oval.n
    center = crossing.phi
    impacts = orbit_impacts(oval, center, crossing.p, horizon)
    dist = np.abs(wrap_centered(impacts - center, period))
    if np.any(dist < delta2):
        raise SupportTooWide(
            f"bump support radius {delta2} reaches an impact of the crossing orbit "
            f"(closest at {dist.min():.3e}, horizon {horizon})"
        )
    return perturb_bump(oval.curve, center, eps, power=2, delta1=delta1, delta2=delta2)
