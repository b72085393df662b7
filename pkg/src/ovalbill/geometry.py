"""Support functions of n-symmetric ovals and the geometry derived from them.

A curve is described by its support function ``g(phi)``, the distance from
the symmetry center to the tangent line whose direction makes angle ``phi``
with the x axis.  Everything else (the boundary point, curvature radius,
arclength) is computed from ``g`` and its derivatives.

Two curve representations share one evaluation interface
(``curve.derivs(phi) -> array of shape (5, ...)``, ``curve.n``):

* :class:`SupportFunction`, a finite Fourier series in multiples of ``n``;
* :class:`PerturbedCurve`, a series plus a compactly supported bump term.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateCircle, InvalidCurve, InvalidResult, SupportTooWide

TWO_PI = 2.0 * math.pi

# Gauss-Legendre rule used for all arclength integrals.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


def wrap_angle(phi, period=TWO_PI):
    """Reduce ``phi`` to ``[0, period)``."""
    out = np.mod(phi, period)
    # np.mod can return `period` itself for tiny negative inputs
    return np.where(out >= period, out - period, out)


def wrap_centered(phi, period=TWO_PI):
    """Reduce ``phi`` to ``[-period/2, period/2)``."""
    return np.mod(np.asarray(phi, dtype=float) + 0.5 * period, period) - 0.5 * period


@dataclass(frozen=True)
class SupportFunction:
    """Fourier-series support function with symmetry order ``n``.

    ``g(phi) = a0 + sum_k (a_k cos(k phi) + b_k sin(k phi))`` where every
    harmonic index ``k`` is a positive multiple of ``n``.  Harmonics that
    break the symmetry are rejected here, so ``g(phi + 2 pi / n) == g(phi)``
    holds by construction.
    """

    n: int
    a0: float = 1.0
    harmonics: tuple = ()

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise InvalidCurve(f"symmetry order must be an integer >= 2, got {self.n!r}")
        if not self.a0 > 0:
            raise InvalidCurve(f"constant term must be positive, got {self.a0!r}")
        seen = set()
        clean = []
        for item in self.harmonics:
            if len(item) == 2:
                k, a = item
                b = 0.0
            else:
                k, a, b = item
            if int(k) != k or k <= 0:
                raise InvalidCurve(f"harmonic index must be a positive integer, got {k!r}")
            k = int(k)
            if k % self.n:
                raise InvalidCurve(f"harmonic {k} not multiple of n={self.n}")
            if k in seen:
                raise InvalidCurve(f"harmonic {k} given twice")
            seen.add(k)
            clean.append((k, float(a), float(b)))
        clean.sort()
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "harmonics", tuple(clean))

    @classmethod
    def circle(cls, n=2, radius=1.0):
        return cls(n, radius)

    @classmethod
    def cosine(cls, n, amplitude, a0=1.0):
        """``g = a0 + amplitude * cos(n phi)``, the workhorse test family."""
        return cls(n, a0, ((n, amplitude, 0.0),))

    @property
    def period(self):
        return TWO_PI / self.n

    @property
    def max_harmonic(self):
        return max((k for k, _, _ in self.harmonics), default=self.n)

    @property
    def is_circle(self):
        return all(a == 0.0 and b == 0.0 for _, a, b in self.harmonics)

    def derivs(self, phi, order=4):
        """Return ``g, g', ..., g^(order)`` stacked along axis 0."""
        phi = np.asarray(phi, dtype=float)
        out = np.zeros((order + 1,) + phi.shape)
        out[0] = self.a0
        for k, a, b in self.harmonics:
            c = np.cos(k * phi)
            s = np.sin(k * phi)
            even = a * c + b * s
            odd = k * (b * c - a * s)
            # derivatives cycle through even, odd, -even, -odd
            for j in range(order + 1):
                term = even * k**j if j % 2 == 0 else odd * k ** (j - 1)
                if j % 4 >= 2:
                    out[j] -= term
                else:
                    out[j] += term
        return out

    def __call__(self, phi):
        return self.derivs(phi)[0]


def eval_support(curve, phi):
    """``(g, g', g'', g''', g'''')`` at a single angle, as floats."""
    return tuple(float(v) for v in curve.derivs(float(phi)))


# ---------------------------------------------------------------------------
# Smooth bump


@functools.lru_cache(maxsize=None)
def _smoothstep_derivs():
    """Lambdified derivatives 0..4 of S(t) = f(t) / (f(t) + f(1 - t)),
    f(t) = exp(-1/t), valid on the open interval (0, 1)."""
    import sympy as sp

    t = sp.symbols("t")
    f0 = sp.exp(-1 / t)
    f1 = sp.exp(-1 / (1 - t))
    expr = f0 / (f0 + f1)
    funcs = []
    for j in range(5):
        funcs.append(sp.lambdify(t, expr, "numpy", cse=True))
        expr = sp.diff(expr, t)
    return tuple(funcs)


def smoothstep(t, order=0):
    """C-infinity step: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    if order == 0:
        out[t >= 1.0] = 1.0
    # exp(-1/t) is below 1e-300 for t < 1/690; derivatives there are zero to
    # double precision and the closed forms overflow.
    inner = (t > 2e-3) & (t < 1.0 - 2e-3)
    if np.any(inner):
        with np.errstate(over="ignore", invalid="ignore"):
            out[inner] = _smoothstep_derivs()[order](t[inner])
    if order == 0:
        out[(t >= 1.0 - 2e-3) & (t < 1.0)] = 1.0
    return out


def bump(x, delta1, delta2, order=0):
    """Even bump equal to 1 on ``|x| <= delta1`` and 0 for ``|x| >= delta2``."""
    x = np.asarray(x, dtype=float)
    width = delta2 - delta1
    t = (delta2 - np.abs(x)) / width
    chain = (-np.sign(x) / width) ** order
    return smoothstep(t, order) * chain


@dataclass(frozen=True)
class PerturbedCurve:
    """``g(phi) + eps * u**power * bump(u)`` with ``u = phi - center``,
    repeated with period ``2 pi / n``."""

    base: object
    center: float
    eps: float
    power: int
    delta1: float
    delta2: float

    @property
    def n(self):
        return self.base.n

    @property
    def period(self):
        return TWO_PI / self.n

    @property
    def max_harmonic(self):
        return self.base.max_harmonic

    @property
    def is_circle(self):
        return self.eps == 0.0 and self.base.is_circle

    def bump_derivs(self, phi, order=4):
        phi = np.asarray(phi, dtype=float)
        u = wrap_centered(phi - self.center, self.period)
        out = np.zeros((order + 1,) + u.shape)
        if self.eps == 0.0:
            return out
        rho = [bump(u, self.delta1, self.delta2, j) for j in range(order + 1)]
        k = self.power
        # derivatives of u**k
        mono = [math.perm(k, i) * u ** (k - i) if i <= k else np.zeros_like(u) for i in range(order + 1)]
        for j in range(order + 1):
            acc = np.zeros_like(u)
            for i in range(j + 1):
                acc += math.comb(j, i) * mono[i] * rho[j - i]
            out[j] = self.eps * acc
        return out

    def derivs(self, phi, order=4):
        return self.base.derivs(phi, order) + self.bump_derivs(phi, order)

    def __call__(self, phi):
        return self.derivs(phi)[0]


def perturb_constant(sf, eps):
    """Return ``g + eps``. Critical points and all derivatives are kept."""
    if isinstance(sf, PerturbedCurve):
        base = perturb_constant(sf.base, eps)
        out = PerturbedCurve(base, sf.center, sf.eps, sf.power, sf.delta1, sf.delta2)
    else:
        if not sf.a0 + eps > 0:
            raise InvalidResult(f"g + eps is not positive (a0 + eps = {sf.a0 + eps})")
        out = SupportFunction(sf.n, sf.a0 + eps, sf.harmonics)
    report = validate(out)
    if not report.passed:
        raise InvalidResult(f"g + eps leaves the class of ovals: {report}")
    return out


def perturb_bump(curve, center, eps, power=4, delta1=0.05, delta2=0.1, check=True):
    """Add a localized ``eps * (phi - center)**power * bump`` term.

    With ``power=4`` the curve keeps a third order contact at ``center`` and
    only ``g''''(center)`` moves (by ``24 eps``).  With ``power=2`` the
    curvature radius at ``center`` moves by ``2 eps``.

    The bump is copied to every rotation of ``center`` by ``2 pi / n``.  When
    ``check`` is set, its support must not reach any critical point of the
    base curve (``power=2``) or any critical point other than ``center``
    itself (``power=4``); otherwise :class:`SupportTooWide` is raised.
    """
    if power not in (2, 4):
        raise ValueError("power must be 2 or 4")
    if not 0.0 < delta1 < delta2:
        raise ValueError("need 0 < delta1 < delta2")
    period = TWO_PI / curve.n
    if delta2 >= 0.5 * period:
        raise SupportTooWide(f"delta2={delta2} overlaps its own rotated copy (limit {0.5 * period})")
    out = PerturbedCurve(curve, float(center), float(eps), int(power), float(delta1), float(delta2))
    if check:
        try:
            crit = critical_points(curve)
        except DegenerateCircle:
            raise SupportTooWide("every point of a circle is critical") from None
        for cp in crit:
            dist = abs(float(wrap_centered(cp.phi0 - center, period)))
            if dist >= delta2:
                continue
            if power == 4 and dist < 1e-9:
                continue
            raise SupportTooWide(
                f"bump support [{center - delta2:.6g}, {center + delta2:.6g}] contains critical point {cp.phi0:.12g}"
            )
    if eps != 0.0:
        report = validate(out, samples=max(1024 * curve.max_harmonic, int(40 * period / (delta2 - delta1))))
        if not report.passed:
            raise InvalidResult(f"bumped curve leaves the class of ovals: {report}")
    return out


# ---------------------------------------------------------------------------
# Validation and critical points


@dataclass
class ValidationReport:
    passed: bool
    min_g: float
    phi_min_g: float
    min_R: float
    phi_min_R: float
    samples: int


def _polished_min(fun, x_grid, values, period):
    """Refine every local grid minimum of a periodic function by Newton on
    its derivative.  ``fun(x)`` returns (value, first, second)."""
    n = len(values)
    best = (float(values.min()), float(x_grid[values.argmin()]))
    left = np.roll(values, 1)
    right = np.roll(values, -1)
    h = period / n
    for i in np.nonzero((values <= left) & (values <= right))[0]:
        x = float(x_grid[i])
        for _ in range(30):
            _, d1, d2 = fun(x)
            if d2 <= 0:
                break
            step = d1 / d2
            if abs(step) > h:
                break
            x -= step
            if abs(step) < 1e-15:
                break
        v = fun(x)[0]
        if v < best[0]:
            best = (v, float(wrap_angle(x, period)))
    return best


def validate(curve, samples=None):
    """Check ``g > 0`` and ``R = g + g'' > 0`` over one symmetry period."""
    if samples is None:
        samples = 1024 * curve.max_harmonic
    if samples < 4 * curve.max_harmonic:
        raise ValueError(f"need at least {4 * curve.max_harmonic} samples")
    period = TWO_PI / curve.n
    x = np.arange(samples) * (period / samples)
    d = curve.derivs(x)
    R = d[0] + d[2]

    def g_fun(t):
        v = curve.derivs(t)
        return float(v[0]), float(v[1]), float(v[2])

    def r_fun(t):
        v = curve.derivs(t)
        return float(v[0] + v[2]), float(v[1] + v[3]), float(v[2] + v[4])

    min_g, at_g = _polished_min(g_fun, x, d[0], period)
    min_R, at_R = _polished_min(r_fun, x, R, period)
    tol = 1e-12
    return ValidationReport(min_g > tol and min_R > tol, min_g, at_g, min_R, at_R, samples)


@dataclass(frozen=True)
class CriticalPoint:
    phi0: float
    kind: str  # "minimum" | "maximum" | "degenerate"
    g_value: float
    g_second: float


def critical_points(curve, tol=1e-13, grid=4096, degenerate_tol=1e-9):
    """All zeros of ``g'`` in ``[0, 2 pi / n)``, classified by ``g''``.

    Raises :class:`DegenerateCircle` for a constant support function.
    """
    if curve.is_circle:
        raise DegenerateCircle("support function is constant: every angle is critical")
    period = TWO_PI / curve.n
    x = np.linspace(0.0, period, grid + 1)
    d1 = curve.derivs(x)[1]
    roots = []

    def gp(t):
        return float(curve.derivs(t)[1])

    for i in range(grid):
        if d1[i] == 0.0:
            roots.append(float(x[i]))
        elif d1[i] * d1[i + 1] < 0.0:
            roots.append(brentq(gp, x[i], x[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps))
    out = []
    for r in roots:
        # Newton polish to full precision
        for _ in range(3):
            v = curve.derivs(r)
            if v[2] == 0.0:
                break
            step = v[1] / v[2]
            if abs(step) > period / grid:
                break
            r -= float(step)
        r = float(wrap_angle(r, period))
        if any(abs(float(wrap_centered(r - q.phi0, period))) < 1e-10 for q in out):
            continue
        v = curve.derivs(r)
        g2 = float(v[2])
        if abs(g2) <= degenerate_tol:
            kind = "degenerate"
        elif g2 > 0:
            kind = "minimum"
        else:
            kind = "maximum"
        out.append(CriticalPoint(r, kind, float(v[0]), g2))
    out.sort(key=lambda c: c.phi0)
    return out


# ---------------------------------------------------------------------------
# The oval itself


class Oval:
    """Geometric evaluator over a support function (or bumped curve).

    The boundary point for tangent angle ``phi`` is
    ``Gamma(phi) = g (sin phi, -cos phi) + g' (cos phi, sin phi)``,
    so that ``-<Gamma, eta> = g`` with inward normal
    ``eta = (-sin phi, cos phi)`` and ``dGamma/dphi = R (cos phi, sin phi)``.
    """

    def __init__(self, curve, knots=4096):
        self.curve = curve
        self.n = curve.n
        self.knots = knots
        self._knot_phi = np.linspace(0.0, TWO_PI, knots + 1)
        pieces = self.arc_between(self._knot_phi[:-1], self._knot_phi[1:])
        self._knot_s = np.concatenate([[0.0], np.cumsum(pieces)])
        self.total_length = float(self._knot_s[-1])

    def __repr__(self):
        return f"Oval({self.curve!r})"

    def derivs(self, phi, order=4):
        return self.curve.derivs(phi, order)

    def g(self, phi):
        return self.curve.derivs(phi, 0)[0]

    def radius(self, phi):
        d = self.curve.derivs(phi, 2)
        return d[0] + d[2]

    def radius_derivs(self, phi):
        """``R, dR/dphi, d2R/dphi2``."""
        d = self.curve.derivs(phi)
        return d[0] + d[2], d[1] + d[3], d[2] + d[4]

    def point(self, phi):
        phi = np.asarray(phi, dtype=float)
        d = self.curve.derivs(phi, 1)
        c, s = np.cos(phi), np.sin(phi)
        return np.stack([d[0] * s + d[1] * c, -d[0] * c + d[1] * s], axis=-1)

    def embed(self, phi):
        """Return ``(point, tangent, inward normal, R)`` at ``phi``."""
        phi = np.asarray(phi, dtype=float)
        c, s = np.cos(phi), np.sin(phi)
        tangent = np.stack([c, s], axis=-1)
        normal = np.stack([-s, c], axis=-1)
        return self.point(phi), tangent, normal, self.radius(phi)

    # -- arclength ---------------------------------------------------------

    def arc_between(self, a, b):
        """``int_a^b R(phi) dphi`` by Gauss-Legendre (vectorized)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        nodes = mid[..., None] + half[..., None] * _GL_X
        return half * np.sum(self.radius(nodes) * _GL_W, axis=-1)

    def arclength(self, phi):
        """Arclength from ``phi = 0``; ``s(2 pi) = total_length``."""
        phi = np.asarray(phi, dtype=float)
        turns = np.floor(phi / TWO_PI)
        local = phi - turns * TWO_PI
        step = TWO_PI / self.knots
        j = np.clip((local / step).astype(int), 0, self.knots - 1)
        out = turns * self.total_length + self._knot_s[j] + self.arc_between(self._knot_phi[j], local)
        return out if out.ndim else float(out)

    def phi_of_s(self, s):
        """Inverse of :meth:`arclength`."""
        s = np.asarray(s, dtype=float)
        turns = np.floor(s / self.total_length)
        local = s - turns * self.total_length
        phi = np.interp(local, self._knot_s, self._knot_phi)
        for _ in range(8):
            err = self.arclength(phi) - local
            phi = phi - err / self.radius(phi)
            if np.all(np.abs(err) < 1e-15):
                break
        out = phi + turns * TWO_PI
        return out if out.ndim else float(out)


def arclength_derivatives(oval, phi):
    """``(R, dR/ds, d2R/ds2)`` from phi-derivatives via ``ds = R dphi``."""
    R, R1, R2 = oval.radius_derivs(phi)
    return R, R1 / R, R2 / R**2 - R1**2 / R**3
