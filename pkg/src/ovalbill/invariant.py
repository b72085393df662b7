"""Horizontal invariant curves ``p = const``.

Ovals with curvature radius ``R = 1 + a1 cos(n phi)`` carry an invariant
line ``p = cos(alpha0)`` whenever ``tan(n alpha0) = n tan(alpha0)``; odd
constant-width ovals carry ``p = 0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dynamics import step_batch
from .errors import InvalidAmplitude
from .geometry import TWO_PI, Oval, SupportFunction, validate, wrap_centered


def gutkin_oval(n, a1):
    """Support function with ``g + g'' = 1 + a1 cos(n phi)``."""
    if not abs(a1) < 1.0:
        raise InvalidAmplitude(f"|a1| must be < 1, got {a1}")
    if n < 4:
        warnings.warn(f"n={n}: the invariant-curve characterization is stated for n >= 4", stacklevel=2)
    sf = SupportFunction(n, 1.0, ((n, a1 / (1.0 - n * n), 0.0),))
    report = validate(sf)
    if not report.passed:
        raise InvalidAmplitude(f"a1={a1} does not give an oval: {report}")
    return sf


def _gutkin_residual(alpha, n):
    # tan(n a) = n tan(a) multiplied through by cos(n a) cos(a): no poles
    return np.sin(n * alpha) * np.cos(alpha) - n * np.cos(n * alpha) * np.sin(alpha)


def gutkin_alpha(n, subintervals=10_000):
    """Angles in ``(0, pi/2]`` solving ``tan(n alpha) = n tan(alpha)``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    half = 0.5 * math.pi
    x = np.linspace(0.0, half, subintervals + 1)[1:]
    h = _gutkin_residual(x, n)
    roots = []
    for i in range(len(x) - 1):
        if h[i] == 0.0:
            roots.append(float(x[i]))
        elif h[i] * h[i + 1] < 0.0:
            roots.append(brentq(_gutkin_residual, x[i], x[i + 1], args=(n,), xtol=1e-15, rtol=4 * np.finfo(float).eps))
    # for odd n, pi/2 is an exact root (both sides are infinite there)
    roots = [r for r in roots if half - r > 1e-9]
    if n % 2:
        roots.append(half)
    return roots


@dataclass
class GutkinResult:
    n: int
    a1: float
    alpha0: list
    p0: list
    max_deviation: list


def check_horizontal_invariance(oval, p0, seeds=10, iters=10_000):
    """``sup |p_k - p0|`` over ``iters`` bounces from ``seeds`` equispaced starts."""
    if not abs(p0) < 1.0 - 1e-9:
        raise ValueError("|p0| must be < 1 - 1e-9")
    phi = TWO_PI * np.arange(seeds) / seeds
    p = np.full(seeds, float(p0))
    worst = 0.0
    for _ in range(iters):
        phi, p = step_batch(oval, phi, p)
        phi = np.mod(phi, TWO_PI)
        worst = max(worst, float(np.max(np.abs(p - p0))))
    return worst


def gutkin_check(n, a1, seeds=10, iters=10_000):
    oval = Oval(gutkin_oval(n, a1))
    alphas = gutkin_alpha(n)
    p0 = [math.cos(a) for a in alphas]
    dev = [check_horizontal_invariance(oval, p, seeds, iters) for p in p0]
    return GutkinResult(n, a1, alphas, p0, dev)


@dataclass
class ConstantWidthResult:
    is_constant_width: bool
    width: float
    p0_deviation: float
    period2_error: float


def constant_width_check(oval, samples=1024, seeds=10, iters=1000, tol=1e-10):
    """Width ``g(phi) + g(phi + pi)``; when constant, also check that
    ``p = 0`` is invariant and that ``T(phi, 0) = (phi + pi, 0)``."""
    phi = TWO_PI * np.arange(samples) / samples
    w = oval.g(phi) + oval.g(phi + math.pi)
    is_cw = bool(np.ptp(w) < tol)
    width = float(np.mean(w))
    dev = float("nan")
    err2 = float("nan")
    if is_cw:
        dev = check_horizontal_invariance(oval, 0.0, seeds, iters)
        sample = TWO_PI * np.arange(100) / 100
        phi1, p1 = step_batch(oval, sample, np.zeros_like(sample))
        err2 = float(max(np.max(np.abs(wrap_centered(phi1 - sample - math.pi))), np.max(np.abs(p1))))
    return ConstantWidthResult(is_cw, width, dev, err2)
