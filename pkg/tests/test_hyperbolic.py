import math

import numpy as np
import pytest

from ovalbill import (
    NotHyperbolic,
    Oval,
    SupportFunction,
    SupportTooWide,
    dt_symmetric_fixed_point,
    eigen_directions,
    find_crossings,
    grow_manifold,
    step_batch,
    tangency_break,
)
from ovalbill.dynamics import inverse_batch

from conftest import angle_diff

LAM_U = (5 + math.sqrt(21)) / 2
PERIOD = 2 * math.pi / 3


@pytest.fixture(scope="module")
def oval():
    return Oval(SupportFunction.cosine(3, 0.05))


@pytest.fixture(scope="module")
def segments(oval):
    return {
        (b, s): grow_manifold(oval, 0.0, 1, b, s, max_arc=4.0)
        for b in ("unstable", "stable")
        for s in (1, -1)
    }


@pytest.fixture(scope="module")
def crossings(segments):
    return find_crossings(segments["unstable", 1], segments["stable", 1])


def test_eigen_directions(oval):
    e = eigen_directions(oval, 0.0, 1)
    assert abs(e.lambda_u - LAM_U) < 1e-12 and abs(e.lambda_s - 1 / LAM_U) < 1e-12
    assert abs(e.lambda_u * e.lambda_s - 1) < 1e-12
    J = dt_symmetric_fixed_point(oval, 0.0, 1)
    assert np.allclose(J @ e.v_u, e.lambda_u * e.v_u, atol=1e-12)
    assert np.allclose(J @ e.v_s, e.lambda_s * e.v_s, atol=1e-12)
    with pytest.raises(NotHyperbolic):
        eigen_directions(oval, math.pi / 3, 1)


def test_linear_growth_rate(segments):
    seg = segments["unstable", 1]
    phi, p = seg.evaluate(np.arange(6.0))
    d = np.hypot(angle_diff(phi, 0.0), p - 0.5)
    assert np.all(np.abs(d[1:] / d[:-1] / LAM_U - 1) < 0.01)
    seg = segments["stable", -1]
    phi, p = seg.evaluate(np.arange(6.0))
    d = np.hypot(angle_diff(phi, 0.0), p - 0.5)
    assert np.all(np.abs(d[1:] / d[:-1] / LAM_U - 1) < 0.01)


def test_segment_starts_at_seed(segments):
    for seg in segments.values():
        assert abs(math.hypot(seg.phi[0] - seg.phi0, seg.p[0] - seg.p0) - seg.seed_distance) < 1e-12
        assert seg.arclength <= 4.0 + 0.02 and not seg.truncated


@pytest.mark.parametrize("branch", ["unstable", "stable"])
def test_manifold_invariance(oval, segments, branch):
    seg = segments[branch, 1]
    u = seg.u[seg.u < seg.u.max() - 1.0]
    phi, p = seg.evaluate(u)
    step = step_batch if branch == "unstable" else inverse_batch
    a, b = step(oval, phi, p)
    c, d = seg.evaluate(u + 1.0)
    dphi = np.remainder(a - c + PERIOD / 2, PERIOD) - PERIOD / 2
    assert np.max(np.hypot(dphi, b - d)) < 1e-6


def test_reversal_maps_unstable_to_stable(oval):
    # I(phi, p) = (phi, -p) conjugates T to its inverse, so it carries W^u of
    # the m = 1 point onto W^s of the m = n - 1 point
    wu = grow_manifold(oval, 0.0, 1, "unstable", 1, max_arc=0.5)
    ws = grow_manifold(oval, 0.0, 2, "stable", 1, max_arc=0.5)
    u = np.linspace(0.0, 4.0, 41)
    a, b = wu.evaluate(u)
    c, d = ws.evaluate(u)
    assert np.max(np.abs(np.remainder(a - c + PERIOD / 2, PERIOD) - PERIOD / 2)) < 1e-6
    assert np.max(np.abs(-b - d)) < 1e-6


def test_finds_transversal_crossing(crossings):
    assert crossings, "no crossing between W^u and W^s"
    assert any(c.kind == "transversal" for c in crossings)
    for c in crossings:
        assert c.kind == ("tangent" if c.slope_difference < c.tolerance else "transversal")
        assert 0 <= c.phi < PERIOD


def test_focusing_distances(oval, crossings):
    c = crossings[0]
    R = float(oval.radius(c.phi))
    sa = math.sqrt(1 - c.p**2)
    au, as_ = c.slopes
    assert abs(c.focusing[0] - R * sa / (1 + as_)) < 1e-12
    assert abs(c.focusing[1] - R * sa / (1 - au)) < 1e-12


def test_crossings_need_opposite_branches(segments):
    with pytest.raises(ValueError):
        find_crossings(segments["unstable", 1], segments["unstable", -1])


def _breakable(oval, crossings, eps, d1, d2):
    for c in crossings:
        try:
            return c, tangency_break(oval, c, eps, d1, d2, require_tangent=False)
        except SupportTooWide:
            continue
    pytest.skip("no crossing with room for the bump")


def _match(oval_b, c, max_arc=4.0):
    su = grow_manifold(oval_b, 0.0, 1, "unstable", 1, max_arc=max_arc)
    ss = grow_manifold(oval_b, 0.0, 1, "stable", 1, max_arc=max_arc)
    found = find_crossings(su, ss)
    return min(found, key=lambda x: abs(x.phi - c.phi) + abs(x.p - c.p))


def test_power2_bump_moves_slopes_as_predicted(oval, crossings):
    eps = 1e-4
    c, curve = _breakable(oval, crossings, eps, 0.005, 0.01)
    new = _match(Oval(curve), c)
    # the impact point itself does not move
    assert abs(new.phi - c.phi) < 1e-10 and abs(new.p - c.p) < 1e-10
    R = float(oval.radius(c.phi))
    au, as_ = c.slopes
    du = new.slopes[0] - au
    ds = new.slopes[1] - as_
    pu = -2 * eps * (1 - au) / R
    ps = 2 * eps * (1 + as_) / R
    assert abs(du - pu) < 0.2 * abs(pu)
    assert abs(ds - ps) < 0.2 * abs(ps)
    # change of the split; at a tangency (au = as_) this is 4 eps / R
    split = (new.slopes[1] - new.slopes[0]) - (as_ - au)
    predicted = 2 * eps * ((1 + as_) + (1 - au)) / R
    assert abs(split - predicted) < 0.2 * abs(predicted)
    # the bump misses the fixed points
    e0, e1 = eigen_directions(oval, 0.0, 1), eigen_directions(Oval(curve), 0.0, 1)
    assert abs(e0.lambda_u - e1.lambda_u) < 1e-10 and np.allclose(e0.v_u, e1.v_u, atol=1e-10)


def test_zero_bump_keeps_slopes(oval, crossings):
    c, curve = _breakable(oval, crossings, 0.0, 0.005, 0.01)
    new = _match(Oval(curve), c)
    assert np.allclose(new.slopes, c.slopes, atol=1e-9)


def test_tangency_break_guards(oval, crossings):
    c = next(x for x in crossings if x.kind == "transversal")
    with pytest.raises(ValueError):
        tangency_break(oval, c, 1e-4, 0.005, 0.01)
    with pytest.raises(SupportTooWide):
        tangency_break(oval, c, 1e-4, 0.5, 1.0, require_tangent=False)
