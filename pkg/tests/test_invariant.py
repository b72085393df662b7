import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ovalbill import (
    InvalidAmplitude,
    Oval,
    SupportFunction,
    check_horizontal_invariance,
    constant_width_check,
    gutkin_alpha,
    gutkin_check,
    gutkin_oval,
    step_batch,
)

# regression data from the bracketing run on 10**4 subintervals
N4_ROOTS = [1.1502619915109316]


def test_gutkin_oval_coefficients():
    assert gutkin_oval(5, 0.0).is_circle
    sf = gutkin_oval(5, 0.3)
    assert sf.harmonics == ((5, 0.3 / (1 - 25), 0.0),)
    assert abs(sf.harmonics[0][1] + 0.0125) < 1e-16
    phi = np.linspace(0, 2 * math.pi, 101)
    d = sf.derivs(phi, 2)
    assert np.max(np.abs(d[0] + d[2] - (1 + 0.3 * np.cos(5 * phi)))) < 1e-14


def test_gutkin_oval_guards():
    with pytest.raises(InvalidAmplitude):
        gutkin_oval(5, 1.0)
    with pytest.warns(UserWarning):
        gutkin_oval(3, 0.2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        gutkin_oval(4, 0.2)


@pytest.mark.parametrize("n", range(2, 10))
def test_gutkin_roots(n):
    roots = gutkin_alpha(n)
    for r in roots:
        assert 0 < r <= math.pi / 2
        if r < math.pi / 2:
            assert abs(math.tan(n * r) - n * math.tan(r)) < 1e-10
    assert (math.pi / 2 in roots) == (n % 2 == 1)
    assert roots == sorted(roots)


def test_gutkin_roots_n4_frozen():
    assert np.allclose(gutkin_alpha(4), N4_ROOTS, rtol=0, atol=1e-14)


def test_circle_keeps_every_p():
    ov = Oval(SupportFunction.circle())
    for p0 in (-0.7, 0.0, 0.4, 0.9):
        assert check_horizontal_invariance(ov, p0, seeds=4, iters=200) < 1e-13
    with pytest.raises(ValueError):
        check_horizontal_invariance(ov, 1.0, 1, 1)


def test_gutkin_invariant_line_short_run():
    res = gutkin_check(5, 0.3, seeds=4, iters=1000)
    assert res.alpha0[0] < math.pi / 2
    assert all(d < 1e-6 for d in res.max_deviation)
    off = check_horizontal_invariance(Oval(gutkin_oval(5, 0.3)), res.p0[0] + 0.05, seeds=4, iters=1000)
    assert off > 1e-2


def test_constant_width_examples(circle, tri, quad):
    r = constant_width_check(tri)
    assert r.is_constant_width and abs(r.width - 2) < 1e-12
    assert r.p0_deviation < 1e-10 and r.period2_error < 1e-8
    r = constant_width_check(quad)
    assert not r.is_constant_width and math.isnan(r.p0_deviation)
    phi = np.linspace(0, 2 * math.pi, 50)
    assert np.allclose(quad.g(phi) + quad.g(phi + math.pi), 2 + 2 * 0.02 * np.cos(4 * phi), atol=1e-14)
    r = constant_width_check(circle)
    assert r.is_constant_width and r.p0_deviation < 1e-13


@settings(max_examples=10, deadline=None)
@given(
    n=st.sampled_from([3, 5, 7]),
    a1=st.floats(-1.0, 1.0),
    a3=st.floats(-1.0, 1.0),
    b1=st.floats(-1.0, 1.0),
)
def test_odd_harmonics_give_constant_width(n, a1, a3, b1):
    # keep sum |c_k| (k^2 - 1) below 0.9 so R stays positive
    scale = 0.9 / ((abs(a1) + abs(b1)) * (n * n - 1) + abs(a3) * (9 * n * n - 1) + 1e-9)
    scale = min(scale, 1.0)
    sf = SupportFunction(n, 1.0, ((n, a1 * scale, b1 * scale), (3 * n, a3 * scale, 0.0)))
    r = constant_width_check(Oval(sf), iters=50, seeds=4)
    assert r.is_constant_width and abs(r.width - 2) < 1e-12
    assert r.period2_error < 1e-8


def test_dynamics_is_scale_free(quad):
    c = 2.7
    big = SupportFunction(quad.n, c * quad.curve.a0, tuple((k, c * a, c * b) for k, a, b in quad.curve.harmonics))
    ov2 = Oval(big)
    phi = np.linspace(0, 2 * math.pi, 8, endpoint=False)
    p = np.full(8, 0.3)
    a, b = phi, p
    x, y = phi, p
    for _ in range(20):
        a, b = step_batch(quad, a, b)
        x, y = step_batch(ov2, x, y)
    # (phi, p) orbits coincide up to round-off
    assert np.max(np.abs(a - x)) < 1e-12 and np.max(np.abs(b - y)) < 1e-12
    d1 = check_horizontal_invariance(quad, 0.3, seeds=4, iters=200)
    d2 = check_horizontal_invariance(ov2, 0.3, seeds=4, iters=200)
    assert abs(d1 - d2) < 1e-12
