import math

import numpy as np
import pytest
from scipy.optimize import brentq

from ovalbill import (
    DegenerateCircle,
    NotCritical,
    NotElliptic,
    Oval,
    Resonant,
    SupportFunction,
    classify,
    find_families,
    perturb_bump,
    perturb_constant,
    resonance_check,
    rotation_number_oracle,
    tau_zero_m,
    tau_zero_sin2,
    twist_coefficient,
    twist_report,
)
from ovalbill.geometry import arclength_derivatives
from ovalbill.orbits import jordan_frame, polygon_vertices, side_length, twist_from_parts

from conftest import angle_diff

TAU_TRI = -0.6369999781237583


def test_polygon_vertices(tri):
    ov12 = Oval(SupportFunction.cosine(12, 0.001))
    v = polygon_vertices(ov12, 0.0, 4)
    assert np.allclose(v, [0, 2 * math.pi / 3, 4 * math.pi / 3])
    assert np.allclose(polygon_vertices(tri, math.pi / 3, 1), [math.pi / 3, math.pi, 5 * math.pi / 3])
    assert np.allclose(polygon_vertices(Oval(SupportFunction.cosine(4, 0.02)), 0.0, 2), [0, math.pi])


def test_side_length(tri, circle):
    L, dL = side_length(tri, math.pi / 3, 1)
    assert abs(L - 0.95 * math.sqrt(3)) < 1e-12 and abs(dL) < 1e-12
    L, dL = side_length(Oval(SupportFunction.circle(5)), 0.8, 2)
    assert abs(L - 2 * math.sin(2 * math.pi / 5)) < 1e-12 and abs(dL) < 1e-12
    # off a critical point: L^2 = 4 (g^2 + g'^2) sin^2(alpha)
    L, dL = side_length(tri, math.pi / 6, 1)
    assert abs(L - 2 * math.sin(math.pi / 3) * math.hypot(1.0, 0.15)) < 1e-12
    assert abs(L - 1.7514279888) < 1e-9
    h = 1e-6
    fd = (side_length(tri, math.pi / 6 + h, 1)[0] - side_length(tri, math.pi / 6 - h, 1)[0]) / (2 * h)
    assert abs(fd - dL) < 1e-7


def test_families_triangle(tri):
    fams = find_families(tri)
    assert [(round(f.phi0, 12), f.kind, f.critical_kind) for f in fams] == [
        (0.0, "hyperbolic", "maximum"),
        (round(math.pi / 3, 12), "elliptic", "minimum"),
    ]
    for f in fams:
        for mem in f.members:
            assert mem.closure_error < 1e-8
            assert abs(mem.L - 2 * f.g_value * math.sin(mem.alpha)) < 1e-10
            assert abs(mem.L - side_length(tri, f.phi0, mem.m)[0]) < 1e-10
    # maximum of g carries the longer polygons
    assert fams[0].member(1).L > fams[1].member(1).L


def test_families_square(quad):
    fams = find_families(quad)
    assert [f.kind for f in fams] == ["hyperbolic", "elliptic"]
    assert abs(fams[1].phi0 - math.pi / 4) < 1e-13
    assert [m.period for m in fams[1].members] == [4, 2, 4]
    assert [m.count for m in fams[1].members] == [2, 4, 2]
    assert [m.reverse_m for m in fams[1].members] == [3, 2, 1]


def test_families_circle(circle):
    with pytest.raises(DegenerateCircle):
        find_families(circle)


def test_classify(tri):
    hyp, ell = find_families(tri)
    r = classify(tri, ell, 1)
    assert r.kind == "elliptic" and abs(r.trace - 0.714286) < 1e-6 and abs(r.det - 1) < 1e-12
    assert abs(r.zeta - math.acos(0.357142857142857)) < 1e-12
    assert abs(r.zeta - 1.2055891055) < 1e-9
    assert r.numeric_mismatch < 1e-4
    r = classify(tri, hyp, 1)
    assert r.kind == "hyperbolic" and abs(r.trace - 5) < 1e-12
    lam = sorted(e.real for e in r.eigenvalues)
    assert np.allclose(lam, [(5 - math.sqrt(21)) / 2, (5 + math.sqrt(21)) / 2], atol=1e-12)
    assert r.zeta is None
    for fam in (hyp, ell):
        assert len({classify(tri, fam, m).kind for m in (1, 2)}) == 1


def test_parabolic_boundary():
    # g = g + g'' at the critical point: g'' = 0 there needs a second harmonic
    sf = SupportFunction(3, 1.0, ((3, 0.02, 0.0), (6, 0.005, 0.0)))
    # g''(pi/3) = 9 * 0.02 - 36 * 0.005 = 0
    ov = Oval(sf)
    fams = find_families(ov, verify=False)
    fam = [f for f in fams if abs(f.phi0 - math.pi / 3) < 1e-9][0]
    assert fam.kind == "parabolic"
    assert classify(ov, fam, 1, numeric_check=False).kind == "parabolic"
    assert abs(classify(ov, fam, 1, numeric_check=False).trace - 2) < 1e-12


def test_resonance_check():
    assert resonance_check(SupportFunction.cosine(3, 0.1), math.pi / 3) == (False, True)
    assert resonance_check(SupportFunction.cosine(3, 0.25), math.pi / 3) == (True, False)
    assert resonance_check(SupportFunction.cosine(3, 0.05), math.pi / 3) == (False, False)


def test_constant_shift_breaks_resonance():
    sf = SupportFunction.cosine(3, 0.1)
    out = perturb_constant(sf, 0.01)
    assert resonance_check(out, math.pi / 3) == (False, False)
    d0, d1 = sf.derivs(math.pi / 3), out.derivs(math.pi / 3)
    assert abs((d1[0] - d1[2]) - (d0[0] - d0[2]) - 0.01) < 1e-15
    assert abs((3 * d1[0] - d1[2]) - (3 * d0[0] - d0[2]) - 0.03) < 1e-15
    # trace follows g and R together
    ov = Oval(out)
    fam = find_families(ov)[1]
    r = classify(ov, fam, 1)
    assert abs(r.trace - (4 * 0.91 / (0.91 + 0.9) - 2)) < 1e-12


def test_twist_triangle(tri):
    assert abs(twist_coefficient(tri, math.pi / 3, 1) - TAU_TRI) < 1e-12
    R, dR, d2R = arclength_derivatives(tri, math.pi / 3)
    assert abs(dR) < 1e-14 and abs(d2R - (-1.836735)) < 1e-6
    # m and n - m agree
    assert abs(twist_coefficient(tri, math.pi / 3, 2) - TAU_TRI) < 1e-9


def test_twist_two_term_reduction():
    R, L, a = 1.3, 1.1, 0.9
    sa, ca = math.sin(a), math.cos(a)
    expect = -1 / (8 * R * sa**3) + 3 * ca**2 / (8 * sa**2 * (2 * L - R * sa))
    assert abs(twist_from_parts(R, L, a, 0.0, 0.0) - expect) < 1e-15


def test_twist_symmetric_in_m(quad):
    for m in (1, 2, 3):
        assert abs(twist_coefficient(quad, math.pi / 4, m) - twist_coefficient(quad, math.pi / 4, 4 - m)) < 1e-9


def test_twist_errors(tri):
    with pytest.raises(NotElliptic):
        twist_coefficient(tri, 0.0, 1)
    with pytest.raises(NotCritical):
        twist_coefficient(tri, 0.4, 1)
    ov = Oval(SupportFunction.cosine(3, 0.1))
    with pytest.raises(Resonant, match=r"resonant: g\(phi0\)=g''\(phi0\)"):
        twist_coefficient(ov, math.pi / 3, 1)
    rep = twist_report(ov, math.pi / 3)
    assert rep.resonance4 and rep.tau == {}


def test_tau_zero_triangle(tri):
    assert abs(tau_zero_sin2(tri, math.pi / 3) - 0.104477) < 1e-6
    assert tau_zero_m(tri, math.pi / 3) is None


def test_tau_zero_inverse_design():
    """Tune the second harmonic so the zero of the twist lands on m = 1."""

    def oval(b):
        return Oval(SupportFunction(4, 1.0, ((4, 0.02, 0.0), (8, b, 0.0))))

    b = brentq(lambda b: tau_zero_sin2(oval(b), math.pi / 4) - 0.5, 0.0012, 0.00125, xtol=1e-16)
    ov = oval(b)
    assert tau_zero_m(ov, math.pi / 4) == 1
    assert abs(twist_coefficient(ov, math.pi / 4, 1)) < 1e-10
    assert abs(twist_coefficient(ov, math.pi / 4, 2)) > 1e-2


def test_bump_tau_shift(tri):
    eps = 1e-3
    phi0 = math.pi / 3
    bumped = Oval(perturb_bump(tri.curve, phi0, eps))
    R0 = float(tri.radius(phi0))
    for m in (1, 2):
        alpha = m * math.pi / 3
        sa = math.sin(alpha)
        L = 2 * 0.95 * sa
        d2 = 24 * eps / R0**2
        predicted = -L * d2 / (8 * sa * (L - 2 * R0 * sa))
        shift = twist_coefficient(bumped, phi0, m) - twist_coefficient(tri, phi0, m)
        assert abs(shift - predicted) < 1e-6 * abs(predicted)


def test_jordan_frame():
    M = np.array([[0.3, -1.7], [0.4, 1.0]])
    M = M / math.sqrt(np.linalg.det(M))
    P, zeta = jordan_frame(M)
    assert abs(np.linalg.det(P) - 1) < 1e-12
    rot = np.linalg.inv(P) @ M @ P
    assert np.allclose(rot, [[math.cos(zeta), -math.sin(zeta)], [math.sin(zeta), math.cos(zeta)]], atol=1e-12)


def test_oracle_zeta_and_short_run(tri):
    fit = rotation_number_oracle(tri, math.pi / 3, 1, radii=(1e-4, 1e-3), iters=2000, angles=4)
    assert abs(fit.zeta - math.acos(0.5 * (4 * 0.95 / 1.4 - 2))) < 1e-12
    assert abs(fit.zeta_fit - fit.zeta) < 1e-4
    assert abs(fit.tau_fit - TAU_TRI) / abs(TAU_TRI) < 0.05
