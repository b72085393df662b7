"""
Ovals from support functions
============================

An n-symmetric oval is described by its support function g, a Fourier
series in multiples of n.  This walkthrough builds one, checks that it is a
genuine oval and lists its critical points.
"""

import math

import numpy as np

from ovalbill import Oval, SupportFunction, critical_points, eval_support, validate

# g = 1 + 0.05 cos(3 phi): a slightly triangular oval
sf = SupportFunction.cosine(3, 0.05)
print("g and derivatives at phi = pi/3:", np.round(eval_support(sf, math.pi / 3), 12))

# g > 0 and R = g + g'' > 0 must hold everywhere
report = validate(sf)
print(f"valid: {report.passed}, min g = {report.min_g:.4f}, min R = {report.min_R:.4f}")

# too much amplitude makes the curvature radius change sign
print("a = 0.2 valid:", validate(SupportFunction.cosine(3, 0.2)).passed)

###############################################################################
# Critical points of g are where the symmetric periodic orbits live.
for cp in critical_points(sf):
    print(f"phi0 = {cp.phi0:.6f}  {cp.kind:8s}  g = {cp.g_value:.3f}  g'' = {cp.g_second:.3f}")

###############################################################################
# The boundary point, tangent and curvature radius at any angle.
oval = Oval(sf)
point, tangent, normal, R = oval.embed(math.pi / 3)
print("Gamma(pi/3) =", np.round(point, 6), " |Gamma| =", round(float(np.linalg.norm(point)), 6), " R =", R)
print("perimeter:", oval.total_length)
