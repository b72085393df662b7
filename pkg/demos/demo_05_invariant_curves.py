"""
Horizontal invariant curves
===========================

When the curvature radius is R = 1 + a1 cos(n phi), the line p = cos(alpha0)
is invariant for every root of tan(n alpha0) = n tan(alpha0).  Odd
constant-width ovals keep p = 0 instead.
"""

import math

from ovalbill import (
    Oval,
    SupportFunction,
    check_horizontal_invariance,
    constant_width_check,
    gutkin_alpha,
    gutkin_oval,
)

oval = Oval(gutkin_oval(5, 0.3))
for alpha0 in gutkin_alpha(5):
    p0 = math.cos(alpha0)
    dev = check_horizontal_invariance(oval, p0, seeds=5, iters=2000)
    print(f"alpha0 = {alpha0:.10f}  p0 = {p0:+.6f}  max |p - p0| = {dev:.2e}")

# a nearby line is not invariant
p0 = math.cos(gutkin_alpha(5)[0]) + 0.05
print(f"control p0 = {p0:.6f}: max |p - p0| = {check_horizontal_invariance(oval, p0, seeds=5, iters=2000):.2e}")

###############################################################################
# Constant width: odd harmonics cancel in g(phi) + g(phi + pi).
for sf in (SupportFunction.cosine(3, 0.05), SupportFunction.cosine(4, 0.02)):
    r = constant_width_check(Oval(sf))
    print(f"n={sf.n}: constant width {r.is_constant_width}, width {r.width:.6f}, p=0 deviation {r.p0_deviation:.1e}")
