"""
The billiard map and its phase portrait
=======================================

The state after each bounce is (phi, p): the tangent angle at the impact
and the tangential momentum p = cos(alpha).  Iterating a grid of seeds gives
the phase portrait; the CSV it produces is ready for any plotting tool.
"""

import math

import numpy as np

from ovalbill import Oval, SupportFunction, billiard_step, iterate
from ovalbill.cli import portrait

oval = Oval(SupportFunction.cosine(3, 0.05))

# one bounce of the period-3 orbit through the minimum of g
x1, chord = billiard_step(oval, (math.pi / 3, 0.5))
print(f"T(pi/3, 0.5) = ({x1.phi:.12f}, {x1.p:.12f}), chord {chord:.6f}")

# the orbit closes after three bounces
orbit = iterate(oval, (math.pi / 3, 0.5), 3)
print("back to start:", np.allclose(orbit[3], orbit[0], atol=1e-9))

###############################################################################
# A small portrait: 6 x 5 seeds, 400 bounces each.
phi0, p0 = np.meshgrid(np.linspace(0, 2 * math.pi / 3, 6, endpoint=False), np.linspace(-0.9, 0.9, 5))
phi, p, status, steps = portrait(oval.curve, phi0.ravel(), p0.ravel(), 400)
spread = np.nanmax(p, axis=1) - np.nanmin(p, axis=1)
# this oval has constant width, so the p = 0 seeds never move off p = 0
for i in np.argsort(spread)[:3]:
    print(f"seed {i:2d} (phi0={phi0.ravel()[i]:.3f}, p0={p0.ravel()[i]:+.2f}): p spread {spread[i]:.4f}")
print("widest p excursions:")
for i in np.argsort(spread)[-3:]:
    print(f"seed {i:2d} (phi0={phi0.ravel()[i]:.3f}, p0={p0.ravel()[i]:+.2f}): p spread {spread[i]:.4f}")

# The same data from the command line:
#   ovalbill portrait --config demos/curves/tri_005.txt --grid 12x10 --iters 2000 --out portrait.csv
