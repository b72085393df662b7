"""
Invariant manifolds of a hyperbolic orbit
=========================================

The period-3 orbit through the maximum of g is hyperbolic.  Its unstable and
stable manifolds are grown from the eigendirections; where they cross we get
homoclinic points.  A small bump in g changes the manifold slopes at a
crossing by a predictable amount.
"""

from ovalbill import Oval, SupportFunction, eigen_directions, find_crossings, grow_manifold, tangency_break
from ovalbill.errors import SupportTooWide

oval = Oval(SupportFunction.cosine(3, 0.05))
eig = eigen_directions(oval, 0.0, 1)
print(f"lambda_u = {eig.lambda_u:.6f}, lambda_s = {eig.lambda_s:.6f}")

wu = grow_manifold(oval, 0.0, 1, "unstable", 1, max_arc=4.0)
ws = grow_manifold(oval, 0.0, 1, "stable", 1, max_arc=4.0)
print(f"W^u: {len(wu.u)} points, W^s: {len(ws.u)} points")

crossings = find_crossings(wu, ws)
print(f"{len(crossings)} crossings; first few:")
for c in crossings[:4]:
    print(f"  phi={c.phi:.6f} p={c.p:.6f} {c.kind} slopes=({c.slopes[0]:.4f}, {c.slopes[1]:.4f})")

###############################################################################
# Bump the curvature radius at a crossing and watch the slopes move.
eps = 1e-4
for c in crossings:
    try:
        bumped = Oval(tangency_break(oval, c, eps, 0.005, 0.01, require_tangent=False))
        break
    except SupportTooWide:
        continue
R = float(oval.radius(c.phi))
wu2 = grow_manifold(bumped, 0.0, 1, "unstable", 1, max_arc=4.0)
ws2 = grow_manifold(bumped, 0.0, 1, "stable", 1, max_arc=4.0)
new = min(find_crossings(wu2, ws2), key=lambda x: abs(x.phi - c.phi) + abs(x.p - c.p))
au, as_ = c.slopes
print(f"unstable slope change {new.slopes[0] - au:+.4e}, predicted {-2 * eps * (1 - au) / R:+.4e}")
print(f"stable slope change   {new.slopes[1] - as_:+.4e}, predicted {2 * eps * (1 + as_) / R:+.4e}")
