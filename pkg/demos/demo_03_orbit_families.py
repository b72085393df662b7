"""
Symmetric orbit families and their stability
============================================

Each critical point of g carries a family of regular polygon orbits, one for
every m = 1..n-1.  Minima of g give elliptic families and maxima give
hyperbolic ones.  For elliptic families the twist coefficient decides
nonlinear stability; an independent fit from rotation numbers confirms it.
"""

import math

from ovalbill import Oval, SupportFunction, classify, find_families, rotation_number_oracle, twist_report

oval = Oval(SupportFunction.cosine(4, 0.02))

for fam in find_families(oval):
    print(f"\nphi0 = {fam.phi0:.6f}: {fam.kind} (g = {fam.g_value:.3f}, R = {fam.R_value:.3f})")
    for mem in fam.members:
        st = classify(oval, fam, mem.m)
        print(f"  m={mem.m} period={mem.period} L={mem.L:.6f} trace={st.trace:.6f}")

###############################################################################
# Twist coefficients of the elliptic family, and a check by rotation numbers.
phi0 = math.pi / 4
rep = twist_report(oval, phi0)
print("\nresonances (3, 4):", rep.resonance3, rep.resonance4)
for m, tau in rep.tau.items():
    print(f"  tau(m={m}) = {tau:.6f}")
print("zero of the twist at sin^2(alpha) =", rep.tau_zero_sin2)

fit = rotation_number_oracle(oval, phi0, 1, iters=4000)
print(f"rotation-number fit: zeta = {fit.zeta_fit:.6f} (linear {fit.zeta:.6f}), tau = {fit.tau_fit:.6f}")
