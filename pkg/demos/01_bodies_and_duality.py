"""
Convex bodies, gauges, support functions and polarity
=====================================================

A quick tour of the body zoo: every body exposes a gauge (Minkowski
functional), a support function, a polar, and a volume with several
independent evaluation routes.
"""

import numpy as np

from convexgeom.bodies import Ball, Cube, Ellipsoid, Polytope, polar, volume

# A body is queried through its gauge ||x||_K and support h_K(u).
K = Ellipsoid(np.array([[1.5, 0.3], [0.0, 0.7]]))
x = np.array([[0.4, 0.1], [0.0, 0.5]])
print("gauge  :", K.gauge(x))
print("support:", K.support(x / np.linalg.norm(x, axis=1, keepdims=True)))

# Polarity swaps gauge and support: h_{K^o} = ||.||_K.
Ko = polar(K)
u = np.array([[1.0, 0.0]])
print("h_{K^o}(e1) =", Ko.support(u)[0], " gauge_K(e1) =", K.gauge(u)[0])

# Volumes come with error bars.  Closed forms are exact; Monte-Carlo
# and triangulation are independent cross-checks.
P = Polytope(np.array([[1.0, 0], [0, 1], [-1, 0.2], [-0.4, -1], [0.7, -0.6]]))
exact = volume(P, method="triangulation")
mc = volume(P, method="monte-carlo", budget=1 << 16, seed=1)
print(f"triangulation: {exact.value:.6f}")
print(f"monte-carlo  : {mc.value:.6f} +- {mc.stderr:.1e}")

# Cube and ball close the loop against their formulas.
print("vol cube  :", volume(Cube(1.0, 3)).value, "(= 8)")
print("vol ball  :", volume(Ball(1.0, 3)).value, "(= 4 pi / 3)")
