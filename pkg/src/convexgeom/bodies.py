"""Convex bodies as oracle bundles.

A body is represented by its support function and gauge, not by a
mesh: all integrals downstream consume these oracles.  Closed-form
kinds (balls, ellipsoids, cubes, polytopes, l_q balls) evaluate
exactly; bodies produced numerically store support values on a sphere
rule and interpolate.

Oracles are vectorized: ``support`` and ``gauge`` accept ``(m, n)``
arrays and return ``(m,)`` arrays.
"""

from __future__ import annotations

import math

import numpy as np

from . import rng as rngmod
from .estimate import CLOSED_FORM, Estimate, from_samples, quad_estimate
from .sphere import SphereRule, sphere_rule

__all__ = [
    "ConvexBody",
    "Ball",
    "Ellipsoid",
    "Cube",
    "Simplex",
    "LqBall",
    "Polytope",
    "LinearImage",
    "Translate",
    "Polar",
    "NumericSupport",
    "SupportOracle",
    "standard_simplex",
    "polar",
    "linear_image",
    "support",
    "gauge",
    "volume",
    "sample_uniform",
]


def _rows(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[None, :]
    return x


class ConvexBody:
    """Base class: a convex body with the origin interior.

    Attributes
    ----------
    dim : int
        Ambient dimension n >= 2.
    bounding_radius : float
        R such that the body is contained in R times the unit ball.
    """

    dim: int
    bounding_radius: float

    def support(self, xi) -> np.ndarray:
        """h(xi) = max over body points z of <xi, z>; 1-homogeneous."""
        raise NotImplementedError

    def gauge(self, x) -> np.ndarray:
        """Minkowski gauge inf{t > 0 : x in t * body}."""
        raise NotImplementedError

    def contains(self, x) -> np.ndarray:
        return self.gauge(x) <= 1.0

    def volume_exact(self) -> float | None:
        """Closed-form volume when available, else None."""
        return None

    # smooth-kind hooks, used by radial function oracles
    def gauge_grad(self, x) -> np.ndarray | None:
        return None

    def gauge_hess(self, x) -> np.ndarray | None:
        return None

    def polar(self) -> "ConvexBody":
        return Polar(self)

    def translate(self, v) -> "ConvexBody":
        return Translate(np.asarray(v, dtype=float), self)

    def linear_image(self, A) -> "ConvexBody":
        return linear_image(self, A)


class Ball(ConvexBody):
    def __init__(self, radius: float = 1.0, dim: int = 2):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.dim = int(dim)
        self.bounding_radius = self.radius

    def support(self, xi):
        return self.radius * np.linalg.norm(_rows(xi), axis=1)

    def gauge(self, x):
        return np.linalg.norm(_rows(x), axis=1) / self.radius

    def gauge_grad(self, x):
        x = _rows(x)
        r = np.linalg.norm(x, axis=1, keepdims=True)
        r = np.where(r == 0, 1.0, r)
        return x / (r * self.radius)

    def gauge_hess(self, x):
        x = _rows(x)
        m, n = x.shape
        r = np.linalg.norm(x, axis=1)
        r = np.where(r == 0, 1.0, r)
        eye = np.eye(n)[None, :, :]
        xx = x[:, :, None] * x[:, None, :]
        return (eye - xx / (r**2)[:, None, None]) / (self.radius * r[:, None, None])

    def volume_exact(self):
        from .constants import omega_n

        return omega_n(self.dim) * self.radius**self.dim

    def polar(self):
        return Ball(1.0 / self.radius, self.dim)

    def __repr__(self):
        return f"Ball({self.radius:g}, n={self.dim})"


class Ellipsoid(ConvexBody):
    """Image A . B of the unit ball under an invertible linear map."""

    def __init__(self, A):
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        if abs(np.linalg.det(A)) < 1e-14:
            raise ValueError("A must be invertible")
        self.A = A
        self.Ainv = np.linalg.inv(A)
        self.dim = A.shape[0]
        self.bounding_radius = float(np.linalg.norm(A, 2))
        # gauge(x) = |A^-1 x| = sqrt(x^T M x)
        self.M = self.Ainv.T @ self.Ainv

    def support(self, xi):
        return np.linalg.norm(_rows(xi) @ self.A, axis=1)

    def gauge(self, x):
        return np.linalg.norm(_rows(x) @ self.Ainv.T, axis=1)

    def gauge_grad(self, x):
        x = _rows(x)
        Mx = x @ self.M
        g = np.sqrt(np.sum(x * Mx, axis=1, keepdims=True))
        g = np.where(g == 0, 1.0, g)
        return Mx / g

    def gauge_hess(self, x):
        x = _rows(x)
        Mx = x @ self.M
        g = np.sqrt(np.sum(x * Mx, axis=1))
        g = np.where(g == 0, 1.0, g)
        outer = Mx[:, :, None] * Mx[:, None, :]
        return self.M[None, :, :] / g[:, None, None] - outer / (g**3)[:, None, None]

    def volume_exact(self):
        from .constants import omega_n

        return omega_n(self.dim) * abs(np.linalg.det(self.A))

    def polar(self):
        return Ellipsoid(self.Ainv.T)

    def __repr__(self):
        return f"Ellipsoid(det={np.linalg.det(self.A):g}, n={self.dim})"


class Cube(ConvexBody):
    def __init__(self, half_side: float = 1.0, dim: int = 2):
        if half_side <= 0:
            raise ValueError("half_side must be positive")
        self.half_side = float(half_side)
        self.dim = int(dim)
        self.bounding_radius = half_side * np.sqrt(dim)

    def support(self, xi):
        return self.half_side * np.sum(np.abs(_rows(xi)), axis=1)

    def gauge(self, x):
        return np.max(np.abs(_rows(x)), axis=1) / self.half_side

    def volume_exact(self):
        return (2 * self.half_side) ** self.dim

    def facets(self):
        """Outer unit normals and facet areas, for surface measures."""
        n, a = self.dim, self.half_side
        normals = np.vstack([np.eye(n), -np.eye(n)])
        areas = np.full(2 * n, (2 * a) ** (n - 1))
        return normals, areas

    def polar(self):
        verts = np.vstack([np.eye(self.dim), -np.eye(self.dim)]) / self.half_side
        return Polytope(verts)

    def __repr__(self):
        return f"Cube({self.half_side:g}, n={self.dim})"


class LqBall(ConvexBody):
    """Unit ball of the l_q norm, q in (1, inf)."""

    def __init__(self, q: float, dim: int = 2):
        if q <= 1:
            raise ValueError("q must exceed 1 (use Cube / cross-polytope for limits)")
        self.q = float(q)
        self.dim = int(dim)
        self.bounding_radius = 1.0

    def gauge(self, x):
        return np.sum(np.abs(_rows(x)) ** self.q, axis=1) ** (1.0 / self.q)

    def support(self, xi):
        qd = self.q / (self.q - 1.0)
        return np.sum(np.abs(_rows(xi)) ** qd, axis=1) ** (1.0 / qd)

    def gauge_grad(self, x):
        x = _rows(x)
        g = self.gauge(x)
        g = np.where(g == 0, 1.0, g)
        return (
            np.sign(x)
            * np.abs(x) ** (self.q - 1)
            / (g ** (self.q - 1))[:, None]
        )

    def volume_exact(self):
        from scipy.special import gamma

        q, n = self.q, self.dim
        return (2 * gamma(1 / q + 1)) ** n / gamma(n / q + 1)

    def __repr__(self):
        return f"LqBall(q={self.q:g}, n={self.dim})"


class Polytope(ConvexBody):
    """Convex hull of a vertex list, with the origin interior.

    Stores both the vertices and the facet inequalities <u_j, x> <= h_j
    (via scipy's convex hull), so support and gauge are exact maxima.
    """

    def __init__(self, vertices):
        from scipy.spatial import ConvexHull

        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2:
            raise ValueError("vertices must be a (k, n) array")
        self.dim = V.shape[1]
        hull = ConvexHull(V)
        self.vertices = V[hull.vertices]
        # equations rows are (normal, offset) with normal . x + offset <= 0
        eq = hull.equations
        self._normals = eq[:, :-1]
        self._offsets = -eq[:, -1]
        self._hull_volume = hull.volume
        self._facet_areas = self._areas(hull)
        self.bounding_radius = float(np.max(np.linalg.norm(self.vertices, axis=1)))

    def _areas(self, hull):
        if self.dim == 2:
            # facet k is the edge between consecutive hull vertices
            areas = []
            for sim in hull.simplices:
                a, b = hull.points[sim[0]], hull.points[sim[1]]
                areas.append(np.linalg.norm(a - b))
            return np.array(areas)
        areas = []
        for sim in hull.simplices:
            pts = hull.points[sim]
            e1, e2 = pts[1] - pts[0], pts[2] - pts[0]
            areas.append(0.5 * np.linalg.norm(np.cross(e1, e2)))
        return np.array(areas)

    def support(self, xi):
        return np.max(_rows(xi) @ self.vertices.T, axis=1)

    def gauge(self, x):
        if np.any(self._offsets <= 0):
            raise ValueError("gauge needs the origin interior to the polytope")
        return np.max(_rows(x) @ (self._normals / self._offsets[:, None]).T, axis=1)

    def contains(self, x):
        return np.all(_rows(x) @ self._normals.T <= self._offsets[None, :] + 1e-12, axis=1)

    def facets(self):
        """(unit normals, areas); simplicial facets are not merged."""
        return self._normals, self._facet_areas

    def volume_exact(self):
        return float(self._hull_volume)

    def polar(self):
        if np.any(self._offsets <= 0):
            raise ValueError("polar needs the origin interior to the polytope")
        return Polytope(self._normals / self._offsets[:, None])

    def __repr__(self):
        return f"Polytope({len(self.vertices)} vertices, n={self.dim})"


class Simplex(Polytope):
    def __init__(self, vertices):
        super().__init__(vertices)


def standard_simplex(dim: int, centered: bool = False) -> Simplex:
    """Simplex conv(0, e_1, ..., e_n); optionally recentered at its centroid
    so the origin is interior (needed by gauge-based operations)."""
    V = np.vstack([np.zeros(dim), np.eye(dim)])
    if centered:
        V = V - V.mean(axis=0)
    return Simplex(V)


class LinearImage(ConvexBody):
    def __init__(self, A, base: ConvexBody):
        A = np.asarray(A, dtype=float)
        if abs(np.linalg.det(A)) < 1e-14:
            raise ValueError("A must be invertible")
        self.A = A
        self.Ainv = np.linalg.inv(A)
        self.base = base
        self.dim = base.dim
        self.bounding_radius = float(np.linalg.norm(A, 2)) * base.bounding_radius

    def support(self, xi):
        return self.base.support(_rows(xi) @ self.A)

    def gauge(self, x):
        return self.base.gauge(_rows(x) @ self.Ainv.T)

    def volume_exact(self):
        v = self.base.volume_exact()
        if v is None:
            return None
        return abs(np.linalg.det(self.A)) * v

    def __repr__(self):
        return f"LinearImage({self.base!r})"


class Translate(ConvexBody):
    def __init__(self, v, base: ConvexBody):
        self.v = np.asarray(v, dtype=float)
        self.base = base
        self.dim = base.dim
        if base.gauge(-self.v)[0] >= 1.0:
            raise ValueError("translate pushes the origin out of the body")
        self.bounding_radius = base.bounding_radius + float(np.linalg.norm(v))

    def support(self, xi):
        xi = _rows(xi)
        return self.base.support(xi) + xi @ self.v

    def gauge(self, x):
        # solve gauge_base(x - t v) = t for each row; the function
        # t -> gauge_base(x - t v) - t is convex and eventually negative,
        # so bisection on [0, hi] is safe.
        x = _rows(x)
        m = x.shape[0]
        lo = np.zeros(m)
        hi = np.full(m, 1.0)
        f = lambda t: self.base.gauge(x - t[:, None] * self.v) - t
        for _ in range(100):
            bad = f(hi) > 0
            if not bad.any():
                break
            hi[bad] *= 2.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            pos = f(mid) > 0
            lo = np.where(pos, mid, lo)
            hi = np.where(pos, hi, mid)
        out = 0.5 * (lo + hi)
        zero = np.linalg.norm(x, axis=1) == 0
        return np.where(zero, 0.0, out)

    def volume_exact(self):
        return self.base.volume_exact()

    def __repr__(self):
        return f"Translate({self.base!r})"


class Polar(ConvexBody):
    def __init__(self, base: ConvexBody, rule: SphereRule | None = None):
        self.base = base
        self.dim = base.dim
        rule = rule or sphere_rule(base.dim, 512 if base.dim == 2 else 96)
        # K contains r B  <=>  h_K >= r on the sphere; then K° is in B/r.
        inradius = float(np.min(base.support(rule.nodes)))
        if inradius <= 0:
            raise ValueError("base body must have the origin interior")
        self.bounding_radius = 1.0 / inradius * 1.001

    def support(self, xi):
        return self.base.gauge(xi)

    def gauge(self, x):
        return self.base.support(x)

    def polar(self):
        return self.base

    def __repr__(self):
        return f"Polar({self.base!r})"


class NumericSupport(ConvexBody):
    """Body given by support values on a sphere rule grid.

    Queries interpolate: piecewise linear in angle for n=2, spherical
    barycentric over a Delaunay triangulation of the nodes for n=3.
    Convexity of the interpolant is not enforced; use
    :meth:`subadditivity_violations` to audit.
    """

    def __init__(self, rule: SphereRule, values, node_stderr=None):
        values = np.asarray(values, dtype=float)
        if np.any(values <= 0):
            raise ValueError("support values must be positive")
        self.rule = rule
        self.values = values
        self.node_stderr = (
            np.zeros_like(values) if node_stderr is None else np.asarray(node_stderr)
        )
        self.dim = rule.dim
        self.bounding_radius = float(values.max()) * 1.001
        if self.dim == 2:
            self._theta = np.mod(np.arctan2(rule.nodes[:, 1], rule.nodes[:, 0]), 2 * np.pi)
            order = np.argsort(self._theta)
            self._theta = self._theta[order]
            self._vals_sorted = values[order]
        elif self.dim == 3:
            from scipy.spatial import ConvexHull

            self._hull = ConvexHull(rule.nodes)
        else:
            raise ValueError("NumericSupport supports n in {2, 3}")

    @property
    def worst_node_stderr(self) -> float:
        return float(np.max(self.node_stderr))

    def support(self, xi):
        xi = _rows(xi)
        norms = np.linalg.norm(xi, axis=1)
        u = xi / norms[:, None]
        if self.dim == 2:
            th = np.mod(np.arctan2(u[:, 1], u[:, 0]), 2 * np.pi)
            vals = np.interp(
                th,
                np.concatenate([self._theta, [self._theta[0] + 2 * np.pi]]),
                np.concatenate([self._vals_sorted, [self._vals_sorted[0]]]),
            )
            return vals * norms
        return self._support3(u) * norms

    def _support3(self, u):
        # spherical barycentric interpolation: find the hull facet whose
        # cone contains u, then combine the vertex values linearly.
        simplices = self._hull.simplices  # (f, 3) indices
        pts = self._hull.points
        out = np.empty(u.shape[0])
        # precompute inverse matrices per facet lazily
        if not hasattr(self, "_facet_inv"):
            mats = pts[simplices].transpose(0, 2, 1)  # (f, 3, 3) columns = vertices
            self._facet_inv = np.linalg.pinv(mats)
        lam = np.einsum("fij,qj->qfi", self._facet_inv, u)  # (q, f, 3)
        ok = np.all(lam >= -1e-9, axis=2)
        best = np.argmax(ok, axis=1)
        # fall back to most-interior facet when roundoff leaves no hit
        none = ~ok.any(axis=1)
        if none.any():
            best[none] = np.argmax(lam.min(axis=2)[none], axis=1)
        lsel = lam[np.arange(u.shape[0]), best]  # (q, 3)
        lsel = np.clip(lsel, 0.0, None)
        lsel /= lsel.sum(axis=1, keepdims=True)
        out = np.sum(lsel * self.values[simplices[best]], axis=1)
        return out

    def gauge(self, x):
        # treat the rule nodes as facet normals: K ~ {x : <x, u_j> <= h_j}
        x = _rows(x)
        return np.max((x @ self.rule.nodes.T) / self.values[None, :], axis=1)

    def polar_volume(self):
        """Volume of the polar body by radial quadrature on the own rule
        (the polar radial function is 1/h), with node noise propagated."""
        from .estimate import Estimate

        n = self.dim
        val = self.rule.integrate(self.values ** (-n)) / n
        # node estimates share one sample batch, so their errors are
        # positively correlated: propagate with the conservative L1 bound
        err = float(np.sum(self.rule.weights * self.values ** (-n - 1) * self.node_stderr))
        method = "monte-carlo" if err > 0 else "quadrature"
        return Estimate(val, err, len(self.values), method)

    def body_volume(self, rule: SphereRule | None = None):
        """Volume of the body itself: radial quadrature of 1/gauge, with
        the gauge induced by the support values (facet representation).
        Node noise is propagated through the active facet of each ray."""
        from .estimate import Estimate

        rule = rule or sphere_rule(self.dim, 1024 if self.dim == 2 else 96)
        n = self.dim
        scores = (rule.nodes @ self.rule.nodes.T) / self.values[None, :]
        active = np.argmax(scores, axis=1)
        r = 1.0 / scores[np.arange(len(rule.nodes)), active]
        val = rule.integrate(r**n) / n
        # d vol / d h_j = sum over rays with active facet j of w r^n / h_j
        grad = np.zeros(len(self.values))
        np.add.at(grad, active, rule.weights * r**n / self.values[active])
        # correlated node errors (shared sample batch): L1 propagation
        err = float(np.sum(np.abs(grad) * self.node_stderr))
        method = "monte-carlo" if err > 0 else "quadrature"
        return Estimate(val, err, len(self.values), method)

    def subadditivity_violations(self, rng: np.random.Generator, probes: int = 1000) -> float:
        """Fraction of random pairs violating h(a+b) <= h(a) + h(b)."""
        from .sphere import sample_sphere

        a = sample_sphere(rng, self.dim, probes)
        b = sample_sphere(rng, self.dim, probes)
        lhs = self.support(a + b)
        rhs = self.support(a) + self.support(b)
        return float(np.mean(lhs > rhs * (1 + 1e-9) + 1e-12))

    def __repr__(self):
        return f"NumericSupport(n={self.dim}, nodes={len(self.values)})"


class SupportOracle(ConvexBody):
    """Body defined by an exact support-function callable.

    Used for bodies (projection bodies, zonotopes) whose support has a
    closed form but whose vertex structure we never need.  The gauge is
    evaluated against a fixed dense direction grid.
    """

    def __init__(self, dim: int, h, grid_level: int | None = None):
        self.dim = dim
        self._h = h
        level = grid_level or (1024 if dim == 2 else 64)
        self._grid = sphere_rule(dim, level).nodes
        self._grid_vals = np.asarray(h(self._grid), dtype=float)
        if np.any(self._grid_vals <= 0):
            raise ValueError("support must be positive")
        self.bounding_radius = float(self._grid_vals.max()) * 1.001

    def support(self, xi):
        return np.asarray(self._h(_rows(xi)), dtype=float)

    def gauge(self, x):
        x = _rows(x)
        return np.max((x @ self._grid.T) / self._grid_vals[None, :], axis=1)

    def __repr__(self):
        return f"SupportOracle(n={self.dim})"


# ---------------------------------------------------------------------------
# free-function operations


def support(body: ConvexBody, xi) -> float | np.ndarray:
    xi_arr = np.asarray(xi, dtype=float)
    if np.all(np.linalg.norm(_rows(xi_arr), axis=1) == 0):
        raise ValueError("support direction must be nonzero")
    out = body.support(xi_arr)
    return float(out[0]) if xi_arr.ndim == 1 else out


def gauge(body: ConvexBody, x) -> float | np.ndarray:
    x_arr = np.asarray(x, dtype=float)
    out = body.gauge(x_arr)
    return float(out[0]) if x_arr.ndim == 1 else out


def polar(body: ConvexBody) -> ConvexBody:
    return body.polar()


def linear_image(body: ConvexBody, A) -> ConvexBody:
    A = np.asarray(A, dtype=float)
    if abs(np.linalg.det(A)) < 1e-14:
        raise ValueError("linear image requires an invertible matrix")
    if isinstance(body, Ball):
        return Ellipsoid(A * body.radius)
    if isinstance(body, Ellipsoid):
        return Ellipsoid(A @ body.A)
    if isinstance(body, Polytope):
        return Polytope(body.vertices @ A.T)
    return LinearImage(A, body)


def volume(
    body: ConvexBody,
    budget: int = 200_000,
    seed: int = rngmod.DEFAULT_SEED,
    method: str = "auto",
    rule: SphereRule | None = None,
) -> Estimate:
    """Volume of a body.

    ``method`` is one of ``"auto"`` (closed form if available, else
    radial quadrature for n <= 3, else Monte Carlo), ``"closed-form"``,
    ``"quadrature"`` (radial: vol = (1/n) * integral of r_K^n over the
    sphere) or ``"monte-carlo"`` (rejection sampling in the bounding
    box with a CLT standard error).
    """
    if method == "auto":
        v = body.volume_exact()
        if v is not None:
            return Estimate(v, method=CLOSED_FORM)
        method = "quadrature" if body.dim in (2, 3) else "monte-carlo"
    if method == "closed-form":
        v = body.volume_exact()
        if v is None:
            raise ValueError(f"no closed-form volume for {body!r}")
        return Estimate(v, method=CLOSED_FORM)
    if method == "quadrature":
        rule = rule or sphere_rule(body.dim, 1024 if body.dim == 2 else 128)
        r = 1.0 / body.gauge(rule.nodes)
        return quad_estimate(rule.integrate(r**body.dim) / body.dim)
    if method == "triangulation":
        if not isinstance(body, Polytope):
            raise ValueError("triangulation requires a polytope")
        from scipy.spatial import Delaunay

        tri = Delaunay(body.vertices)
        total = 0.0
        for sim in tri.simplices:
            pts = body.vertices[sim]
            total += abs(np.linalg.det(pts[1:] - pts[0])) / math.factorial(body.dim)
        return quad_estimate(total)
    if method == "monte-carlo":
        gen = rngmod.substream(seed, "volume", repr(body))
        R = body.bounding_radius
        box_vol = (2 * R) ** body.dim
        hits = []
        for size in rngmod.chunked(budget):
            x = gen.uniform(-R, R, size=(size, body.dim))
            hits.append(body.contains(x).astype(float))
        return from_samples(np.concatenate(hits), scale=box_vol)
    raise ValueError(f"unknown method {method!r}")


def sample_uniform(
    body: ConvexBody, rng: np.random.Generator, size: int = 1, max_tries: int = 10_000_000
) -> np.ndarray:
    """Uniform samples from a body by rejection from its bounding box."""
    R = body.bounding_radius
    n = body.dim
    out = []
    got = 0
    tried = 0
    while got < size:
        batch = max(4 * (size - got), 1024)
        x = rng.uniform(-R, R, size=(batch, n))
        keep = x[body.contains(x)]
        out.append(keep)
        got += len(keep)
        tried += batch
        if tried > max_tries and got == 0:
            raise RuntimeError("rejection sampling acceptance rate too low")
    return np.concatenate(out)[:size]
