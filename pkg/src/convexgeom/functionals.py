"""Random-simplex functionals, moment bodies and mixed volumes.

The central object is the p-th moment of the parallelepiped volume of
random points, one from each of n convex bodies.  Freezing one
direction turns the same integral into the support function of a
convex body; its polar links the moment back to the dual mixed
volume, and that identity is exposed as a consistency check.
"""

from __future__ import annotations

import numpy as np

from . import rng as rngmod
from .bodies import (
    Ball,
    ConvexBody,
    Cube,
    Ellipsoid,
    NumericSupport,
    Polytope,
    SupportOracle,
    sample_uniform,
    volume,
)
from .constants import c_np, omega_n
from .estimate import (
    CLOSED_FORM,
    Estimate,
    from_samples,
    quad_estimate,
)
from .sphere import SphereRule, sphere_rule

__all__ = [
    "det_volume",
    "det_volume_many",
    "I_p",
    "N_p_body",
    "centroid_body",
    "SurfaceMeasure",
    "surface_measure",
    "projection_body",
    "dual_mixed_volume",
    "mixed_volume",
    "equivalence_check",
]


def det_volume(vectors) -> float:
    """k-dimensional volume of the parallelepiped spanned by k vectors.

    Absolute determinant for k = n, square root of the Gram determinant
    for k < n.
    """
    V = np.asarray(vectors, dtype=float)
    k, n = V.shape
    if k > n:
        raise ValueError("more vectors than dimensions")
    if k == n:
        return abs(np.linalg.det(V))
    g = np.linalg.det(V @ V.T)
    return float(np.sqrt(max(g, 0.0)))


def det_volume_many(point_sets: list[np.ndarray]) -> np.ndarray:
    """Vectorized parallelepiped volumes.

    ``point_sets`` is a list of k arrays of shape (m, n); returns the m
    volumes of the parallelepipeds spanned row-wise.
    """
    k = len(point_sets)
    n = point_sets[0].shape[1]
    M = np.stack(point_sets, axis=1)  # (m, k, n)
    if k == n:
        return np.abs(np.linalg.det(M))
    G = M @ M.transpose(0, 2, 1)
    return np.sqrt(np.clip(np.linalg.det(G), 0.0, None))


def _volumes_product(bodies, budget, seed) -> Estimate:
    prod = Estimate(1.0)
    for i, L in enumerate(bodies):
        prod = prod * volume(L, budget=budget, seed=seed + i)
    return prod


def I_p(
    bodies: list[ConvexBody],
    p: float,
    budget: int = 100_000,
    seed: int = rngmod.DEFAULT_SEED,
) -> Estimate:
    """Monte-Carlo estimate of the random-simplex moment functional:
    the integral over the product of the bodies of D_n(x_1..x_n)^p.

    Each point is sampled uniformly from its body and the mean of D^p
    is rescaled by the product of volumes (with propagated error).
    """
    n = bodies[0].dim
    if len(bodies) != n:
        raise ValueError("need exactly n bodies of dimension n")
    if p < 1:
        raise ValueError("p must be at least 1")
    gen = rngmod.substream(seed, "I_p", str(p), *[repr(b) for b in bodies])
    vals = []
    for size in rngmod.chunked(budget):
        pts = [sample_uniform(L, gen, size) for L in bodies]
        vals.append(det_volume_many(pts) ** p)
    mean = from_samples(np.concatenate(vals))
    return mean * _volumes_product(bodies, budget, seed)


def N_p_body(
    bodies: list[ConvexBody],
    p: float,
    rule: SphereRule | None = None,
    budget: int = 100_000,
    seed: int = rngmod.DEFAULT_SEED,
) -> NumericSupport:
    """Body whose support function p-th power is the partial
    random-simplex integral with one free direction.

    Support is evaluated at the rule nodes (one shared Monte-Carlo
    sample batch for all nodes) and interpolated elsewhere; worst-node
    standard error is stored on the body.
    """
    n = bodies[0].dim
    if len(bodies) != n - 1:
        raise ValueError("need n - 1 bodies")
    rule = rule or sphere_rule(n, 256 if n == 2 else 48)
    gen = rngmod.substream(seed, "N_p", str(p), *[repr(b) for b in bodies])
    acc = np.zeros(len(rule.nodes))
    acc2 = np.zeros(len(rule.nodes))
    total = 0
    for size in rngmod.chunked(budget):
        pts = [sample_uniform(L, gen, size) for L in bodies]
        vals = _det_with_direction(pts, rule.nodes) ** p  # (size, nodes)
        acc += vals.sum(axis=0)
        acc2 += (vals**2).sum(axis=0)
        total += size
    mean = acc / total
    var = np.clip(acc2 / total - mean**2, 0.0, None)
    sem = np.sqrt(var / total)
    volp = _volumes_product(bodies, budget, seed)
    hp = mean * volp.value
    hp_err = np.sqrt((volp.value * sem) ** 2 + (mean * volp.stderr) ** 2)
    h = hp ** (1.0 / p)
    h_err = np.where(hp > 0, h / p * hp_err / np.maximum(hp, 1e-300), 0.0)
    return NumericSupport(rule, h, node_stderr=h_err)


def _det_with_direction(point_sets, directions) -> np.ndarray:
    """|det(x_1, ..., x_{n-1}, xi)| for a batch of point tuples against a
    grid of directions; shape (samples, directions)."""
    n = point_sets[0].shape[1]
    if n == 2:
        x = point_sets[0]
        # det(x, xi) = x0 xi1 - x1 xi0
        return np.abs(np.outer(x[:, 0], directions[:, 1]) - np.outer(x[:, 1], directions[:, 0]))
    if n == 3:
        c = np.cross(point_sets[0], point_sets[1])  # (m, 3)
        return np.abs(c @ directions.T)
    raise ValueError("direction-resolved determinant implemented for n in {2, 3}")


def centroid_body(
    L: ConvexBody,
    p: float,
    rule: SphereRule | None = None,
    budget: int = 100_000,
    seed: int = rngmod.DEFAULT_SEED,
) -> NumericSupport:
    """p-th centroid body: support^p proportional to the p-th absolute
    moment of the linear functional over the body, normalized so the
    ball maps to itself."""
    n = L.dim
    rule = rule or sphere_rule(n, 256 if n == 2 else 48)
    gen = rngmod.substream(seed, "centroid", str(p), repr(L))
    acc = np.zeros(len(rule.nodes))
    acc2 = np.zeros(len(rule.nodes))
    total = 0
    for size in rngmod.chunked(budget):
        x = sample_uniform(L, gen, size)
        vals = np.abs(x @ rule.nodes.T) ** p
        acc += vals.sum(axis=0)
        acc2 += (vals**2).sum(axis=0)
        total += size
    mean = acc / total
    sem = np.sqrt(np.clip(acc2 / total - mean**2, 0, None) / total)
    c = c_np(n, p).value
    h = (mean / c) ** (1.0 / p)
    h_err = np.where(mean > 0, h / p * sem / np.maximum(mean, 1e-300), 0.0)
    return NumericSupport(rule, h, node_stderr=h_err)


# ---------------------------------------------------------------------------
# surface measures


class SurfaceMeasure:
    """L_p surface-area measure of a body or function.

    One of three backends:

    atomic
        list of (unit normal, weight) pairs; exact sums (polytopes).
    density
        callable density against the spherical measure (smooth bodies).
    pushforward
        sampler(rng, m) -> (directions, weights) such that weighted
        sample means estimate integrals against the measure.
    """

    def __init__(self, kind, dim, atoms=None, density=None, sampler=None):
        if kind not in ("atomic", "density", "pushforward"):
            raise ValueError(f"unknown surface measure kind {kind!r}")
        self.kind = kind
        self.dim = dim
        self.atoms = atoms
        self.density = density
        self.sampler = sampler
        if kind == "atomic":
            normals, weights = atoms
            if np.any(weights <= 0):
                raise ValueError("atom weights must be positive")
            norms = np.linalg.norm(normals, axis=1)
            if not np.allclose(norms, 1.0, atol=1e-9):
                raise ValueError("atom normals must be unit vectors")

    def integrate(
        self,
        f,
        rule: SphereRule | None = None,
        budget: int = 100_000,
        seed: int = rngmod.DEFAULT_SEED,
    ) -> Estimate:
        """Integral of ``f`` (vectorized over unit vectors) against the measure."""
        if self.kind == "atomic":
            normals, weights = self.atoms
            return Estimate(float(np.dot(weights, f(normals))))
        if self.kind == "density":
            rule = rule or sphere_rule(self.dim, 1024 if self.dim == 2 else 96)
            vals = f(rule.nodes) * self.density(rule.nodes)
            return quad_estimate(rule.integrate(vals))
        gen = rngmod.substream(seed, "surface-measure-int")
        vals = []
        for size in rngmod.chunked(budget):
            dirs, w = self.sampler(gen, size)
            vals.append(f(dirs) * w)
        return from_samples(np.concatenate(vals))

    def total_mass(self, **kw) -> Estimate:
        return self.integrate(lambda u: np.ones(len(u)), **kw)

    def sample(self, gen, size):
        """Weighted direction samples (directions, weights) for MC use."""
        if self.kind == "pushforward":
            return self.sampler(gen, size)
        if self.kind == "atomic":
            normals, weights = self.atoms
            total = weights.sum()
            idx = gen.choice(len(weights), size=size, p=weights / total)
            return normals[idx], np.full(size, total)
        from .sphere import sample_sphere

        dirs = sample_sphere(gen, self.dim, size)
        nw = self.dim * omega_n(self.dim)
        return dirs, nw * self.density(dirs)


def surface_measure(L: ConvexBody, p: float) -> SurfaceMeasure:
    """L_p surface-area measure of a convex body.

    Polytope kinds yield atoms with weight h(u)^(1-p) * facet area;
    balls and ellipsoids yield closed-form densities; other smooth
    bodies fall back to the pushforward of a radial representative
    function (n = 2 additionally supports a support-function curvature
    density, see :func:`convexgeom.dualtheory.curvature_density`).
    """
    n = L.dim
    if isinstance(L, (Cube, Polytope)):
        normals, areas = L.facets()
        h = L.support(normals)
        if np.any(h <= 0):
            raise ValueError("origin must be interior for the L_p measure")
        return SurfaceMeasure("atomic", n, atoms=(normals, h ** (1.0 - p) * areas))
    if isinstance(L, Ball):
        r = L.radius
        return SurfaceMeasure(
            "density", n, density=lambda u: np.full(len(np.atleast_2d(u)), r ** (n - p))
        )
    if isinstance(L, Ellipsoid):
        A = L.A
        d2 = np.linalg.det(A) ** 2
        return SurfaceMeasure(
            "density",
            n,
            density=lambda u: d2 * np.linalg.norm(np.atleast_2d(u) @ A, axis=1) ** (-(n + p)),
        )
    if isinstance(L, NumericSupport):
        raise ValueError(
            "numeric-support bodies only admit the pushforward backend; "
            "build one via funcspace.surface_measure_f on a radial representative"
        )
    # generic body with smooth gauge: pushforward via radial representative
    from .funcspace import radial_representative, surface_measure_f

    return surface_measure_f(radial_representative(L, p), p)


def projection_body(L: ConvexBody) -> ConvexBody:
    """Body with support half the cosine-transform of the surface measure."""
    sm = surface_measure(L, 1.0)
    n = L.dim
    if sm.kind == "atomic":
        normals, weights = sm.atoms

        def h(xi):
            xi = np.atleast_2d(xi)
            return 0.5 * np.abs(xi @ normals.T) @ weights

        return SupportOracle(n, h)
    if sm.kind == "density" and n == 2:
        from scipy.integrate import quad as squad

        dens = sm.density

        def h2(xi):
            xi = np.atleast_2d(xi)
            out = np.empty(len(xi))
            for i, v in enumerate(xi):
                nv = np.linalg.norm(v)
                a = np.arctan2(v[1], v[0])

                def f(t):
                    u = np.array([[np.cos(t), np.sin(t)]])
                    return abs(np.cos(t - a)) * float(dens(u)[0])

                # split at the two angles where <xi, u> vanishes
                val = 0.0
                for lo, hi in [(a - np.pi / 2, a + np.pi / 2), (a + np.pi / 2, a + 3 * np.pi / 2)]:
                    val += squad(f, lo, hi, epsabs=1e-12, limit=200)[0]
                out[i] = 0.5 * nv * val
            return out

        return SupportOracle(2, h2)
    rule = sphere_rule(n, 96)

    def h3(xi):
        xi = np.atleast_2d(xi)
        dens_vals = sm.density(rule.nodes)
        return 0.5 * (np.abs(xi @ rule.nodes.T) * dens_vals[None, :]) @ rule.weights

    return SupportOracle(n, h3)


# ---------------------------------------------------------------------------
# mixed volumes


def dual_mixed_volume(
    K: ConvexBody,
    L: ConvexBody,
    p: float,
    budget: int = 100_000,
    seed: int = rngmod.DEFAULT_SEED,
) -> Estimate:
    """(n+p)/n times the integral over K of the gauge of L to the p."""
    n = K.dim
    gen = rngmod.substream(seed, "dmv", str(p), repr(K), repr(L))
    vals = []
    for size in rngmod.chunked(budget):
        x = sample_uniform(K, gen, size)
        vals.append(L.gauge(x) ** p)
    mean = from_samples(np.concatenate(vals))
    return mean * volume(K, budget=budget, seed=seed) * ((n + p) / n)


def mixed_volume(
    K: ConvexBody,
    L: ConvexBody,
    p: float,
    rule: SphereRule | None = None,
    budget: int = 100_000,
    seed: int = rngmod.DEFAULT_SEED,
) -> Estimate:
    """(1/n) integral of h_L^p against the L_p surface measure of K."""
    sm = surface_measure(K, p)
    est = sm.integrate(lambda u: L.support(u) ** p, rule=rule, budget=budget, seed=seed)
    return est * (1.0 / K.dim)


def equivalence_check(
    bodies: list[ConvexBody],
    p: float,
    budget: int = 100_000,
    seed: int = rngmod.DEFAULT_SEED,
    rule: SphereRule | None = None,
) -> Estimate:
    """Ratio of the random-simplex moment to n/(n+p) times the dual
    mixed volume of the last body with the polar moment body of the
    others.  Contract: 1 within 3 sigma."""
    n = bodies[0].dim
    lhs = I_p(bodies, p, budget=budget, seed=seed)
    Np = N_p_body(bodies[:-1], p, rule=rule, budget=budget, seed=seed + 1)
    rhs = dual_mixed_volume(bodies[-1], Np.polar(), p, budget=budget, seed=seed + 2) * (
        n / (n + p)
    )
    # the gauge of the polar moment body carries the (correlated) node
    # noise of the numeric support values, which the sampling stderr of
    # the dual mixed volume cannot see; fold it in explicitly
    rel_node = p * float(np.mean(Np.node_stderr / Np.values))
    rhs = Estimate(
        rhs.value,
        float(np.hypot(rhs.stderr, rel_node * abs(rhs.value))),
        rhs.samples,
        rhs.method,
    )
    return lhs / rhs
