"""Points on S^d, uniform sampling, caps and zonal quadrature.

Integrals over the sphere are reduced with the measure decomposition

    dsigma_d(z) = (omega_{d-1}/omega_d) (1 - t^2)^{d/2 - 1} dt dsigma_{d-1}(z*),
    z = t p + sqrt(1 - t^2) z*,

and evaluated in the polar angle ``t = cos(psi)``. The weight then becomes
``sin(psi)**(d-1)``, smooth for every ``d``, so one Gauss-Legendre rule
serves even and odd dimensions alike.
"""

from dataclasses import dataclass

import numpy as np

from ._rules import clustered_rule, interval_rule
from .errors import DomainError, UnsupportedDimensionError
from .special import DEFAULT_NODES, area_ratio, check_dimension

UNIT_TOL = 1e-9
RENORMALIZE_TOL = 1e-6


def unit_point(coords, renormalize=False):
    """Validate ``coords`` as a point of S^d and return a read-only array.

    Norms within ``1e-9`` of one are kept as given. With ``renormalize``,
    norms within ``1e-6`` are scaled onto the sphere.
    """
    p = np.array(coords, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise DomainError("a unit point needs at least two coordinates")
    if not np.all(np.isfinite(p)):
        raise DomainError("unit point coordinates must be finite")
    dev = abs(float(np.sqrt(np.dot(p, p))) - 1.0)
    if dev > UNIT_TOL:
        if renormalize and dev <= RENORMALIZE_TOL:
            p = p / np.sqrt(np.dot(p, p))
        else:
            raise DomainError(f"point is not on the unit sphere (| |p| - 1 | = {dev:.3g})")
    p.setflags(write=False)
    return p


class PointSet:
    """An immutable configuration of ``N >= 1`` points on S^d.

    Coordinates are stored as a read-only ``(N, d + 1)`` float array.
    Repeated points are allowed.
    """

    __slots__ = ("_d", "_points")

    def __init__(self, points, d=None, renormalize=False):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise DomainError("a point set needs at least one point")
        if pts.shape[1] < 2:
            raise DomainError("points need at least two coordinates")
        if d is None:
            d = pts.shape[1] - 1
        d = check_dimension(d)
        if pts.shape[1] != d + 1:
            raise DomainError(f"points have {pts.shape[1]} coordinates, expected d+1 = {d + 1}")
        if not np.all(np.isfinite(pts)):
            raise DomainError("point coordinates must be finite")
        norms = np.sqrt(np.einsum("ij,ij->i", pts, pts))
        dev = np.abs(norms - 1.0)
        bad = dev > UNIT_TOL
        if bad.any():
            if renormalize and np.all(dev <= RENORMALIZE_TOL):
                pts[bad] /= norms[bad, None]
            else:
                k = int(np.argmax(dev))
                raise DomainError(
                    f"point {k} is not on the unit sphere (| |p| - 1 | = {dev[k]:.3g})")
        pts.setflags(write=False)
        self._d = d
        self._points = pts

    @property
    def d(self):
        return self._d

    @property
    def points(self):
        return self._points

    @property
    def n(self):
        return self._points.shape[0]

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self._points)

    def __getitem__(self, k):
        return self._points[k]

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self._d == other._d and np.array_equal(self._points, other._points)

    def __repr__(self):
        return f"PointSet(d={self._d}, n={self.n})"


@dataclass(frozen=True)
class McConfig:
    """Reproducible Monte Carlo settings.

    Samples are drawn in chunks of ``chunk_size``; chunk ``i`` uses its own
    PCG64 stream seeded by ``numpy.random.SeedSequence(seed, spawn_key=(i,))``.
    Results therefore depend only on ``(seed, samples, chunk_size)``, never
    on ``workers``.
    """

    samples: int
    seed: int = 0
    chunk_size: int = 2 ** 14
    workers: int = 1

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise DomainError(f"samples must be a positive integer, got {self.samples!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if int(self.chunk_size) != self.chunk_size or self.chunk_size < 1:
            raise DomainError(f"chunk_size must be a positive integer, got {self.chunk_size!r}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise DomainError(f"workers must be a positive integer, got {self.workers!r}")

    @property
    def n_chunks(self):
        return -(-self.samples // self.chunk_size)

    def chunk_length(self, i):
        return min(self.chunk_size, self.samples - i * self.chunk_size)

    def chunk_rng(self, i):
        seq = np.random.SeedSequence(int(self.seed), spawn_key=(int(i),))
        return np.random.Generator(np.random.PCG64(seq))


def uniform_directions(rng, size, d):
    """``size`` uniform points on S^d from normalized Gaussian draws."""
    g = rng.standard_normal((size, d + 1))
    return g / np.sqrt(np.einsum("ij,ij->i", g, g))[:, None]


def sample_uniform(d, n, seed):
    """``n`` i.i.d. uniform points on S^d.

    Draws a ``(n, d + 1)`` block of standard normals from PCG64 seeded with
    ``SeedSequence(seed)`` and normalizes each row.
    """
    d = check_dimension(d)
    if int(n) != n or n < 1:
        raise DomainError(f"need at least one point, got n={n!r}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))
    return PointSet(uniform_directions(rng, int(n), d), d=d)


def _same_arity(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != y.shape[-1]:
        raise DomainError(f"arity mismatch: {x.shape[-1]} vs {y.shape[-1]} coordinates")
    return x, y


def chordal_distance(x, y, stable=False):
    """Euclidean distance ``|x - y|`` between points of the sphere.

    With ``stable=True`` the value is computed as ``sqrt(max(0, 2 - 2<x, y>))``.
    """
    x, y = _same_arity(x, y)
    if stable:
        ip = np.sum(x * y, axis=-1)
        return np.sqrt(np.maximum(0.0, 2.0 - 2.0 * ip))
    diff = x - y
    return np.sqrt(np.sum(diff * diff, axis=-1))


def cap_indicator(center, t, x):
    """1 if ``x`` lies in the closed cap ``{z : <center, z> >= t}``, else 0."""
    if not -1.0 <= t <= 1.0:
        raise DomainError(f"cap height must lie in [-1, 1], got {t}")
    center, x = _same_arity(center, x)
    return (np.sum(center * x, axis=-1) >= t).astype(int)


def _angle_breaks(breaks):
    psi = sorted(float(np.arccos(np.clip(b, -1.0, 1.0))) for b in breaks)
    edges = [0.0] + [p for p in psi if 0.0 < p < np.pi] + [np.pi]
    return edges


def zonal_integral(d, f, nodes=DEFAULT_NODES, breaks=()):
    """Integral of the zonal function ``f(<p, z>)`` over S^d.

    Evaluates ``(omega_{d-1}/omega_d) * int_{-1}^{1} f(t) (1 - t^2)^{d/2-1} dt``
    with an ``nodes``-point rule per piece. ``f`` must accept numpy arrays.
    ``breaks`` lists points of ``t`` where ``f`` has a kink; the rule is
    split there.
    """
    d = check_dimension(d)
    if int(nodes) != nodes or nodes < 1:
        raise DomainError(f"nodes must be a positive integer, got {nodes!r}")
    edges = _angle_breaks(breaks)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        psi, w = interval_rule(a, b, nodes)
        total += float(np.dot(w, np.asarray(f(np.cos(psi)), dtype=float) * np.sin(psi) ** (d - 1)))
    return area_ratio(d) * total


def two_point_quadrature(d, F, nodes=DEFAULT_NODES, t_breaks=(), w_split=None):
    """Integrate ``F(t, w)`` over z in S^d, where ``t = <x, z>`` and ``w = <y*, z*>``.

    Here ``z = t x + sqrt(1 - t^2) z*`` and ``y*`` is a fixed unit vector
    orthogonal to ``x``, so the measure factorises into the ``t``-weight of
    S^d and the ``w``-weight of S^(d-1). Requires ``d >= 2``.

    Both variables are integrated in angle (``t = cos psi``,
    ``w = cos theta``). ``t_breaks`` splits the outer range; each outer
    piece uses a rule clustered at its ends. ``w_split(t)`` (vectorised)
    gives, for each ``t``, a point where ``F`` has a kink in ``w``; the
    inner rule is split there.
    """
    d = check_dimension(d)
    if d < 2:
        raise UnsupportedDimensionError("two-point quadrature needs d >= 2 (inner sphere S^(d-1))")
    if int(nodes) != nodes or nodes < 1:
        raise DomainError(f"nodes must be a positive integer, got {nodes!r}")
    edges = _angle_breaks(t_breaks)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        psi, wpsi = clustered_rule(a, b, nodes)
        t = np.cos(psi)
        outer_w = wpsi * np.sin(psi) ** (d - 1)
        theta0 = None
        if w_split is not None:
            theta0 = np.arccos(np.clip(np.asarray(w_split(t), dtype=float), -1.0, 1.0))
            if np.all(theta0 == 0.0) or np.all(theta0 == np.pi):
                theta0 = None  # the kink never enters this piece
        if theta0 is None:
            theta, wth = interval_rule(0.0, np.pi, nodes)
            theta = theta[None, :]
            wth = wth[None, :]
        else:
            th1, w1 = interval_rule(0.0, theta0, nodes)
            th2, w2 = interval_rule(theta0, np.pi, nodes)
            theta = np.concatenate([th1, th2], axis=1)
            wth = np.concatenate([w1, w2], axis=1)
        inner_w = wth * np.sin(theta) ** (d - 2) if d > 2 else wth
        vals = np.asarray(F(t[:, None], np.cos(theta)), dtype=float)
        total += float(np.dot(outer_w, np.sum(inner_w * vals, axis=1)))
    return area_ratio(d) * area_ratio(d - 1) * total
