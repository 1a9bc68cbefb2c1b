"""Monte Carlo estimators of the defining integrals.

These evaluate kernels and discrepancies straight from their definitions
(cap indicators, uniform sampling on S^d and on the height interval) and
never use the identities they are meant to check. Each estimator returns
an :class:`McEstimate` with the standard error of the sample mean.

Chunks are processed independently (optionally on a thread pool) and
merged strictly in chunk order, so results are bitwise identical for any
worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._rules import interval_rule
from .errors import DomainError
from .geometry import McConfig, PointSet, uniform_directions
from .special import cap_measure, check_dimension


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    samples: int

    def z_score(self, expected):
        """Standardized deviation ``(value - expected) / std_error``."""
        diff = self.value - expected
        if diff == 0.0:
            return 0.0
        if self.std_error == 0.0:
            return math.copysign(math.inf, diff)
        return diff / self.std_error


def _chunk_stats(values):
    values = np.asarray(values, dtype=float)
    mean = float(np.mean(values))
    centred = values - mean
    return values.size, mean, float(np.dot(centred, centred))


def _merge(acc, part):
    # Chan et al. pairwise update of (count, mean, sum of squared deviations)
    na, ma, m2a = acc
    nb, mb, m2b = part
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, m2a + m2b + delta * delta * na * nb / n


def run_chunks(cfg, draw):
    """Estimate ``E[draw(rng, size)]`` over ``cfg.samples`` samples.

    ``draw(rng, size)`` must return ``size`` sample values using only the
    supplied generator.
    """
    def one(i):
        return _chunk_stats(draw(cfg.chunk_rng(i), cfg.chunk_length(i)))

    indices = range(cfg.n_chunks)
    if cfg.workers > 1 and cfg.n_chunks > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(one, indices))
    else:
        parts = [one(i) for i in indices]
    acc = parts[0]
    for part in parts[1:]:
        acc = _merge(acc, part)
    n, mean, m2 = acc
    if n < 2:
        return McEstimate(mean, math.inf, n)
    return McEstimate(mean, math.sqrt(m2 / (n - 1) / n), n)


def _pair(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DomainError(f"dimension mismatch: {x.shape} vs {y.shape}")
    return x.size - 1, x, y


def _dots(z, x):
    # fixed coordinate order, no BLAS: entries do not depend on array layout
    acc = z[..., 0] * x[0]
    for c in range(1, x.shape[-1]):
        acc = acc + z[..., c] * x[c]
    return acc


def sphere_mean_mc(d, f, cfg):
    """Estimate ``int f(z) dsigma_d(z)`` for a vectorised ``f`` of ``(size, d+1)`` arrays."""
    d = check_dimension(d)
    return run_chunks(cfg, lambda rng, size: f(uniform_directions(rng, size, d)))


def distance_constant_mc(d, cfg):
    """Estimate ``C_d = (1/2) int |<p, z>| dsigma_d(z)`` with ``p`` the first axis."""
    return sphere_mean_mc(d, lambda z: 0.5 * np.abs(z[:, 0]), cfg)


def kernel_mc(x, y, cfg):
    """Estimate the cap kernel ``K(x, y)`` from its defining cap integral.

    For each sampled ``z`` the height integral of
    ``1_{C(z;t)}(x) 1_{C(z;t)}(y)`` over ``t`` in [-1, 1] is done exactly,
    giving ``1 + min(<x, z>, <y, z>)``.
    """
    d, x, y = _pair(x, y)
    return sphere_mean_mc(d, lambda z: 1.0 + np.minimum(_dots(z, x), _dots(z, y)), cfg)


def weighted_kernel_mc(x, y, v, cfg):
    """Estimate ``int V(min(<x,z>, <y,z>)) dsigma_d(z) - V(-1)`` by sampling ``z``."""
    d, x, y = _pair(x, y)
    v_at_minus_one = float(v.V(-1.0))
    return sphere_mean_mc(
        d, lambda z: v.V(np.minimum(_dots(z, x), _dots(z, y))) - v_at_minus_one, cfg)


def _discrepancy_draw(points, d, weight):
    n = points.shape[0]

    def draw(rng, size):
        z = uniform_directions(rng, size, d)
        t = rng.uniform(-1.0, 1.0, size)
        inside = np.zeros(size, dtype=np.int64)
        for k in range(n):
            inside += _dots(z, points[k]) >= t
        gap = cap_measure(d, t) - inside / n
        # the height interval has length 2
        values = 2.0 * gap * gap
        if weight is not None:
            vt = np.asarray(weight.v(t), dtype=float)
            if np.any(~(vt > 0.0)):
                raise DomainError("weight function is not positive at a sampled height")
            values = values * vt
        return values

    return draw


def discrepancy_mc(P, cfg):
    """Estimate the squared cap L2 discrepancy of ``P``.

    Samples ``(z, t)`` uniformly on S^d x [-1, 1] and averages
    ``2 |sigma_d(C(z;t)) - (1/N) #{k : <x_k, z> >= t}|^2``.
    """
    if not isinstance(P, PointSet):
        P = PointSet(P)
    return run_chunks(cfg, _discrepancy_draw(P.points, P.d, None))


def weighted_discrepancy_mc(P, v, cfg):
    """As :func:`discrepancy_mc` with the integrand multiplied by ``v(t)``."""
    if not isinstance(P, PointSet):
        P = PointSet(P)
    return run_chunks(cfg, _discrepancy_draw(P.points, P.d, v))


def kernel_mean_mc(d, v, cfg):
    """Estimate ``int int K_v(x, y) dsigma(x) dsigma(y)`` from the cap definition.

    Samples ``x, y, z`` uniform on S^d and ``t`` uniform on [-1, 1].
    """
    d = check_dimension(d)

    def draw(rng, size):
        x = uniform_directions(rng, size, d)
        y = uniform_directions(rng, size, d)
        z = uniform_directions(rng, size, d)
        t = rng.uniform(-1.0, 1.0, size)
        both = (np.einsum("ij,ij->i", x, z) >= t) & (np.einsum("ij,ij->i", y, z) >= t)
        vt = 1.0 if v is None else v.v(t)
        return 2.0 * vt * both

    return run_chunks(cfg, draw)


def _numeric_antiderivative(g, nodes=48):
    def G(s):
        s = np.asarray(s, dtype=float)
        r, w = interval_rule(np.zeros_like(s), s, nodes)
        return np.sum(w * np.asarray(g(r), dtype=float), axis=-1)
    return G


def rho_mc(x, y, g, cfg, G=None):
    """Estimate ``rho(x, y) = int |G(<x,z>) - G(<y,z>)| dsigma_d(z)``.

    ``rho`` integrates ``g`` between ``<x, z>`` and ``<y, z>`` and averages
    over ``z``; the absolute value of the difference of an antiderivative
    ``G`` is the same quantity. When ``G`` is omitted a Gauss-Legendre
    antiderivative of ``g`` anchored at 0 is used. For ``g == 1`` this is
    ``2 C_d |x - y|``.
    """
    d, x, y = _pair(x, y)
    if G is None:
        G = _numeric_antiderivative(g)
    return sphere_mean_mc(d, lambda z: np.abs(G(_dots(z, x)) - G(_dots(z, y))), cfg)


__all__ = [
    "McConfig",
    "McEstimate",
    "distance_constant_mc",
    "discrepancy_mc",
    "kernel_mc",
    "kernel_mean_mc",
    "rho_mc",
    "run_chunks",
    "sphere_mean_mc",
    "weighted_discrepancy_mc",
    "weighted_kernel_mc",
]
