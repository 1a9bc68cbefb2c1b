"""Quality measures of point configurations and the invariance identities.

For ``P = {x_0, ..., x_{N-1}}`` on S^d:

* ``sum_of_distances``   (1/N^2) sum_{k,l} |x_k - x_l|
* ``energy_gap``         I_d - sum_of_distances
* ``worst_case_error``   sqrt(C_d * energy_gap), the worst-case integration
  error of the equal-weight rule in the cap-kernel RKHS; by the invariance
  principle it is also the cap L2 discrepancy
* ``weighted_wce``       sqrt((1/N^2) sum K_v(x_k, x_l) - int int K_v)
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import chain
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, NumericalError, PositiveDefinitenessError
from .geometry import PointSet
from .kernels import kernel_mean, kernel_mean_appendix_variant, weighted_kernel_of_inner
from .oracles import McEstimate, discrepancy_mc, weighted_discrepancy_mc
from .special import DEFAULT_NODES, distance_constant, mean_distance

# rows per block for the O(N^2) sums; fixed so results do not depend on workers
_ROW_BLOCK = 64


def _as_pointset(P):
    return P if isinstance(P, PointSet) else PointSet(P)


def _row_distances(X, lo, hi):
    """Distances |x_k - x_l| for k in [lo, hi) and l > k, one array per row."""
    out = []
    for k in range(lo, hi):
        diff = X[k + 1:] - X[k]
        out.append(np.sqrt(np.einsum("ij,ij->i", diff, diff)))
    return out


def _blocks(n):
    return [(lo, min(lo + _ROW_BLOCK, n)) for lo in range(0, n, _ROW_BLOCK)]


def _map_blocks(fn, n, workers):
    blocks = _blocks(n)
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda b: fn(*b), blocks))
    return [fn(*b) for b in blocks]


def sum_of_distances(P, method="fsum", workers=1):
    """Normalized sum of distances ``(1/N^2) sum_{k,l} |x_k - x_l|``.

    ``method="fsum"`` (reference) sums all pair distances with
    :func:`math.fsum`, which is correctly rounded and hence independent of
    ordering, relabeling and ``workers``. ``method="pairwise"`` sums each
    fixed row block with numpy's pairwise reduction and adds the block
    totals in block order; it is deterministic for any ``workers``.
    """
    P = _as_pointset(P)
    X = P.points
    n = P.n
    if n == 1:
        return 0.0
    if method == "fsum":
        rows = _map_blocks(lambda lo, hi: _row_distances(X, lo, hi), n, workers)
        upper = math.fsum(chain.from_iterable(r.tolist() for block in rows for r in block))
    elif method == "pairwise":
        def block_total(lo, hi):
            rows = _row_distances(X, lo, hi)
            return float(np.sum(np.concatenate(rows))) if rows else 0.0
        upper = 0.0
        for part in _map_blocks(block_total, n, workers):
            upper += part
    else:
        raise DomainError(f"unknown summation method {method!r}")
    return 2.0 * upper / (n * n)


def energy_gap(P, **kwargs):
    """``I_d`` minus the sum of distances; non-negative up to rounding."""
    P = _as_pointset(P)
    return mean_distance(P.d) - sum_of_distances(P, **kwargs)


def _clamped_sqrt(rad, floor, exc, what):
    if rad < -floor:
        raise exc(f"{what} radicand is negative: {rad:.3e}")
    return math.sqrt(max(rad, 0.0))


def worst_case_error(P, **kwargs):
    """Worst-case error ``sqrt(C_d * (I_d - sum_of_distances))`` in the cap-kernel RKHS."""
    P = _as_pointset(P)
    rad = distance_constant(P.d) * energy_gap(P, **kwargs)
    return _clamped_sqrt(rad, 1e-12, NumericalError, "worst-case error")


def discrepancy_closed(P, **kwargs):
    """Cap L2 discrepancy through the invariance identity.

    This is the same number as :func:`worst_case_error`; an independent
    check against the definition is :func:`spherequal.oracles.discrepancy_mc`.
    """
    return worst_case_error(P, **kwargs)


def weighted_kernel_sum(P, v, nodes=DEFAULT_NODES):
    """``(1/N^2) sum_{k,l} K_v(x_k, x_l)``.

    The kernel depends only on ``<x_k, x_l>``, so values are memoized on the
    inner product rounded to 12 decimals.
    """
    P = _as_pointset(P)
    X = P.points
    n = P.n
    cache = {}

    def K(u):
        key = round(u, 12)
        if key not in cache:
            cache[key] = weighted_kernel_of_inner(P.d, key, v, nodes)
        return cache[key]

    diag = K(1.0)
    terms = [n * diag]
    for k in range(n - 1):
        ips = np.clip(np.sum(X[k + 1:] * X[k], axis=1), -1.0, 1.0)
        terms.extend(2.0 * K(float(u)) for u in ips)
    return math.fsum(terms) / (n * n)


def weighted_wce(P, v, nodes=DEFAULT_NODES):
    """Worst-case error in the RKHS of the weighted cap kernel ``K_v``.

    ``sqrt((1/N^2) sum K_v(x_k, x_l) - kernel_mean(d, v))``. Radicands down
    to ``-1e-9`` are treated as zero; below that the kernel evaluation is
    assumed broken and :class:`PositiveDefinitenessError` is raised.
    """
    P = _as_pointset(P)
    rad = weighted_kernel_sum(P, v, nodes) - kernel_mean(P.d, v, nodes)
    return _clamped_sqrt(rad, 1e-9, PositiveDefinitenessError, "weighted worst-case error")


def representer_eval(P, x):
    """Error representer ``R(x) = C_d [(1/N) sum_k |x - x_k| - I_d]``.

    ``x`` may be one point or an ``(M, d + 1)`` array of points.
    """
    P = _as_pointset(P)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != P.d + 1:
        raise DomainError(f"points must have d+1 = {P.d + 1} coordinates")
    diff = x[..., None, :] - P.points
    mean_dist = np.mean(np.sqrt(np.sum(diff * diff, axis=-1)), axis=-1)
    value = distance_constant(P.d) * (mean_dist - mean_distance(P.d))
    return float(value) if np.ndim(value) == 0 else value


class Residual(NamedTuple):
    residual: float
    std_error: float

    @property
    def z_score(self):
        if self.residual == 0.0:
            return 0.0
        if self.std_error == 0.0:
            return math.copysign(math.inf, self.residual)
        return self.residual / self.std_error


def invariance_residual(P, cfg, v=None, nodes=DEFAULT_NODES):
    """Residual of the invariance identity with the discrepancy from Monte Carlo.

    Unweighted: ``S + L2^2 / C_d - I_d`` with ``L2^2`` from
    :func:`discrepancy_mc`.
    Weighted: ``(1/N^2) sum K_v - D_v - kernel_mean`` with the weighted
    squared discrepancy ``D_v`` from :func:`weighted_discrepancy_mc`.
    In both cases the standard error comes from the Monte Carlo term alone.
    """
    P = _as_pointset(P)
    if v is None:
        c = distance_constant(P.d)
        est = discrepancy_mc(P, cfg)
        res = sum_of_distances(P) + est.value / c - mean_distance(P.d)
        return Residual(res, est.std_error / c)
    est = weighted_discrepancy_mc(P, v, cfg)
    res = weighted_kernel_sum(P, v, nodes) - est.value - kernel_mean(P.d, v, nodes)
    return Residual(res, est.std_error)


@dataclass(frozen=True)
class McCheck:
    """A Monte Carlo estimate set against the closed-form value it should match."""

    name: str
    estimate: float
    std_error: float
    closed_value: float
    samples: int
    z_score: float = field(init=False)

    def __post_init__(self):
        est = McEstimate(self.estimate, self.std_error, self.samples)
        object.__setattr__(self, "z_score", est.z_score(self.closed_value))

    @classmethod
    def from_estimate(cls, name, est, closed_value):
        return cls(name, est.value, est.std_error, closed_value, est.samples)


@dataclass(frozen=True)
class WeightedEntry:
    weighted_wce: float
    kernel_sum: float
    kernel_mean: float
    kernel_mean_appendix: float


@dataclass
class QualityReport:
    """All quality measures of one point set.

    ``wce`` and ``discrepancy`` hold the same number (worst-case error and
    cap L2 discrepancy coincide); ``timing`` is only filled on request so
    that reports stay reproducible byte for byte.
    """

    d: int
    n: int
    sum_of_distances: float
    energy_gap: float
    wce: float
    weighted: dict = field(default_factory=dict)
    mc_checks: list = field(default_factory=list)
    timing: Optional[dict] = None

    @property
    def discrepancy(self):
        return self.wce


def analyze(P, weights=(), cfg=None, nodes=DEFAULT_NODES, timing=False, workers=1):
    """Compute a :class:`QualityReport`.

    ``weights`` is a sequence of :class:`WeightFunction`; with ``cfg`` the
    report also carries Monte Carlo checks of the squared discrepancies.
    """
    P = _as_pointset(P)
    clock = {}
    t0 = time.perf_counter()
    s = sum_of_distances(P, workers=workers)
    gap = mean_distance(P.d) - s
    wce = _clamped_sqrt(distance_constant(P.d) * gap, 1e-12, NumericalError, "worst-case error")
    clock["closed_form"] = time.perf_counter() - t0
    report = QualityReport(d=P.d, n=P.n, sum_of_distances=s, energy_gap=gap, wce=wce)

    for v in weights:
        t0 = time.perf_counter()
        ksum = weighted_kernel_sum(P, v, nodes)
        kmean = kernel_mean(P.d, v, nodes)
        rad = ksum - kmean
        report.weighted[v.label] = WeightedEntry(
            weighted_wce=_clamped_sqrt(rad, 1e-9, PositiveDefinitenessError,
                                       "weighted worst-case error"),
            kernel_sum=ksum,
            kernel_mean=kmean,
            kernel_mean_appendix=kernel_mean_appendix_variant(P.d, v, nodes),
        )
        clock[f"weighted[{v.label}]"] = time.perf_counter() - t0

    if cfg is not None:
        t0 = time.perf_counter()
        est = discrepancy_mc(P, cfg)
        report.mc_checks.append(McCheck.from_estimate("discrepancy_sq", est, wce * wce))
        for v in weights:
            est = weighted_discrepancy_mc(P, v, cfg)
            closed = report.weighted[v.label].weighted_wce ** 2
            report.mc_checks.append(
                McCheck.from_estimate(f"weighted_discrepancy_sq[{v.label}]", est, closed))
        clock["monte_carlo"] = time.perf_counter() - t0

    if timing:
        report.timing = clock
    return report


__all__ = [
    "McCheck",
    "QualityReport",
    "Residual",
    "WeightedEntry",
    "analyze",
    "discrepancy_closed",
    "energy_gap",
    "invariance_residual",
    "representer_eval",
    "sum_of_distances",
    "weighted_kernel_sum",
    "weighted_wce",
    "worst_case_error",
]
