"""The cap kernel, its weighted version, kernel means and induced distances.

The cap kernel integrates the product of cap indicators over all caps,

    K_v(x, y) = int_{-1}^{1} v(t) int_{S^d} 1_{C(z;t)}(x) 1_{C(z;t)}(y) dsigma_d(z) dt,

and for ``v == 1`` has the closed form ``1 - C_d |x - y|``. For a general
weight with antiderivative ``V`` it equals
``int V(min(<x,z>, <y,z>)) dsigma_d(z) - V(-1)``.

Two independent routes evaluate the weighted kernel:

* :func:`kernel_weighted` integrates ``V(min(.,.))`` over the sphere with a
  two-variable rule split along the kink ``<x,z> = <y,z>``;
* :func:`kernel_weighted_appendix` uses the one-dimensional reduction
  through the incomplete beta function (cap measures of S^(d-1)).

:func:`cross_check_weighted` compares them.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._rules import clustered_rule, interval_rule
from .errors import (DegenerateInputError, DomainError, NumericalError,
                     UnsupportedDimensionError)
from .geometry import two_point_quadrature, zonal_integral
from .special import (DEFAULT_NODES, area_ratio, cap_measure, check_dimension,
                      distance_constant, regularized_incomplete_beta)

log = logging.getLogger(__name__)

_GRID = np.linspace(-1.0, 1.0, 1000)
_FD_STEP = 1e-5


@dataclass(frozen=True)
class WeightFunction:
    """A positive weight ``v`` on [-1, 1] with antiderivative ``V``.

    Both callables must accept numpy arrays. Positivity of ``v`` and
    ``V' = v`` (central differences, step 1e-5) are checked on a
    1000-point grid at construction.
    """

    v: Callable
    V: Callable
    label: str = "custom"

    def __post_init__(self):
        vg = np.asarray(self.v(_GRID), dtype=float) * np.ones_like(_GRID)
        if not np.all(vg > 0.0):
            raise DomainError(f"weight {self.label!r} is not positive on [-1, 1]")
        inner = _GRID[1:-1]
        fd = (np.asarray(self.V(inner + _FD_STEP), dtype=float)
              - np.asarray(self.V(inner - _FD_STEP), dtype=float)) / (2 * _FD_STEP)
        if np.any(np.abs(fd - vg[1:-1]) > 1e-6 * (1.0 + np.abs(vg[1:-1]))):
            raise DomainError(f"V is not an antiderivative of v for weight {self.label!r}")

    @classmethod
    def one(cls):
        return cls(v=lambda t: np.ones_like(np.asarray(t, dtype=float)),
                   V=lambda t: np.asarray(t, dtype=float) * 1.0, label="one")

    @classmethod
    def polynomial(cls, coeffs, label=None):
        """``v(t) = sum_i coeffs[i] t**i`` with ``V`` its antiderivative, ``V(0) = 0``."""
        poly = np.polynomial.Polynomial([float(c) for c in coeffs])
        anti = poly.integ()
        if label is None:
            label = "poly:" + ",".join(repr(float(c)) for c in coeffs)
        return cls(v=poly, V=anti, label=label)

    @classmethod
    def parse(cls, text):
        """Build a weight from ``"one"`` or ``"poly:c0,c1,...,ck"``."""
        text = text.strip()
        if text == "one":
            return cls.one()
        if text.startswith("poly:"):
            body = text[len("poly:"):]
            try:
                coeffs = [float(tok) for tok in body.split(",")]
            except ValueError:
                raise DomainError(f"bad polynomial coefficients in weight {text!r}") from None
            if not coeffs or not all(math.isfinite(c) for c in coeffs):
                raise DomainError(f"bad polynomial coefficients in weight {text!r}")
            return cls.polynomial(coeffs, label=text)
        raise DomainError(f"unknown weight specification {text!r} (use 'one' or 'poly:c0,c1,...')")


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel to evaluate: unweighted when ``weight`` is None."""

    d: int
    weight: Optional[WeightFunction] = None
    nodes: int = DEFAULT_NODES

    def __post_init__(self):
        check_dimension(self.d)
        if self.nodes < 16:
            raise DomainError(f"kernel quadrature needs at least 16 nodes, got {self.nodes}")

    def __call__(self, x, y):
        if self.weight is None:
            return kernel_unweighted(self.d, x, y)
        return kernel_weighted(self.d, x, y, self.weight, self.nodes)


def _check_pair(d, x, y):
    d = check_dimension(d)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (d + 1,) or y.shape != (d + 1,):
        raise DomainError(f"points must have d+1 = {d + 1} coordinates, got {x.shape} and {y.shape}")
    return d, x, y


def _inner(x, y):
    return float(np.clip(np.dot(x, y), -1.0, 1.0))


def kernel_unweighted(d, x, y):
    """Closed form ``1 - C_d |x - y|`` of the cap kernel."""
    d, x, y = _check_pair(d, x, y)
    diff = x - y
    return 1.0 - distance_constant(d) * math.sqrt(float(np.dot(diff, diff)))


def weighted_kernel_of_inner(d, u, v, nodes=DEFAULT_NODES):
    """Weighted cap kernel as a function of ``u = <x, y>``.

    Frame: ``x`` is the pole, ``z = t x + sqrt(1-t^2) z*``,
    ``y = u x + sqrt(1-u^2) y*``, so ``<y, z> = u t + sqrt(1-u^2) sqrt(1-t^2) w``
    with ``w = <y*, z*>``. The minimum switches from ``<y,z>`` to ``t`` at
    ``w0(t) = k t / sqrt(1-t^2)``, ``k = sqrt((1-u)/(1+u))``; the crossing
    exists only for ``|t| < sqrt((1+u)/2)``.
    """
    d = check_dimension(d)
    if d < 2:
        raise UnsupportedDimensionError("the weighted kernel route needs d >= 2")
    u = float(np.clip(u, -1.0, 1.0))
    V = v.V
    shift = float(V(-1.0))
    if 1.0 + u <= 1e-15:
        # y = -x: the minimum is -|t|
        return zonal_integral(d, lambda t: V(-np.abs(t)), nodes, breaks=(0.0,)) - shift
    if 1.0 - u <= 1e-15:
        return zonal_integral(d, V, nodes) - shift
    s = math.sqrt((1.0 - u) * (1.0 + u))
    k = math.sqrt((1.0 - u) / (1.0 + u))
    c = math.sqrt(0.5 * (1.0 + u))

    def F(t, w):
        return V(np.minimum(t, u * t + s * np.sqrt(1.0 - t * t) * w))

    def w_split(t):
        with np.errstate(divide="ignore", invalid="ignore"):
            w0 = k * t / np.sqrt(1.0 - t * t)
        return np.where(np.isnan(w0), 0.0, w0)

    return two_point_quadrature(d, F, nodes, t_breaks=(c, -c), w_split=w_split) - shift


def kernel_weighted(d, x, y, v, nodes=DEFAULT_NODES):
    """Weighted cap kernel ``int V(min(<x,z>, <y,z>)) dsigma_d(z) - V(-1)``.

    Evaluated with :func:`spherequal.geometry.two_point_quadrature`, split
    along the kink of the minimum. Requires ``d >= 2``.
    """
    d, x, y = _check_pair(d, x, y)
    return weighted_kernel_of_inner(d, _inner(x, y), v, nodes)


def half_kernel_appendix(d, u, v, nodes=DEFAULT_NODES):
    """``A(x, y) = int V(<x,z>) 1[<y - x, z> >= 0] dsigma_d(z)`` for ``u = <x, y> < 1``.

    Sum of a polar-cap term over ``t <= -sqrt((1+u)/2)`` and the transformed
    band term

        (omega_{d-1}/omega_d) k^d int_{-1}^{1} V(xi / sqrt(k^2 + xi^2))
            I_{(1-xi)/2}((d-1)/2, (d-1)/2) (k^2 + xi^2)^{-(d+1)/2} dxi,

    with ``k^2 = (1-u)/(1+u)``. The band integral is split at ``xi = 0``
    and evaluated with end-clustered Gauss-Legendre rules.
    """
    d = check_dimension(d)
    V = v.V
    c = math.sqrt(0.5 * (1.0 + u))
    # polar cap around -x: t in [-1, -c], i.e. psi in [pi - phi/2, pi]
    psi, w = interval_rule(math.pi - math.acos(c), math.pi, nodes)
    polar = float(np.dot(w, V(np.cos(psi)) * np.sin(psi) ** (d - 1)))
    if 1.0 + u <= 1e-15:
        return area_ratio(d) * polar
    k2 = (1.0 - u) / (1.0 + u)
    band = 0.0
    for a, b in ((-1.0, 0.0), (0.0, 1.0)):
        xi, wx = clustered_rule(a, b, nodes)
        q = k2 + xi * xi
        frac = regularized_incomplete_beta(0.5 * (1.0 - xi), 0.5 * (d - 1), 0.5 * (d - 1))
        band += float(np.dot(wx, V(xi / np.sqrt(q)) * frac / q ** (0.5 * (d + 1))))
    return area_ratio(d) * (polar + k2 ** (0.5 * d) * band)


def kernel_weighted_appendix(d, x, y, v, nodes=DEFAULT_NODES):
    """Weighted kernel through ``A(x, y) + A(y, x) - V(-1)`` (incomplete beta route).

    Defined for ``x != y`` only; use :func:`kernel_weighted` on the diagonal.
    """
    d, x, y = _check_pair(d, x, y)
    if d < 2:
        raise UnsupportedDimensionError("the incomplete beta route needs d >= 2")
    diff = x - y
    if math.sqrt(float(np.dot(diff, diff))) <= 1e-12:
        raise DegenerateInputError("the incomplete beta route requires x != y")
    u = _inner(x, y)
    # A(y, x) uses <y, x> = u as well; both halves share one evaluation path
    a_xy = half_kernel_appendix(d, u, v, nodes)
    a_yx = half_kernel_appendix(d, _inner(y, x), v, nodes)
    return a_xy + a_yx - float(v.V(-1.0))


@dataclass(frozen=True)
class KernelCrossCheck:
    """Comparison of the two weighted-kernel routes at one pair."""

    inner_product: float
    direct: float
    appendix: float
    tolerance: float
    label: str = ""
    deviation: float = field(init=False)
    agree: bool = field(init=False)

    def __post_init__(self):
        dev = abs(self.direct - self.appendix)
        object.__setattr__(self, "deviation", dev)
        object.__setattr__(self, "agree", dev <= self.tolerance)

    def as_dict(self):
        return {"weight": self.label, "inner_product": self.inner_product,
                "direct": self.direct, "appendix": self.appendix,
                "deviation": self.deviation, "tolerance": self.tolerance,
                "agree": self.agree}


def cross_check_weighted(d, x, y, v, nodes=DEFAULT_NODES, tolerance=1e-6):
    """Evaluate both weighted-kernel routes and report their deviation.

    A mismatch beyond ``tolerance`` is logged as a warning and flagged in
    the returned :class:`KernelCrossCheck`; it is not raised.
    """
    direct = kernel_weighted(d, x, y, v, nodes)
    appendix = kernel_weighted_appendix(d, x, y, v, nodes)
    check = KernelCrossCheck(_inner(np.asarray(x, float), np.asarray(y, float)),
                             direct, appendix, tolerance, v.label)
    if not check.agree:
        log.warning("weighted kernel routes disagree: %s", check.as_dict())
    return check


def kernel_mean(d, v, nodes=DEFAULT_NODES):
    """``int int K_v dsigma dsigma = int_{-1}^{1} v(t) sigma_d(C(.;t))^2 dt``.

    Exchanging the integrals in the cap definition leaves the squared cap
    measure, which does not depend on the cap centre. Integrated in the
    angle ``t = cos psi``.
    """
    d = check_dimension(d)
    psi, w = interval_rule(0.0, math.pi, nodes)
    t = np.cos(psi)
    cap = cap_measure(d, t)
    return float(np.dot(w, np.asarray(v.v(t), dtype=float) * cap * cap * np.sin(psi)))


def kernel_mean_appendix_variant(d, v, nodes=DEFAULT_NODES, form="incomplete_beta"):
    """Closed expressions for the kernel mean obtained by the half-sphere argument.

    ``form="incomplete_beta"``: ``int_0^1 v(-t) I_{t^2}(1/2, d/2) dt``.
    ``form="antiderivative"``:
    ``2 (omega_{d-1}/omega_d) int_0^1 V(-t) (1-t^2)^{d/2-1} dt - V(-1)``.

    The two forms agree with each other (integration by parts) but not with
    :func:`kernel_mean`: for ``v == 1`` and ``d = 2`` they give 1/2 where the
    kernel mean is 2/3. Kept for the consistency report only.
    """
    d = check_dimension(d)
    psi, w = interval_rule(0.0, 0.5 * math.pi, nodes)
    t = np.cos(psi)
    if form == "incomplete_beta":
        ib = regularized_incomplete_beta(t * t, 0.5, 0.5 * d)
        return float(np.dot(w, np.asarray(v.v(-t), dtype=float) * ib * np.sin(psi)))
    if form == "antiderivative":
        integral = float(np.dot(w, np.asarray(v.V(-t), dtype=float) * np.sin(psi) ** (d - 1)))
        return 2.0 * area_ratio(d) * integral - float(v.V(-1.0))
    raise DomainError(f"unknown form {form!r}")


def induced_distance(spec, x, y):
    """Kernel metric ``sqrt(K(x,x) - 2 K(x,y) + K(y,y))``.

    For the unweighted kernel this is ``sqrt(2 C_d |x - y|)``. Radicands in
    ``[-1e-12, 0)`` are clamped to zero; anything below raises.
    """
    kxx = spec(x, x)
    kyy = spec(y, y)
    kxy = spec(x, y)
    rad = kxx - 2.0 * kxy + kyy
    if rad < -1e-12:
        raise NumericalError(f"negative squared kernel distance {rad:.3e}")
    return math.sqrt(max(rad, 0.0))
