"""Gauss-Legendre rules on arbitrary intervals (cached reference nodes)."""

from functools import lru_cache

import numpy as np

from .errors import DomainError


@lru_cache(maxsize=64)
def _reference(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def legendre_rule(n):
    """Return the ``n``-point Gauss-Legendre nodes and weights on [-1, 1]."""
    n = int(n)
    if n < 1:
        raise DomainError(f"quadrature needs at least one node, got {n}")
    return _reference(n)


def interval_rule(a, b, n):
    """Gauss-Legendre rule on ``[a, b]``.

    ``a`` and ``b`` may be arrays; the node axis is appended last, so the
    result has shape ``np.broadcast(a, b).shape + (n,)``.
    """
    x, w = legendre_rule(n)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def clustered_rule(a, b, n):
    """Gauss-Legendre rule composed with the map ``a + (b-a)(1-cos(pi s))/2``.

    The map clusters nodes at both ends, which restores fast convergence
    for integrands with algebraic endpoint behaviour such as
    ``(psi - a)**1.5``.
    """
    x, w = legendre_rule(n)
    s = 0.5 * (x + 1.0)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    span = b - a
    nodes = a + span * 0.5 * (1.0 - np.cos(np.pi * s))
    weights = span * (0.25 * np.pi) * np.sin(np.pi * s) * w
    return nodes, weights
