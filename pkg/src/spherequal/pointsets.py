"""Point-set generators and CSV persistence.

File format: UTF-8 text with LF line endings. The first line is
``# d=<d>``; every further non-comment line holds the ``d + 1``
coordinates of one point, comma separated, written with 17 significant
digits so that a save/load round-trip is exact. Other lines starting with
``#`` are comments; blank lines are ignored.
"""

import io
import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, ParseError
from .geometry import RENORMALIZE_TOL, UNIT_TOL, PointSet, sample_uniform
from .special import check_dimension

KINDS = ("random", "fibonacci", "antipodal", "cross_polytope", "simplex")

_HEADER = re.compile(r"#\s*d\s*=\s*(\d+)\s*$")
_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class GeneratorSpec:
    """Which configuration to build. ``seed`` only matters for ``random``."""

    kind: str
    d: int = 2
    n: Optional[int] = None
    seed: int = 0


def fibonacci(n):
    """Spherical Fibonacci points on S^2.

    Heights ``z_j = 1 - (2j + 1)/n`` (band midpoints) and longitudes
    ``j * pi (3 - sqrt 5)``.
    """
    j = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * j + 1.0) / n
    r = np.sqrt((1.0 - z) * (1.0 + z))
    phi = np.mod(j * _GOLDEN_ANGLE, 2.0 * math.pi)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def antipodal(d):
    pts = np.zeros((2, d + 1))
    pts[0, 0] = 1.0
    pts[1, 0] = -1.0
    return pts


def cross_polytope(d):
    """The ``2(d + 1)`` points ``+e_i, -e_i``."""
    eye = np.eye(d + 1)
    return np.concatenate([eye, -eye])


def simplex(d):
    """Vertices of the regular simplex with ``d + 2`` vertices inscribed in S^d.

    The standard basis of R^{d+2}, centred and expressed in the Helmert
    basis of the hyperplane orthogonal to the all-ones vector.
    """
    m = d + 2
    helmert = np.zeros((m - 1, m))
    for i in range(1, m):
        helmert[i - 1, :i] = 1.0 / math.sqrt(i * (i + 1))
        helmert[i - 1, i] = -i / math.sqrt(i * (i + 1))
    pts = helmert.T.copy()
    return pts / np.linalg.norm(pts, axis=1)[:, None]


def _require_n(spec, expected, rule):
    if spec.n is not None and spec.n != expected:
        raise DomainError(f"{spec.kind} requires {rule} (got n={spec.n}, d={spec.d})")


def generate(spec):
    """Build the :class:`PointSet` described by ``spec``.

    Constraints: ``fibonacci`` needs d = 2; ``antipodal`` has n = 2;
    ``cross_polytope`` has n = 2(d+1); ``simplex`` has n = d+2. For the
    fixed-size kinds ``n`` may be omitted.
    """
    if spec.kind not in KINDS:
        raise DomainError(f"unknown generator kind {spec.kind!r}; choose one of {', '.join(KINDS)}")
    d = check_dimension(spec.d)
    if spec.kind == "random":
        if spec.n is None:
            raise DomainError("random requires n")
        return sample_uniform(d, spec.n, spec.seed)
    if spec.kind == "fibonacci":
        if d != 2:
            raise DomainError(f"fibonacci requires d=2 (got d={d})")
        if spec.n is None or spec.n < 1:
            raise DomainError("fibonacci requires n >= 1")
        return PointSet(fibonacci(int(spec.n)), d=2)
    if spec.kind == "antipodal":
        _require_n(spec, 2, "n=2")
        return PointSet(antipodal(d), d=d)
    if spec.kind == "cross_polytope":
        _require_n(spec, 2 * (d + 1), "n=2(d+1)")
        return PointSet(cross_polytope(d), d=d)
    _require_n(spec, d + 2, "n=d+2")
    return PointSet(simplex(d), d=d)


def format_csv(P):
    lines = [f"# d={P.d}"]
    lines.extend(",".join(f"{c:.17g}" for c in row) for row in P.points)
    return "\n".join(lines) + "\n"


def save_csv(P, destination):
    """Write ``P`` to a path or a text file object."""
    text = format_csv(P)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def parse_csv(text, renormalize=False):
    """Parse point-file text; see the module docstring for the format."""
    d = None
    rows = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line:
            continue
        if d is None:
            m = _HEADER.match(line)
            if not m:
                raise ParseError("expected header '# d=<d>'", lineno)
            d = int(m.group(1))
            if d < 1:
                raise ParseError("dimension must be at least 1", lineno)
            continue
        if line.startswith("#"):
            continue
        tokens = line.split(",")
        if len(tokens) != d + 1:
            raise ParseError(f"expected {d + 1} coordinates for d={d}, found {len(tokens)}", lineno)
        try:
            row = [float(tok) for tok in tokens]
        except ValueError:
            raise ParseError(f"non-numeric token in {line!r}", lineno) from None
        if not all(math.isfinite(c) for c in row):
            raise ParseError("coordinates must be finite", lineno)
        norm = math.sqrt(math.fsum(c * c for c in row))
        dev = abs(norm - 1.0)
        if dev > UNIT_TOL:
            if renormalize and dev <= RENORMALIZE_TOL:
                row = [c / norm for c in row]
            else:
                limit = RENORMALIZE_TOL if renormalize else UNIT_TOL
                raise ParseError(f"point norm {norm!r} deviates from 1 by more than {limit:g}", lineno)
        rows.append(row)
    if d is None:
        raise ParseError("empty point file: missing '# d=<d>' header", 1)
    if not rows:
        raise ParseError("point file contains no points")
    return PointSet(np.array(rows), d=d)


def load_csv(source, renormalize=False):
    """Read a point set from a path or a text file object.

    Norms must be within 1e-9 of one; with ``renormalize`` rows within 1e-6
    are rescaled. Problems raise :class:`ParseError` with the line number.
    """
    if hasattr(source, "read"):
        return parse_csv(source.read(), renormalize)
    with open(source, encoding="utf-8") as fh:
        return parse_csv(fh.read(), renormalize)
