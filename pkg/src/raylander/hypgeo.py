"""Hyperbolic densities, distances and arc lengths on the model domains.

All metrics use the curvature -1 normalisation, so the unit disk carries
``2|dz| / (1 - |z|^2)``, the punctured disk ``|dz| / (|z| |log|z||)`` and the
right half-plane ``|dz| / Re z``.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from typing import Callable, Sequence

from .errors import DomainError

# Rejection margin near a boundary: densities blow up there.
BOUNDARY_EPS = 1e-14
QUAD_RTOL = 1e-10
TWO_PI = 2.0 * math.pi


class BranchCutoffWarning(RuntimeWarning):
    pass


class ModelDomain(str, enum.Enum):
    UNIT_DISK = "unit_disk"
    PUNCTURED_UNIT_DISK = "punctured_unit_disk"
    RIGHT_HALF_PLANE = "right_half_plane"

    def check(self, z: complex) -> complex:
        """Return ``z`` as a complex number, raising if it is not interior."""
        z = complex(z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise DomainError(f"non-finite point {z!r}", reason="point-outside-domain")
        if self is ModelDomain.RIGHT_HALF_PLANE:
            if z.real <= BOUNDARY_EPS:
                raise DomainError(f"{z!r} is not in the right half-plane",
                                  reason="point-outside-domain")
            return z
        r = abs(z)
        if r >= 1.0 - BOUNDARY_EPS:
            raise DomainError(f"{z!r} is not inside the unit disk",
                              reason="point-outside-domain")
        if self is ModelDomain.PUNCTURED_UNIT_DISK and r == 0.0:
            raise DomainError("z = 0 is the puncture", reason="puncture-hit")
        return z


def as_domain(domain) -> ModelDomain:
    try:
        return ModelDomain(domain)
    except ValueError:
        raise DomainError(f"unknown domain {domain!r}", reason="unknown-domain") from None


def density(domain, z: complex) -> float:
    """Exact hyperbolic density of ``domain`` at ``z``."""
    domain = as_domain(domain)
    z = domain.check(z)
    if domain is ModelDomain.UNIT_DISK:
        return 2.0 / (1.0 - abs(z) ** 2)
    if domain is ModelDomain.PUNCTURED_UNIT_DISK:
        r = abs(z)
        return -1.0 / (r * math.log(r))
    return 1.0 / z.real


def half_plane_distance(a: complex, b: complex) -> float:
    """Distance in the right half-plane, ``arccosh(1 + |a-b|^2 / (2 Re a Re b))``.

    Evaluated as ``2 asinh(|a-b| / (2 sqrt(Re a Re b)))``, which is the same
    quantity without the cancellation near ``a == b``.
    """
    return 2.0 * math.asinh(abs(a - b) / (2.0 * math.sqrt(a.real * b.real)))


def log_lift(z: complex) -> complex:
    """Lift a punctured-disk point to the right half-plane through ``-log``."""
    return -cmath.log(z)


def branch_cutoff(a: complex, b: complex) -> int:
    return 1 + math.ceil(abs(a.imag - b.imag) / TWO_PI) + 2


def distance(domain, z: complex, w: complex) -> float:
    """Hyperbolic distance between two interior points of ``domain``.

    In the punctured disk this is the minimum, over deck translations
    ``2 pi i k``, of half-plane distances between logarithmic lifts. The
    search range is ``|k| <= 1 + ceil(|Im a - Im b| / 2 pi) + 2``; a
    :class:`BranchCutoffWarning` is issued if the minimum sits on the edge.
    """
    domain = as_domain(domain)
    z = domain.check(z)
    w = domain.check(w)
    if z == w:
        return 0.0
    if domain is ModelDomain.UNIT_DISK:
        ratio = abs(z - w) / abs(1.0 - w.conjugate() * z)
        return 2.0 * math.atanh(min(ratio, 1.0))
    if domain is ModelDomain.RIGHT_HALF_PLANE:
        return half_plane_distance(z, w)
    a, b = log_lift(z), log_lift(w)
    cutoff = branch_cutoff(a, b)
    best, best_k = math.inf, 0
    for k in range(-cutoff, cutoff + 1):
        d = half_plane_distance(a, b + TWO_PI * 1j * k)
        if d < best:
            best, best_k = d, k
    if abs(best_k) == cutoff:
        warnings.warn(f"minimising deck shift k={best_k} sits at the cutoff {cutoff}",
                      BranchCutoffWarning, stacklevel=2)
    return best


def circle_length_punctured(r: float) -> float:
    """Hyperbolic length of the circle ``|z| = r`` in the punctured disk."""
    if not 0.0 < r < 1.0:
        raise DomainError(f"radius {r!r} outside (0, 1)")
    return -TWO_PI / math.log(r)


def adaptive_simpson(func: Callable[[float], float], a: float, b: float,
                     rtol: float = QUAD_RTOL, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature with a relative tolerance."""

    def simpson(fa, fm, fb, h):
        return h * (fa + 4.0 * fm + fb) / 6.0

    fa, fb, fm = func(a), func(b), func(0.5 * (a + b))
    whole = simpson(fa, fm, fb, b - a)
    # Relative tolerance is taken against the first estimate of the integral.
    atol = rtol * max(abs(whole), 1e-300)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = func(lm), func(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return (recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))

    return recurse(a, b, fa, fm, fb, whole, atol, max_depth)


def _check_polyline(pts: Sequence[complex]) -> list[complex]:
    pts = [complex(p) for p in pts]
    if len(pts) < 2:
        raise DomainError("a polyline needs at least two points", reason="degenerate-polyline")
    for p, q in zip(pts, pts[1:]):
        if p == q:
            raise DomainError(f"repeated consecutive point {p!r}", reason="degenerate-polyline")
    return pts


def polyline_length(domain, pts: Sequence[complex], rtol: float = QUAD_RTOL) -> float:
    """Hyperbolic length of a polyline, integrating the density along each edge.

    Every vertex must lie in the domain; each straight edge is integrated with
    adaptive Simpson quadrature at relative tolerance ``rtol``.
    """
    domain = as_domain(domain)
    pts = [domain.check(p) for p in _check_polyline(pts)]
    total = 0.0
    for p, q in zip(pts, pts[1:]):
        step = q - p
        if domain is not ModelDomain.RIGHT_HALF_PLANE:
            # A chord between interior points of a disk stays interior, but may
            # pass through the puncture.
            if domain is ModelDomain.PUNCTURED_UNIT_DISK and _passes_origin(p, q):
                raise DomainError("polyline edge passes through the puncture",
                                  reason="point-outside-domain")
        total += abs(step) * adaptive_simpson(
            lambda s: density(domain, p + s * step), 0.0, 1.0, rtol)
    return total


def _passes_origin(p: complex, q: complex) -> bool:
    cross = p.real * q.imag - p.imag * q.real
    if cross != 0.0:
        return False
    return (p.real * q.real + p.imag * q.imag) <= 0.0
