"""Contraction estimates for the hyperbolic metric.

``kappa_contraction`` bounds ``lambda_U / lambda_V`` for ``V`` inside ``U`` in
terms of the ``U``-distance ``d`` to the boundary of ``V``::

    kappa(d) = -(e^{2d} - 1) / (2 e^d) * log((e^d - 1) / (e^d + 1))
             = sinh(d) * (-log tanh(d / 2))

For ``d`` beyond roughly 18 the value is within one ulp of 1, so the deficit
``1 - kappa(d)`` is available separately and computed from its own series.

Lower density constants used by :func:`density_bounds`:

=================  ==========================  =================================
constant           value                       role
=================  ==========================  =================================
``HEMPEL_C``       Gamma(1/4)^4 / (4 pi^2)     sharp constant for C minus {0, 1}
hi factor          2                           inscribed-disk comparison
=================  ==========================  =================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .hypgeo import ModelDomain, distance

HEMPEL_C = math.gamma(0.25) ** 4 / (4.0 * math.pi ** 2)
SERIES_THRESHOLD = 1e-6


@dataclass(frozen=True)
class KappaBound:
    d: float
    kappa: float
    provenance: str = "lemma22"
    deficit: float = field(default=float("nan"), compare=False)

    def to_dict(self) -> dict:
        return {"d": self.d, "kappa": self.kappa, "provenance": self.provenance,
                "deficit": self.deficit}

    @classmethod
    def from_dict(cls, data: dict) -> "KappaBound":
        return cls(d=float(data["d"]), kappa=float(data["kappa"]),
                   provenance=str(data["provenance"]),
                   deficit=float(data.get("deficit", float("nan"))))


def _check_d(d: float) -> float:
    d = float(d)
    if not d >= 0.0:
        raise DomainError(f"distance d must be nonnegative, got {d!r}", reason="negative-d")
    return d


def kappa_deficit(d: float) -> float:
    """``1 - kappa(d)``, accurate where ``kappa(d)`` rounds to 1."""
    d = _check_d(d)
    if d < 1.0:
        return 1.0 - kappa_contraction(d)
    # 1 - kappa = sum_{j>=1} 2 u^{2j} / (4 j^2 - 1) with u = e^{-d}
    u2 = math.exp(-2.0 * d)
    total, term, j = 0.0, 1.0, 1
    while True:
        term *= u2
        inc = 2.0 * term / (4.0 * j * j - 1.0)
        total += inc
        if inc <= 1e-17 * total:
            return total
        j += 1


def kappa_contraction(d: float) -> float:
    d = _check_d(d)
    if d == 0.0:
        return 0.0
    if d < SERIES_THRESHOLD:
        # sinh(d) * (-log tanh(d/2)) expanded to third order
        lg = math.log(0.5 * d)
        return -d * lg + d ** 3 * (1.0 / 12.0 - lg / 6.0)
    if d < 1.0:
        return math.sinh(d) * -math.log(math.tanh(0.5 * d))
    return 1.0 - kappa_deficit(d)


def kappa_bound(d: float, provenance: str = "lemma22") -> KappaBound:
    return KappaBound(d=float(d), kappa=kappa_contraction(d), provenance=provenance,
                      deficit=kappa_deficit(d))


def puncture_ratio(x: float) -> float:
    """``lambda_D(x) / lambda_{D*}(x) = -2 x log x / (1 - x^2)`` on ``(0, 1)``."""
    x = float(x)
    if not 0.0 < x < 1.0:
        raise DomainError(f"x = {x!r} outside (0, 1)")
    return -2.0 * x * math.log(x) / ((1.0 - x) * (1.0 + x))


def annulus_distance(r_n: float, delta: float) -> float:
    """``delta - pi / log r_n``, stored in the manifestly positive form."""
    if not 0.0 < r_n < 1.0:
        raise DomainError(f"radius {r_n!r} outside (0, 1)")
    if not delta >= 0.0:
        raise DomainError(f"delta must be nonnegative, got {delta!r}")
    return delta + math.pi / abs(math.log(r_n))


def kappa_annulus(r_n: float, delta: float) -> KappaBound:
    return kappa_bound(annulus_distance(r_n, delta), provenance="prop27")


@dataclass(frozen=True)
class PunctureLadder:
    """Points ``w_n`` of the punctured disk accumulating at the puncture.

    ``radii[n] = |points[n]|`` strictly decreasing; ``delta`` is the largest
    punctured-disk distance between consecutive points.
    """

    radii: tuple
    points: tuple
    delta: float

    @classmethod
    def from_points(cls, points: Iterable[complex]) -> "PunctureLadder":
        pts = tuple(complex(p) for p in points)
        if not pts:
            raise DomainError("empty ladder", reason="empty-ladder")
        radii = tuple(abs(p) for p in pts)
        if any(b >= a for a, b in zip(radii, radii[1:])):
            raise DomainError("ladder radii must be strictly decreasing")
        for r in radii:
            if not 0.0 < r < 1.0:
                raise DomainError(f"ladder radius {r!r} outside (0, 1)")
        delta = max((distance(ModelDomain.PUNCTURED_UNIT_DISK, p, q)
                     for p, q in zip(pts, pts[1:])), default=0.0)
        return cls(radii=radii, points=pts, delta=delta)

    @classmethod
    def geometric(cls, log_step: float, count: int, angle: float = 0.0) -> "PunctureLadder":
        """Ladder ``r_n = exp(-log_step * n)`` for ``n = 1..count`` on one ray."""
        rot = complex(math.cos(angle), math.sin(angle))
        return cls.from_points(math.exp(-log_step * n) * rot for n in range(1, count + 1))


def _lifts(points: Sequence[complex]) -> np.ndarray:
    pts = np.asarray(points, dtype=complex)
    return -np.log(pts)


def distance_to_ladder(z: complex, ladder: PunctureLadder) -> float:
    """Exact punctured-disk distance from ``z`` to the nearest ladder point."""
    if not ladder.points:
        raise DomainError("empty ladder", reason="empty-ladder")
    z = ModelDomain.PUNCTURED_UNIT_DISK.check(z)
    r = abs(z)
    if r > ladder.radii[0] or r < ladder.radii[-1]:
        raise DomainError(f"|z| = {r!r} outside the ladder range "
                          f"[{ladder.radii[-1]!r}, {ladder.radii[0]!r}]",
                          reason="outside-ladder-range")
    a = complex(-np.log(z))
    b = _lifts(ladder.points)
    # Deck shifts: both lifts have |Im| <= pi, so |k| <= 2 covers every minimiser.
    shifts = 2.0 * math.pi * 1j * np.arange(-2, 3)
    diff = np.abs(a - (b[:, None] + shifts[None, :]))
    d = 2.0 * np.arcsinh(diff / (2.0 * np.sqrt(a.real * b.real)[:, None]))
    return float(d.min())


def ladder_bound(z: complex, ladder: PunctureLadder) -> tuple:
    """Upper bound ``delta + pi / |log r_n|`` with ``r_n`` the smallest radius >= |z|.

    Returns ``(bound, case)`` where case is ``"circle"`` when ``|z|`` is on a
    rung and ``"annulus"`` otherwise; on a rung the delta term is dropped.
    """
    r = abs(complex(z))
    if not ladder.radii or r > ladder.radii[0] or r < ladder.radii[-1]:
        raise DomainError(f"|z| = {r!r} outside the ladder range", reason="outside-ladder-range")
    radii = np.asarray(ladder.radii)
    n = int(np.nonzero(radii >= r)[0][-1])
    r_n = float(radii[n])
    if r == r_n:
        return annulus_distance(r_n, 0.0), "circle"
    return annulus_distance(r_n, ladder.delta), "annulus"


def ladder_kappa(ladder: PunctureLadder, radius: float) -> KappaBound:
    """Contraction bound valid on the neighbourhood ``0 < |z| <= radius`` of the puncture."""
    radii = np.asarray(ladder.radii)
    if not ladder.radii or not radii[-1] <= radius <= radii[0]:
        raise DomainError(f"radius {radius!r} outside the ladder range",
                          reason="outside-ladder-range")
    r_m = float(radii[np.nonzero(radii >= radius)[0][-1]])
    return kappa_annulus(r_m, ladder.delta)


def density_bounds(z: complex, boundary_samples: Iterable[complex]) -> tuple:
    """Two-sided estimate ``(lo, hi)`` of the density of the complement of the samples.

    ``hi = 2 / dist`` comes from the disk inscribed around ``z``. ``lo`` is the
    Beardon-Pommerenke-type estimate ``1 / (dist * (HEMPEL_C + beta))`` with
    ``beta = min |log(dist / |b - a|)|`` over a nearest sample ``a`` and any
    other sample ``b``; it is 0 when only one sample is given.
    """
    pts = np.asarray(list(boundary_samples), dtype=complex)
    if pts.size == 0:
        raise DomainError("no boundary samples", reason="empty-boundary")
    z = complex(z)
    dists = np.abs(pts - z)
    dist = float(dists.min())
    if dist == 0.0:
        raise DomainError("z coincides with a boundary sample", reason="point-on-boundary")
    hi = 2.0 / dist
    nearest = pts[dists <= dist * (1.0 + 1e-12)]
    beta = math.inf
    for a in nearest:
        sep = np.abs(pts - a)
        sep = sep[sep > 0.0]
        if sep.size:
            beta = min(beta, float(np.min(np.abs(np.log(dist / sep)))))
    lo = 0.0 if math.isinf(beta) else 1.0 / (dist * (HEMPEL_C + beta))
    return lo, hi
