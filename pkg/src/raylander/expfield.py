"""The exponential family ``f(z) = lam * exp(z)``.

Its only singular value is the asymptotic value 0, so the post-singular set is
the closure of the forward orbit of 0. Inverse branches are explicit: branch
``j`` is ``Log(w / lam) + 2 pi i j`` with the principal logarithm.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

from scipy.optimize import brentq

from .errors import DomainError, HypothesisError, NonConvergenceError, RayOverflowError
from .hypgeo import half_plane_distance

TWO_PI_I = 2j * math.pi
# exp overflows a double just above 709.78
EXP_CEILING = 709.0


@dataclass(frozen=True)
class ExpMap:
    lam: complex

    def __post_init__(self):
        lam = complex(self.lam)
        if lam == 0 or not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
            raise DomainError(f"lambda must be finite and nonzero, got {self.lam!r}",
                              reason="invalid-lambda")
        object.__setattr__(self, "lam", lam)

    @property
    def log_lam(self) -> complex:
        return cmath.log(self.lam)

    def __call__(self, z: complex) -> complex:
        return map_eval(self, z)[0]


def map_eval(m: ExpMap, z: complex) -> tuple:
    """``(f(z), f'(z))``; the two coincide for the exponential family."""
    z = complex(z)
    if z.real + math.log(abs(m.lam)) > EXP_CEILING:
        raise RayOverflowError(f"f({z!r}) overflows; use log-space evaluation")
    value = m.lam * cmath.exp(z)
    return value, value


def iterate(m: ExpMap, z: complex, n: int) -> complex:
    for _ in range(n):
        z = map_eval(m, z)[0]
    return z


def inverse_branch(m: ExpMap, w: complex, j: int) -> complex:
    w = complex(w)
    if w == 0:
        raise DomainError("0 is an omitted value and has no preimage", reason="omitted-value")
    return cmath.log(w / m.lam) + TWO_PI_I * j


def orbit_multiplier(m: ExpMap, w: complex, k: int) -> tuple:
    """Return ``(f^k(w), (f^k)'(w))`` by the chain rule."""
    z, mult = complex(w), 1.0 + 0j
    for _ in range(k):
        z, dz = map_eval(m, z)
        mult *= dz
    return z, mult


def refine_periodic_point(m: ExpMap, k: int, seed: complex, max_iter: int = 100,
                          residual_tol: float = 1e-12) -> tuple:
    """Newton's method on ``f^k(w) - w``.

    Returns ``(w, multiplier)``. Iteration stops once the step is at roundoff
    level; the result is accepted if ``|f^k(w) - w| < residual_tol``. At a
    parabolic point the root is multiple and convergence is only linear, so the
    iteration budget is generous.
    """
    if k < 1:
        raise DomainError(f"period must be >= 1, got {k!r}")
    w = complex(seed)
    best_w, best_res = w, math.inf
    for _ in range(max_iter):
        fk, mult = orbit_multiplier(m, w, k)
        g = fk - w
        res = abs(g)
        if res < best_res:
            best_w, best_res = w, res
        if res == 0.0:
            break
        dg = mult - 1.0
        if dg == 0:
            break
        step = g / dg
        w = w - step
        if abs(step) <= 4e-16 * max(1.0, abs(w)):
            break
    fk, mult = orbit_multiplier(m, w, k)
    if abs(fk - w) < best_res:
        best_w, best_res = w, abs(fk - w)
    if not best_res < residual_tol:
        raise NonConvergenceError(f"Newton refinement stalled at residual {best_res:.3e}")
    return best_w, orbit_multiplier(m, best_w, k)[1]


def real_fixed_points(m: ExpMap) -> tuple:
    """The two real fixed points ``q_minus < 1 < q_plus`` for ``0 < lam < 1/e``."""
    lam = m.lam
    if lam.imag != 0.0 or not 0.0 < lam.real <= 1.0 / math.e:
        raise DomainError(f"lambda must be real in (0, 1/e), got {lam!r}")
    lam = lam.real
    if lam == 1.0 / math.e or 1.0 / math.e - lam < 1e-15:
        raise DomainError("both fixed points collapse to 1 at lambda = 1/e",
                          reason="parabolic-tangency")

    def g(x):
        return x - lam * math.exp(x)

    def newton_polish(x):
        for _ in range(5):
            e = lam * math.exp(x)
            dx = (x - e) / (1.0 - e)
            x -= dx
            if abs(dx) < 1e-16 * x:
                break
        return x

    # g(0) < 0, g(1) > 0 because lam*e < 1; g -> -inf for large x.
    hi = 2.0
    while g(hi) > 0:
        hi *= 2.0
    q_minus = newton_polish(brentq(g, 0.0, 1.0, xtol=1e-15))
    q_plus = newton_polish(brentq(g, 1.0, hi, xtol=1e-15))
    return q_minus, q_plus


@dataclass
class PostsingularData:
    orbit: list
    bounded: bool
    radius: float
    iterations: int
    status: str  # "bounded" | "unbounded" | "inconclusive"
    certificate: str  # "attracting" | "parabolic" | "escape" | "truncation"
    cycle: list = field(default_factory=list)
    cycle_multiplier: Optional[complex] = None

    def to_dict(self) -> dict:
        mult = self.cycle_multiplier
        return {
            "orbit": [{"re": z.real, "im": z.imag} for z in self.orbit],
            "bounded": self.bounded,
            "radius": self.radius,
            "iterations": self.iterations,
            "status": self.status,
            "certificate": self.certificate,
            "cycle": [{"re": z.real, "im": z.imag} for z in self.cycle],
            "cycle_multiplier": None if mult is None else {"re": mult.real, "im": mult.imag},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PostsingularData":
        mult = data.get("cycle_multiplier")
        return cls(
            orbit=[complex(p["re"], p["im"]) for p in data["orbit"]],
            bounded=bool(data["bounded"]),
            radius=float(data["radius"]),
            iterations=int(data["iterations"]),
            status=str(data["status"]),
            certificate=str(data["certificate"]),
            cycle=[complex(p["re"], p["im"]) for p in data.get("cycle", [])],
            cycle_multiplier=None if mult is None else complex(mult["re"], mult["im"]),
        )


MAX_CYCLE_PERIOD = 12
PARABOLIC_TOL = 1e-6


def _find_cycle(m: ExpMap, orbit: list):
    """Look for an attracting or parabolic cycle that the tail of ``orbit`` approaches."""
    z = orbit[-1]
    scale = max(1.0, abs(z))
    for p in range(1, MAX_CYCLE_PERIOD + 1):
        if len(orbit) < 3 * p + 1:
            break
        # The tail must be approaching a p-cycle: gaps between p-steps shrink.
        gaps = [abs(orbit[-1 - i] - orbit[-1 - i - p]) for i in range(p + 1)]
        if gaps[0] > 0.05 * scale or gaps[0] > gaps[-1] * (1 + 1e-9) and gaps[0] > 1e-13 * scale:
            continue
        try:
            w, mult = refine_periodic_point(m, p, z, max_iter=200, residual_tol=1e-10)
        except (NonConvergenceError, RayOverflowError):
            continue
        if abs(mult) > 1.0 + PARABOLIC_TOL:
            continue
        # the orbit tail must actually be near the refined cycle
        cycle = [w]
        for _ in range(p - 1):
            cycle.append(map_eval(m, cycle[-1])[0])
        if min(abs(z - c) for c in cycle) > max(10 * gaps[0], 1e-8 * scale, 0.05 * scale):
            continue
        kind = "attracting" if abs(mult) < 1.0 - PARABOLIC_TOL else "parabolic"
        return kind, cycle, mult
    return None


def postsingular(m: ExpMap, max_iter: int = 1000, escape_radius: float = 1e6) -> PostsingularData:
    """Iterate the singular value 0 and certify boundedness of its orbit.

    Boundedness is certified by locating an attracting or parabolic cycle that
    the orbit tail converges to; escape is certified once ``|z|`` exceeds
    ``escape_radius`` with growing real part. Anything else is reported as
    ``inconclusive`` with certificate ``truncation``.
    """
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    if not escape_radius > 0:
        raise DomainError("escape_radius must be positive")
    orbit = [0j]
    z = 0j
    for n in range(1, max_iter + 1):
        prev = z
        try:
            z = map_eval(m, z)[0]
        except RayOverflowError:
            return PostsingularData(orbit=orbit, bounded=False, radius=math.inf, iterations=n,
                                    status="unbounded", certificate="escape")
        orbit.append(z)
        if abs(z) > escape_radius and z.real > prev.real and z.real > 0:
            return PostsingularData(orbit=orbit, bounded=False, radius=math.inf, iterations=n,
                                    status="unbounded", certificate="escape")
        # Cheap early exit once an attracting cycle has numerically absorbed the orbit.
        if n >= 32 and n % 16 == 0 and abs(z - orbit[-2]) < 1e-14 * max(1.0, abs(z)):
            break
    found = _find_cycle(m, orbit)
    radius = max(abs(p) for p in orbit)
    if found is None:
        return PostsingularData(orbit=orbit, bounded=False, radius=radius,
                                iterations=len(orbit) - 1, status="inconclusive",
                                certificate="truncation")
    kind, cycle, mult = found
    radius = max(radius, max(abs(c) for c in cycle))
    return PostsingularData(orbit=orbit, bounded=True, radius=radius, iterations=len(orbit) - 1,
                            status="bounded", certificate=kind, cycle=cycle,
                            cycle_multiplier=mult)


def require_bounded(m: ExpMap, data: Optional[PostsingularData] = None) -> PostsingularData:
    data = postsingular(m) if data is None else data
    if data.status == "unbounded":
        raise HypothesisError("the post-singular orbit escapes to infinity",
                              reason="postsingular-unbounded")
    return data


@dataclass(frozen=True)
class TractChart:
    """Chart ``phi(z) = z + log lam - log R`` of the tract ``{Re z > a}``.

    ``phi`` maps the tract onto the right half-plane and ``exp(phi(z)) = f(z) / R``.
    """

    R: float
    a: float
    shift: complex

    @classmethod
    def for_map(cls, m: ExpMap, R: float) -> "TractChart":
        if not R > 0:
            raise DomainError(f"R must be positive, got {R!r}")
        return cls(R=float(R), a=math.log(R / abs(m.lam)), shift=m.log_lam - math.log(R))

    def __call__(self, z: complex) -> complex:
        return complex(z) + self.shift


@dataclass
class PreimageLadder:
    points: list
    delta: float
    deltas: list
    chart: TractChart
    js: list

    def to_dict(self) -> dict:
        return {
            "points": [{"j": j, "re": p.real, "im": p.imag} for j, p in zip(self.js, self.points)],
            "delta": self.delta,
            "deltas": list(self.deltas),
            "chart": {"R": self.chart.R, "a": self.chart.a,
                      "shift": {"re": self.chart.shift.real, "im": self.chart.shift.imag}},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PreimageLadder":
        ch = data["chart"]
        return cls(points=[complex(p["re"], p["im"]) for p in data["points"]],
                   delta=float(data["delta"]), deltas=[float(x) for x in data["deltas"]],
                   chart=TractChart(R=float(ch["R"]), a=float(ch["a"]),
                                    shift=complex(ch["shift"]["re"], ch["shift"]["im"])),
                   js=[int(p["j"]) for p in data["points"]])


def default_chart_radius(m: ExpMap, data: Optional[PostsingularData] = None) -> float:
    data = require_bounded(m, data)
    return 1.0 + data.radius


def preimage_ladder(m: ExpMap, z0: complex, j_range: range, R: Optional[float] = None) -> PreimageLadder:
    """Preimages ``w_j = Log(z0 / lam) + 2 pi i j`` of a point outside ``D(0, R)``.

    Their chart images are ``2 pi i`` translates in the right half-plane, so
    consecutive points are a constant hyperbolic distance apart there.
    """
    z0 = complex(z0)
    if R is None:
        R = default_chart_radius(m)
    if not abs(z0) > R:
        raise DomainError(f"z0 = {z0!r} lies in the closed disk of radius {R!r}",
                          reason="z0-inside-disk")
    chart = TractChart.for_map(m, R)
    js = list(j_range)
    if len(js) < 2:
        raise DomainError("need at least two branch indices")
    points = [inverse_branch(m, z0, j) for j in js]
    images = [chart(w) for w in points]
    deltas = [half_plane_distance(a, b) for a, b in zip(images, images[1:])]
    return PreimageLadder(points=points, delta=max(deltas), deltas=deltas, chart=chart, js=js)
