"""Property suites runnable from the command line (``raylander verify``)."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from . import bounds, hypgeo
from .errors import HypothesisError
from .expfield import ExpMap, postsingular, preimage_ladder, real_fixed_points, require_bounded
from .hypgeo import ModelDomain
from .landing import boundary_from_postsingular, land_ray
from .rays import ExternalAddress, m_surrogate

SEED = 20240611


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"suite": self.suite, "name": self.name, "passed": self.passed,
                "detail": self.detail, "seconds": self.seconds}


def _kappa_grid() -> np.ndarray:
    return np.linspace(0.0, 30.0, 10001)[1:-1]


def suite_contraction():
    grid = _kappa_grid()
    kap = np.array([bounds.kappa_contraction(d) for d in grid])
    deficit = np.array([bounds.kappa_deficit(d) for d in grid])
    yield "kappa(0) limit", abs(bounds.kappa_contraction(1e-12)) < 1e-10, \
        f"kappa(1e-12) = {bounds.kappa_contraction(1e-12):.3e}"
    ref = math.sinh(1.0) * -math.log(math.tanh(0.5))
    yield "kappa(1) vs sinh form", abs(bounds.kappa_contraction(1.0) - ref) < 1e-6, \
        f"kappa(1) = {bounds.kappa_contraction(1.0):.9f}, sinh form {ref:.9f}"
    yield "kappa < 1 on grid", bool(np.all(deficit > 0) and np.all(kap <= 1.0)), \
        f"min deficit {deficit.min():.3e}"
    yield "kappa strictly increasing", bool(np.all(np.diff(deficit) < 0) and
                                            np.all(np.diff(kap) >= 0)), ""
    ident = max(abs(bounds.kappa_contraction(d) - bounds.puncture_ratio(math.tanh(0.5 * d)))
                for d in grid)
    yield "kappa = puncture_ratio(tanh(d/2))", ident < 1e-12, f"max error {ident:.3e}"

    rng = np.random.default_rng(SEED)
    r = rng.uniform(1e-6, 0.999, 1000)
    th = rng.uniform(-math.pi, math.pi, 1000)
    zs = r * np.exp(1j * th)
    ok = all(hypgeo.density(ModelDomain.PUNCTURED_UNIT_DISK, z) >
             hypgeo.density(ModelDomain.UNIT_DISK, z) for z in zs)
    yield "comparison principle (punctured vs disk)", ok, "1000 points"

    ws = -rng.uniform(1e-3, 20.0, 1000) + 1j * rng.uniform(-50, 50, 1000)
    err = max(abs(hypgeo.density(ModelDomain.PUNCTURED_UNIT_DISK, np.exp(w)) * abs(np.exp(w))
                  * abs(w.real) - 1.0) for w in ws)
    yield "covering isometry", err < 1e-12, f"max relative error {err:.3e}"

    worst = 0.0
    for n in range(2, 40):
        x = math.exp(-n)
        # any y with d(x, y) <= 1 has |Re log y| >= n / e
        eps = math.exp(-n / math.e)
        for _ in range(20):
            y = x * math.exp(rng.uniform(-0.9, 0.9) * n / 3) * np.exp(1j * rng.uniform(-3, 3))
            if abs(y) < 1 and hypgeo.distance(ModelDomain.PUNCTURED_UNIT_DISK, x, y) <= 1.0:
                worst = max(worst, abs(y) / eps)
    yield "bounded distance forces co-convergence", worst <= 1.0 + 1e-12, f"max |y|/eps {worst:.3f}"


def suite_annulus():
    ladder = bounds.PunctureLadder.geometric(math.pi, 60)
    yield "ladder delta = ln 2", abs(ladder.delta - math.log(2.0)) < 1e-9, f"delta = {ladder.delta!r}"
    rng = np.random.default_rng(SEED + 1)
    lo, hi = math.log(ladder.radii[-1]), math.log(ladder.radii[0])
    worst = -math.inf
    for _ in range(1000):
        z = math.exp(rng.uniform(lo, hi)) * np.exp(1j * rng.uniform(-math.pi, math.pi))
        b, _case = bounds.ladder_bound(z, ladder)
        worst = max(worst, bounds.distance_to_ladder(z, ladder) - b)
    yield "distance to ladder within bound", worst <= 1e-9, f"max excess {worst:.3e}"
    circ = max(abs(hypgeo.circle_length_punctured(r) + 2 * math.pi / math.log(r))
               for r in ladder.radii)
    yield "circle lengths", circ == 0.0, ""
    kb = bounds.kappa_annulus(math.exp(-math.pi), 0.0)
    yield "annulus kappa < 1", kb.kappa < 1 and kb.provenance == "prop27", f"kappa = {kb.kappa:.9f}"


def suite_surrogate():
    m = ExpMap(0.2)
    addr = ExternalAddress((0,), 1)
    boundary = boundary_from_postsingular(require_bounded(m))
    ts = [0.25, 0.5, 1.0, 2.0, 4.0]
    values = [m_surrogate(m, addr, t, boundary) for t in ts]
    ok = all(math.isfinite(v) for v in values) and all(b >= a for a, b in zip(values, values[1:]))
    yield "M surrogate nondecreasing (surrogate)", ok, \
        ", ".join(f"M({t})={v:.6g}" for t, v in zip(ts, values))


def _geodesic_length(a: complex, b: complex) -> float:
    """Length of the half-plane geodesic between two points on a vertical line."""
    x, half = a.real, 0.5 * abs(b.imag - a.imag)
    th = math.atan2(half, x)
    # z(s) = i*c + r e^{is}: density 1/(r cos s) times |dz| = r ds
    val, _ = quad(lambda s: 1.0 / math.cos(s), -th, th, epsabs=1e-14, epsrel=1e-13)
    return val


def suite_tract_ladder():
    m = ExpMap(0.2)
    lad = preimage_ladder(m, 3.0, range(0, 11), R=1.0)
    expected = math.acosh(1.0 + 2.0 * math.pi ** 2 / math.log(3.0) ** 2)
    yield "delta closed form", abs(lad.delta - expected) < 1e-6, f"delta = {lad.delta:.9f}"
    spread = max(lad.deltas) - min(lad.deltas)
    yield "delta independent of j", spread <= 1e-12, f"spread {spread:.3e}"
    img = [lad.chart(w) for w in lad.points]
    geo = _geodesic_length(img[0], img[1])
    yield "delta vs geodesic integration", abs(geo - lad.delta) < 1e-9, f"quadrature {geo:.12f}"


def suite_landing():
    m = ExpMap(0.2)
    q_minus, q_plus = real_fixed_points(m)
    cert = land_ray(m, ExternalAddress((0,), 1), 1.0, 1e-10)
    yield "repelling fixed ray", abs(cert.w - q_plus) < 1e-8 and cert.classification == "repelling", \
        f"w = {cert.w.real:.12f}"
    cert2 = land_ray(m, ExternalAddress((0, 1), 2), 1.0, 1e-10)
    yield "period-2 ray", cert2.residual < 1e-10 and abs(m(cert2.w) - cert2.w) > 1e-6 \
        and abs(cert2.multiplier) > 1, f"w = {cert2.w:.12f}"
    cert3 = land_ray(ExpMap(1 / math.e), ExternalAddress((0,), 1), 1.0, 1e-6)
    yield "parabolic fixed ray", abs(cert3.w - 1) < 1e-4 and cert3.classification == "parabolic", \
        f"w = {cert3.w.real:.9f}, exponent {cert3.convergence_exponent}"
    try:
        land_ray(ExpMap(3.0), ExternalAddress((0,), 1), 1.0, 1e-10,
                 postsingular_data=postsingular(ExpMap(3.0), 100, 1e6))
        rejected = False
    except HypothesisError:
        rejected = True
    yield "unbounded post-singular set rejected", rejected, ""


SUITES: dict = {
    "lemma22": suite_contraction,
    "prop27": suite_annulus,
    "lemma31": suite_surrogate,
    "lemma41": suite_tract_ladder,
    "landing": suite_landing,
}


def run_suite(name: str) -> list:
    names = list(SUITES) if name == "all" else [name]
    results = []
    for suite in names:
        gen: Callable = SUITES[suite]
        start = time.perf_counter()
        for check_name, passed, detail in gen():
            now = time.perf_counter()
            results.append(Check(suite, check_name, bool(passed), detail, now - start))
            start = now
    return results
