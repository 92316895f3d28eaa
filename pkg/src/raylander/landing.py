"""Landing of periodic rays by iterated pullback of fundamental segments.

A fundamental segment ``g[t, F^k(t)]`` is pulled back along the ray with the
``k`` inverse branches named by the address. The pulled-back segments shrink
to the landing point; their upper-density lengths give a decreasing chain of
hyperbolic bounds. The limit is refined with Newton's method and classified by
the modulus of its multiplier.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BranchMismatchError, DomainError, NonContractionError, NonConvergenceError
from .expfield import (ExpMap, PostsingularData, inverse_branch, iterate, refine_periodic_point,
                       require_bounded)
from .rays import (BoundarySamples, ExternalAddress, RaySegment, diamstar_upper,
                   fundamental_segment, ray_model)

SETTLING = 5
PARABOLIC_BUDGET_FACTOR = 100
# Diameter ratios above this over the recent tail count as sub-geometric decay.
SUBGEOMETRIC_RATIO = 0.9
ENDPOINT_RTOL = 1e-10

REPELLING = "repelling"
PARABOLIC = "parabolic"
INVALID_ATTRACTING = "invalid_attracting"


def classify(multiplier: complex, tol: float = 1e-6) -> str:
    mod = abs(complex(multiplier))
    if mod > 1.0 + tol:
        return REPELLING
    if mod < 1.0 - tol:
        return INVALID_ATTRACTING
    return PARABOLIC


def pull_back_point(m: ExpMap, addr: ExternalAddress, z: complex) -> complex:
    """One period of pullback: ``L_{s_1} o ... o L_{s_k}``."""
    for j in range(addr.period, 0, -1):
        z = inverse_branch(m, z, addr.entry(j))
    return z


def pullback_segment(m: ExpMap, addr: ExternalAddress, seg: RaySegment) -> RaySegment:
    """Pull a segment on ``[t, F^k(t)]`` back to ``[F^{-k}(t), t]``.

    The new upper endpoint must reproduce the old lower endpoint; a mismatch
    means the branches do not follow the ray.
    """
    k = addr.period
    zs = [pull_back_point(m, addr, z) for z in seg.zs]
    ts = [ray_model(t, -k) for t in seg.ts]
    gap = abs(zs[-1] - seg.zs[0])
    if gap > ENDPOINT_RTOL * max(1.0, abs(seg.zs[0])):
        raise BranchMismatchError(
            f"pulled-back endpoint misses the previous segment by {gap:.3e}")
    ts[-1] = seg.ts[0]
    return RaySegment(ts=ts, zs=zs, address=addr, lam=m.lam)


def euclidean_diameter(zs) -> float:
    z = np.asarray(zs, dtype=complex)
    return float(np.abs(z[:, None] - z[None, :]).max())


@dataclass
class LandingCertificate:
    lam: complex
    address: ExternalAddress
    w: complex
    residual: float
    multiplier: complex
    classification: str
    diameters: list
    hyp_bounds: list
    ratios: list
    pullbacks_used: int
    surrogate_flags: list = field(default_factory=list)
    decay: str = "geometric"
    convergence_exponent: Optional[float] = None
    decay_rate: Optional[float] = None
    endpoint_gaps: list = field(default_factory=list)

    @property
    def period(self) -> int:
        return self.address.period

    def to_dict(self) -> dict:
        return {
            "lambda": {"re": self.lam.real, "im": self.lam.imag},
            "address": list(self.address.entries),
            "period": self.address.period,
            "w": {"re": self.w.real, "im": self.w.imag},
            "residual": self.residual,
            "multiplier": {"re": self.multiplier.real, "im": self.multiplier.imag},
            "classification": self.classification,
            "diameters": list(self.diameters),
            "hyp_bounds": list(self.hyp_bounds),
            "ratios": list(self.ratios),
            "pullbacks_used": self.pullbacks_used,
            "surrogate_flags": list(self.surrogate_flags),
            "decay": self.decay,
            "convergence_exponent": self.convergence_exponent,
            "decay_rate": self.decay_rate,
            "endpoint_gaps": list(self.endpoint_gaps),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LandingCertificate":
        def cx(d):
            return complex(float(d["re"]), float(d["im"]))

        return cls(
            lam=cx(data["lambda"]),
            address=ExternalAddress(tuple(data["address"]), int(data["period"])),
            w=cx(data["w"]),
            residual=float(data["residual"]),
            multiplier=cx(data["multiplier"]),
            classification=str(data["classification"]),
            diameters=[float(x) for x in data["diameters"]],
            hyp_bounds=[float(x) for x in data["hyp_bounds"]],
            ratios=[float(x) for x in data["ratios"]],
            pullbacks_used=int(data["pullbacks_used"]),
            surrogate_flags=list(data.get("surrogate_flags", [])),
            decay=str(data.get("decay", "geometric")),
            convergence_exponent=data.get("convergence_exponent"),
            decay_rate=data.get("decay_rate"),
            endpoint_gaps=[float(x) for x in data.get("endpoint_gaps", [])],
        )

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def boundary_from_postsingular(data: PostsingularData) -> BoundarySamples:
    return BoundarySamples(list(data.orbit) + list(data.cycle))


def _is_subgeometric(diameters: list, window: int = 10) -> bool:
    if len(diameters) < window + 1:
        return False
    tail = np.asarray(diameters[-window - 1:])
    ratios = tail[1:] / tail[:-1]
    return bool(np.all(ratios > SUBGEOMETRIC_RATIO) and np.all(ratios < 1.0))


def _fit_exponent(diameters: list) -> Optional[float]:
    """Slope ``p`` of ``diam_n ~ C n^{-p}`` fitted on the second half of the run."""
    n = len(diameters)
    if n < 8:
        return None
    idx = np.arange(n // 2, n)
    x = np.log(idx + 1.0)
    y = np.log(np.asarray(diameters)[idx])
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def land_ray(m: ExpMap, addr: ExternalAddress, t0: float = 1.0, tol: float = 1e-10,
             max_pullbacks: int = 200, class_tol: float = 1e-6,
             postsingular_data: Optional[PostsingularData] = None) -> LandingCertificate:
    """Pull back a fundamental segment until it collapses and certify its limit.

    Stops once the Euclidean diameter of the segment drops below ``tol``. If
    ``max_pullbacks`` is exhausted while the diameters decay sub-geometrically
    (the parabolic regime) the budget grows by ``PARABOLIC_BUDGET_FACTOR``.
    The limit is refined by Newton's method on ``f^k(w) = w``.
    """
    if not t0 > 0:
        raise DomainError(f"t0 must be positive, got {t0!r}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    data = require_bounded(m, postsingular_data)
    flags = ["diamstar-surrogate", "diamstar-sampled-sup", "boundary-sampled"]
    if data.status != "bounded":
        flags.append("postsingular-inconclusive")
    boundary = boundary_from_postsingular(data)
    k = addr.period

    seg = fundamental_segment(m, addr, t0)
    diameters, hyp = [], []
    budget = max_pullbacks
    used = 0
    while True:
        diameters.append(euclidean_diameter(seg.zs))
        hyp.append(diamstar_upper(seg, boundary).value)
        if diameters[-1] < tol:
            break
        if used >= budget:
            if budget == max_pullbacks and _is_subgeometric(diameters):
                budget = max_pullbacks * PARABOLIC_BUDGET_FACTOR
                flags.append("parabolic-budget")
            else:
                raise NonConvergenceError(
                    f"segment diameter {diameters[-1]:.3e} above tol after {used} pullbacks")
        if used > SETTLING and len(diameters) > 2 * SETTLING and \
                min(diameters[-SETTLING:]) > diameters[-2 * SETTLING]:
            raise NonContractionError("segment diameters stopped shrinking")
        seg = pullback_segment(m, addr, seg)
        used += 1

    ratios = [b / a for a, b in zip(hyp, hyp[1:])]
    bad = [r for r in ratios[SETTLING:] if not r < 1.0]
    if bad:
        raise NonContractionError(f"hyperbolic bound ratios {bad[:3]} not below 1 after settling")

    seed = seg.zs[0]
    w, mult = refine_periodic_point(m, k, seed)
    residual = abs(iterate(m, w, k) - w)

    diam_ratios = np.asarray(diameters[1:]) / np.asarray(diameters[:-1])
    tail = diam_ratios[SETTLING:] if len(diam_ratios) > SETTLING else diam_ratios
    decay_rate = float(np.median(tail[-10:])) if len(tail) else None
    subgeometric = "parabolic-budget" in flags or (decay_rate is not None and
                                                   decay_rate > SUBGEOMETRIC_RATIO)
    gaps = [abs(seg.zs[0] - w), abs(seg.zs[-1] - w)]
    if subgeometric:
        exponent = _fit_exponent(diameters)
        if exponent is None or exponent <= 1.0:
            raise NonConvergenceError(f"sub-geometric decay exponent {exponent} too small")
        # tail of a sum of n^{-p} terms ~ diam_n * n / (p - 1)
        allowed = 2.0 * diameters[-1] * len(diameters) / (exponent - 1.0) + 2.0 * tol
    else:
        exponent = None
        allowed = 2.0 * tol
    if max(gaps) > allowed:
        raise NonConvergenceError(
            f"segment endpoints at {max(gaps):.3e} from the refined point (allowed {allowed:.3e})")

    return LandingCertificate(
        lam=m.lam, address=addr, w=w, residual=residual, multiplier=mult,
        classification=classify(mult, class_tol), diameters=diameters, hyp_bounds=hyp,
        ratios=ratios, pullbacks_used=used, surrogate_flags=flags,
        decay="sub-geometric" if subgeometric else "geometric",
        convergence_exponent=exponent, decay_rate=decay_rate, endpoint_gaps=gaps)
