"""Periodic dynamic rays of ``lam * exp(z)``.

A ray with external address ``s = s_1 s_2 ...`` is parametrised by a potential
``t > 0`` and satisfies ``f(g_s(t)) = g_{shift(s)}(F(t))`` with the ray model
``F(t) = e^t - 1``. For large potentials ``g_s(t) ~ t - log lam + 2 pi i s_1``.
Points are computed by pulling that asymptotic reference back from a deep
level with the inverse branches ``s_n, ..., s_1``.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, NonConvergenceError, RayOverflowError
from .expfield import ExpMap, inverse_branch

# Potentials are only ever exponentiated below this value.
POTENTIAL_CEILING = 700.0
DEPTH_ENV = "RAYLANDER_MAX_DEPTH"
TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class ExternalAddress:
    entries: tuple
    period: int

    def __post_init__(self):
        entries = tuple(int(s) for s in self.entries)
        period = int(self.period)
        if period < 1:
            raise DomainError(f"period must be >= 1, got {period}")
        if not entries or period % len(entries):
            raise DomainError(f"{len(entries)} entries do not repeat with period {period}",
                              reason="bad-address")
        entries = entries * (period // len(entries))
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "period", period)

    @classmethod
    def parse(cls, text: str, period: Optional[int] = None) -> "ExternalAddress":
        try:
            entries = tuple(int(s) for s in str(text).replace(" ", "").split(",") if s != "")
        except ValueError:
            raise DomainError(f"cannot parse address {text!r}", reason="bad-address") from None
        return cls(entries, len(entries) if period is None else period)

    @property
    def bound(self) -> int:
        return max(abs(s) for s in self.entries)

    def entry(self, n: int) -> int:
        """The ``n``-th entry, 1-based: ``s_1`` selects the first strip."""
        return self.entries[(n - 1) % self.period]

    def conjugate(self) -> "ExternalAddress":
        return ExternalAddress(tuple(-s for s in self.entries), self.period)

    def shift(self) -> "ExternalAddress":
        return ExternalAddress(self.entries[1:] + self.entries[:1], self.period)


def ray_model(t: float, n: int = 1) -> float:
    """``F^n(t)`` for ``F(t) = e^t - 1``; negative ``n`` iterates ``log(1 + t)``."""
    t = float(t)
    if not t >= 0.0:
        raise DomainError(f"potential must be >= 0, got {t!r}")
    if n >= 0:
        for _ in range(n):
            if t > 709.0:
                raise RayOverflowError(f"F({t!r}) exceeds the floating-point range")
            t = math.expm1(t)
    else:
        for _ in range(-n):
            t = math.log1p(t)
    return t


def depth_cap() -> Optional[int]:
    value = os.environ.get(DEPTH_ENV)
    if value in (None, ""):
        return None
    try:
        cap = int(value)
    except ValueError:
        raise DomainError(f"{DEPTH_ENV}={value!r} is not an integer") from None
    if cap < 1:
        raise DomainError(f"{DEPTH_ENV} must be >= 1")
    return cap


def _deeper_reference(m: ExpMap, addr: ExternalAddress, level: int, t: float) -> complex:
    """Level-``level`` value of the reference placed one level deeper.

    The deeper reference sits at potential ``F(t)``, which may overflow, so its
    logarithm is formed directly: ``log(F(t) + c) = log F(t) + log1p(c / F(t))``.
    """
    c = TWO_PI_I * addr.entry(level + 2) - m.log_lam
    if t <= POTENTIAL_CEILING:
        big = math.expm1(t)
        log_big = math.log(big)
        ratio = c / big
    else:
        log_big = t + math.log(-math.expm1(-t))
        ratio = c * math.exp(-t) / -math.expm1(-t)
    # principal Log(w / lam), matching inverse_branch
    log_w = log_big + _log1p_complex(ratio) - m.log_lam
    if not -math.pi < log_w.imag <= math.pi:
        log_w -= TWO_PI_I * math.floor((log_w.imag + math.pi) / (2.0 * math.pi))
        if log_w.imag <= -math.pi:
            log_w += TWO_PI_I
    return log_w + TWO_PI_I * addr.entry(level + 1)


def _log1p_complex(x: complex) -> complex:
    if abs(x) < 1e-4:
        return x - x * x / 2 + x ** 3 / 3
    return cmath.log(1.0 + x)


def _reference(m: ExpMap, addr: ExternalAddress, level: int, t: float) -> complex:
    return t - m.log_lam + TWO_PI_I * addr.entry(level + 1)


@dataclass(frozen=True)
class TraceResult:
    z: complex
    depth: int
    depth_difference: float


def trace_ray_info(m: ExpMap, addr: ExternalAddress, t: float, depth: Optional[int] = None,
                   tol: float = 1e-10) -> TraceResult:
    """Trace ``g_s(t)`` and report the successive-depth difference.

    The deepest usable level ``D`` is the first whose potential exceeds the
    ceiling (or the requested/environment depth cap). The reference at ``D``
    and the reference at ``D + 1`` (in log space) are pulled back together; the
    two coalesce quickly because inverse branches contract strongly at high
    potentials. Once they agree, and the pulled-back point repeats after one
    period of the address, the remaining levels are skipped exactly.
    """
    t = float(t)
    if not t > 0.0 or not math.isfinite(t):
        raise DomainError(f"potential must be positive and finite, got {t!r}")
    cap = depth_cap()
    if depth is not None:
        if depth < 0:
            raise DomainError("depth must be >= 0")
        cap = depth if cap is None else min(cap, depth)
    level, pot = 0, t
    while pot <= POTENTIAL_CEILING and (cap is None or level < cap):
        pot = math.expm1(pot)
        level += 1
    k = addr.period
    z = _deeper_reference(m, addr, level, pot)
    alt = _reference(m, addr, level, pot)
    history: deque = deque(maxlen=k)
    j = level
    while j > 0:
        s = addr.entry(j)
        z = inverse_branch(m, z, s)
        if alt is not None:
            alt = inverse_branch(m, alt, s)
            if alt == z:
                alt = None
        j -= 1
        if alt is None:
            if len(history) == k and history[0] == z:
                # z at level j equals z at level j + k: the rest is periodic.
                j %= k
                history.clear()
            history.append(z)
    diff = 0.0 if alt is None else abs(alt - z)
    if not diff <= tol:
        raise NonConvergenceError(
            f"successive-depth difference {diff:.3e} exceeds tol {tol:.1e} at depth {level}")
    return TraceResult(z=z, depth=level, depth_difference=diff)


def trace_ray(m: ExpMap, addr: ExternalAddress, t: float, depth: Optional[int] = None,
              tol: float = 1e-10) -> complex:
    return trace_ray_info(m, addr, t, depth, tol).z


@dataclass
class RaySegment:
    ts: list
    zs: list
    address: ExternalAddress
    lam: complex

    def __post_init__(self):
        if len(self.ts) != len(self.zs) or len(self.ts) < 2:
            raise DomainError("a ray segment needs at least two (t, z) samples")
        if any(b <= a for a, b in zip(self.ts, self.ts[1:])):
            raise DomainError("potentials must be strictly increasing")

    @property
    def t_lo(self) -> float:
        return self.ts[0]

    @property
    def t_hi(self) -> float:
        return self.ts[-1]

    @property
    def points(self) -> np.ndarray:
        return np.asarray(self.zs, dtype=complex)

    def to_dict(self) -> dict:
        return {
            "lambda": {"re": self.lam.real, "im": self.lam.imag},
            "address": list(self.address.entries),
            "period": self.address.period,
            "t_lo": self.t_lo,
            "t_hi": self.t_hi,
            "samples": [{"t": t, "re": z.real, "im": z.imag} for t, z in zip(self.ts, self.zs)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RaySegment":
        lam = complex(data["lambda"]["re"], data["lambda"]["im"])
        samples = data["samples"]
        return cls(ts=[float(s["t"]) for s in samples],
                   zs=[complex(s["re"], s["im"]) for s in samples],
                   address=ExternalAddress(tuple(data["address"]), int(data["period"])),
                   lam=lam)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "re", "im"])
        for t, z in zip(self.ts, self.zs):
            writer.writerow([f"{t:.15g}", f"{z.real:.15g}", f"{z.imag:.15g}"])
        return buf.getvalue()


# Split when the traced midpoint deviates from the chord by more than this
# fraction of the chord, or the chord exceeds MAX_STEP_REL * (1 + |z|).
MIDPOINT_DEVIATION = 1e-3
MAX_STEP_REL = 0.5
MAX_SAMPLES = 4000


def _mid_potential(a: float, b: float) -> float:
    return math.sqrt(a * b) if b > 4.0 * a else 0.5 * (a + b)


def fundamental_segment(m: ExpMap, addr: ExternalAddress, t: float, samples: int = 2,
                        refine: bool = True, tol: float = 1e-10) -> RaySegment:
    """Sample ``g[t, F^k(t)]`` as a polyline.

    ``samples`` potentials are spread over the interval (geometrically when it
    spans more than a factor of 4) and then intervals are bisected while the
    traced midpoint deviates from the chord by more than ``MIDPOINT_DEVIATION``
    of the chord length, or the chord is longer than ``MAX_STEP_REL`` times the
    local scale ``1 + |z|``.
    """
    if samples < 2:
        raise DomainError("samples must be >= 2")
    t = float(t)
    t_hi = ray_model(t, addr.period)
    if t_hi > 4.0 * t:
        ts = list(np.geomspace(t, t_hi, samples))
    else:
        ts = list(np.linspace(t, t_hi, samples))
    ts[0], ts[-1] = t, t_hi
    zs = [trace_ray(m, addr, s, tol=tol) for s in ts]
    if not refine:
        return RaySegment(ts=ts, zs=zs, address=addr, lam=m.lam)

    out_t, out_z = [ts[0]], [zs[0]]
    stack = list(zip(ts[1:], zs[1:]))[::-1]
    ta, za = ts[0], zs[0]
    while stack:
        tb, zb = stack[-1]
        chord = abs(zb - za)
        tm = _mid_potential(ta, tb)
        split = False
        if len(out_t) + len(stack) < MAX_SAMPLES and ta < tm < tb and tb - ta > 1e-12 * tb:
            if chord > MAX_STEP_REL * (1.0 + min(abs(za), abs(zb))):
                split = True
                zm = trace_ray(m, addr, tm, tol=tol)
            else:
                zm = trace_ray(m, addr, tm, tol=tol)
                split = abs(zm - 0.5 * (za + zb)) > MIDPOINT_DEVIATION * chord
        if split:
            stack.append((tm, zm))
            continue
        stack.pop()
        out_t.append(tb)
        out_z.append(zb)
        ta, za = tb, zb
    return RaySegment(ts=out_t, zs=out_z, address=addr, lam=m.lam)


@dataclass
class DiamStarEstimate:
    t: float
    value: float
    boundary_samples_used: int
    flags: list = field(default_factory=lambda: ["surrogate", "sampled-sup"])

    def to_dict(self) -> dict:
        return {"t": self.t, "value": self.value,
                "boundary_samples_used": self.boundary_samples_used, "flags": list(self.flags)}

    @classmethod
    def from_dict(cls, data: dict) -> "DiamStarEstimate":
        return cls(t=float(data["t"]), value=float(data["value"]),
                   boundary_samples_used=int(data["boundary_samples_used"]),
                   flags=list(data.get("flags", [])))


class BoundarySamples:
    """Point cloud approximating the post-singular set, with nearest-distance queries."""

    def __init__(self, points: Iterable[complex]):
        pts = np.asarray(list(points), dtype=complex).ravel()
        if pts.size == 0:
            raise DomainError("no boundary samples", reason="empty-boundary")
        xy = np.unique(np.column_stack([pts.real, pts.imag]), axis=0)
        self.xy = xy
        self.tree = cKDTree(xy)

    def __len__(self) -> int:
        return len(self.xy)

    def dist(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        d, _ = self.tree.query(np.column_stack([z.real.ravel(), z.imag.ravel()]))
        return d.reshape(z.shape)

    def edge_dist(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Euclidean distance from the sample cloud to each segment ``[a_i, b_i]``."""
        p = self.xy[:, 0] + 1j * self.xy[:, 1]
        ab = (b - a)[:, None]
        ap = p[None, :] - a[:, None]
        denom = np.abs(ab) ** 2
        s = np.where(denom > 0, (ap * ab.conj()).real / np.where(denom > 0, denom, 1.0), 0.0)
        s = np.clip(s, 0.0, 1.0)
        return np.abs(ap - s * ab).min(axis=1)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(6)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS
# Sub-edge length relative to the distance to the nearest boundary sample.
_SUBSTEP = 0.25


def upper_length(zs: Sequence[complex], boundary: BoundarySamples) -> np.ndarray:
    """Length of each polyline edge in the upper density ``2 / dist(z, boundary)``.

    Edges are cut into pieces no longer than a quarter of the local distance
    to the boundary, each integrated with 6-point Gauss-Legendre.
    """
    z = np.asarray(zs, dtype=complex)
    a, b = z[:-1], z[1:]
    dist_ends = np.minimum(boundary.dist(a), boundary.dist(b))
    edge = np.abs(b - a)
    pieces = np.clip(np.ceil(edge / (_SUBSTEP * np.maximum(dist_ends, 1e-300))), 1, 4096).astype(int)
    out = np.empty(len(a))
    for i, (za, zb, n) in enumerate(zip(a, b, pieces)):
        s = (np.arange(n)[:, None] + _GL_NODES[None, :]) / n
        pts = za + s * (zb - za)
        dens = 2.0 / boundary.dist(pts)
        out[i] = edge[i] / n * float((dens * _GL_WEIGHTS[None, :]).sum())
    return out


def diamstar_upper(seg: RaySegment, boundary_samples) -> DiamStarEstimate:
    """Upper bound for the hyperbolic ``diam*`` of a fundamental segment.

    The geodesic joining two ray points in the ray's homotopy class is no
    longer than the ray polyline itself, and the upper density ``2 / dist``
    dominates the true density of the complement of the post-singular set, so
    the largest upper-density length of a sampled sub-arc bounds ``diam*``.
    Sub-arc lengths are additive, so that maximum is attained by the whole
    polyline. Both approximations (sampled boundary, sampled sub-arcs) are
    reported in ``flags``.
    """
    boundary = boundary_samples if isinstance(boundary_samples, BoundarySamples) \
        else BoundarySamples(boundary_samples)
    z = seg.points
    hit = boundary.edge_dist(z[:-1], z[1:])
    if float(hit.min()) <= 1e-14 * max(1.0, float(np.abs(boundary.xy).max())):
        raise DomainError("ray segment meets the post-singular samples (tracing fault)",
                          reason="segment-hits-boundary")
    lengths = upper_length(z, boundary)
    cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
    value = float(cumulative[-1] - cumulative[0])
    return DiamStarEstimate(t=seg.t_lo, value=value, boundary_samples_used=len(boundary))


def m_surrogate(m: ExpMap, addr: ExternalAddress, t: float, boundary_samples,
                grid: int = 9) -> float:
    """``max diam*`` over fundamental segments starting in ``[t, F^k(t)]`` (sampled)."""
    boundary = boundary_samples if isinstance(boundary_samples, BoundarySamples) \
        else BoundarySamples(boundary_samples)
    t_hi = ray_model(t, addr.period)
    taus = np.geomspace(t, t_hi, grid) if t_hi > 4.0 * t else np.linspace(t, t_hi, grid)
    return max(diamstar_upper(fundamental_segment(m, addr, float(tau)), boundary).value
               for tau in taus)
