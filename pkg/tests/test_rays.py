import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from raylander.errors import DomainError, NonConvergenceError, RayOverflowError
from raylander.expfield import ExpMap, inverse_branch, postsingular
from raylander.landing import boundary_from_postsingular
from raylander.rays import (BoundarySamples, DiamStarEstimate, ExternalAddress, RaySegment,
                            diamstar_upper, fundamental_segment, m_surrogate, ray_model,
                            trace_ray, trace_ray_info)

M = ExpMap(0.2)
FIXED = ExternalAddress((0,), 1)
PAIR = ExternalAddress((0, 1), 2)


def test_address_parse_and_ops():
    a = ExternalAddress.parse("0, 1, -2")
    assert a.entries == (0, 1, -2) and a.period == 3
    assert a.entry(1) == 0 and a.entry(4) == 0 and a.entry(3) == -2
    assert a.conjugate().entries == (0, -1, 2)
    assert a.shift().entries == (1, -2, 0)
    assert a.bound == 2
    assert ExternalAddress.parse("1", 3).entries == (1, 1, 1)
    for text, period in (("x", None), ("1,2", 3), ("", None), ("1", 0)):
        with pytest.raises(DomainError):
            ExternalAddress.parse(text, period)


def test_ray_model():
    assert ray_model(1.0, 2) == pytest.approx(math.expm1(math.expm1(1.0)), rel=1e-15)
    assert ray_model(1.0, 2) == pytest.approx(4.574941525, abs=1e-9)
    assert ray_model(ray_model(0.3, 3), -3) == pytest.approx(0.3, rel=1e-13)
    with pytest.raises(RayOverflowError):
        ray_model(800.0, 1)
    with pytest.raises(DomainError):
        ray_model(-1.0)


def test_trace_asymptotics():
    # far out the ray is close to t - log lam + 2 pi i s_1
    t = 30.0
    z = trace_ray(M, ExternalAddress((2,), 1), t)
    assert z == pytest.approx(t - math.log(0.2) + 4j * math.pi, abs=1e-6)


@given(st.floats(0.05, 1.0))
def test_functional_equation(t):
    # f(g_s(t)) = g_{shift s}(F(t))
    for addr in (FIXED, PAIR, ExternalAddress((1, -1, 0), 3)):
        if ray_model(t, 1) > 50:
            continue
        lhs = M(trace_ray(M, addr, t))
        rhs = trace_ray(M, addr.shift(), ray_model(t, 1))
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


@given(st.floats(0.05, 5.0))
def test_conjugation_symmetry(t):
    z = trace_ray(M, PAIR, t)
    zc = trace_ray(M, PAIR.conjugate(), t)
    assert zc == pytest.approx(z.conjugate(), abs=1e-9)


def test_fixed_ray_is_real_and_lands():
    zs = [trace_ray(M, FIXED, t) for t in (2.0, 1.0, 0.1, 1e-3)]
    assert all(abs(z.imag) < 1e-12 for z in zs)
    assert all(z.real >= 2.5426413577735265 for z in zs)
    assert zs[0].real > zs[1].real > zs[2].real
    assert trace_ray(M, FIXED, 1e-6) == pytest.approx(2.5426413577735265, abs=1e-5)


def test_trace_depth_difference_and_cap(monkeypatch):
    info = trace_ray_info(M, PAIR, 0.5)
    assert info.depth_difference <= 1e-10
    assert ray_model(0.5, info.depth) > 700
    monkeypatch.setenv("RAYLANDER_MAX_DEPTH", "3")
    assert trace_ray_info(M, FIXED, 0.5, tol=1.0).depth == 3
    with pytest.raises(NonConvergenceError):
        trace_ray_info(M, FIXED, 0.5, tol=1e-10)
    monkeypatch.setenv("RAYLANDER_MAX_DEPTH", "zero")
    with pytest.raises(DomainError):
        trace_ray(M, FIXED, 1.0)


def test_trace_rejects_bad_potential():
    for t in (0.0, -1.0, math.inf):
        with pytest.raises(DomainError):
            trace_ray(M, FIXED, t)


def test_fundamental_segment_endpoints():
    seg = fundamental_segment(M, PAIR, 1.0)
    assert seg.t_lo == 1.0 and seg.t_hi == pytest.approx(ray_model(1.0, 2))
    assert seg.zs[0] == pytest.approx(trace_ray(M, PAIR, 1.0))
    assert seg.zs[-1] == pytest.approx(trace_ray(M, PAIR, ray_model(1.0, 2)))
    # pulling the upper endpoint back one period returns the lower endpoint
    z = seg.zs[-1]
    for j in (2, 1):
        z = inverse_branch(M, z, PAIR.entry(j))
    assert z == pytest.approx(seg.zs[0], abs=1e-12)
    # refinement keeps chords short relative to the curve
    pts = seg.points
    assert np.all(np.abs(np.diff(pts)) <= 0.5 * (1 + np.minimum(abs(pts[:-1]), abs(pts[1:]))) + 1e-12)


def test_segment_round_trips():
    seg = fundamental_segment(M, FIXED, 1.0)
    again = RaySegment.from_dict(json.loads(json.dumps(seg.to_dict())))
    assert again.ts == seg.ts and again.zs == seg.zs and again.address == seg.address
    lines = seg.to_csv().strip().splitlines()
    assert lines[0] == "t,re,im" and len(lines) == len(seg.ts) + 1


def test_segment_validation():
    with pytest.raises(DomainError):
        RaySegment(ts=[1.0], zs=[1j], address=FIXED, lam=0.2)
    with pytest.raises(DomainError):
        RaySegment(ts=[2.0, 1.0], zs=[1j, 2j], address=FIXED, lam=0.2)


def test_boundary_samples():
    b = BoundarySamples([0, 1, 1, 2j])
    assert len(b) == 3
    assert b.dist(0.5 + 0.5j) == pytest.approx(math.sqrt(0.5))
    d = b.edge_dist(np.array([-1 + 1j]), np.array([1 + 1j]))
    assert d[0] == pytest.approx(1.0)


def test_diamstar_upper_straight_segment():
    # one boundary point at 0, segment on the line Re z = 1 from -1 to 1:
    # integral of 2 / sqrt(1 + y^2) = 4 asinh(1)
    seg = RaySegment(ts=[1.0, 2.0], zs=[1 - 1j, 1 + 1j], address=FIXED, lam=0.2)
    est = diamstar_upper(seg, [0j])
    assert est.value == pytest.approx(4 * math.asinh(1.0), rel=1e-9)
    assert "surrogate" in est.flags
    assert DiamStarEstimate.from_dict(est.to_dict()) == est
    hit = RaySegment(ts=[1.0, 2.0], zs=[-1, 1], address=FIXED, lam=0.2)
    with pytest.raises(DomainError):
        diamstar_upper(hit, [0j])


def test_m_surrogate_nondecreasing():
    boundary = boundary_from_postsingular(postsingular(M))
    values = [m_surrogate(M, FIXED, t, boundary) for t in (0.25, 0.5, 1.0, 2.0, 4.0)]
    assert all(b >= a for a, b in zip(values, values[1:]))
