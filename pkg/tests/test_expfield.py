import cmath
import math

import pytest
from hypothesis import given, strategies as st

from raylander.errors import DomainError, HypothesisError, NonConvergenceError, RayOverflowError
from raylander.expfield import (ExpMap, PostsingularData, PreimageLadder, TractChart,
                                inverse_branch, iterate, map_eval, orbit_multiplier, postsingular,
                                preimage_ladder, real_fixed_points, refine_periodic_point,
                                require_bounded)
from raylander.hypgeo import half_plane_distance


def bisect(g, a, b, iters=200):
    fa = g(a)
    for _ in range(iters):
        c = 0.5 * (a + b)
        if (g(c) > 0) == (fa > 0):
            a, fa = c, g(c)
        else:
            b = c
    return 0.5 * (a + b)


def test_exp_map_rejects_bad_lambda():
    for lam in (0, math.inf, complex(math.nan, 0)):
        with pytest.raises(DomainError):
            ExpMap(lam)


def test_map_eval_and_overflow():
    m = ExpMap(0.2)
    value, deriv = map_eval(m, 1 + 1j)
    assert value == pytest.approx(0.2 * cmath.exp(1 + 1j)) and value == deriv
    with pytest.raises(RayOverflowError):
        map_eval(m, 720.0)


@given(st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False),
       st.integers(-5, 5))
def test_inverse_branch_is_right_inverse(w, j):
    if abs(w) < 1e-12:
        return
    m = ExpMap(0.2 + 0.1j)
    z = inverse_branch(m, w, j)
    assert m(z) == pytest.approx(w, rel=1e-12, abs=1e-12)
    # branch j takes values in the strip around 2 pi j
    assert abs(z.imag - 2 * math.pi * j) <= math.pi + 1.0


def test_inverse_branch_of_omitted_value():
    with pytest.raises(DomainError):
        inverse_branch(ExpMap(1.0), 0, 0)


@pytest.mark.parametrize("lam", [0.05, 0.1, 0.2, 0.3, 0.36])
def test_real_fixed_points_against_bisection(lam):
    m = ExpMap(lam)
    q_minus, q_plus = real_fixed_points(m)
    g = lambda x: x - lam * math.exp(x)
    assert q_minus == pytest.approx(bisect(g, 0.0, 1.0), abs=1e-13)
    assert q_plus == pytest.approx(bisect(g, 1.0, 30.0), abs=1e-12)
    assert q_minus < 1 < q_plus


def test_real_fixed_points_values():
    q_minus, q_plus = real_fixed_points(ExpMap(0.2))
    assert q_minus == pytest.approx(0.25917110181907377, abs=1e-14)
    assert q_plus == pytest.approx(2.5426413577735265, abs=1e-13)
    with pytest.raises(DomainError) as info:
        real_fixed_points(ExpMap(1 / math.e))
    assert info.value.reason == "parabolic-tangency"


def test_refine_periodic_point():
    m = ExpMap(0.2)
    w, mult = refine_periodic_point(m, 1, 2.4)
    assert w == pytest.approx(2.5426413577735265, abs=1e-13)
    assert mult == pytest.approx(w, rel=1e-12)
    w2, mult2 = refine_periodic_point(m, 2, 3.6 + 1.1j)
    assert abs(iterate(m, w2, 2) - w2) < 1e-12
    assert mult2 == pytest.approx(orbit_multiplier(m, w2, 2)[1])
    with pytest.raises(NonConvergenceError):
        refine_periodic_point(m, 1, 2.4, max_iter=1, residual_tol=1e-30)


def test_postsingular_attracting():
    data = postsingular(ExpMap(0.2))
    assert data.status == "bounded" and data.certificate == "attracting"
    assert data.cycle[0] == pytest.approx(0.25917110181907377, abs=1e-10)
    assert abs(data.cycle_multiplier) < 1
    assert PostsingularData.from_dict(data.to_dict()) == data


def test_postsingular_parabolic():
    data = postsingular(ExpMap(1 / math.e), max_iter=20000)
    assert data.bounded
    assert data.certificate == "parabolic"


def test_postsingular_escape():
    data = postsingular(ExpMap(3.0), max_iter=100)
    assert data.status == "unbounded" and data.certificate == "escape"
    assert data.iterations <= 100
    with pytest.raises(HypothesisError) as info:
        require_bounded(ExpMap(3.0), data)
    assert info.value.reason == "postsingular-unbounded"
    assert info.value.exit_status == 3


def test_postsingular_period_two_cycle():
    # lam = -3 has an attracting 2-cycle on the real line
    data = postsingular(ExpMap(-3.0))
    assert data.status == "bounded"
    assert len(data.cycle) == 2


def test_tract_chart_property():
    m = ExpMap(0.2 + 0.3j)
    chart = TractChart.for_map(m, 2.0)
    for z in (3 + 1j, 5 - 2j, 4.5 + 10j):
        assert cmath.exp(chart(z)) == pytest.approx(m(z) / 2.0, rel=1e-12)


def test_preimage_ladder_closed_form():
    m = ExpMap(0.2)
    lad = preimage_ladder(m, 3.0, range(0, 11), R=1.0)
    for j, w in zip(lad.js, lad.points):
        assert w == pytest.approx(math.log(15) + 2j * math.pi * j, abs=1e-13)
    expected = math.acosh(1 + 2 * math.pi ** 2 / math.log(3) ** 2)
    assert lad.delta == pytest.approx(expected, abs=1e-12)
    assert lad.delta == pytest.approx(3.546175660, abs=1e-9)
    assert max(lad.deltas) - min(lad.deltas) <= 1e-12
    images = [lad.chart(w) for w in lad.points]
    assert half_plane_distance(images[0], images[5]) > lad.delta
    assert PreimageLadder.from_dict(lad.to_dict()).delta == lad.delta


def test_preimage_ladder_rejects_inner_point():
    with pytest.raises(DomainError) as info:
        preimage_ladder(ExpMap(0.2), 0.5, range(3), R=1.0)
    assert info.value.reason == "z0-inside-disk"


def test_preimage_ladder_default_radius():
    lad = preimage_ladder(ExpMap(0.2), 3.0, range(3))
    assert lad.chart.R == pytest.approx(1.0 + 0.25917110181907377, abs=1e-9)
