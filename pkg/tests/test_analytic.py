import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from cochannel_atlas import analytic
from cochannel_atlas.analytic import (
    AttackGeometry,
    AttackInfeasibleError,
    area_fraction,
    can_receive,
    controlled_area,
    max_attack_radius,
    radius_ratio,
    required_power,
)
from cochannel_atlas.propagation import PathLossModel, PropagationParams, fspl

FSPL = PropagationParams.fspl()

# bisection on pt - fspl(d) = pr + alpha at 40 digits (mpmath), 500 MHz
D_ALPHA0 = 477.13451592369423
D_ALPHA10 = 150.88318206007521


def geometry(alpha=0.0, pt=30.0, pr=-50.0, params=FSPL, f=500.0, alpha_reg=0.0):
    return AttackGeometry(pt, pr, alpha, alpha_reg, params, f)


@pytest.mark.parametrize("args,expected", [
    ((-47.0, -70.0, 15.0), True),
    ((-50.0, -50.0, 0.0), True),
    ((-60.0, -50.0, 10.0), False),
    ((-55.0, -70.0, 15.0), True),
    ((-55.0, -70.0, 15.0001), False),
])
def test_can_receive(args, expected):
    assert can_receive(*args) is expected


def test_radius_without_ccpr():
    d = max_attack_radius(geometry(0.0))
    assert d == pytest.approx(D_ALPHA0, rel=1e-12)
    assert abs(d - 477.0) <= 1.0


def test_radius_with_ccpr():
    d = max_attack_radius(geometry(10.0))
    assert d == pytest.approx(D_ALPHA10, rel=1e-12)
    assert abs(d - 151.0) <= 1.0


def test_fspl_closed_form_specialization():
    # d0 (lambda / (4 pi d0)) ** (2/n) * 10 ** ((pt - pr - alpha) / (10 n)), n = 2, any d0
    lam = 299_792_458.0 / 500e6
    for d0 in (1.0, 37.0, 100.0):
        closed = d0 * (lam / (4 * math.pi * d0)) ** (2 / 2) * 10 ** ((30 + 50 - 10) / 20)
        p = PropagationParams(PathLossModel.TWO_SLOPE, d0=d0, n=2.0)
        assert max_attack_radius(geometry(10.0, params=p)) == pytest.approx(closed, rel=1e-12)


def test_zero_budget_gives_reference_distance():
    p = PropagationParams(PathLossModel.LOG_DISTANCE, d0=100.0, pl0=80.0, n=2.7)
    assert max_attack_radius(geometry(0.0, pt=30.0, pr=-50.0, params=p)) == pytest.approx(100.0)


def test_infeasible_inside_reference_distance_is_tagged():
    p = PropagationParams(PathLossModel.LOG_DISTANCE, d0=100.0, n=2.7)
    with pytest.raises(AttackInfeasibleError) as info:
        max_attack_radius(geometry(30.0, pt=20.0, pr=-40.0, params=p))
    assert 0 < info.value.radius < 100.0


def test_two_slope_falls_back_to_fspl_below_d0():
    p = PropagationParams(PathLossModel.TWO_SLOPE, d0=1000.0, n=3.5)
    d = max_attack_radius(geometry(10.0, params=p))
    assert d == pytest.approx(D_ALPHA10, rel=1e-12)


def test_controlled_area():
    assert controlled_area(151.0) / 1e6 == pytest.approx(0.07, abs=0.005)
    assert controlled_area(477.0) / 1e6 == pytest.approx(0.7, abs=0.02)
    assert controlled_area(0.0) == 0.0
    with pytest.raises(ValueError):
        controlled_area(-1.0)


def test_required_power_inverse_case():
    assert required_power(151.0, geometry(10.0)) == pytest.approx(30.0, abs=0.05)


def test_required_power_at_d0():
    p = PropagationParams(PathLossModel.TWO_SLOPE, d0=100.0, n=2.7)
    assert required_power(100.0, geometry(10.0, params=p)) == pytest.approx(-50.0 + 10.0 + fspl(100.0, 500.0))


@given(st.floats(1.0, 4.5), st.floats(150.0, 1e5))
def test_required_power_doubling(n, d):
    p = PropagationParams(PathLossModel.TWO_SLOPE, d0=100.0, n=n)
    g = geometry(10.0, params=p)
    assert required_power(2 * d, g) - required_power(d, g) == pytest.approx(10 * n * math.log10(2), abs=1e-9)


def test_required_power_below_d0_log_distance():
    p = PropagationParams(PathLossModel.LOG_DISTANCE, d0=100.0, n=2.7)
    with pytest.raises(ValueError):
        required_power(50.0, geometry(10.0, params=p))


@given(st.floats(1.0, 4.5), st.floats(100.0, 1e5), st.floats(0.0, 30.0), st.floats(-90.0, -30.0))
def test_round_trip_radius_power(n, d, alpha, pr):
    p = PropagationParams(PathLossModel.LOG_DISTANCE, d0=100.0, n=n)
    g = geometry(alpha, pr=pr, params=p)
    pt = required_power(d, g)
    g2 = AttackGeometry(pt, pr, alpha, 0.0, p, 500.0)
    assert max_attack_radius(g2) == pytest.approx(d, rel=1e-9)


@given(st.floats(0.0, 30.0), st.floats(0.1, 10.0))
def test_radius_monotone_in_power_and_alpha(alpha, delta):
    base = max_attack_radius(geometry(alpha))
    assert max_attack_radius(geometry(alpha, pt=30.0 + delta)) > base
    assert max_attack_radius(geometry(alpha + delta)) < base
    assert max_attack_radius(geometry(alpha, pr=-50.0 + delta)) < base


@given(st.floats(1.0, 4.0), st.floats(0.01, 1.0))
def test_higher_exponent_shrinks_radius(n, dn):
    # positive budget beyond PL0
    make = lambda n: geometry(10.0, params=PropagationParams(PathLossModel.LOG_DISTANCE, d0=1.0, n=n))
    assert max_attack_radius(make(n + dn)) < max_attack_radius(make(n))


@pytest.mark.parametrize("a_rogue,a_reg,n,expected", [
    (0.0, 0.0, 2.0, 1.0),
    (10.0, 10.0, 2.0, 0.01),
    (2.5, 10.0, 2.0, 10 ** -1.25),
])
def test_area_fraction(a_rogue, a_reg, n, expected):
    assert area_fraction(a_rogue, a_reg, n) == pytest.approx(expected, rel=1e-12)
    assert radius_ratio(a_rogue, a_reg, n) ** 2 == pytest.approx(expected, rel=1e-12)


def test_mush_multiple_99():
    assert area_fraction(10.0, 10.0, 2.0) == 0.01
    assert analytic.mush_multiple(10.0, 10.0, 2.0) == pytest.approx(99.0, rel=1e-12)
    assert radius_ratio(10.0, 10.0, 2.0) == pytest.approx(0.1, rel=1e-12)


def test_qpsk_rogue_mush_over_16_times():
    assert analytic.mush_multiple(2.5, 10.0, 2.0) == pytest.approx(10 ** 1.25 - 1)
    assert analytic.mush_multiple(2.5, 10.0, 2.0) > 16


@given(st.floats(0.0, 30.0), st.floats(0.0, 30.0), st.floats(1.0, 5.0))
def test_fraction_is_ratio_squared(a, b, n):
    assert area_fraction(a, b, n) == pytest.approx(radius_ratio(a, b, n) ** 2, rel=1e-12)


@given(st.floats(0.0, 30.0), st.floats(1.0, 3.0))
def test_doubling_n_takes_square_root(total, n):
    assert area_fraction(total, 0.0, 2 * n) == pytest.approx(math.sqrt(area_fraction(total, 0.0, n)), rel=1e-12)


@given(st.floats(0.1, 30.0), st.floats(0.1, 30.0), st.floats(1.0, 5.0), st.floats(0.01, 2.0))
def test_controlled_fraction_grows_with_n(a, b, n, dn):
    assert area_fraction(a, b, n + dn) > area_fraction(a, b, n)


@given(st.floats(0.0, 25.0), st.floats(0.0, 25.0), st.floats(1.0, 4.5))
def test_area_report_matches_closed_form(a_rogue, a_reg, n):
    p = PropagationParams(PathLossModel.LOG_DISTANCE, d0=1.0, n=n)
    g = AttackGeometry(40.0, -50.0, a_rogue, a_reg, p, 700.0)
    assume(g.pt_rogue - g.pr_reg - a_rogue >= p.reference_loss(700.0))
    rep = analytic.area_report(g)
    assert rep.radius_ratio == pytest.approx(radius_ratio(a_rogue, a_reg, n), rel=1e-9)
    assert rep.controlled_fraction == pytest.approx(area_fraction(a_rogue, a_reg, n), rel=1e-9)
    assert rep.mush_fraction == pytest.approx(1 - rep.controlled_fraction)
    assert rep.a_rogue == pytest.approx(math.pi * rep.d_rogue**2)


def test_exponent_must_be_at_least_one():
    with pytest.raises(ValueError):
        radius_ratio(1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        area_fraction(1.0, 1.0, 0.5)


def test_negative_ccpr_rejected():
    with pytest.raises(ValueError):
        geometry(-1.0)


def test_warns_when_regular_level_above_rogue_power():
    with pytest.warns(UserWarning):
        AttackGeometry(10.0, 20.0, 0.0)
