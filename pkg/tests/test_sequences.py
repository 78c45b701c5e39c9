import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerochain import make_class
from zerochain.model import Schedule
from zerochain.sequences import (
    closed_form_bounds,
    lambda_sequence,
    recursion_rel_gap,
    recursion_slack,
    risk_bound,
    schedule_exact_muzero,
    schedule_exact_sc,
    schedule_simple_muzero,
    schedule_simple_sc,
    theta_sequence,
    validate_schedule,
    xrisk_bound,
    zeta_sequence,
)

mpmath.mp.dps = 50


def mp_theta(N):
    th = [mpmath.mpf(1)]
    for i in range(1, N + 1):
        c = 8 if i == N else 4
        th.append((1 + mpmath.sqrt(1 + c * th[-1] ** 2)) / 2)
    return th


def mp_lambda(N, q):
    q = mpmath.mpf(q)
    lam = [mpmath.sqrt(q)]
    for _ in range(N):
        li = lam[-1]
        lam.append((1 - mpmath.sqrt(q - (1 - q) * li ** 2)) / (1 + li ** 2) * li)
    return lam


# ---- theta

def test_theta_base_cases():
    assert theta_sequence(0).values.tolist() == [1.0]
    assert not theta_sequence(0).terminal_rule_applied
    assert theta_sequence(1).values.tolist() == [1.0, 2.0]


def test_theta_two():
    th = theta_sequence(2).values
    assert th[1] == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-15)
    # (1 + sqrt(1 + 8 phi^2)) / 2 evaluated by hand: 2.8422357...
    assert th[2] == pytest.approx(float(mp_theta(2)[2]), rel=1e-15)
    assert th[2] == pytest.approx(2.8422357, abs=1e-7)


@pytest.mark.parametrize("N", [3, 7, 20, 50])
def test_theta_matches_high_precision(N):
    np.testing.assert_allclose(theta_sequence(N).values, [float(t) for t in mp_theta(N)], rtol=1e-14)
    assert np.all(np.diff(theta_sequence(N).values) > 0)


# ---- lambda

def test_lambda_hand_values():
    lam = lambda_sequence(2, 0.25).values
    assert lam[0] == 0.5
    assert lam[1] == pytest.approx(0.3, rel=1e-15)
    assert lam[2] == pytest.approx(0.15765, abs=5e-6)
    assert lam[2] == pytest.approx(float(mp_lambda(2, 0.25)[2]), rel=1e-14)


@pytest.mark.parametrize("q", [1e-4, 0.01, 0.1, 0.25, 0.5, 0.9, 0.999])
def test_lambda_matches_high_precision(q):
    # 1 - sqrt(q - ...) cancels about 1/(1 - sqrt q) ulps per step
    rtol = 1e-14 + 30 * 1e-15 / (1 - math.sqrt(q))
    np.testing.assert_allclose(lambda_sequence(30, q).values, [float(v) for v in mp_lambda(30, q)], rtol=rtol)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6))
def test_lambda_sandwich(q):
    lam = lambda_sequence(40, q).values
    s = math.sqrt(q)
    lo = (1 - s) / (1 + q) * lam[:-1]
    hi = (1 - q) * lam[:-1]
    assert np.all(lam[1:] >= lo * (1 - 1e-13))
    assert np.all(lam[1:] <= hi * (1 + 1e-13))
    assert np.all(hi <= s * (1 + 1e-15))
    assert np.all(q - (1 - q) * lam ** 2 >= 0)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.5, 1.5])
def test_lambda_rejects_q(q):
    with pytest.raises(ValueError):
        lambda_sequence(3, q)


# ---- simple mu = 0

def test_simple_muzero_values():
    p = make_class(0.0, 1.0, 1.0)
    s = schedule_simple_muzero(1, p)
    r2 = math.sqrt(2)
    np.testing.assert_allclose(s.gamma, [1 / (2 * r2), 1 / (4 * r2)], rtol=1e-15)
    np.testing.assert_allclose(s.delta, [1 / r2, 1 / r2], rtol=1e-15)
    s0 = schedule_simple_muzero(0, p)
    assert s0.gamma.tolist() == [0.5] and s0.delta.tolist() == [1.0]
    s2 = schedule_simple_muzero(1, make_class(0.0, 1.0, 2.0))
    np.testing.assert_allclose(s2.gamma, 2 * s.gamma, rtol=1e-15)
    np.testing.assert_allclose(s2.delta, 2 * s.delta, rtol=1e-15)


def test_simple_muzero_rejects_mu():
    with pytest.raises(ValueError):
        schedule_simple_muzero(2, make_class(0.1, 1.0))


def test_simple_muzero_validates_and_recursion_strict():
    s = schedule_simple_muzero(5, make_class(0.0, 1.0))
    assert validate_schedule(s).passed
    slack = recursion_slack(s)
    # tight at i = 0, strict afterwards
    assert abs(slack[0]) < 1e-15
    assert np.all(slack[1:] > 0)


def test_simple_muzero_risk():
    assert risk_bound(schedule_simple_muzero(1, make_class(0.0, 1.0))) == pytest.approx(7 / 64, rel=1e-14)


# ---- exact mu = 0

def test_exact_muzero_zeta_hand_values():
    np.testing.assert_allclose(zeta_sequence(1), [1 / 3, 1 / 6, 1 / 12, 0.0], rtol=1e-15)
    s = schedule_exact_muzero(1, make_class(0.0, 1.0))
    np.testing.assert_allclose(s.gamma, [math.sqrt(1 / 6), math.sqrt(1 / 12)], rtol=1e-15)
    np.testing.assert_allclose(s.delta, [math.sqrt(2 / 3), math.sqrt(1 / 3)], rtol=1e-15)
    g, d = s.gamma[-1], s.delta[-1]
    assert 2 * g * d - g * g == pytest.approx(0.25, rel=1e-15)
    assert np.sum(s.delta ** 2) == pytest.approx(1.0, rel=1e-15)


def test_exact_muzero_zero_horizon():
    s = schedule_exact_muzero(0, make_class(0.0, 1.0))
    assert s.gamma.tolist() == [1.0] and s.delta.tolist() == [1.0]
    assert risk_bound(s) == 0.5


@pytest.mark.parametrize("N", [1, 2, 5, 13, 30])
def test_exact_muzero_identities(N):
    R = 1.7
    s = schedule_exact_muzero(N, make_class(0.0, 1.0, R))
    th = theta_sequence(N).values[-1]
    g, d = s.gamma[-1], s.delta[-1]
    assert 2 * g * d - g * g == pytest.approx(R * R / th ** 2, rel=1e-12)
    assert np.sum(s.delta ** 2) == pytest.approx(R * R, rel=1e-12)
    assert recursion_rel_gap(s).max() <= 1e-12
    assert validate_schedule(s).passed


def test_exact_muzero_risk():
    assert risk_bound(schedule_exact_muzero(1, make_class(0.0, 1.0))) == pytest.approx(1 / 8, rel=1e-14)


def test_exact_muzero_rejects_mu():
    with pytest.raises(ValueError):
        schedule_exact_muzero(2, make_class(0.1, 1.0))


# ---- simple strongly convex

def test_simple_sc_values():
    s = schedule_simple_sc(1, make_class(0.25, 1.0))
    np.testing.assert_allclose(s.delta, [math.sqrt(0.75), math.sqrt(0.75) / 2], rtol=1e-15)
    np.testing.assert_allclose(s.gamma, 0.5 * s.delta, rtol=1e-15)
    assert risk_bound(s) == pytest.approx(0.0625, rel=1e-13)
    assert xrisk_bound(s) == pytest.approx(math.sqrt(0.75) * 0.5, rel=1e-15)


def test_simple_sc_partial_sums_to_radius():
    s = schedule_simple_sc(400, make_class(0.25, 1.0))
    partial = np.cumsum(s.delta ** 2)
    assert np.all(partial <= 1 + 1e-15)
    assert partial[-1] == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("q", [0.01, 0.1, 0.25, 0.5, 0.9])
def test_simple_sc_ratio_and_tightness(q):
    s = schedule_simple_sc(12, make_class(q, 1.0, 3.0))
    np.testing.assert_allclose(s.gamma / s.delta, math.sqrt(q), rtol=1e-14)
    assert recursion_rel_gap(s).max() <= 1e-12
    assert validate_schedule(s).passed


def test_simple_sc_rejects_mu_zero():
    with pytest.raises(ValueError):
        schedule_simple_sc(2, make_class(0.0, 1.0))


# ---- exact strongly convex

def test_exact_sc_small_cases():
    p = make_class(0.25, 1.0)
    s0 = schedule_exact_sc(0, p)
    assert s0.gamma.tolist() == [0.25] and s0.delta.tolist() == [1.0]
    assert xrisk_bound(s0) == 1.0
    s1 = schedule_exact_sc(1, p)
    assert s1.delta[1] == pytest.approx(0.6, rel=1e-15)
    assert xrisk_bound(s1) == pytest.approx(0.6, rel=1e-15)


@pytest.mark.parametrize("q", [0.01, 0.1, 0.25, 0.5, 0.9])
@pytest.mark.parametrize("N", [0, 1, 2, 7, 15])
def test_exact_sc_invariants(q, N):
    R = 2.5
    s = schedule_exact_sc(N, make_class(q, 1.0, R))
    lam = float(mp_lambda(N, q)[N])
    assert s.gamma[-1] * s.delta[-1] == pytest.approx(lam * lam * R * R, rel=1e-12)
    assert s.delta[-1] == pytest.approx(lam * R / math.sqrt(q), rel=1e-12)
    assert np.sum(s.delta ** 2) == pytest.approx(R * R, rel=1e-12)
    if N:
        assert recursion_rel_gap(s).max() <= 1e-12
    assert validate_schedule(s).passed


def test_exact_sc_validated_q_tenth():
    s = schedule_exact_sc(10, make_class(0.1, 1.0))
    rep = validate_schedule(s)
    assert rep.passed
    assert recursion_rel_gap(s).max() <= 1e-12


def test_exact_sc_rejects_mu_zero():
    with pytest.raises(ValueError):
        schedule_exact_sc(2, make_class(0.0, 1.0))


# ---- validation and bounds

def test_validate_rejects_ordering():
    s = Schedule([1.0], [0.5], make_class(0.0, 1.0))
    rep = validate_schedule(s)
    assert not rep.passed
    assert not rep["nonneg"].passed


def test_validate_rejects_radius_and_recursion():
    p = make_class(0.0, 1.0)
    assert not validate_schedule(Schedule([0.5, 0.5], [1.0, 1.0], p))["radius"].passed
    assert not validate_schedule(Schedule([0.5, 0.5], [0.5, 0.5], p))["recursion"].passed


def test_risk_bound_rejects_invalid():
    with pytest.raises(ValueError):
        risk_bound(Schedule([1.0], [0.5], make_class(0.0, 1.0)))


def test_xrisk_rejects_mu_zero():
    with pytest.raises(ValueError):
        xrisk_bound(schedule_exact_muzero(3, make_class(0.0, 1.0)))


@pytest.mark.parametrize("q", [0.01, 0.1, 0.25, 0.5])
def test_xrisk_dominance(q):
    p = make_class(q, 1.0)
    for N in range(31):
        assert xrisk_bound(schedule_exact_sc(N, p)) >= xrisk_bound(schedule_simple_sc(N, p))


def test_risk_dominance_muzero():
    p = make_class(0.0, 1.0)
    for N in range(51):
        assert risk_bound(schedule_exact_muzero(N, p)) >= risk_bound(schedule_simple_muzero(N, p))


@pytest.mark.parametrize(
    "build, q",
    [(schedule_simple_muzero, 0.0), (schedule_exact_muzero, 0.0), (schedule_simple_sc, 0.3), (schedule_exact_sc, 0.3)],
)
def test_homogeneity(build, q):
    s1 = build(6, make_class(q, 1.0, 1.0))
    s3 = build(6, make_class(q, 1.0, 3.0))
    np.testing.assert_allclose(s3.gamma, 3 * s1.gamma, rtol=1e-13)
    np.testing.assert_allclose(s3.delta, 3 * s1.delta, rtol=1e-13)
    assert risk_bound(s3) == pytest.approx(9 * risk_bound(s1), rel=1e-12)
    if q > 0:
        assert xrisk_bound(s3) == pytest.approx(3 * xrisk_bound(s1), rel=1e-13)


@pytest.mark.parametrize("q", [0.01, 0.1, 0.25, 0.5])
@pytest.mark.parametrize("N", [0, 1, 5, 20])
def test_closed_form_bounds(q, N):
    p = make_class(q, 1.0)
    cf = closed_form_bounds(p, N)
    s = math.sqrt(q)
    sc = q * (2 - s) / (1 + s) * (1 - s) ** (2 * N)
    cv = 0.5 / theta_sequence(N).values[-1] ** 2
    assert cf.risk_strong == pytest.approx(max(sc, cv), rel=1e-14)
    assert cf.risk_strong_branch == ("strongly_convex" if sc > cv else "convex")
    # the strongly convex branch is the simple schedule's value
    assert sc == pytest.approx(risk_bound(schedule_simple_sc(N, p)), rel=1e-13)
    assert cf.risk_weak <= cf.risk_strong * (1 + 1e-14)
    assert cf.xrisk_strong == pytest.approx(xrisk_bound(schedule_exact_sc(N, p)), rel=1e-12)
    assert cf.xrisk_weak <= cf.xrisk_strong * (1 + 1e-14)


def test_closed_form_bounds_mu_zero():
    cf = closed_form_bounds(make_class(0.0, 1.0), 4)
    assert cf.xrisk_strong is None and cf.xrisk_weak is None
    assert cf.risk_strong_branch == "convex"
    assert cf.risk_strong == pytest.approx(risk_bound(schedule_exact_muzero(4, make_class(0.0, 1.0))), rel=1e-12)
