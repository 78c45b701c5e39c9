import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerochain import ExtensionOracle, TripletSet, check_interpolation_conditions, make_class
from zerochain.audit import oracle_audit, oracle_samples
from zerochain.extension import (
    check_lower_quadratic,
    eval_oracle,
    finite_difference_gradient,
    interpolation_violations,
    kkt_violation,
    maximize_simplex,
    v_quad,
)
from zerochain.simplex import maximize_by_enumeration

from conftest import instance
from zerochain.model import ScheduleKind


def pair_oracle():
    T = TripletSet.from_arrays([[0.0], [2.0]], [[-1.0], [1.0]], [0.5, 0.5])
    return ExtensionOracle(T, make_class(0.0, 1.0))


def grid_max(oracle, y, m=20001):
    a = np.linspace(0, 1, m)
    vals = [v_quad(oracle, y, [t, 1 - t]) for t in a]
    k = int(np.argmax(vals))
    return a[k], vals[k]


def random_oracle(rng, n, d, mu=0.2, L=1.0):
    T = TripletSet.from_arrays(rng.standard_normal((n, d)), rng.standard_normal((n, d)), rng.standard_normal(n))
    return ExtensionOracle(T, make_class(mu, L))


# ---- v_quad

def test_v_quad_single_triplet():
    T = TripletSet.from_arrays([[0.0, 0.0]], [[0.0, 0.0]], [0.0])
    o = ExtensionOracle(T, make_class(0.25, 1.0))
    y = np.array([1.5, -2.0])
    assert v_quad(o, y, [1.0]) == pytest.approx(0.125 * (y @ y), rel=1e-15)


@pytest.mark.parametrize("a", [0.0, 0.2, 0.5, 0.9, 1.0])
def test_v_quad_pair_parabola(a):
    assert v_quad(pair_oracle(), [1.0], [a, 1 - a]) == pytest.approx(-2 * a * a + 2 * a - 0.5, abs=1e-15)


def test_v_quad_vertex_is_lower_quadratic(rng):
    o = random_oracle(rng, 5, 3, mu=-0.3)
    y = rng.standard_normal(3)
    low = o.lower_quadratics(y)
    for i in range(5):
        e = np.zeros(5)
        e[i] = 1
        assert v_quad(o, y, e) == pytest.approx(low[i], rel=1e-12, abs=1e-12)


def test_v_quad_errors():
    o = pair_oracle()
    with pytest.raises(ValueError):
        v_quad(o, [1.0], [0.5, 0.6])
    with pytest.raises(ValueError):
        v_quad(o, [1.0], [1.1, -0.1])
    with pytest.raises(ValueError):
        v_quad(o, [1.0, 2.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        v_quad(o, [1.0], [1.0])
    # within the 1e-9 band is accepted
    v_quad(o, [1.0], [0.5 + 5e-10, 0.5])


def test_precomputed_constants(rng):
    o = random_oracle(rng, 4, 3, mu=0.1, L=2.0)
    X, G, F = o.triplets.X, o.triplets.G, o.triplets.F
    for i in range(4):
        c = F[i] + np.sum((G[i] - 2.0 * X[i]) ** 2) / (2 * 1.9) - np.sum(X[i] ** 2)
        assert o.c[i] == pytest.approx(c, rel=1e-14, abs=1e-14)
        np.testing.assert_allclose(o.W[i], G[i] - 0.1 * X[i], rtol=1e-15)
    with pytest.raises(ValueError):
        o.W[0, 0] = 1.0


# ---- maximize_simplex

def test_pair_maximizer_y1():
    o = pair_oracle()
    r = maximize_simplex(o, [1.0])
    np.testing.assert_allclose(r.alpha, [0.5, 0.5], atol=1e-15)
    assert r.value == pytest.approx(0.0, abs=1e-15)
    a, v = grid_max(o, [1.0])
    assert a == pytest.approx(0.5, abs=1e-4)
    assert r.value >= v - 1e-15


def test_pair_maximizer_y0():
    o = pair_oracle()
    r = maximize_simplex(o, [0.0])
    np.testing.assert_allclose(r.alpha, [1.0, 0.0])
    assert r.value == pytest.approx(0.5, abs=1e-15)
    a, v = grid_max(o, [0.0])
    assert a == 1.0 and v == pytest.approx(0.5, abs=1e-15)


def test_single_index_always_one(rng):
    T = TripletSet.from_arrays([[1.0, 2.0]], [[0.3, 0.1]], [4.0])
    o = ExtensionOracle(T, make_class(0.5, 1.0))
    for _ in range(5):
        np.testing.assert_array_equal(maximize_simplex(o, rng.standard_normal(2)).alpha, [1.0])


def test_maximize_agrees_with_enumeration(rng):
    o = random_oracle(rng, 8, 3)
    for _ in range(20):
        y = 2 * rng.standard_normal(3)
        r = maximize_simplex(o, y)
        e = maximize_by_enumeration(o.H, o.linear_term(y))
        assert r.value == pytest.approx(v_quad(o, y, e.alpha), rel=1e-12, abs=1e-12)
        assert kkt_violation(o, y, r.alpha) <= 1e-10 * (1 + abs(r.value))


# ---- eval_oracle

def test_pair_oracle_minimizer():
    r = eval_oracle(pair_oracle(), [1.0])
    assert r.value == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(r.gradient, [0.0], atol=1e-15)


def test_single_triplet_quadratic(rng):
    xs = np.array([0.5, -1.0, 2.0])
    T = TripletSet.from_arrays([xs], [np.zeros(3)], [0.0])
    o = ExtensionOracle(T, make_class(0.3, 1.0))
    for _ in range(5):
        y = rng.standard_normal(3)
        r = eval_oracle(o, y)
        assert r.value == pytest.approx(0.15 * np.sum((y - xs) ** 2), rel=1e-13)
        np.testing.assert_allclose(r.gradient, 0.3 * (y - xs), rtol=1e-13, atol=1e-15)
        assert check_lower_quadratic(o, y).passed


def test_gradient_independent_of_maximizer():
    # duplicated triplet: alpha is not unique but the gradient is
    T = TripletSet.from_arrays([[0.0], [0.0], [2.0]], [[-1.0], [-1.0], [1.0]], [0.5, 0.5, 0.5])
    o = ExtensionOracle(T, make_class(0.0, 1.0))
    for y in (0.0, 0.7, 1.0, 1.9):
        a = eval_oracle(o, [y], support=[0, 2])
        b = eval_oracle(o, [y], support=[1, 2])
        c = eval_oracle(o, [y])
        assert a.value == pytest.approx(c.value, abs=1e-14)
        np.testing.assert_allclose(a.gradient, b.gradient, atol=1e-14)
        np.testing.assert_allclose(a.gradient, c.gradient, atol=1e-14)


def test_reproduces_triplets_on_hard_instance():
    h = instance(ScheduleKind.EXACT_SC, 3, q=0.25)
    o = h.oracle()
    for t in h.triplets.all():
        r = eval_oracle(o, t.x)
        assert abs(r.value - t.f) <= 1e-9
        assert np.linalg.norm(r.gradient - t.g) <= 1e-8


# ---- interpolation conditions

def test_interpolation_pair_passes_with_equality():
    o = pair_oracle()
    V = interpolation_violations(o.triplets, o.params)
    np.testing.assert_allclose(V, 0.0, atol=1e-15)
    assert check_interpolation_conditions(o.triplets, o.params).passed


def test_interpolation_failing_pair():
    T = TripletSet.from_arrays([[0.0], [1.0]], [[-1.0], [1.0]], [0.0, 0.0])
    rep = check_interpolation_conditions(T, make_class(0.0, 1.0))
    assert not rep.passed
    assert rep["interpolation"].residual == pytest.approx(1.0, abs=1e-15)


def test_interpolation_single_triplet():
    T = TripletSet.from_arrays([[0.0]], [[3.0]], [1.0])
    assert check_interpolation_conditions(T, make_class(0.0, 1.0)).passed


def test_interpolation_hard_instance():
    h = instance(ScheduleKind.EXACT_MUZERO, 6)
    assert check_interpolation_conditions(h.triplets, h.params).passed


def test_lower_quadratic_equality_at_data():
    h = instance(ScheduleKind.EXACT_SC, 3, q=0.25)
    o = h.oracle()
    for i, t in enumerate(h.triplets.all()):
        low = o.lower_quadratics(t.x)
        assert abs(eval_oracle(o, t.x).value - low[i]) <= 1e-10
        assert check_lower_quadratic(o, t.x).passed


def test_lower_quadratic_random_points(rng):
    o = instance(ScheduleKind.EXACT_SC, 3, q=0.25).oracle()
    for _ in range(30):
        assert check_lower_quadratic(o, 2 * rng.standard_normal(o.dim)).passed


# ---- finite differences and audits

def test_finite_difference_on_quadratic():
    xs = np.array([1.0, 2.0])
    T = TripletSet.from_arrays([xs], [np.zeros(2)], [0.0])
    o = ExtensionOracle(T, make_class(0.5, 1.0))
    y = np.array([0.0, 0.0])
    np.testing.assert_allclose(finite_difference_gradient(o, y), 0.5 * (y - xs), rtol=1e-9)


@pytest.mark.parametrize("mu", [-0.5, 0.0, 0.3])
def test_audit_on_arbitrary_data(mu):
    # the extension is in the class whatever the data
    rng = np.random.default_rng(int(10 * (mu + 1)))
    o = random_oracle(rng, 6, 3, mu=mu)
    rep = oracle_audit(o, points=40, seed=1, interp_samples=30, pairs=30)
    assert rep.passed, rep.format()


@settings(max_examples=25, deadline=None)
@given(
    st.integers(1, 6), st.integers(1, 4), st.floats(-1.0, 0.9), st.integers(0, 2**31 - 1),
)
def test_extension_properties(n, d, mu, seed):
    rng = np.random.default_rng(seed)
    o = random_oracle(rng, n, d, mu=mu)
    P = 3 * rng.standard_normal((12, d))
    S = oracle_samples(o, P)
    assert check_interpolation_conditions(S, o.params, tol=1e-8).passed
    for y in P[:4]:
        r = eval_oracle(o, y)
        assert np.all(o.lower_quadratics(y) <= r.value + 1e-10 * (1 + abs(r.value)))
        assert kkt_violation(o, y, r.alpha) <= 1e-10 * (1 + abs(r.value))
        fd = finite_difference_gradient(o, y)
        assert np.linalg.norm(fd - r.gradient) <= 1e-5 * max(np.linalg.norm(r.gradient), 1.0)


def test_value_never_below_interpolated_data(rng):
    # at data points of an interpolable set the extension is exact
    o = random_oracle(rng, 5, 2)
    S = oracle_samples(o, rng.standard_normal((6, 2)))
    o2 = ExtensionOracle(S, o.params)
    for t in S.all():
        r = eval_oracle(o2, t.x)
        assert abs(r.value - t.f) <= 1e-9
        assert np.linalg.norm(r.gradient - t.g) <= 1e-8
