import math

import pytest
from hypothesis import given, strategies as st

from paritylab.bounds import BoundParams, no_postselect_bound, postselected_bound, typicality_probability

BASE = dict(n=3, eta_a=0.05, eta_d=0.3, sigma=0.304, delta=0.01)


def test_postselected_regression_value():
    p = BoundParams(**BASE)
    expected = 4 * 0.304**2 / (0.95**2 * 0.85**2 * 0.2**2 * 0.95**2) * math.log(3 / 0.02)
    assert postselected_bound(p) == pytest.approx(expected, rel=1e-12)
    assert postselected_bound(p) == pytest.approx(78.6878515642, rel=1e-9)


def test_no_postselect_value():
    p = BoundParams(**{**BASE, "eta_d": 0.0})
    expected = 8 * 0.304**2 / (0.85**2 * 0.25) * math.log(150)
    assert no_postselect_bound(p) == pytest.approx(expected, rel=1e-12)


def test_divergence_at_half():
    p = BoundParams(**{**BASE, "eta_d": 0.5})
    assert math.isinf(postselected_bound(p)) and math.isinf(no_postselect_bound(p))
    near = BoundParams(**{**BASE, "eta_d": 0.4999})
    assert postselected_bound(near) > 1e8


def test_sigma_doubling_quadruples():
    a = postselected_bound(BoundParams(**BASE))
    b = postselected_bound(BoundParams(**{**BASE, "sigma": 0.608}))
    assert b == pytest.approx(4 * a)


def test_factor_two_algebraic():
    p = BoundParams(**{**BASE, "eta_a": 0.0, "delta_dprime": 0.0})
    assert p.eta_bar_a == 1.0
    assert no_postselect_bound(p) == pytest.approx(2 * postselected_bound(p))


def test_ratio_near_half():
    p = BoundParams(**{**BASE, "eta_a": 0.5, "delta_prime": 0.0, "delta_dprime": 0.0})
    # eta_bar_a = 1/2: the postselected bound costs 4 / (1/4) / 8 = 2x
    assert postselected_bound(p) / no_postselect_bound(p) == pytest.approx(2.0)


@given(st.floats(0.05, 2), st.floats(1.01, 3), st.floats(0, 0.45), st.floats(1e-4, 0.4))
def test_monotonicity(sigma, grow, eta_d, delta):
    base = BoundParams(3, 0.05, eta_d, sigma, delta)
    for fn in (postselected_bound, no_postselect_bound):
        assert fn(BoundParams(3, 0.05, eta_d, sigma * grow, delta)) > fn(base)
        assert fn(BoundParams(3, 0.05, min(eta_d * grow + 0.001, 0.49), sigma, delta)) > fn(base)
        assert fn(BoundParams(3, 0.05, eta_d, sigma, min(delta * grow, 0.9))) < fn(base)


def test_typicality():
    prob, clamped = typicality_probability(0.95, 1000, 0.1)
    assert prob == pytest.approx(1 - 2 * math.exp(-0.01 * 0.95 * 1000 / 3))
    assert prob == pytest.approx(0.916, abs=5e-4)
    assert not clamped
    assert typicality_probability(0.95, 10**9, 0.1)[0] == pytest.approx(1.0)


def test_typicality_clamped():
    assert typicality_probability(0.95, 100, 0.0) == (0.0, True)
    with pytest.raises(ValueError):
        typicality_probability(0.9, 0, 0.1)


@pytest.mark.parametrize("kw", [dict(eta_d=0.6), dict(delta=0.0), dict(delta=1.0), dict(sigma=0.0),
                                dict(delta_prime=0.34), dict(n=0)])
def test_param_validation(kw):
    with pytest.raises(ValueError):
        BoundParams(**{**BASE, **kw})
