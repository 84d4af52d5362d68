import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dosepenalty import (ConfigurationError, DoseField, apply_C, apply_C_adjoint, build_grid, dvh_curve,
                         inner_product_Q, make_region, volume_fraction_above, volume_fraction_below)
from dosepenalty.grid import inner_product_region
from conftest import dense_C, state_weights


def test_constant_state_gives_T_times_value():
    g = build_grid(-1, 1, 11, 2.0, 8)
    r = make_region(g, [(-0.5, 0.5)])
    d = apply_C(r, np.full(g.shape, 0.3), g)
    np.testing.assert_allclose(d.values, 0.6, rtol=1e-14)


def test_adjoint_is_constant_in_time():
    g = build_grid(-1, 1, 11, 1.0, 4)
    r = make_region(g, [(0, 1)])
    mu = DoseField(r, np.arange(r.size, dtype=float))
    out = apply_C_adjoint(r, mu, g)
    assert np.all(out == out[0])
    assert np.all(out[:, ~r.mask] == 0)


def test_dense_transpose():
    g = build_grid(-1, 1, 5, 1.0, 3)
    r = make_region(g, [(-0.5, 0.5)])
    C = dense_C(r)
    y = np.random.default_rng(0).standard_normal(g.shape)
    np.testing.assert_allclose(apply_C(r, y, g).values, C @ y.ravel(), rtol=1e-14)
    mu = DoseField(r, np.random.default_rng(1).standard_normal(r.size))
    W = state_weights(g)
    # C* in the (L2(Q), L2(omega)) pairings: W^-1 C^T diag(w_region)
    expect = (C.T @ (r.weights * mu.values)) / W
    np.testing.assert_allclose(apply_C_adjoint(r, mu, g).ravel(), expect, rtol=1e-13)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([(5, 3), (17, 8), (40, 25)]), st.integers(0, 2**31 - 1))
def test_adjoint_identity(shape, seed):
    g = build_grid(-1, 1, *shape[:1], 1.0, shape[1])
    r = make_region(g, [(-0.9, -0.2), (0.3, 0.7)])
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(g.shape)
    mu = DoseField(r, rng.standard_normal(r.size))
    lhs = inner_product_region(apply_C(r, y, g), mu)
    rhs = inner_product_Q(y, apply_C_adjoint(r, mu, g), g)
    assert abs(lhs - rhs) <= 1e-11 * abs(lhs) + 1e-15


def test_fractions_strict():
    g = build_grid(-1, 1, 11, 1.0, 1)
    r = make_region(g, [(-0.4, 0.4)])  # 5 interior nodes of equal weight
    d = DoseField(r, np.array([0.1, 0.2, 0.3, 0.5, 0.6]))
    assert volume_fraction_above(d, 0.2) == pytest.approx(3 / 5)
    assert volume_fraction_below(d, 0.5) == pytest.approx(3 / 5)
    assert volume_fraction_above(d, 1.0) == 0 and volume_fraction_below(d, 0.0) == 0


def test_dvh_unit_step():
    g = build_grid(-1, 1, 11, 1.0, 1)
    r = make_region(g, [(-0.4, 0.4)])
    d = DoseField(r, np.full(r.size, 0.5))
    levels = np.linspace(0, 0.6, 13)
    c = dvh_curve(d, levels)
    np.testing.assert_array_equal(c.fraction, (levels <= 0.5).astype(float))


def test_dvh_monotone_and_levels_checked():
    g = build_grid(-1, 1, 31, 1.0, 1)
    r = make_region(g, [(-1, 1)])
    d = DoseField(r, np.random.default_rng(3).uniform(0, 1, r.size))
    c = dvh_curve(d, np.linspace(0, 1.2, 50))
    assert np.all(np.diff(c.fraction) <= 0) and c.fraction[0] == 1
    with pytest.raises(ConfigurationError):
        dvh_curve(d, [0.3, 0.2])
