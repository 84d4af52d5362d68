import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dosepenalty import (ConfigurationError, DimensionError, DoseField, build_grid, inner_product_Q,
                         make_region, norm_Q, regions_overlap)
from dosepenalty.grid import inner_product_region, norm_region


def test_reference_grid_spacing():
    g = build_grid(-1, 1, 256, 1, 256)
    assert g.dx == pytest.approx(2 / 255, rel=1e-15)
    assert g.dt == pytest.approx(1 / 256, rel=1e-15)
    assert abs(g.dt * g.nt - g.T) / g.T < 1e-12
    assert g.x[0] == -1 and g.x[-1] == pytest.approx(1, abs=1e-14)


def test_smallest_grid():
    g = build_grid(-1, 1, 3, 1, 1)
    np.testing.assert_allclose(g.x, [-1, 0, 1])
    assert g.dt == 1
    np.testing.assert_allclose(g.weights, [0.5, 1, 0.5])


@pytest.mark.parametrize("args", [(-1, 1, 2, 1, 1), (-1, 1, 5, 1, 0), (1, -1, 5, 1, 1), (-1, 1, 5, 0, 1),
                                  (-1, 1, 4.5, 1, 1)])
def test_bad_grid(args):
    with pytest.raises(ConfigurationError):
        build_grid(*args)


def test_region_masks_inclusive_endpoints():
    g = build_grid(-1, 1, 5, 1, 1)  # nodes -1, -0.5, 0, 0.5, 1
    r = make_region(g, [(-0.5, 0.0)])
    assert r.mask.tolist() == [False, True, True, False, False]
    assert r.measure == 0.5


def test_region_with_excluded_part():
    g = build_grid(-1, 1, 256, 1, 256)
    T = make_region(g, [(-0.45, 0.45)], [(-0.2, 0.2)])
    R = make_region(g, [(-0.7, -0.55), (-0.2, 0.2), (0.55, 0.7)])
    assert T.measure == pytest.approx(0.5)
    assert R.measure == pytest.approx(0.7)
    assert T.size == 62 and R.size == 90
    assert not (T.mask & R.mask).any()
    assert not regions_overlap(T, R)


def test_overlap_detection():
    g = build_grid(-1, 1, 41, 1, 1)
    a = make_region(g, [(-0.5, 0.1)])
    b = make_region(g, [(0.0, 0.5)])
    c = make_region(g, [(0.1, 0.5)])
    assert regions_overlap(a, b)
    assert not regions_overlap(a, c)  # touching at one point only


@pytest.mark.parametrize("ivs", [[(0.2, -0.2)], [(-0.5, 0.1), (0.0, 0.3)], [(-2, 0)], [(0.1,)]])
def test_bad_intervals(ivs):
    g = build_grid(-1, 1, 11, 1, 1)
    with pytest.raises(ConfigurationError):
        make_region(g, ivs)


def test_dose_field_length_checked():
    g = build_grid(-1, 1, 11, 1, 1)
    r = make_region(g, [(0, 0.5)])
    with pytest.raises(DimensionError):
        DoseField(r, np.zeros(r.size + 1))
    np.testing.assert_array_equal(DoseField(r, np.ones(r.size)).to_nodes(), r.mask.astype(float))


def test_shape_mismatch_rejected():
    g = build_grid(-1, 1, 5, 1, 3)
    with pytest.raises(DimensionError):
        inner_product_Q(np.zeros((3, 5)), np.zeros((5, 3)), g)


def test_constant_integrates_exactly():
    g = build_grid(-1, 1, 17, 2.0, 8)
    assert inner_product_Q(np.ones(g.shape), np.ones(g.shape), g) == pytest.approx(4.0, rel=1e-14)
    r = make_region(g, [(-0.5, 0.5)])
    f = DoseField(r, np.full(r.size, 3.0))
    assert norm_region(f) ** 2 == pytest.approx(9 * r.discrete_measure, rel=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 40), st.integers(1, 10), st.integers(0, 2**31 - 1))
def test_pairing_is_symmetric_positive(nx, nt, seed):
    g = build_grid(-1, 1, nx, 1.0, nt)
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal(g.shape), rng.standard_normal(g.shape)
    assert inner_product_Q(a, b, g) == pytest.approx(inner_product_Q(b, a, g), rel=1e-12, abs=1e-14)
    assert norm_Q(a, g) > 0
    r = make_region(g, [(-1, 1)])
    fa = DoseField(r, a[0])
    assert inner_product_region(fa, fa) == pytest.approx(norm_region(fa) ** 2)
