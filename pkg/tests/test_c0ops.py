import numpy as np
import pytest

import oracles
from conftest import make
from holder.c0ops import (
    CoordinateSet,
    UnsupportedGeometry,
    local_coordinate_dependence_check,
    soft_threshold,
    soft_threshold_map,
    tensor_mollify,
)
from holder.fixtures import generate, parse_fixture
from holder.funcgrid import NormSpec
from holder.modulus import Modulus
from holder.oscillation import seminorm

HALF = Modulus.power(0.5)
SUP = NormSpec("l2", "linf")


def fixture_2d(seed=100, spacing=1 / 16, half=1.0):
    spec = parse_fixture(f"random_smooth:seed={seed},modes=6", lo=-half, hi=half, spacing=spacing, dim=2)
    return generate(spec).with_norms(x="linf")


def test_soft_threshold_scalar():
    assert soft_threshold([-2.0, -0.5, 0.0, 0.3, 1.5], 1.0).tolist() == [-1.0, 0.0, 0.0, 0.0, 0.5]


def test_large_radius_collapses_to_origin_value():
    f = fixture_2d()
    g = soft_threshold_map(f, 5.0)
    c = f.values[f.grid.index_of([0.0, 0.0])]
    assert np.all(g.values == c)


def test_ramp_threshold_exact():
    f = make(np.arange(-16, 17) / 16, lo=-1, spacing=1 / 16, norms=SUP)
    g = soft_threshold_map(f, 0.25)
    x = f.grid.points()[..., 0]
    assert np.array_equal(g.values[..., 0], soft_threshold(x, 0.25))


def test_threshold_needs_sup_norm():
    f = make(np.zeros((5, 5)), lo=-1, spacing=0.5)
    with pytest.raises(UnsupportedGeometry):
        soft_threshold_map(f, 0.25)


@pytest.mark.parametrize("r", [1 / 16, 1 / 4, 1 / 2])
def test_threshold_sup_bound_2d(r):
    f = fixture_2d()
    g = soft_threshold_map(f, r)
    sup = float(np.max(np.abs(f.values - g.values)))
    assert sup <= HALF(r) * seminorm(f, HALF) * (1 + 1e-12)


def test_locality_at_origin_is_constant():
    f = fixture_2d()
    g = soft_threshold_map(f, 0.5)
    rep = local_coordinate_dependence_check(g, 0.5, [f.grid.index_of([0.0, 0.0])])
    assert rep.coordinate_sets == ((),)
    assert rep.ok
    near = np.max(np.abs(f.grid.points()), axis=-1) <= 0.25
    assert np.unique(g.values[near]).size == 1


def test_locality_single_axis():
    f = fixture_2d()
    g = soft_threshold_map(f, 0.5)
    rep = local_coordinate_dependence_check(g, 0.5, [f.grid.index_of([1.0, 0.125])])
    assert rep.coordinate_sets == ((0,),)
    assert rep.max_deviation[0] <= 1e-10
    assert rep.checked_points[0] > 1


def test_locality_corner_uses_all_axes():
    f = fixture_2d()
    g = soft_threshold_map(f, 0.5)
    rep = local_coordinate_dependence_check(g, 0.5, [(0, 0)])
    assert rep.coordinate_sets == ((0, 1),)
    assert rep.max_deviation == (0.0,)


def test_locality_random_centres():
    f = fixture_2d()
    g = soft_threshold_map(f, 0.25)
    rng = np.random.default_rng(0)
    centres = [tuple(int(rng.integers(0, s)) for s in f.grid.shape) for _ in range(50)]
    assert local_coordinate_dependence_check(g, 0.25, centres).ok


def test_locality_needs_origin_on_grid():
    f = make(np.zeros((4, 4)), lo=0.1, spacing=0.5, norms=SUP)
    with pytest.raises(ValueError):
        local_coordinate_dependence_check(f, 0.5, [(0, 0)])


def test_coordinate_set_projection():
    s = CoordinateSet([1])
    assert s.project(np.array([[3.0, 4.0, 5.0]])).tolist() == [[0.0, 4.0, 0.0]]
    with pytest.raises(ValueError):
        CoordinateSet([3]).check(2)


# ---------------------------------------------------------------------------
# tensor mollification


def test_tensor_constant():
    f = make(np.full((9, 9), 2.0), spacing=1 / 8)
    assert np.allclose(tensor_mollify(f, 0.25).values, 2.0, rtol=0, atol=1e-15)


def test_tensor_no_axes_identity():
    f = fixture_2d()
    assert np.array_equal(tensor_mollify(f, 0.25, axes=[]).values, f.values)


def test_tensor_eta_below_spacing():
    with pytest.raises(ValueError):
        tensor_mollify(fixture_2d(), 1 / 32)


def test_tensor_bounds_against_oracle():
    g = fixture_2d(spacing=1 / 16, half=0.5)
    h = tensor_mollify(g, 1 / 8, axes=[0, 1])
    assert not np.array_equal(h.values, g.values)
    sg = oracles.seminorm(g, HALF)
    assert oracles.seminorm(h, HALF) <= sg
    assert float(np.max(np.abs(h.values - g.values))) <= sg * HALF(1 / 8)


def test_tensor_single_axis_leaves_other_alone():
    g = fixture_2d(spacing=1 / 8)
    x = g.grid.points()[..., 0]
    f = g.like(x)  # depends on axis 0 only
    h = tensor_mollify(f, 0.5, axes=[1])
    assert np.allclose(h.values, f.values, rtol=0, atol=1e-15)
