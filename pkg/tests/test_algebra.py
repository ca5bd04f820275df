import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radial_dunkl.algebra import (
    AlgebraContext,
    MultiplicityFunction,
    WallProximityError,
    alternating_poly_sq,
    cross_term_sum,
    drift,
    grad_alternating_poly_sq,
    laplacian_alternating_poly_sq,
    time_change_density,
    weight,
)
from radial_dunkl.roots import build_root_system, reflect
from radial_dunkl.verify import CATALOGUE, catalogue_contexts, grad_fd, interior_points, laplacian_oracle


def ctx_for(family, size, ks):
    s = build_root_system(family, size)
    m = MultiplicityFunction.uniform(s, ks) if np.isscalar(ks) else MultiplicityFunction(tuple(ks))
    return AlgebraContext(s, m)


RANK1 = ("A", 2)


def test_multiplicity_validation():
    with pytest.raises(ValueError):
        MultiplicityFunction((-0.1,))
    with pytest.raises(ValueError):
        MultiplicityFunction((0.0, 0.3))
    with pytest.raises(ValueError):
        MultiplicityFunction(())
    s = build_root_system("B", 2)
    with pytest.raises(ValueError):
        AlgebraContext(s, MultiplicityFunction((0.3,)))


def test_context_k_follows_orbits():
    s = build_root_system("B", 3)
    ctx = AlgebraContext(s, MultiplicityFunction((0.2, 0.7)))
    for i, o in enumerate(s.orbits):
        assert ctx.k[i] == (0.2, 0.7)[o]
    assert np.all(ctx.squared_norms > 0)


def test_weight_examples():
    ctx = ctx_for(*RANK1, 0.5)
    assert np.isclose(weight(ctx, [0.0, 3.0]), 3.0)
    a2 = ctx_for("A", 3, 0.3)
    assert weight(a2, [1.0, 1.0, 2.0]) == 0.0
    tiny = ctx_for("A", 3, 1e-12)
    assert np.isclose(weight(tiny, [0.0, 1.0, 3.0]), 1.0, atol=1e-10)
    with pytest.raises(ValueError):
        weight(a2, [3.0, 1.0, 2.0])


def test_alternating_poly_examples():
    a2 = ctx_for("A", 3, 0.3)
    assert np.isclose(alternating_poly_sq(a2, [0.0, 1.0, 3.0]), 36.0)
    assert alternating_poly_sq(a2, [1.0, 1.0, 3.0]) == 0.0
    r1 = ctx_for(*RANK1, 0.3)
    assert np.isclose(alternating_poly_sq(r1, [0.5, 2.0]), 2.25)


def test_gradient_rank1():
    r1 = ctx_for(*RANK1, 0.3)
    a, b = 0.5, 2.0
    g = grad_alternating_poly_sq(r1, [a, b])
    assert np.allclose(g, [-2 * (b - a), 2 * (b - a)])
    with pytest.raises(WallProximityError):
        grad_alternating_poly_sq(r1, [1.0, 1.0])


@pytest.mark.parametrize("family,size", CATALOGUE)
def test_gradient_and_laplacian_oracles(family, size):
    ctx = ctx_for(family, size, 0.3)
    rng = np.random.default_rng(hash((family, size)) % 2**32)
    for x in interior_points(ctx.system, 20, rng, rel_margin=1e-2):
        g = grad_alternating_poly_sq(ctx, x)
        assert np.linalg.norm(grad_fd(ctx, x) - g) / np.linalg.norm(g) < 1e-6
        two_s = 2 * time_change_density(ctx, x)
        assert abs(laplacian_oracle(ctx, x) - two_s) / two_s < 1e-8
        # closed form with cross terms kept agrees as well
        assert abs(laplacian_alternating_poly_sq(ctx, x) - two_s) / two_s < 1e-8


@pytest.mark.parametrize("family,size", [("A", 3), ("B", 3), ("I2", 5)])
def test_gradient_reflects_with_point(family, size):
    ctx = ctx_for(family, size, 0.3)
    rng = np.random.default_rng(0)
    for x in interior_points(ctx.system, 5, rng):
        for a in ctx.system.positive:
            y = reflect(x, a)
            assert np.isclose(alternating_poly_sq(ctx, y), alternating_poly_sq(ctx, x), rtol=1e-10)
            gy = grad_alternating_poly_sq(ctx, y)
            assert np.allclose(gy, reflect(grad_alternating_poly_sq(ctx, x), a), rtol=1e-8, atol=1e-10)


def test_density_examples():
    r1 = ctx_for(*RANK1, 0.3)
    for x in ([0.0, 1.0], [3.0, -2.0], [1.0, 1.0]):
        assert time_change_density(r1, x) == 2.0
    a2 = ctx_for("A", 3, 0.3)
    assert time_change_density(a2, [0.0, 1.0, 3.0]) > 0
    # one wall: one term survives; two walls (triple point): zero
    assert time_change_density(a2, [1.0, 1.0, 3.0]) > 0
    assert time_change_density(a2, [1.0, 1.0, 1.0]) == 0.0
    b2 = ctx_for("B", 2, 0.3)
    assert time_change_density(b2, [0.0, 0.0]) == 0.0


@pytest.mark.parametrize("name,ctx", catalogue_contexts())
def test_density_interior_form_and_weight_at_k1(name, ctx):
    rng = np.random.default_rng(1)
    s = ctx.system
    ctx1 = AlgebraContext(s, MultiplicityFunction.uniform(s, 1.0))
    for x in interior_points(s, 20, rng):
        v = alternating_poly_sq(ctx, x)
        d = s.positive @ x
        assert np.isclose(time_change_density(ctx, x), v * np.sum(s.squared_norms / d**2), rtol=1e-10)
        assert np.isclose(weight(ctx1, x), v, rtol=1e-12)


@pytest.mark.parametrize("name,ctx", catalogue_contexts())
def test_cross_term_cancels(name, ctx):
    rng = np.random.default_rng(2)
    for x in interior_points(ctx.system, 50, rng):
        val, scale = cross_term_sum(ctx, x, with_scale=True)
        assert abs(val) <= 1e-8 * max(scale, 1e-300)


def test_cross_term_examples():
    r1 = ctx_for(*RANK1, 0.3)
    assert cross_term_sum(r1, [0.0, 1.0]) == 0.0
    with pytest.raises(WallProximityError):
        cross_term_sum(ctx_for("A", 3, 0.3), [1.0, 1.0 + 1e-10, 2.0])


def test_cross_term_detects_non_invariant_k():
    ctx = ctx_for("A", 3, 0.3)
    broken = ctx.k.copy()
    broken[0] = 0.9
    object.__setattr__(ctx, "k", broken)
    val, scale = cross_term_sum(ctx, [0.0, 1.0, 3.0], with_scale=True)
    assert abs(val) > 1e-3 * scale


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.05, 5.0), st.floats(0.1, 10.0))
def test_cross_term_linear_in_k(k1, k2, c):
    s = build_root_system("B", 2)
    x = np.array([0.3, 1.7])
    base = AlgebraContext(s, MultiplicityFunction((k1, k2)))
    scaled = AlgebraContext(s, MultiplicityFunction((c * k1, c * k2)))
    r1, sc = cross_term_sum(base, x, with_scale=True)
    assert abs(cross_term_sum(scaled, x) - c * r1) <= 1e-12 * c * sc


def test_drift_examples():
    k = 0.3
    r1 = ctx_for(*RANK1, k)
    a, b = 0.5, 2.0
    assert np.allclose(drift(r1, [a, b]), k / (b - a) * np.array([-1.0, 1.0]))
    a2 = ctx_for("A", 3, 1.0)
    x = np.array([0.0, 1.0, 2.0])
    # hand expansion: roots e2-e1, e3-e1, e3-e2 with products 1, 2, 1
    expected = np.array([-1, 1, 0]) / 1 + np.array([-1, 0, 1]) / 2 + np.array([0, -1, 1]) / 1
    assert np.allclose(drift(a2, x), expected)
    with pytest.raises(WallProximityError) as info:
        drift(a2, [1.0, 1.0, 2.0])
    assert info.value.root_index is not None


@pytest.mark.parametrize("family,size", [("A", 3), ("B", 2), ("D", 4), ("I2", 6)])
def test_drift_points_into_chamber_near_a_wall(family, size):
    ctx = ctx_for(family, size, 0.3)
    s = ctx.system
    rng = np.random.default_rng(5)
    for x in interior_points(s, 100, rng, rel_margin=0.05):
        g = s.simple_roots[rng.integers(len(s.simple))]
        # slide x to within 1e-6 of the wall of g, other walls stay away
        y = x - ((g @ x) - 1e-6 * np.linalg.norm(g)) / (g @ g) * g
        if (s.positive @ y).min() <= 0 or np.sort((s.positive @ y) / s.norms)[1] < 1e-2:
            continue
        assert g @ drift(ctx, y) > 0
