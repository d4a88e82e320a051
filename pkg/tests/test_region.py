import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import nonreciprocal_channel, reciprocal_channel, trivial_setup, unit_config
from twrelay.channel import Individual, SumPower, SystemConfig, effective_channels, snr_pair
from twrelay.errors import ParameterError
from twrelay.nonreciprocal import BisectionConfig
from twrelay.oracle import enumerate_rate_cloud, feasible_samples
from twrelay.region import (
    DEFAULT_MU_GRID,
    build_region,
    check_dominance_preservation,
    check_segment_convexity,
    check_weighted_ties,
    convex_hull,
    distance_outside,
    hull_area,
    map_u,
    pareto_filter,
    sweep_nonreciprocal,
    sweep_reciprocal,
)

positive = st.floats(1e-3, 1e3)


def test_map_u_examples():
    np.testing.assert_allclose(map_u([1.0, 1.0]), [0.5, 0.5])
    np.testing.assert_allclose(map_u([1 / 3, 1.0]), [1.0, 0.5])
    with pytest.raises(ParameterError):
        map_u([0.0, 1.0])
    with pytest.raises(ParameterError):
        map_u([1.0, -2.0])


@given(t=st.tuples(positive, positive), dt=st.tuples(st.floats(1e-3, 10), st.floats(1e-3, 10)))
def test_map_u_reverses_order(t, dt):
    a = map_u(np.array(t))
    b = map_u(np.array(t) + np.array(dt))
    assert np.all(a > b)


def test_pareto_filter_examples():
    pts = [(1, 0), (0, 1), (0.4, 0.4)]
    assert len(pareto_filter(pts)) == 3
    np.testing.assert_array_equal(pareto_filter([(1, 1), (0.5, 0.5)]), [[1, 1]])


@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 60))
def test_pareto_filter_exhaustive(seed, n):
    rng = np.random.default_rng(seed)
    pts = np.round(rng.uniform(size=(n, 2)), 1)
    kept = pareto_filter(pts)
    for p in kept:
        dominated = np.any(np.all(pts >= p, axis=1) & np.any(pts > p, axis=1))
        assert not dominated
    # every dropped point is dominated by something
    for p in pts:
        if not np.any(np.all(kept == p, axis=1)):
            assert np.any(np.all(pts >= p, axis=1) & np.any(pts > p, axis=1))


def test_convex_hull_examples():
    tri = np.array([[0, 0], [2, 0], [0, 1]], float)
    h = convex_hull(tri)
    assert {tuple(v) for v in h} == {tuple(v) for v in tri}
    sq = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]], float)
    h = convex_hull(sq)
    assert {tuple(v) for v in h} == {(0, 0), (1, 0), (1, 1), (0, 1)}
    # collinear points and duplicates collapse
    h = convex_hull([[0, 0], [1, 0], [2, 0], [2, 0], [0, 1]])
    assert len(h) == 3
    with pytest.raises(ParameterError):
        convex_hull(np.zeros((0, 2)))
    assert hull_area(convex_hull(sq)) == pytest.approx(1.0)


@given(seed=st.integers(0, 2**32 - 1))
def test_convex_hull_contains_inputs(seed):
    pts = np.random.default_rng(seed).standard_normal((100, 2))
    h = convex_hull(pts)
    assert np.all(distance_outside(h, pts) <= 1e-9)
    # counter-clockwise orientation gives a positive shoelace area
    assert hull_area(h) > 0


def test_region_invariants(rng):
    pts = rng.uniform(0.1, 1.0, (30, 2))
    reg = build_region(pts)
    verts = {tuple(v) for v in reg.hull_vertices}
    assert (0.0, 0.0) in verts
    assert (reg.r1_max, 0.0) in verts and (0.0, reg.r2_max) in verts
    assert np.all(reg.contains(pts, 1e-9))


def test_single_relay_region_is_square():
    ch, cfg = trivial_setup()
    reg = sweep_reciprocal(ch, cfg, np.linspace(0, 1, 7))
    r = 0.5 * np.log2(1.5)
    np.testing.assert_allclose(reg.raw_points, r, rtol=1e-12)
    want = {(0.0, 0.0), (r, 0.0), (r, r), (0.0, r)}
    got = {tuple(np.round(v, 12)) for v in reg.hull_vertices}
    assert got == {tuple(np.round(v, 12)) for v in want}


def one_way_maxima(eff, cfg):
    p_r = cfg.relay_constraint.total
    s1 = cfg.p_s2 * np.sum(np.abs(eff.f2) ** 2 / (cfg.sigma_s1 * eff.d / p_r + eff.a1))
    s2 = cfg.p_s1 * np.sum(np.abs(eff.f1) ** 2 / (cfg.sigma_s2 * eff.d / p_r + eff.a2))
    return 0.5 * np.log2(1 + s1), 0.5 * np.log2(1 + s2)


def test_endpoint_grid_contains_one_way_points(rng):
    ch = reciprocal_channel(rng, 3)
    cfg = unit_config(3, SumPower(10.0))
    reg = sweep_reciprocal(ch, cfg, [0.0, 1.0])
    assert np.all(reg.contains(reg.raw_points))
    # mu = 1 favours S1 and attains its one-way maximum
    r1, r2 = one_way_maxima(effective_channels(ch, cfg), cfg)
    assert reg.raw_points[1, 0] == pytest.approx(r1, rel=1e-12)
    assert reg.raw_points[0, 1] == pytest.approx(r2, rel=1e-12)


def test_hull_vertices_undominated(rng):
    ch = reciprocal_channel(rng, 3)
    reg = sweep_reciprocal(ch, unit_config(3, SumPower(10.0)), DEFAULT_MU_GRID)
    raw = reg.raw_points
    for v in reg.hull_vertices:
        if not np.any(np.all(np.isclose(raw, v, rtol=0, atol=0), axis=1)):
            continue  # origin and axis anchors
        assert not np.any(np.all(raw >= v, axis=1) & np.any(raw > v, axis=1))


def test_kappa_endpoints_axis_maximal(rng):
    ch = nonreciprocal_channel(rng, 3)
    cfg = unit_config(3, SumPower(10.0))
    reg = sweep_nonreciprocal(ch, cfg, [0.0, 1.0], BisectionConfig(epsilon=1e-4))
    r1, r2 = one_way_maxima(effective_channels(ch, cfg), cfg)
    assert reg.raw_points[1, 0] == pytest.approx(r1, abs=1e-4)
    assert reg.raw_points[0, 1] == pytest.approx(r2, abs=1e-4)


def test_individual_region_inside_sum_region(rng):
    p = np.array([1.0, 3.0, 2.0])
    ch = nonreciprocal_channel(rng, 3)
    grid = np.linspace(0, 1, 6)
    bis = BisectionConfig(epsilon=1e-3)
    rs = sweep_nonreciprocal(ch, unit_config(3, SumPower(p.sum())), grid, bis)
    ri = sweep_nonreciprocal(ch, unit_config(3, Individual(p)), grid, bis, seed=2)
    assert np.all(rs.distance_outside(ri.raw_points) <= 1e-3)


def test_random_beams_inside_dense_sweep_hull(rng):
    """No feasible beam beats the closed-form boundary once the grid is fine."""
    cfg = unit_config(2, SumPower(10.0))
    fine = np.linspace(0, 1, 1001)
    for _ in range(5):
        ch = reciprocal_channel(rng, 2)
        cloud = enumerate_rate_cloud(effective_channels(ch, cfg), cfg, 100_000, seed=1)
        assert np.all(sweep_reciprocal(ch, cfg, fine).distance_outside(cloud) <= 1e-9)


def test_coarse_grid_chord_error_shrinks(rng):
    ch = reciprocal_channel(rng, 2)
    cfg = unit_config(2, SumPower(10.0))
    truth = sweep_reciprocal(ch, cfg, np.linspace(0, 1, 2001)).raw_points
    err = [sweep_reciprocal(ch, cfg, np.linspace(0, 1, n)).distance_outside(truth).max()
           for n in (11, 21, 41, 81)]
    assert all(b <= a + 1e-12 for a, b in zip(err, err[1:]))
    assert err[-1] <= 1e-3


def test_swapped_channels_mirror_region(rng):
    ch = reciprocal_channel(rng, 4)
    cfg = unit_config(4, SumPower(10.0))
    a = sweep_reciprocal(ch, cfg)
    b = sweep_reciprocal(ch.swapped(), cfg)
    np.testing.assert_allclose(np.sort(b.hull_vertices, axis=0),
                               np.sort(a.mirrored().hull_vertices, axis=0), atol=1e-9)


def test_vanishing_source_power(rng):
    ch = reciprocal_channel(rng, 3)
    cfg = SystemConfig(1.0, 1e-9, np.ones(3), 1.0, 1.0, SumPower(10.0))
    reg = sweep_reciprocal(ch, cfg)
    assert reg.r1_max < 1e-6
    assert reg.r2_max > 0.1


# ---- inverse-SNR mapping properties


def test_dominance_examples():
    rep = check_dominance_preservation([(1, 2), (2, 3)])
    assert rep.passed and rep.dominated_pairs > 0
    rep = check_dominance_preservation([(1, 1), (1, 1)])
    assert rep.passed and rep.dominated_pairs == 0


@given(seed=st.integers(0, 2**32 - 1))
def test_dominance_random(seed):
    t = np.exp(np.random.default_rng(seed).uniform(-3, 3, (40, 2)))
    assert check_dominance_preservation(t).violations == 0


def test_segment_examples():
    assert check_segment_convexity((1, 2), (2, 1), 50).passed
    assert check_segment_convexity((1, 2), (1, 2), 50).passed
    assert check_segment_convexity((1, 2), (3, 2), 50).passed
    with pytest.raises(ParameterError):
        check_segment_convexity((0, 1), (1, 1))


@given(a=st.tuples(st.floats(0.01, 100), st.floats(0.01, 100)),
       b=st.tuples(st.floats(0.01, 100), st.floats(0.01, 100)))
def test_segment_convexity_property(a, b):
    # orient so the second coordinate falls as the first grows
    lo, hi = sorted([a, b])
    if hi[1] > lo[1]:
        hi = (hi[0], lo[1] * 0.5)
    assert check_segment_convexity(lo, hi, 50).passed


def test_weighted_ties_on_sampled_boundary(rng):
    ch = reciprocal_channel(rng, 2)
    cfg = unit_config(2, SumPower(10.0))
    eff = effective_channels(ch, cfg)
    W = feasible_samples(eff, cfg, 20_000, seed=5)
    s1, s2 = snr_pair(W, eff, cfg)
    t = np.column_stack([1 / s1, 1 / s2])
    # a hand-made tie at mu = 0.5 with a point above the chord
    rep = check_weighted_ties(np.vstack([[[1, 3], [3, 1], [2, 2.5]]]), [0.5])
    assert rep.passed and rep.weights_with_ties == 1 and rep.points_checked == 1
    assert check_weighted_ties(t, np.linspace(0, 1, 101)).passed
