import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arisblock.blockage import (
    BlockageModelParams, blocker_loss_db, edge_diffraction_factor, link_blockage,
)
from arisblock.errors import ConfigurationError, GeometryError
from arisblock.geometry import Blocker, Point3, make_link

import oracles

LAM = 299_792_458.0 / 60e9
KNIFE = BlockageModelParams()


def body(x, y, h=1.75, w=0.5):
    return Blocker(Point3(x, y, 0.0), h, w, 0.2)


DEVICE_LINK = make_link(Point3(0, 0, 1), Point3(10, 0, 1))


def test_grazing_edge_factor_is_zero():
    assert edge_diffraction_factor(3.0, 4.0, 7.0, LAM, True) == 0.0
    assert edge_diffraction_factor(3.0, 4.0, 7.0, LAM, False) == 0.0


def test_edge_factor_value_and_sign():
    f = edge_diffraction_factor(5.0, 5.01, 10.0, 4.9965e-3, True)
    assert f == pytest.approx(oracles.knife_edge_factor(0.01, 4.9965e-3, True), rel=1e-9)
    assert f == pytest.approx(0.4208, abs=2e-4)
    assert edge_diffraction_factor(5.0, 5.01, 10.0, 4.9965e-3, False) == pytest.approx(-f, rel=1e-15)


def test_edge_factor_rejects_short_paths():
    with pytest.raises(GeometryError):
        edge_diffraction_factor(3.0, 4.0, 7.001, LAM, True)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 100), st.booleans())
def test_edge_factor_bounded(detour, sh):
    f = edge_diffraction_factor(10.0, 10.0 + detour, 20.0, LAM, sh)
    assert -0.5 < f < 0.5


def test_params_validation():
    with pytest.raises(ConfigurationError):
        BlockageModelParams(mode="ray_tracing")
    with pytest.raises(ConfigurationError):
        BlockageModelParams(fixed_loss_db=-1)
    with pytest.raises(ConfigurationError):
        BlockageModelParams(loss_floor_db=-1)


def test_no_crossing_no_loss():
    assert blocker_loss_db(DEVICE_LINK, body(5, 3), LAM) == 0.0


def test_centered_device_plane_blocker_deep_loss():
    # 4 m link: every edge detour is several wavelengths
    short = make_link(Point3(0, 0, 1), Point3(4, 0, 1))
    loss = blocker_loss_db(short, body(2, 0), LAM)
    assert loss > 15.0
    assert loss == pytest.approx(
        oracles.screen_loss_db((0, 0, 1), (4, 0, 1), (2, 0), 0.5, 1.75, LAM), rel=1e-6)
    # on a 10 m link the side detours are only ~2.5 wavelengths
    assert blocker_loss_db(DEVICE_LINK, body(5, 0), LAM) == pytest.approx(
        oracles.screen_loss_db((0, 0, 1), (10, 0, 1), (5, 0), 0.5, 1.75, LAM), rel=1e-6)


def test_fixed_loss_mode():
    params = BlockageModelParams(mode="fixed_loss", fixed_loss_db=30.0)
    assert blocker_loss_db(DEVICE_LINK, body(5, 0), LAM, params) == 30.0
    steep = make_link(Point3(0, 0, 14), Point3(10, 0, 1))
    assert blocker_loss_db(steep, body(5, 0), LAM, params) == 0.0


def test_loss_floor_clamps():
    steep = make_link(Point3(0, 0, 14), Point3(10, 0, 1))
    assert blocker_loss_db(steep, body(5, 0), LAM, BlockageModelParams(loss_floor_db=2.0)) == 2.0


def test_link_blockage_empty():
    res = link_blockage(DEVICE_LINK, [], LAM)
    assert (res.shadowed, res.total_loss_db, res.shadowing_blocker_count) == (False, 0.0, 0)


def test_two_identical_blockers_add():
    # positions mirrored about the midpoint give identical single losses
    single = blocker_loss_db(DEVICE_LINK, body(3, 0.05), LAM)
    other = blocker_loss_db(DEVICE_LINK, body(7, 0.05), LAM)
    assert single == pytest.approx(other, rel=1e-12)
    res = link_blockage(DEVICE_LINK, [body(3, 0.05), body(7, 0.05)], LAM)
    assert res.total_loss_db == pytest.approx(single + other, abs=1e-9)
    assert res.total_loss_db == pytest.approx(2 * single, abs=1e-9)
    assert res.shadowing_blocker_count == 2 and res.shadowed


def test_above_head_crossing_small_loss():
    steep = make_link(Point3(0, 0, 14), Point3(10, 0, 1))
    res = link_blockage(steep, [body(5, 0)], LAM)
    assert not res.shadowed
    assert res.total_loss_db <= 1.0
    assert res.total_loss_db == pytest.approx(
        oracles.screen_loss_db((0, 0, 14), (10, 0, 1), (5, 0), 0.5, 1.75, LAM), abs=1e-6)


def test_matches_independent_screen_oracle():
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 200:
        a = (0.0, 0.0, rng.uniform(0.5, 30))
        b = (rng.uniform(3, 30), 0.0, rng.uniform(0.5, 2.0))
        c = (rng.uniform(0.5, b[0] - 0.5), rng.uniform(-0.3, 0.3))
        blk = body(*c, h=rng.uniform(1.3, 2.0), w=rng.uniform(0.3, 0.7))
        if abs(c[1]) >= blk.width / 2:
            continue
        got = blocker_loss_db(make_link(Point3(*a), Point3(*b)), blk, LAM)
        want = oracles.screen_loss_db(a, b, c, blk.width, blk.height, LAM)
        assert got == pytest.approx(want, rel=1e-6, abs=1e-6)
        checked += 1


def random_blockers(seed, n=40):
    rng = random.Random(seed)
    return [body(rng.uniform(0, 10), rng.uniform(-0.5, 0.5)) for _ in range(n)]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.floats(1, 30))
def test_aggregate_properties(seed, za):
    link = make_link(Point3(0, 0, za), Point3(10, 0.1, 1))
    blockers = random_blockers(seed)
    res = link_blockage(link, blockers, LAM)
    assert res.total_loss_db >= 0
    assert res.shadowed == (res.shadowing_blocker_count > 0)
    shuffled = blockers[:]
    random.Random(seed + 1).shuffle(shuffled)
    assert link_blockage(link, shuffled, LAM) == res
    running = 0.0
    for k in range(1, len(blockers) + 1):
        total = link_blockage(link, blockers[:k], LAM).total_loss_db
        assert total >= running
        running = total


def test_continuity_across_shadow_boundary():
    # far endpoint chosen so the ray crosses x = 5 at exactly the body height when z_b = zb0
    blk = body(5, 0.02)
    za = 1.0
    zb0 = 2 * 1.75 - za
    below = make_link(Point3(0, 0, za), Point3(10, 0, zb0 - 1e-3))
    above = make_link(Point3(0, 0, za), Point3(10, 0, zb0 + 1e-3))
    l_below = blocker_loss_db(below, blk, LAM)
    l_above = blocker_loss_db(above, blk, LAM)
    assert link_blockage(below, [blk], LAM).shadowed
    assert not link_blockage(above, [blk], LAM).shadowed
    assert abs(l_below - l_above) < 0.5


@pytest.mark.parametrize("x", [2.0, 5.0, 8.0])
def test_deep_shadow_loss_grows_with_frequency(x):
    blk = body(x, 0.0)
    losses = [blocker_loss_db(DEVICE_LINK, blk, 299_792_458.0 / f) for f in (10e9, 28e9, 60e9, 140e9)]
    assert losses == sorted(losses)
