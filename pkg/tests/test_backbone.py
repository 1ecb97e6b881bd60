from __future__ import annotations

import json

import numpy as np
import pytest

from combflow.backbone import (
    FiniteUMS,
    backbone_distance,
    gromov_weak_compare,
    height_function,
    sample_distance_matrix,
    star_metric,
    tree_distance,
    ums_from_csv_text,
    ums_to_csv_text,
    validate_ultrametric,
)
from combflow.combs import distance_matrix, sample_kingman_comb
from combflow.rng import make_rng

# four points: x, y carry the mass; z1, z2 hang 0.5 below x at mutual
# distance 0.1.  Heights f = (0, 0, 0.5, 0.5).
HANGING = FiniteUMS(
    [
        [0.0, 1.0, 0.5, 0.5],
        [1.0, 0.0, 1.0, 1.0],
        [0.5, 1.0, 0.0, 0.1],
        [0.5, 1.0, 0.1, 0.0],
    ],
    [0.5, 0.5, 0.0, 0.0],
)


def test_validate_ultrametric():
    assert validate_ultrametric([[0.0, 1.0], [1.0, 0.0]])
    # ordinary metric (1.5 <= 1 + 1) that fails the strong form (1.5 > max(1, 1))
    bad = [[0.0, 1.0, 1.5], [1.0, 0.0, 1.0], [1.5, 1.0, 0.0]]
    assert not validate_ultrametric(bad)
    with pytest.raises(ValueError):
        validate_ultrametric([[0.0, 1.0]])
    with pytest.raises(ValueError):
        validate_ultrametric([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(ValueError):
        validate_ultrametric([[0.5, 1.0], [1.0, 0.0]])
    with pytest.raises(ValueError):
        validate_ultrametric([[0.0, -1.0], [-1.0, 0.0]])


def test_finite_ums_validation():
    with pytest.raises(ValueError):
        FiniteUMS([[0.0, 1.5], [1.5, 0.0]], [0.7, 0.7])  # weights don't sum to 1
    with pytest.raises(ValueError):
        FiniteUMS([[0.0, 1.0], [1.0, 0.0]], [1.5, -0.5])
    with pytest.raises(ValueError):
        FiniteUMS([[0.0, 1.0, 1.5], [1.0, 0.0, 1.0], [1.5, 1.0, 0.0]], [0.4, 0.3, 0.3])
    one = FiniteUMS([[0.0]], [1.0])
    assert one.n == 1 and one.heights[0] == 0.0


def test_height_function_three_points():
    space = FiniteUMS(
        [[0.0, 0.2, 0.2], [0.2, 0.0, 0.1], [0.2, 0.1, 0.0]],
        [1.0, 0.0, 0.0],
    )
    assert np.array_equal(height_function(space), np.array([0.0, 0.2, 0.2]))
    all_zero = FiniteUMS([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5])
    assert np.array_equal(all_zero.heights, np.zeros(2))


def test_heights_and_star_metric_on_hanging_pair():
    assert np.array_equal(HANGING.heights, np.array([0.0, 0.0, 0.5, 0.5]))
    star = star_metric(HANGING)
    # the hanging pair is pulled up to height 0.5: their mutual distance
    # grows from 0.1 to 0.5 and they land exactly on top of x's position
    assert star[2, 3] == 0.5
    assert star[2, 0] == star[3, 0] == 0.5
    assert star[2, 1] == star[3, 1] == 1.0
    assert validate_ultrametric(star)


def test_star_metric_is_idempotent():
    star = star_metric(HANGING)
    again = star_metric(FiniteUMS(star, HANGING.weights))
    assert np.array_equal(star, again)


def test_star_metric_fixes_fully_weighted_spaces():
    rng = make_rng(20)
    comb = sample_kingman_comb(rng, 12)
    d = distance_matrix(comb, [t.position for t in comb.teeth])
    space = FiniteUMS(d, np.full(12, 1.0 / 12.0))
    assert np.array_equal(star_metric(space), d)


def test_isosceles_property_of_heights():
    # if d(x, y) < f(x) then y lies inside the ball realising f(x), so
    # f(y) = f(x) bit for bit
    rng = make_rng(21)
    for _ in range(30):
        n = 8
        comb = sample_kingman_comb(rng, n)
        d = distance_matrix(comb, [t.position for t in comb.teeth])
        w = np.zeros(n)
        keep = rng.choice(n, size=3, replace=False)
        w[keep] = 1.0 / 3.0
        space = FiniteUMS(d, w)
        f = space.heights
        for x in range(n):
            for y in range(n):
                if d[x, y] < f[x]:
                    assert f[y] == f[x]


def test_tree_distance_cases():
    assert tree_distance(0.8, 0.0, 0.0) == 0.8
    assert tree_distance(0.0, 0.3, 0.7) == pytest.approx(0.2)
    assert tree_distance(1.0, 1.0, 1.0) == 0.0
    assert tree_distance(1.0, 0.2, 0.4) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        tree_distance(-1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        tree_distance(1.0, -0.1, 0.0)


def test_backbone_plus_heights_reconstructs_star_metric():
    # max(d - (f_x+f_y)/2, |f_x-f_y|/2) + (f_x+f_y)/2 = max(d, f_x, f_y):
    # re-adding the mean lift recovers the star metric on every pair
    star = star_metric(HANGING)
    f = HANGING.heights
    for x in range(4):
        for y in range(4):
            if x != y:
                lifted = backbone_distance(HANGING, x, y) + (f[x] + f[y]) / 2.0
                assert lifted == pytest.approx(star[x, y], abs=1e-12)
    # the hanging pair itself projects to a single backbone point
    assert backbone_distance(HANGING, 2, 3) == 0.0


def test_reconstruction_is_exact_on_dyadic_spaces():
    # heights on the 1/64 grid, separations on the 1/4 grid: every term in
    # the reconstruction is a small dyadic, so == rather than approx
    rng = make_rng(22)
    for _ in range(20):
        ka, kb = int(rng.integers(1, 65)), int(rng.integers(1, 65))
        a, b = ka / 64.0, kb / 64.0
        top = max(a, b)
        d = np.array(
            [
                [0.0, 2.0, 2.0, 2.0],
                [2.0, 0.0, a, b],
                [2.0, a, 0.0, top],
                [2.0, b, top, 0.0],
            ]
        )
        space = FiniteUMS(d, [0.5, 0.5, 0.0, 0.0])
        f = space.heights
        assert tuple(f) == (0.0, 0.0, a, b)
        star = star_metric(space)
        for x in range(4):
            for y in range(4):
                if x != y:
                    got = backbone_distance(space, x, y) + (f[x] + f[y]) / 2.0
                    assert got == star[x, y]


def test_sample_distance_matrix_plain_vs_star_identical_on_support():
    # zero-weight points are never sampled, and on the support the two
    # metrics agree, so shared-RNG draws must be bit-identical
    for rep in range(20):
        a = sample_distance_matrix(HANGING, 30, make_rng(100 + rep), metric="plain")
        b = sample_distance_matrix(HANGING, 30, make_rng(100 + rep), metric="star")
        assert np.array_equal(a, b)
        assert validate_ultrametric(a)


def test_sample_distance_matrix_validation():
    with pytest.raises(ValueError):
        sample_distance_matrix(HANGING, 0, make_rng(0))
    with pytest.raises(ValueError):
        sample_distance_matrix(HANGING, 5, make_rng(0), metric="euclidean")


def test_gromov_compare_same_space_is_small():
    rng = make_rng(23)
    cmp = gromov_weak_compare(HANGING, HANGING, 400, 3, rng)
    assert cmp.pair_ks < 0.1
    assert abs(cmp.triple_energy) < 0.05
    assert cmp.n_samples == 400 and cmp.replicates == 3


def test_gromov_compare_discriminates():
    two_near = FiniteUMS([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5])
    two_far = FiniteUMS([[0.0, 2.0], [2.0, 0.0]], [0.5, 0.5])
    cmp = gromov_weak_compare(two_near, two_far, 400, 3, make_rng(24))
    assert cmp.pair_ks > 0.3
    assert cmp.triple_energy > 0.1
    with pytest.raises(ValueError):
        gromov_weak_compare(two_near, two_far, 1, 3, make_rng(24))


def test_csv_round_trip():
    text = ums_to_csv_text(HANGING)
    assert text.endswith("\n")
    assert len(text.strip().splitlines()) == 5
    back = ums_from_csv_text(text)
    assert np.array_equal(back.dist, HANGING.dist)
    assert np.array_equal(back.weights, HANGING.weights)
    with pytest.raises(ValueError):
        ums_from_csv_text("0.0,1.0\n")


def test_json_round_trip():
    blob = json.dumps(HANGING.to_dict())
    back = FiniteUMS.from_dict(json.loads(blob))
    assert np.array_equal(back.dist, HANGING.dist)
    assert np.array_equal(back.weights, HANGING.weights)
