from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from combflow.bridges import (
    Bridge,
    _distinct_uniforms,
    _flow_increment,
    _partition_from_counts,
    adjacent_merge_evolution,
    bridge_from_interval_partition,
    compose,
    flow_comb,
    interval_partition_of,
    lambda_comb_step,
)
from combflow.combs import comb_distance
from combflow.intervals import IntervalPartition, dust_mass, mass_partition
from combflow.rates import KINGMAN, UniformLambda
from combflow.rng import make_rng
from combflow.stats import ks_two_sample

DRIFT_HALF = Bridge(0.5, [(0.5, 0.5)])


def random_bridge(rng, max_jumps: int = 4, force_drift: float | None = None) -> Bridge:
    k = int(rng.integers(0, max_jumps + 1))
    if k == 0:
        return Bridge.identity()
    drift = force_drift if force_drift is not None else (float(rng.random()) * 0.9 if rng.random() < 0.7 else 0.0)
    raw = rng.random(k) + 0.05
    sizes = raw / raw.sum() * (1.0 - drift)
    locs = np.sort(_distinct_uniforms(rng, k))
    return Bridge(drift, list(zip(locs.tolist(), sizes.tolist())))


def dyadic_bridge(rng) -> Bridge:
    """Random bridge with power-of-two drift and 1/64-grid jumps.

    On this family every number reached by composition stays an exactly
    representable dyadic rational, so associativity can be asserted with ==.
    """
    drifts = [0.0, 1 / 64, 1 / 16, 1 / 8, 1 / 4, 1 / 2]
    drift = drifts[rng.integers(len(drifts))]
    rest = round((1.0 - drift) * 64)
    if rest == 0:
        return Bridge(1.0)
    k = int(rng.integers(1, min(5, rest) + 1))
    cuts = np.sort(rng.choice(np.arange(1, rest), size=k - 1, replace=False)) if k > 1 else np.array([], dtype=int)
    parts = np.diff(np.concatenate(([0], cuts, [rest])))
    locs = np.sort(rng.choice(np.arange(1, 65), size=k, replace=False)) / 64.0
    return Bridge(drift, list(zip(locs.tolist(), (parts / 64.0).tolist())))


# ---------------------------------------------------------------------------
# construction, evaluation, inversion


def test_bridge_validation():
    Bridge(0.0, [(1.0, 1.0)])  # location 1 is allowed
    with pytest.raises(ValueError):
        Bridge(-0.1, [(0.5, 1.1)])
    with pytest.raises(ValueError):
        Bridge(0.0, [(0.0, 1.0)])  # location 0 is not
    with pytest.raises(ValueError):
        Bridge(0.0, [(0.5, 0.5), (0.5, 0.5)])  # duplicate locations
    with pytest.raises(ValueError):
        Bridge(0.0, [(0.6, 0.5), (0.4, 0.5)])  # must increase
    with pytest.raises(ValueError):
        Bridge(0.0, [(0.5, 0.9)])  # does not close to 1
    with pytest.raises(ValueError):
        Bridge(0.5, [(0.5, -0.5), (0.6, 1.0)])


def test_identity_bridge():
    ident = Bridge.identity()
    for x in (0.0, 0.25, 1.0):
        assert ident(x) == x
        assert ident.inverse(x) == x
    assert interval_partition_of(ident) == IntervalPartition.empty()


def test_eval_and_left_limit():
    assert DRIFT_HALF(0.5) == 0.75
    assert DRIFT_HALF.left_limit(0.5) == 0.25
    assert DRIFT_HALF(0.49) == 0.245
    assert DRIFT_HALF(1.0) == 1.0
    step = Bridge(0.0, [(0.5, 1.0)])
    assert step(0.4) == 0.0 and step(0.5) == 1.0


def test_inverse_definition_wins_over_arithmetic():
    # inf{x : B(x) > y}: the jump at 0.5 spans values (0.25, 0.75], so any
    # y in [0.25, 0.75) inverts to 0.5 itself
    assert DRIFT_HALF.inverse(0.3) == 0.5
    assert DRIFT_HALF.inverse(0.8) == pytest.approx(0.6, abs=1e-12)
    assert DRIFT_HALF.inverse(1.0) == 1.0
    step = Bridge(0.0, [(0.5, 1.0)])
    for y in (0.0, 0.3, 0.99):
        assert step.inverse(y) == 0.5


def test_preimage():
    assert DRIFT_HALF.preimage(0.75) == 0.5
    assert DRIFT_HALF.preimage(0.2) == pytest.approx(0.4, abs=1e-15)
    assert DRIFT_HALF.preimage(1.0) == 1.0


def test_inverse_of_eval_fixes_points_when_drift_positive():
    rng = make_rng(31)
    for _ in range(40):
        b = random_bridge(rng, force_drift=0.2 + 0.6 * float(rng.random()))
        for x in rng.random(20):
            assert abs(b.inverse(b(float(x))) - float(x)) < 1e-12


def test_inverse_is_generalized_inverse():
    rng = make_rng(32)
    for _ in range(40):
        b = random_bridge(rng)
        for y in rng.random(20):
            inv = b.inverse(float(y))
            assert b(inv) >= y - 1e-12
            if inv > 0.0:
                assert b.left_limit(inv) <= y + 1e-12


def test_dict_round_trip():
    assert Bridge.from_dict(DRIFT_HALF.to_dict()) == DRIFT_HALF


# ---------------------------------------------------------------------------
# the partition of a bridge


def test_interval_partition_of_examples():
    assert interval_partition_of(Bridge(0.0, [(0.7, 1.0)])) == IntervalPartition.full()
    assert interval_partition_of(DRIFT_HALF).components == ((0.25, 0.75),)


def test_interval_partition_mass_matches_jumps():
    rng = make_rng(33)
    for _ in range(50):
        b = random_bridge(rng)
        p = interval_partition_of(b)
        assert abs(dust_mass(p) - b.drift) < 1e-9
        assert len(p) <= len(b.jumps)


# ---------------------------------------------------------------------------
# composition


def test_compose_with_identity_is_field_exact():
    rng = make_rng(34)
    for _ in range(30):
        b = random_bridge(rng)
        assert compose(b, Bridge.identity()) == b
        assert compose(Bridge.identity(), b) == b


def test_compose_two_unit_steps():
    a = Bridge(0.0, [(0.5, 1.0)])
    b = Bridge(0.0, [(0.3, 1.0)])
    assert interval_partition_of(compose(a, b)) == IntervalPartition.full()


def test_compose_agrees_pointwise():
    rng = make_rng(35)
    for _ in range(60):
        outer, inner = random_bridge(rng), random_bridge(rng)
        c = compose(outer, inner)
        for x in rng.random(25):
            assert abs(c(float(x)) - outer(inner(float(x)))) < 1e-12


def test_compose_coarsens_outer_partition():
    rng = make_rng(36)
    for _ in range(60):
        outer, inner = random_bridge(rng), random_bridge(rng)
        coarse = interval_partition_of(compose(outer, inner)).components
        for lo, hi in interval_partition_of(outer).components:
            assert any(L <= lo + 1e-12 and hi <= R + 1e-12 for L, R in coarse)


def test_compose_merges_coincident_locations():
    outer = Bridge(0.0, [(0.2, 0.5), (0.8, 0.5)])
    inner = Bridge(0.0, [(0.4, 1.0)])  # value span (0, 1] absorbs both
    c = compose(outer, inner)
    assert c.jumps == ((0.4, 1.0),)
    assert c.drift == 0.0


def test_compose_associative_on_dyadic_bridges():
    rng = make_rng(99)
    for _ in range(300):
        a, b, c = dyadic_bridge(rng), dyadic_bridge(rng), dyadic_bridge(rng)
        left = compose(compose(a, b), c)
        right = compose(a, compose(b, c))
        assert left.drift == right.drift
        assert left.jumps == right.jumps


def test_output_partition_depends_on_inner_only_through_sizes_and_order():
    # drift-free inner bridges: moving the jump locations (keeping their
    # order) must not change the composed partition at all
    rng = make_rng(37)
    for _ in range(40):
        outer = random_bridge(rng)
        k = int(rng.integers(1, 4))
        raw = rng.random(k) + 0.1
        sizes = (raw / raw.sum()).tolist()
        loc_a = np.sort(_distinct_uniforms(rng, k)).tolist()
        loc_b = np.sort(_distinct_uniforms(rng, k)).tolist()
        inner_a = Bridge(0.0, list(zip(loc_a, sizes)))
        inner_b = Bridge(0.0, list(zip(loc_b, sizes)))
        pa = interval_partition_of(compose(outer, inner_a))
        pb = interval_partition_of(compose(outer, inner_b))
        assert pa == pb


# ---------------------------------------------------------------------------
# partitions -> bridges


def test_bridge_from_empty_partition_is_identity():
    assert bridge_from_interval_partition(IntervalPartition.empty(), make_rng(0)) == Bridge.identity()


def test_bridge_from_full_partition():
    b = bridge_from_interval_partition(IntervalPartition.full(), make_rng(1))
    assert b.drift == 0.0
    assert len(b.jumps) == 1
    assert b.jumps[0][1] == 1.0
    assert interval_partition_of(b) == IntervalPartition.full()


def test_bridge_keeps_left_to_right_arrangement():
    # the i-th leftmost component's length rides the i-th order statistic;
    # this is what makes the composed evolution merge spatially adjacent
    # components, so it is load-bearing, not cosmetic
    p = IntervalPartition([(0.0, 0.2), (0.3, 0.75), (0.8, 0.9)])
    rng = make_rng(2)
    for _ in range(25):
        b = bridge_from_interval_partition(p, rng)
        assert [s for _, s in b.jumps] == list(p.lengths)
        locs = [v for v, _ in b.jumps]
        assert locs == sorted(locs)


def test_bridge_round_trip_preserves_masses_and_dust():
    rng = make_rng(3)
    for _ in range(40):
        cuts = np.sort(rng.random(6))
        p = IntervalPartition([(cuts[0], cuts[1]), (cuts[2], cuts[3]), (cuts[4], cuts[5])])
        b = bridge_from_interval_partition(p, rng)
        q = interval_partition_of(b)
        assert np.allclose(sorted(q.lengths), sorted(p.lengths), atol=1e-12)
        assert abs(dust_mass(q) - dust_mass(p)) < 1e-12


# ---------------------------------------------------------------------------
# the two interval-partition evolutions


TEN_DYADIC = IntervalPartition([(i / 16.0, (i + 1) / 16.0) for i in range(9)] + [(9 / 16.0, 1.0)])


def test_adjacent_merge_leaves_fixed_points():
    rng = make_rng(4)
    assert adjacent_merge_evolution(TEN_DYADIC, KINGMAN, 0.0, rng) == TEN_DYADIC
    single = IntervalPartition.full()
    assert adjacent_merge_evolution(single, KINGMAN, 100.0, rng) == single


def test_adjacent_merge_rejects_dust():
    dusty = IntervalPartition([(0.0, 0.4), (0.6, 1.0)])
    with pytest.raises(ValueError):
        adjacent_merge_evolution(dusty, KINGMAN, 1.0, make_rng(5))


def test_adjacent_merge_only_merges_neighbours():
    rng = make_rng(6)
    for _ in range(50):
        out = adjacent_merge_evolution(TEN_DYADIC, KINGMAN, 0.3, rng)
        # every output component is a union of consecutive input components
        starts = {c[0] for c in TEN_DYADIC.components}
        ends = {c[1] for c in TEN_DYADIC.components}
        for lo, hi in out.components:
            assert lo in starts and hi in ends


def test_adjacent_merge_absorption_probability():
    # four equal components under Kingman: absorption time is hypoexponential
    # with rates 6, 3, 1; P(absorbed by t=1) = 1 - (0.2 e^-6 - e^-3 + 1.8 e^-1)
    rng = make_rng(7)
    four = IntervalPartition([(i / 4.0, (i + 1) / 4.0) for i in range(4)])
    n = 1500
    hits = sum(
        1 for _ in range(n) if adjacent_merge_evolution(four, KINGMAN, 1.0, rng) == IntervalPartition.full()
    )
    p_absorbed = 1.0 - (0.2 * math.exp(-6.0) - math.exp(-3.0) + 1.8 * math.exp(-1.0))
    assert stats.binomtest(hits, n, p_absorbed).pvalue > 1e-6


def test_adjacent_merge_absorbs_eventually():
    rng = make_rng(8)
    four = IntervalPartition([(i / 4.0, (i + 1) / 4.0) for i in range(4)])
    for _ in range(100):
        assert adjacent_merge_evolution(four, KINGMAN, 50.0, rng) == IntervalPartition.full()


def test_lambda_comb_step_resolution_check():
    with pytest.raises(ValueError):
        lambda_comb_step(TEN_DYADIC, KINGMAN, 0.5, 5, make_rng(9))


def test_lambda_comb_step_s_zero_is_exact():
    # no coalescent time, no merging: the mass-partition survives bit-for-bit
    # (pinned seeds avoid the ~K^2/2m chance of two components sharing a cell)
    want = mass_partition(TEN_DYADIC).masses
    for seed in range(20):
        out = lambda_comb_step(TEN_DYADIC, KINGMAN, 0.0, 2000, make_rng(seed))
        assert mass_partition(out).masses == want


def test_lambda_comb_step_absorbs_for_large_s():
    rng = make_rng(10)
    five = IntervalPartition([(i / 5.0, (i + 1) / 5.0) for i in range(5)])
    for _ in range(100):
        assert lambda_comb_step(five, KINGMAN, 30.0, 100, rng) == IntervalPartition.full()


def test_evolutions_agree_regardless_of_arrangement():
    # the largest-mass law must match even when the big component sits first:
    # both evolutions read the spatial arrangement off the same input
    start = IntervalPartition(
        [(0.0, 7 / 16.0)] + [(7 / 16.0 + i / 16.0, 7 / 16.0 + (i + 1) / 16.0) for i in range(9)]
    )
    rng_a, rng_b = make_rng(11), make_rng(12)
    n = 1200
    a = np.array([max(mass_partition(adjacent_merge_evolution(start, KINGMAN, 0.5, rng_a)).masses) for _ in range(n)])
    b = np.array([max(mass_partition(lambda_comb_step(start, KINGMAN, 0.5, 2000, rng_b)).masses) for _ in range(n)])
    assert ks_two_sample(a, b) < 0.07


# ---------------------------------------------------------------------------
# the flow comb


def test_flow_comb_single_grid_point():
    c = flow_comb(KINGMAN, [0.0], 50, make_rng(13))
    assert len(c.events) == 1
    assert c.events[0][0] == 0.0
    assert len(c.events[0][1]) == 50


def test_flow_comb_structure():
    grid = [0.0, 0.3, 0.6, 1.2, 2.5]
    for measure in (KINGMAN, UniformLambda(1.0)):
        c = flow_comb(measure, grid, 200, make_rng(14))
        times = [t for t, _ in c.events]
        assert times[0] == 0.0
        assert set(times) <= set(grid)
        counts = [len(p) for _, p in c.events]
        assert counts == sorted(counts, reverse=True)
        for _, p in c.events:
            for lo, hi in p.components:
                assert abs(lo * 200 - round(lo * 200)) < 1e-9
                assert abs(hi * 200 - round(hi * 200)) < 1e-9


def test_flow_comb_grid_validation():
    with pytest.raises(ValueError):
        flow_comb(KINGMAN, [0.5, 1.0], 10, make_rng(15))
    with pytest.raises(ValueError):
        flow_comb(KINGMAN, [0.0, 0.0], 10, make_rng(15))
    with pytest.raises(ValueError):
        flow_comb(KINGMAN, [], 10, make_rng(15))


def test_flow_increment_is_bridge_composition():
    # the integer fast path must be compose() in disguise
    rng = make_rng(16)
    m = 16
    sizes = np.ones(m, dtype=np.int64)
    locs = _distinct_uniforms(rng, m)
    for _ in range(3):
        running = Bridge(0.0, sorted(zip(locs.tolist(), (sizes / m).tolist())))
        new_sizes, new_locs, inc_sizes, inc_locs = _flow_increment(sizes, locs, KINGMAN, 0.4, m, rng)
        inner = Bridge(0.0, sorted(zip(inc_locs.tolist(), (inc_sizes / m).tolist())))
        composed = compose(running, inner)
        got = _partition_from_counts(new_sizes, m)
        want = interval_partition_of(composed)
        assert len(got) == len(want)
        assert np.allclose(np.array(got.components), np.array(want.components), atol=1e-12)
        sizes, locs = new_sizes, new_locs


def test_flow_comb_pair_merge_times_track_grid_censored_exponential():
    rng = make_rng(17)
    grid = [0.25 * k for k in range(17)]  # 0 .. 4
    n = 1200
    merged_at = []
    for _ in range(n):
        c = flow_comb(KINGMAN, grid, 400, rng)
        x, y = rng.random(2)
        merged_at.append(comb_distance(c, float(x), float(y)))
    merged_at = np.array(merged_at)
    worst = max(
        abs(np.mean(merged_at <= g) - (1.0 - math.exp(-g))) for g in grid[1:]
    )
    assert worst < 0.05
