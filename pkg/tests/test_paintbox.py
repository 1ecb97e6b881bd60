from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from combflow.combs import Comb, sample_kingman_comb
from combflow.intervals import IntervalPartition
from combflow.paintbox import (
    CoalescentTrajectory,
    Composition,
    NestedCompositionTrajectory,
    Partition,
    empirical_interval_partition,
    ordered_paintbox,
    paintbox_sample,
    sample_positions,
    uniform_consistent_ordering,
)
from combflow.rates import KINGMAN
from combflow.chains import simulate_partition_chain
from combflow.rng import make_rng


# ---------------------------------------------------------------------------
# partitions, compositions, trajectories


def test_partition_canonical_form_and_validation():
    p = Partition([[3, 1], [2]])
    assert p.blocks == ((1, 3), (2,))  # sorted by least element, members sorted
    assert p.n == 3
    assert p.blocks[p.block_of[3]] == (1, 3)
    with pytest.raises(ValueError):
        Partition([[1, 2], [2, 3]])  # duplicate label
    with pytest.raises(ValueError):
        Partition([[1], [3]])  # labels must cover 1..n


def test_composition_keeps_block_order():
    c = Composition([[2, 3], [5], [1, 4]])
    assert c.blocks == ((2, 3), (5,), (1, 4))
    assert c.partition().blocks == ((1, 4), (2, 3), (5,))


def test_coarsens():
    fine = Partition([[1], [2], [3]])
    mid = Partition([[1, 2], [3]])
    assert mid.coarsens(fine)
    assert not fine.coarsens(mid)
    assert mid.coarsens(mid)


def test_trajectory_validation():
    CoalescentTrajectory([(0.0, Partition([[1], [2]])), (1.0, Partition([[1, 2]]))])
    with pytest.raises(ValueError):
        CoalescentTrajectory([(0.0, Partition([[1, 2]])), (1.0, Partition([[1], [2]]))])
    with pytest.raises(ValueError):
        CoalescentTrajectory([(1.0, Partition([[1, 2]])), (0.0, Partition([[1], [2]]))])


def test_nested_composition_rejects_non_adjacent_merge():
    singletons = Composition([[1], [2], [3]])
    with pytest.raises(ValueError):
        NestedCompositionTrajectory([(0.0, singletons), (1.0, Composition([[1, 3], [2]]))])
    # adjacent merge is fine
    NestedCompositionTrajectory([(0.0, singletons), (1.0, Composition([[1, 2], [3]]))])


def test_trajectory_dict_round_trip():
    tr = simulate_partition_chain(KINGMAN, 5, make_rng(0))
    assert CoalescentTrajectory.from_dict(tr.to_dict()).events == tr.events


# ---------------------------------------------------------------------------
# empirical interval partitions


def test_empirical_interval_partition_worked_example():
    c = Composition([[2, 3], [5], [1, 4]])
    assert empirical_interval_partition(c).components == ((0.0, 0.4), (0.4, 0.6), (0.6, 1.0))


def test_sample_positions_distinct_interior():
    pts = sample_positions(make_rng(3), 500)
    assert len(np.unique(pts)) == 500
    assert pts.min() > 0.0 and pts.max() < 1.0


# ---------------------------------------------------------------------------
# paintbox sampling


def test_paintbox_two_points_single_tooth_law():
    # two uniforms on a single tooth of height h: same side -> merged at 0,
    # opposite sides -> merged exactly at h; sides are a fair coin
    c = Comb.from_teeth([(0.5, 0.8)])
    at_zero = 0
    n = 2000
    for i in range(n):
        tr = paintbox_sample(c, 2, make_rng(10_000 + i))
        times = [t for t, _ in tr.events]
        if len(tr.events) == 1:
            assert times == [0.0]
            at_zero += 1
        else:
            assert times == [0.0, 0.8]
    assert stats.binomtest(at_zero, n, 0.5).pvalue > 1e-6


def test_paintbox_trajectory_structure():
    rng = make_rng(17)
    comb = sample_kingman_comb(rng, 40)
    tr = paintbox_sample(comb, 8, rng)
    assert tr.events[0][0] == 0.0
    assert tr.events[-1][1].blocks == (tuple(range(1, 9)),)
    event_times = {t for t, _ in tr.events}
    assert event_times <= set(comb.times)


def test_ordered_paintbox_projects_to_partition_trajectory():
    rng = make_rng(18)
    comb = sample_kingman_comb(rng, 25)
    octr = ordered_paintbox(comb, 6, rng)
    proj = octr.project()
    for (t1, comp), (t2, part) in zip(octr.events, proj.events):
        assert t1 == t2
        assert comp.partition() == part


def test_ordered_paintbox_blocks_follow_positions():
    # at t=0 the composition's blocks appear in component order, which is
    # position order of the points
    rng = make_rng(19)
    comb = sample_kingman_comb(rng, 15)
    octr = ordered_paintbox(comb, 6, rng)
    initial = octr.events[0][1]
    assert initial.n == 6


# ---------------------------------------------------------------------------
# uniform consistent orderings


STAR3 = CoalescentTrajectory([(0.0, Partition([[1], [2], [3]])), (1.0, Partition([[1, 2, 3]]))])
CATERPILLAR3 = CoalescentTrajectory(
    [
        (0.0, Partition([[1], [2], [3]])),
        (1.0, Partition([[1, 2], [3]])),
        (2.0, Partition([[1, 2, 3]])),
    ]
)


def ordering_of(nct: NestedCompositionTrajectory) -> tuple[int, ...]:
    return tuple(b[0] for b in nct.events[0][1].blocks)


def test_star_ordering_uniform_over_six():
    rng = make_rng(23)
    counts: dict[tuple[int, ...], int] = {}
    n = 3000
    for _ in range(n):
        o = ordering_of(uniform_consistent_ordering(STAR3, rng))
        counts[o] = counts.get(o, 0) + 1
    assert len(counts) == 6
    chi2 = sum((c - n / 6) ** 2 / (n / 6) for c in counts.values())
    assert chi2 < 20.5  # chi-square_5 far tail


def test_caterpillar_hits_exactly_the_legal_orderings():
    rng = make_rng(24)
    seen = set()
    for _ in range(2000):
        nct = uniform_consistent_ordering(CATERPILLAR3, rng)
        seen.add(ordering_of(nct))
        # consistency: every event's blocks are contiguous in the ordering
        order = ordering_of(nct)
        rank = {label: i for i, label in enumerate(order)}
        for _, comp in nct.events:
            for block in comp.blocks:
                ranks = sorted(rank[x] for x in block)
                assert ranks == list(range(ranks[0], ranks[0] + len(ranks)))
    assert seen == {(1, 2, 3), (2, 1, 3), (3, 1, 2), (3, 2, 1)}


def test_ordering_consistent_on_random_trajectories():
    rng = make_rng(25)
    for _ in range(30):
        tr = simulate_partition_chain(KINGMAN, 8, rng)
        nct = uniform_consistent_ordering(tr, rng)
        assert nct.project().events == tr.events
