"""Paintbox sampling: from combs to exchangeable coalescent trajectories.

Dropping n i.i.d. uniform points on a comb and grouping them by the component
they share at each time yields a coalescent partition trajectory; remembering
the left-to-right order of the groups yields a nested composition trajectory
(blocks are intervals of points, so only adjacent blocks ever merge).  Both
use the closed rule: two points are together at time t exactly when their
comb distance is <= t.

The reverse direction is `uniform_consistent_ordering`: given only the
partition trajectory, draw a block order uniformly among the orders that are
consistent with adjacency of every merge.  It follows the sequential
construction: insert point m into the order built for points 1..m-1, with the
legal slots determined by m's first coalescence among them (or, if it never
coalesces, by the gaps of the final composition), each slot equally likely.

Labels are 1-based throughout ([n] = {1, ..., n}).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .combs import Comb, comb_distance
from .intervals import IntervalPartition, locate_components

__all__ = [
    "Partition",
    "Composition",
    "CoalescentTrajectory",
    "NestedCompositionTrajectory",
    "sample_positions",
    "paintbox_sample",
    "ordered_paintbox",
    "empirical_interval_partition",
    "uniform_consistent_ordering",
]


def _normalize_blocks(blocks: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    out = tuple(tuple(sorted(int(i) for i in b)) for b in blocks)
    seen: set[int] = set()
    for b in out:
        if not b:
            raise ValueError("empty block")
        for i in b:
            if i in seen:
                raise ValueError(f"label {i} appears in two blocks")
            seen.add(i)
    if seen and seen != set(range(1, max(seen) + 1)):
        raise ValueError(f"labels must be exactly 1..n, got {sorted(seen)}")
    return out


@dataclass(frozen=True)
class Partition:
    """Set partition of [n] with blocks canonically sorted by least element."""

    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, blocks: Iterable[Iterable[int]]) -> None:
        out = _normalize_blocks(blocks)
        object.__setattr__(self, "blocks", tuple(sorted(out, key=lambda b: b[0])))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @cached_property
    def block_of(self) -> dict[int, int]:
        return {i: k for k, b in enumerate(self.blocks) for i in b}

    def coarsens(self, finer: "Partition") -> bool:
        """True when every block of `finer` is contained in one of ours."""
        mine = self.block_of
        return all(len({mine[i] for i in b}) == 1 for b in finer.blocks)


@dataclass(frozen=True)
class Composition:
    """Ordered partition of [n]: blocks in a total order, labels sorted inside."""

    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, blocks: Iterable[Iterable[int]]) -> None:
        object.__setattr__(self, "blocks", _normalize_blocks(blocks))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def partition(self) -> Partition:
        return Partition(self.blocks)


def _check_times(times: list[float]) -> None:
    if not times:
        raise ValueError("trajectory needs at least one event")
    if times[0] != 0.0:
        raise ValueError(f"first event time must be 0, got {times[0]}")
    for k in range(1, len(times)):
        if not times[k] > times[k - 1]:
            raise ValueError(f"event times must strictly increase at index {k}")


@dataclass(frozen=True)
class CoalescentTrajectory:
    """Partition-valued coalescent path: each event coarsens the previous one."""

    events: tuple[tuple[float, Partition], ...]

    def __init__(self, events: Iterable[tuple[float, Partition]]) -> None:
        evs = tuple((float(t), p) for t, p in events)
        _check_times([t for t, _ in evs])
        for k in range(1, len(evs)):
            if evs[k][1].n != evs[0][1].n:
                raise ValueError("events partition different ground sets")
            if not evs[k][1].coarsens(evs[k - 1][1]):
                raise ValueError(f"event {k} does not coarsen event {k - 1}")
        object.__setattr__(self, "events", evs)

    @property
    def n(self) -> int:
        return self.events[0][1].n

    def to_dict(self) -> dict:
        return {
            "events": [{"t": t, "blocks": [list(b) for b in p.blocks]} for t, p in self.events]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoalescentTrajectory":
        return cls((ev["t"], Partition(ev["blocks"])) for ev in data["events"])


def _is_adjacent_merge(earlier: Composition, later: Composition) -> bool:
    """Every later block must be the union of a consecutive run of earlier blocks."""
    j = 0
    eb = earlier.blocks
    for block in later.blocks:
        members = set(block)
        run: set[int] = set()
        while j < len(eb) and run != members:
            if not set(eb[j]) <= members:
                return False
            run |= set(eb[j])
            j += 1
        if run != members:
            return False
    return j == len(eb)


@dataclass(frozen=True)
class NestedCompositionTrajectory:
    """Ordered coalescent path in which only adjacent blocks merge."""

    events: tuple[tuple[float, Composition], ...]

    def __init__(self, events: Iterable[tuple[float, Composition]]) -> None:
        evs = tuple((float(t), c) for t, c in events)
        _check_times([t for t, _ in evs])
        for k in range(1, len(evs)):
            if evs[k][1].n != evs[0][1].n:
                raise ValueError("events partition different ground sets")
            if not _is_adjacent_merge(evs[k - 1][1], evs[k][1]):
                raise ValueError(f"event {k} merges non-adjacent blocks")
        object.__setattr__(self, "events", evs)

    @property
    def n(self) -> int:
        return self.events[0][1].n

    def project(self) -> CoalescentTrajectory:
        """Forget the block order."""
        return CoalescentTrajectory((t, c.partition()) for t, c in self.events)

    def to_dict(self) -> dict:
        return {
            "events": [{"t": t, "blocks": [list(b) for b in c.blocks]} for t, c in self.events]
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NestedCompositionTrajectory":
        return cls((ev["t"], Composition(ev["blocks"])) for ev in data["events"])


# ---------------------------------------------------------------------------
# sampling


def sample_positions(rng: np.random.Generator, n: int) -> np.ndarray:
    """n distinct uniforms in (0,1); ties and exact 0 are redrawn."""
    while True:
        xs = rng.random(n)
        if len(np.unique(xs)) == n and (xs > 0.0).all():
            return xs


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]
        return True


def paintbox_sample(comb: Comb, n: int, rng: np.random.Generator) -> CoalescentTrajectory:
    """Coalescent of n uniform points on the comb (single linkage on distances).

    Pairs at distance 0 are already together in the time-0 partition; pairs
    that never share a component simply never merge.  One event is recorded
    per distinct merge time.
    """
    if n < 1:
        raise ValueError("need at least one sample point")
    xs = sample_positions(rng, n)
    pairs: dict[float, list[tuple[int, int]]] = {}
    for i in range(n):
        for j in range(i + 1, n):
            d = comb_distance(comb, float(xs[i]), float(xs[j]))
            if d != np.inf:
                pairs.setdefault(d, []).append((i, j))
    uf = _UnionFind(n)
    events = []
    for t in sorted(pairs):
        changed = False
        for i, j in pairs[t]:
            changed |= uf.union(i, j)
        if t == 0.0 or changed:
            blocks: dict[int, list[int]] = {}
            for i in range(n):
                blocks.setdefault(uf.find(i), []).append(i + 1)
            events.append((t, Partition(blocks.values())))
    if not events or events[0][0] != 0.0:
        blocks = {}
        for i in range(n):
            blocks.setdefault(uf.find(i), []).append(i + 1)
        # no zero-distance pair: time-0 partition is all singletons
        events.insert(0, (0.0, Partition([[i + 1] for i in range(n)])))
    return CoalescentTrajectory(events)


def _composition_at(value: IntervalPartition, xs: np.ndarray) -> Composition:
    """Group points by component of `value`, ordered left to right; points in
    the complement stand alone at their own position."""
    idx = locate_components(value, xs)
    keyed: dict[int, tuple[float, list[int]]] = {}
    loners: list[tuple[float, list[int]]] = []
    for label, (x, c) in enumerate(zip(xs, idx), start=1):
        if c < 0:
            loners.append((float(x), [label]))
        else:
            if int(c) not in keyed:
                keyed[int(c)] = (value.components[int(c)][0], [])
            keyed[int(c)][1].append(label)
    ordered = sorted(list(keyed.values()) + loners, key=lambda kv: kv[0])
    return Composition([labels for _, labels in ordered])


def ordered_paintbox(comb: Comb, n: int, rng: np.random.Generator) -> NestedCompositionTrajectory:
    """Paintbox that keeps the left-to-right order of the groups.

    Because components are intervals, the groups never interleave, so the
    result is a nested composition trajectory.  Events are recorded at the
    comb's event times where the composition actually changes.
    """
    if n < 1:
        raise ValueError("need at least one sample point")
    xs = sample_positions(rng, n)
    events: list[tuple[float, Composition]] = []
    for t, value in comb.events:
        comp = _composition_at(value, xs)
        if not events or comp != events[-1][1]:
            events.append((t, comp))
    return NestedCompositionTrajectory(events)


def empirical_interval_partition(comp: Composition) -> IntervalPartition:
    """Blocks as touching subintervals of (0,1) with lengths |block|/n, in order.

    Cut points are integer counts divided by n, so they are exact and the
    result is dust-free.
    """
    n = comp.n
    cuts = [0]
    for block in comp.blocks:
        cuts.append(cuts[-1] + len(block))
    return IntervalPartition(
        [(cuts[k] / n, cuts[k + 1] / n) for k in range(len(comp.blocks))]
    )


# ---------------------------------------------------------------------------
# uniform consistent ordering


def _contiguous_runs(positions: list[int]) -> list[tuple[int, int]]:
    """Sorted positions -> inclusive (start, end) runs."""
    runs = []
    for p in positions:
        if runs and p == runs[-1][1] + 1:
            runs[-1] = (runs[-1][0], p)
        else:
            runs.append((p, p))
    return runs


def uniform_consistent_ordering(
    traj: CoalescentTrajectory, rng: np.random.Generator
) -> NestedCompositionTrajectory:
    """Order the trajectory's blocks uniformly among the consistent orders.

    A consistent order of the time-0 blocks is one under which every merge of
    the trajectory joins consecutive blocks.  Points are inserted one label at
    a time: label m either joins an existing time-0 block (position forced),
    or is a fresh singleton whose first coalescence among 1..m-1 involves some
    r of the current blocks — giving r+1 equally likely slots around and
    between the participants — or never coalesces, giving one slot per gap of
    the final composition of 1..m-1 (ends included).
    """
    events = traj.events
    base = events[0][1]
    block0_of = base.block_of
    n = traj.n

    ordering: list[int] = [block0_of[1]]
    inserted = {block0_of[1]}
    for m in range(2, n + 1):
        b0 = block0_of[m]
        if b0 in inserted:
            continue  # joins a block that is already placed
        pos_of = {b: i for i, b in enumerate(ordering)}
        slot_starts = _insertion_slots(events, block0_of, ordering, pos_of, m)
        choice = int(rng.integers(len(slot_starts)))
        ordering.insert(slot_starts[choice], b0)
        inserted.add(b0)

    rank = {b: i for i, b in enumerate(ordering)}
    out = []
    for t, part in events:
        blocks = sorted(part.blocks, key=lambda blk: min(rank[block0_of[i]] for i in blk))
        out.append((t, Composition(blocks)))
    return NestedCompositionTrajectory(out)


def _insertion_slots(
    events: tuple[tuple[float, Partition], ...],
    block0_of: dict[int, int],
    ordering: list[int],
    pos_of: dict[int, int],
    m: int,
) -> list[int]:
    """Legal insertion indices (into `ordering`) for the singleton of label m.

    If m first coalesces (among labels < m) at event j, joining r blocks of
    the event-(j-1) partition, those blocks occupy r contiguous runs sitting
    next to each other; the slots are the r run starts plus the position just
    past the last run.  If m never coalesces, the slots are the starts of the
    final partition's runs plus the very end.
    """
    for j in range(1, len(events)):
        merged = events[j][1].blocks[events[j][1].block_of[m]]
        earlier_labels = [i for i in merged if i < m]
        if not earlier_labels:
            continue
        prev = events[j - 1][1]
        participants = {prev.block_of[i] for i in earlier_labels}
        runs = _runs_by_group(
            events, pos_of, lambda b0: prev.block_of[_any_label(events, b0)], participants
        )
        for a, b in zip(runs, runs[1:]):
            if b[0] != a[1] + 1:
                raise ValueError("input trajectory admits no consistent ordering")
        return [start for start, _ in runs] + [runs[-1][1] + 1]
    # never coalesces with any smaller label: slots are the final composition's
    # gaps, both ends included
    final = events[-1][1]
    runs = _runs_by_group(
        events, pos_of, lambda b0: final.block_of[_any_label(events, b0)], None
    )
    return [start for start, _ in runs] + [len(ordering)]


def _runs_by_group(
    events: tuple[tuple[float, Partition], ...],
    pos_of: dict[int, int],
    group_of,
    keep: set | None,
) -> list[tuple[int, int]]:
    """Contiguous ordering runs of the selected groups, sorted by position.

    Each group's positions must already be contiguous (guaranteed for a
    consistent input trajectory); a gap inside a group means none exists.
    """
    positions_by_group: dict[int, list[int]] = {}
    for b0, p in pos_of.items():
        g = group_of(b0)
        if keep is None or g in keep:
            positions_by_group.setdefault(g, []).append(p)
    runs = []
    for ps in positions_by_group.values():
        ps.sort()
        if ps[-1] - ps[0] + 1 != len(ps):
            raise ValueError("input trajectory admits no consistent ordering")
        runs.append((ps[0], ps[-1]))
    runs.sort()
    return runs


def _any_label(events: tuple[tuple[float, Partition], ...], b0: int) -> int:
    return events[0][1].blocks[b0][0]
