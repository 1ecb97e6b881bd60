"""Bridges: nondecreasing right-continuous maps of [0,1] with drift and jumps.

A bridge is B(x) = drift*x + sum of sizes of the jumps located at or left of
x, with B(0) = 0 and B(1) = 1 (drift plus total jump size is 1).  The jump
value-gaps (B(v-), B(v)) of a bridge form an interval-partition I(B); dust
corresponds to drift.  Composition of bridges only coarsens I: that is the
semigroup behind interval-partition evolutions, and `flow_comb` strings
composed increments into a comb.

`compose` works on the exact normal form rather than pointwise evaluation:
an inner jump at v spanning values (a, b] maps to a jump at v of size
drift_outer*(b-a) plus every outer jump located inside (a, b] (those outer
jumps are absorbed); an outer jump at u not inside any span surfaces at
inf{x : inner(x) >= u}.  Coincident locations merge additively, zero sizes
are dropped.  This reproduces outer(inner(x)) pointwise exactly and keeps
absorbed sizes as plain sums, so flats survive composition bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .chains import empirical_block_sizes
from .combs import Comb
from .intervals import IntervalPartition, dust_mass
from .rates import LambdaMeasure, merger_weights

__all__ = [
    "Bridge",
    "interval_partition_of",
    "compose",
    "bridge_from_interval_partition",
    "adjacent_merge_evolution",
    "lambda_comb_step",
    "flow_comb",
]

_ONE_TOL = 1e-12


@dataclass(frozen=True)
class Bridge:
    """drift in [0,1] plus finitely many positive jumps at distinct locations in (0,1]."""

    drift: float
    jumps: tuple[tuple[float, float], ...]

    def __init__(self, drift: float, jumps: Iterable[Sequence[float]] = ()) -> None:
        js = tuple((float(v), float(s)) for v, s in jumps)
        if not (0.0 <= drift <= 1.0):
            raise ValueError(f"drift {drift} outside [0, 1]")
        for v, s in js:
            if not (0.0 < v <= 1.0):
                raise ValueError(f"jump location {v} outside (0, 1]")
            if not s > 0.0:
                raise ValueError(f"jump size {s} must be positive")
        for i in range(1, len(js)):
            if not js[i][0] > js[i - 1][0]:
                raise ValueError("jump locations must be strictly increasing")
        total = drift + sum(s for _, s in js)
        if abs(total - 1.0) > _ONE_TOL:
            raise ValueError(f"drift plus jump sizes must be 1, got {total}")
        object.__setattr__(self, "drift", float(drift))
        object.__setattr__(self, "jumps", js)

    @classmethod
    def identity(cls) -> "Bridge":
        return cls(1.0, ())

    @cached_property
    def _locs(self) -> np.ndarray:
        return np.array([v for v, _ in self.jumps])

    @cached_property
    def _cum(self) -> np.ndarray:
        """Prefix sums of jump sizes; _cum[i] = total size through jump i."""
        return np.cumsum([s for _, s in self.jumps])

    @cached_property
    def _vals(self) -> np.ndarray:
        """B at each jump location (right value), consistent with __call__."""
        return self.drift * self._locs + self._cum

    def __call__(self, x: float) -> float:
        if not (0.0 <= x <= 1.0):
            raise ValueError(f"bridge evaluated outside [0, 1] at {x}")
        i = int(np.searchsorted(self._locs, x, side="right"))
        return self.drift * x + (float(self._cum[i - 1]) if i else 0.0)

    def left_limit(self, x: float) -> float:
        if not (0.0 <= x <= 1.0):
            raise ValueError(f"bridge evaluated outside [0, 1] at {x}")
        i = int(np.searchsorted(self._locs, x, side="left"))
        return self.drift * x + (float(self._cum[i - 1]) if i else 0.0)

    def inverse(self, y: float) -> float:
        """inf{x : B(x) > y} for y in [0,1], with inverse(1) = 1."""
        if not (0.0 <= y <= 1.0):
            raise ValueError(f"inverse argument {y} outside [0, 1]")
        if y >= 1.0:
            return 1.0
        return self._first_reach(y, strict=True)

    def preimage(self, u: float) -> float:
        """inf{x : B(x) >= u} for u in (0,1] (attained, by right-continuity)."""
        if not (0.0 < u <= 1.0):
            raise ValueError(f"preimage argument {u} outside (0, 1]")
        return self._first_reach(u, strict=False)

    def _first_reach(self, y: float, *, strict: bool) -> float:
        """inf of {x : B(x) > y} (strict) or {x : B(x) >= y} (not)."""
        side = "right" if strict else "left"
        i = int(np.searchsorted(self._vals, y, side=side))
        below = float(self._cum[i - 1]) if i else 0.0
        seg_end = float(self._locs[i]) if i < len(self.jumps) else 1.0
        if self.drift > 0.0:
            x_lin = (y - below) / self.drift
            if x_lin < seg_end or (not strict and x_lin == seg_end):
                return x_lin
        return seg_end

    def to_dict(self) -> dict:
        return {"drift": self.drift, "jumps": [[v, s] for v, s in self.jumps]}

    @classmethod
    def from_dict(cls, data: dict) -> "Bridge":
        return cls(data["drift"], data.get("jumps", ()))


def interval_partition_of(bridge: Bridge) -> IntervalPartition:
    """Jump value-gaps (B(v-), B(v)) as an interval-partition.

    Gap endpoints come from one consistent prefix-sum evaluation, so touching
    gaps share endpoints exactly; values are clamped into [0,1] against the
    1e-12 normalisation slack of the bridge itself.
    """
    comps = []
    cum_before = 0.0
    for v, s in bridge.jumps:
        lo = min(bridge.drift * v + cum_before, 1.0)
        cum_before += s
        hi = min(bridge.drift * v + cum_before, 1.0)
        if lo < hi:
            comps.append((lo, hi))
    return IntervalPartition(comps)


def compose(outer: Bridge, inner: Bridge) -> Bridge:
    """The bridge x -> outer(inner(x)), in exact normal form."""
    acc: dict[float, float] = {}

    spans_lo = inner.drift * inner._locs + np.concatenate(([0.0], inner._cum[:-1])) \
        if inner.jumps else np.empty(0)
    spans_hi = inner._vals if inner.jumps else np.empty(0)

    # outer jumps: absorbed into the inner jump whose value-span contains them,
    # otherwise surfacing at the preimage of their location
    absorbed_sum = np.zeros(len(inner.jumps))
    for u, s in outer.jumps:
        j = int(np.searchsorted(spans_lo, u, side="left")) - 1
        if j >= 0 and u <= spans_hi[j]:
            absorbed_sum[j] += s
        else:
            x = inner.preimage(u)
            acc[x] = acc.get(x, 0.0) + s

    # inner jumps map to their own location, dilated by the outer drift and
    # fattened by what they absorbed
    for j, (v, s) in enumerate(inner.jumps):
        size = outer.drift * s + float(absorbed_sum[j])
        if size > 0.0:
            acc[v] = acc.get(v, 0.0) + size

    jumps = sorted((v, s) for v, s in acc.items() if s > 0.0)
    return Bridge(outer.drift * inner.drift, jumps)


def bridge_from_interval_partition(
    partition: IntervalPartition, rng: np.random.Generator
) -> Bridge:
    """Bridge realizing the partition, one jump per component.

    The i-th component from the left contributes a jump of size equal to its
    length at the i-th order statistic of K i.i.d. uniform draws, so the
    bridge's jumps carry the partition's left-to-right arrangement; drift is
    the dust.  The empty partition gives the identity bridge.

    Keeping the arrangement is what makes composing with an independent
    coalescent bridge act by merging *adjacent* components: the locations are
    exchangeable, so re-sampling them changes nothing in law for a partition
    whose arrangement is already uniformly random, but for a fixed partition
    the arrangement is data and must survive the round trip.
    """
    k = len(partition.components)
    if k == 0:
        return Bridge.identity()
    while True:
        locs = rng.random(k)
        if len(np.unique(locs)) == k and (locs > 0.0).all():
            break
    jumps = list(zip(np.sort(locs).tolist(), partition.lengths))
    return Bridge(dust_mass(partition), jumps)


def adjacent_merge_evolution(
    partition: IntervalPartition,
    measure: LambdaMeasure,
    t: float,
    rng: np.random.Generator,
) -> IntervalPartition:
    """Merge adjacent components for duration t; k-windows fire at adjacent_rate.

    Merging k adjacent components replaces them by the interior of their
    convex hull (the dust and endpoints between them are swallowed).  Only
    dust-free partitions evolve this way, so dust above 1e-12 is rejected.
    """
    if t < 0.0:
        raise ValueError("duration must be nonnegative")
    if dust_mass(partition) > _ONE_TOL:
        raise ValueError(f"partition carries dust {dust_mass(partition)}; must be dust-free")
    comps = list(partition.components)
    clock = 0.0
    while len(comps) > 1:
        total, probs = merger_weights(measure, len(comps))
        if total <= 0.0:
            break
        clock += rng.standard_exponential() / total
        if clock > t:
            break
        k = 2 + int(rng.choice(len(probs), p=probs))
        i = int(rng.integers(len(comps) - k + 1))
        comps[i : i + k] = [(comps[i][0], comps[i + k - 1][1])]
    return IntervalPartition(comps)


def lambda_comb_step(
    partition: IntervalPartition,
    measure: LambdaMeasure,
    s: float,
    m: int,
    rng: np.random.Generator,
) -> IntervalPartition:
    """One transition of the interval-partition evolution, at resolution m.

    Composes the partition's bridge with the bridge of an m-block empirical
    chain run for duration s: components whose uniform locations fall in the
    same absorbed span merge, dust is progressively captured.  m must be at
    least the number of components (resolution below the state loses blocks).
    """
    if m < len(partition.components):
        raise ValueError(
            f"resolution m={m} below the {len(partition.components)} components present"
        )
    outer = bridge_from_interval_partition(partition, rng)
    sizes = empirical_block_sizes(measure, m, s, rng)
    # cuts at integer counts / m == the empirical interval-partition of a
    # composition with these block sizes, without building the label lists
    inner = bridge_from_interval_partition(_partition_from_counts(sizes, m), rng)
    return interval_partition_of(compose(outer, inner))


def flow_comb(
    measure: LambdaMeasure,
    times: Sequence[float],
    m: int,
    rng: np.random.Generator,
) -> Comb:
    """Comb of the composed bridge flow on a time grid, at resolution m.

    Starts from m unit blocks behind the first grid point (time 0) and
    composes one empirical increment bridge per grid gap, recording I(running
    bridge) at each grid time.  Block sizes are kept as integers (multiples
    of 1/m) and cut points as integer counts divided by m, which keeps the
    comb nesting exact in floating point: composing with a dust-free
    empirical bridge assigns every running jump to the increment's value cell
    containing its location, and cells follow location order.
    """
    ts = [float(t) for t in times]
    if not ts or ts[0] != 0.0:
        raise ValueError("time grid must start at 0")
    for a, b in zip(ts, ts[1:]):
        if not b > a:
            raise ValueError("time grid must strictly increase")
    if m < 1:
        raise ValueError("need resolution m >= 1")

    sizes = np.ones(m, dtype=np.int64)
    locs = _distinct_uniforms(rng, m)
    events = [(0.0, _partition_from_counts(sizes, m))]
    for prev_t, t in zip(ts, ts[1:]):
        sizes, locs, _, _ = _flow_increment(sizes, locs, measure, t - prev_t, m, rng)
        events.append((t, _partition_from_counts(sizes, m)))
    return Comb(events)


def _distinct_uniforms(rng: np.random.Generator, k: int) -> np.ndarray:
    while True:
        x = rng.random(k)
        if len(np.unique(x)) == k and (x > 0.0).all():
            return x


def _partition_from_counts(sizes: np.ndarray, m: int) -> IntervalPartition:
    cuts = np.concatenate(([0], np.cumsum(sizes)))
    return IntervalPartition([(cuts[i] / m, cuts[i + 1] / m) for i in range(len(sizes))])


def _flow_increment(
    sizes: np.ndarray,
    locs: np.ndarray,
    measure: LambdaMeasure,
    gap: float,
    m: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Compose the running (sizes, locs) pure-jump bridge with one increment.

    Returns (new sizes, new locations, increment block sizes, increment
    locations); the last two expose the increment for cross-checks.  The
    running jump at location x is absorbed by the increment jump whose value
    cell (cumulative/m interval) contains x; cells in location order are
    value-ordered, so summing sizes per cell in location order is exactly the
    bridge composition restricted to this dust-free integer setting.
    """
    order = np.argsort(locs)
    locs_sorted = locs[order]
    sizes_sorted = sizes[order]

    inc_sizes = empirical_block_sizes(measure, m, gap, rng)
    inc_locs = _distinct_uniforms(rng, len(inc_sizes))
    inc_order = np.argsort(inc_locs)
    inc_by_loc = inc_sizes[inc_order]

    cell_tops = np.cumsum(inc_by_loc) / m  # cell j is (top[j-1], top[j]]
    cell = np.searchsorted(cell_tops, locs_sorted, side="left")
    new_sizes = np.bincount(cell, weights=sizes_sorted, minlength=len(inc_by_loc)).astype(
        np.int64
    )
    keep = new_sizes > 0
    return new_sizes[keep], np.sort(inc_locs)[keep], inc_sizes, inc_locs
