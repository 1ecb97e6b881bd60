"""Interval-partitions of the open unit interval.

An interval-partition is an open subset of (0,1) stored as its ordered
disjoint open components.  Neighbouring components may share an endpoint
(the shared point itself belongs to the complement).  The ranked component
lengths form the mass-partition; whatever length is missing from 1 is dust.

Endpoint arithmetic is exact: components are kept verbatim as floats,
comparisons are plain float comparisons, and nothing is ever merged or
snapped by tolerance.  Callers that need approximate matching get it through
``hausdorff``, not through the representation.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "IntervalPartition",
    "MassPartition",
    "mass_partition",
    "dust_mass",
    "component_of",
    "locate_components",
    "complement_intervals",
    "hausdorff",
]

_MASS_SUM_TOL = 1e-12


@dataclass(frozen=True)
class IntervalPartition:
    """Ordered disjoint open subintervals of (0,1).

    ``components`` is a tuple of (left, right) pairs with
    0 <= left < right <= 1, strictly ordered left to right; consecutive
    components may touch (right_i == left_{i+1}) but never overlap.
    """

    components: tuple[tuple[float, float], ...]

    def __init__(self, components: Iterable[Sequence[float]] = ()) -> None:
        comps = tuple((float(l), float(r)) for l, r in components)
        for i, (l, r) in enumerate(comps):
            if not (0.0 <= l < r <= 1.0):
                raise ValueError(f"component {i} = ({l}, {r}) is not an open subinterval of (0,1)")
        for i in range(1, len(comps)):
            if comps[i][0] < comps[i - 1][1]:
                raise ValueError(
                    f"components {i - 1} and {i} overlap or are out of order: "
                    f"{comps[i - 1]} then {comps[i]}"
                )
        object.__setattr__(self, "components", comps)

    @classmethod
    def empty(cls) -> "IntervalPartition":
        return cls(())

    @classmethod
    def full(cls) -> "IntervalPartition":
        """The whole open interval (0,1) as a single component."""
        return cls(((0.0, 1.0),))

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(r - l for l, r in self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __contains__(self, x: float) -> bool:
        return component_of(self, x) is not None

    def to_dict(self) -> dict:
        return {"components": [[l, r] for l, r in self.components]}

    @classmethod
    def from_dict(cls, data: dict) -> "IntervalPartition":
        return cls(data["components"])


@dataclass(frozen=True)
class MassPartition:
    """Nonincreasing positive masses with total at most 1 (up to 1e-12)."""

    masses: tuple[float, ...]

    def __init__(self, masses: Iterable[float] = ()) -> None:
        ms = tuple(float(m) for m in masses)
        for i, m in enumerate(ms):
            if not (0.0 < m <= 1.0):
                raise ValueError(f"mass {i} = {m} is not in (0, 1]")
            if i and m > ms[i - 1]:
                raise ValueError(f"masses must be nonincreasing, got {ms[i - 1]} then {m}")
        if sum(ms) > 1.0 + _MASS_SUM_TOL:
            raise ValueError(f"masses sum to {sum(ms)} > 1")
        object.__setattr__(self, "masses", ms)

    @property
    def total(self) -> float:
        return sum(self.masses)

    @property
    def dust(self) -> float:
        return max(0.0, 1.0 - self.total)


def mass_partition(partition: IntervalPartition) -> MassPartition:
    """Ranked (nonincreasing) component lengths."""
    return MassPartition(sorted(partition.lengths, reverse=True))


def dust_mass(partition: IntervalPartition) -> float:
    """1 minus the total component length, clamped at 0."""
    return max(0.0, 1.0 - sum(partition.lengths))


def component_of(
    partition: IntervalPartition, x: float
) -> Optional[tuple[int, tuple[float, float]]]:
    """The (index, component) pair whose open interior contains x, else None.

    x must lie in [0,1]; endpoints and dust points return None.
    """
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"point {x} outside [0, 1]")
    comps = partition.components
    i = bisect_right(comps, (x, math.inf)) - 1
    if i >= 0:
        l, r = comps[i]
        if l < x < r:
            return i, comps[i]
    return None


def locate_components(partition: IntervalPartition, xs: np.ndarray) -> np.ndarray:
    """Vectorised component_of: component index per point, -1 where none.

    Points must already lie in [0,1]; this is the hot path for paintbox
    sampling so it skips per-point validation.
    """
    comps = partition.components
    if not comps:
        return np.full(np.shape(xs), -1, dtype=np.int64)
    lefts = np.array([l for l, _ in comps])
    rights = np.array([r for _, r in comps])
    xs = np.asarray(xs, dtype=float)
    idx = np.searchsorted(lefts, xs, side="right") - 1
    clipped = np.clip(idx, 0, None)
    inside = (idx >= 0) & (xs > lefts[clipped]) & (xs < rights[clipped])
    return np.where(inside, idx, -1)


def complement_intervals(partition: IntervalPartition) -> list[tuple[float, float]]:
    """[0,1] minus the partition, as ordered closed (possibly degenerate) intervals.

    Always returns len(partition)+1 pieces; a piece with a == b is the single
    shared endpoint between touching components (or a boundary point of [0,1]).
    """
    pieces: list[tuple[float, float]] = []
    prev = 0.0
    for l, r in partition.components:
        pieces.append((prev, l))
        prev = r
    pieces.append((prev, 1.0))
    return pieces


def _distance_to_pieces(x: float, pieces: list[tuple[float, float]], starts: list[float]) -> float:
    """Distance from x to a nonempty union of sorted closed intervals."""
    i = bisect_right(starts, x) - 1
    best = math.inf
    if i >= 0:
        a, b = pieces[i]
        if x <= b:
            return 0.0
        best = x - b
    if i + 1 < len(pieces):
        best = min(best, pieces[i + 1][0] - x)
    return best


def _one_sided_hausdorff(src: IntervalPartition, dst: IntervalPartition) -> float:
    """sup over x outside src of the distance from x to the complement of dst.

    The distance-to-complement function is piecewise linear with slope ±1:
    zero on the complement of dst and peaking at dst's component midpoints.
    Its sup over each closed complement piece of src is therefore attained
    either at a piece endpoint or at one of those midpoints, so finitely many
    candidates are exact.
    """
    src_pieces = complement_intervals(src)
    dst_pieces = complement_intervals(dst)
    dst_starts = [a for a, _ in dst_pieces]
    midpoints = [(l + r) / 2.0 for l, r in dst.components]

    sup = 0.0
    j = 0
    n_mid = len(midpoints)
    for a, b in src_pieces:
        sup = max(
            sup,
            _distance_to_pieces(a, dst_pieces, dst_starts),
            _distance_to_pieces(b, dst_pieces, dst_starts),
        )
        while j < n_mid and midpoints[j] < a:
            j += 1
        k = j
        while k < n_mid and midpoints[k] <= b:
            sup = max(sup, _distance_to_pieces(midpoints[k], dst_pieces, dst_starts))
            k += 1
    return sup


def hausdorff(left: IntervalPartition, right: IntervalPartition) -> float:
    """Hausdorff distance between the complements of two interval-partitions.

    Both complements contain 0 and 1, so the distance is always finite; it is
    computed exactly from finitely many candidate points (no discretisation).
    """
    return max(_one_sided_hausdorff(left, right), _one_sided_hausdorff(right, left))
