"""Nested interval-partitions (combs) and the metric they carry.

A comb is a right-continuous nondecreasing step family {I_t} of
interval-partitions: finitely many events (t_k, I_k) with t_0 = 0 and the
value at t equal to the value at the largest event time <= t.  Growing means
nesting — every component of an earlier value sits inside a component of any
later value.

A comb built from teeth (position/height pairs) is the sublevel family of the
tooth profile f: I_t is (0,1) minus the positions whose tooth is strictly
taller than t, so a tooth of height h is present in I_s for s < h and gone at
s = h.  The induced distance

    d(x, y) = inf{t : x and y lie in the same component of I_t}
            = sup of f over the closed interval [x /\\ y, x \\/ y]

is a pseudo-ultrametric; points never sharing a component get the exact
``math.inf`` sentinel, never a large finite stand-in.

Teeth-backed combs keep their teeth and answer ``comb_function`` /
``comb_distance`` queries from position-sorted arrays without materialising
the event list (which is quadratic in the number of teeth); the event list is
built lazily the first time something genuinely needs it.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Literal, Optional, Sequence, Union

import numpy as np

from .intervals import IntervalPartition, component_of

__all__ = [
    "Tooth",
    "Comb",
    "FacePoint",
    "comb_function",
    "comb_distance",
    "distance_matrix",
    "face_sets",
    "extended_distance",
    "sample_kingman_comb",
    "mass_twin_combs",
]

UNMERGED = math.inf
"""Distance/height sentinel for pairs that never share a component."""


@dataclass(frozen=True)
class Tooth:
    position: float
    height: float

    def __post_init__(self) -> None:
        if not (0.0 < self.position < 1.0):
            raise ValueError(f"tooth position {self.position} outside (0, 1)")
        if not self.height > 0.0:
            raise ValueError(f"tooth height {self.height} must be positive")


@dataclass(frozen=True)
class FacePoint:
    """One face of a component endpoint in the metric completion.

    side "l" is the position seen as the *left* endpoint of a component (the
    face opening rightward); side "r" is the position as a *right* endpoint
    (opening leftward).  A shared endpoint between touching components has
    both faces, at positive distance f(x) from each other until the tooth
    separating them vanishes.
    """

    position: float
    side: Literal["l", "r"]

    def __post_init__(self) -> None:
        if self.side not in ("l", "r"):
            raise ValueError(f"face side must be 'l' or 'r', got {self.side!r}")


class Comb:
    """Finite nested interval-partition with càdlàg step evaluation."""

    def __init__(
        self,
        events: Iterable[tuple[float, IntervalPartition]],
        *,
        _validate: bool = True,
    ) -> None:
        evs = tuple((float(t), v) for t, v in events)
        if _validate:
            _validate_events(evs)
        self._events: Optional[tuple[tuple[float, IntervalPartition], ...]] = evs
        self.teeth: Optional[tuple[Tooth, ...]] = None
        self._sorted_positions: Optional[np.ndarray] = None
        self._sorted_heights: Optional[np.ndarray] = None
        self._height_at: Optional[dict[float, float]] = None

    @classmethod
    def from_teeth(cls, teeth: Iterable[Tooth | Sequence[float]]) -> "Comb":
        """Comb whose value at t keeps exactly the teeth taller than t as gaps.

        Event times are 0 and the distinct tooth heights; the event at height
        h is the first time the teeth of height h are absorbed.  Events are
        materialised lazily.
        """
        ts = tuple(t if isinstance(t, Tooth) else Tooth(float(t[0]), float(t[1])) for t in teeth)
        positions = [t.position for t in ts]
        if len(set(positions)) != len(positions):
            raise ValueError("duplicate tooth positions")
        comb = cls.__new__(cls)
        comb._events = None
        comb.teeth = ts
        comb._sorted_positions = None
        comb._sorted_heights = None
        comb._height_at = None
        return comb

    # -- evaluation ---------------------------------------------------------

    @property
    def events(self) -> tuple[tuple[float, IntervalPartition], ...]:
        if self._events is None:
            assert self.teeth is not None
            self._events = _events_from_teeth(self.teeth)
        return self._events

    @property
    def times(self) -> tuple[float, ...]:
        if self._events is None and self.teeth is not None:
            return (0.0, *sorted({t.height for t in self.teeth}))
        return tuple(t for t, _ in self.events)

    def at(self, t: float) -> IntervalPartition:
        """Value at time t (the value of the largest event time <= t)."""
        if t < 0.0:
            raise ValueError(f"comb evaluated at negative time {t}")
        if self._events is None and self.teeth is not None:
            return _teeth_level_set(self.teeth, t)
        evs = self.events
        times = [tt for tt, _ in evs]
        return evs[bisect_right(times, t) - 1][1]

    # -- tooth lookups ------------------------------------------------------

    def _tooth_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        assert self.teeth is not None
        if self._sorted_positions is None:
            pos = np.array([t.position for t in self.teeth])
            hts = np.array([t.height for t in self.teeth])
            order = np.argsort(pos)
            self._sorted_positions = pos[order]
            self._sorted_heights = hts[order]
        return self._sorted_positions, self._sorted_heights  # type: ignore[return-value]

    def _tooth_height_at(self, x: float) -> float:
        """Tooth profile f(x): the height at a tooth position, else 0."""
        assert self.teeth is not None
        if self._height_at is None:
            self._height_at = {t.position: t.height for t in self.teeth}
        return self._height_at.get(x, 0.0)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        # teeth are the compact exact form; events would be O(n^2) numbers
        if self.teeth is not None:
            return {"teeth": [[t.position, t.height] for t in self.teeth]}
        return {"events": [{"t": t, "partition": v.to_dict()} for t, v in self.events]}

    @classmethod
    def from_dict(cls, data: dict) -> "Comb":
        if data.get("teeth") is not None:
            return cls.from_teeth(data["teeth"])
        events = [
            (ev["t"], IntervalPartition.from_dict(ev["partition"])) for ev in data["events"]
        ]
        return cls(events)


def _validate_events(evs: tuple[tuple[float, IntervalPartition], ...]) -> None:
    if not evs:
        raise ValueError("a comb needs at least one event")
    if evs[0][0] != 0.0:
        raise ValueError(f"first event time must be 0, got {evs[0][0]}")
    for k in range(1, len(evs)):
        if not evs[k][0] > evs[k - 1][0]:
            raise ValueError(f"event times must strictly increase at index {k}")
        _check_nested(evs[k - 1][1], evs[k][1], k)


def _check_nested(earlier: IntervalPartition, later: IntervalPartition, k: int) -> None:
    """Every component of `earlier` must sit inside a component of `later` (exactly)."""
    comps = later.components
    j = 0
    for l, r in earlier.components:
        while j < len(comps) and comps[j][1] < r:
            j += 1
        if j == len(comps) or not (comps[j][0] <= l and r <= comps[j][1]):
            raise ValueError(
                f"nesting violated at event {k}: component ({l}, {r}) not contained "
                "in any later component"
            )


def _teeth_level_set(teeth: Sequence[Tooth], t: float) -> IntervalPartition:
    """(0,1) minus the positions of teeth strictly taller than t."""
    bounds = sorted(tooth.position for tooth in teeth if tooth.height > t)
    comps = []
    prev = 0.0
    for b in bounds:
        comps.append((prev, b))
        prev = b
    comps.append((prev, 1.0))
    return IntervalPartition(comps)


def _events_from_teeth(teeth: Sequence[Tooth]) -> tuple[tuple[float, IntervalPartition], ...]:
    times = [0.0] + sorted({t.height for t in teeth})
    return tuple((t, _teeth_level_set(teeth, t)) for t in times)


# ---------------------------------------------------------------------------
# comb function and metric


def _check_interior(x: float) -> None:
    if not (0.0 < x < 1.0):
        raise ValueError(f"point {x} outside (0, 1)")


def comb_function(comb: Comb, x: float) -> float:
    """f(x) = first time x is covered: inf{t : x in I_t}, UNMERGED if never."""
    _check_interior(x)
    if comb.teeth is not None:
        return comb._tooth_height_at(x)
    for t, value in comb.events:
        if component_of(value, x) is not None:
            return t
    return UNMERGED


def comb_distance(comb: Comb, x: float, y: float) -> float:
    """Smallest event time at which x and y share a component (UNMERGED if never).

    Equals the sup of the comb function over the closed interval [x /\\ y,
    x \\/ y]; for teeth-backed combs that is the tallest tooth whose position
    lies in the closed interval, computed from sorted arrays.
    """
    _check_interior(x)
    _check_interior(y)
    if x == y:
        return 0.0
    lo, hi = (x, y) if x < y else (y, x)
    if comb.teeth is not None:
        pos, hts = comb._tooth_arrays()
        i = np.searchsorted(pos, lo, side="left")
        j = np.searchsorted(pos, hi, side="right")
        return float(hts[i:j].max()) if j > i else 0.0
    for t, value in comb.events:
        cx = component_of(value, x)
        if cx is None:
            continue
        cy = component_of(value, y)
        if cy is not None and cx[0] == cy[0]:
            return t
    return UNMERGED


def distance_matrix(comb: Comb, points: Sequence[float]) -> np.ndarray:
    """Pairwise comb distances of the given points (inf where never merged)."""
    pts = [float(p) for p in points]
    n = len(pts)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = comb_distance(comb, pts[i], pts[j])
    return out


# ---------------------------------------------------------------------------
# face completion


def face_sets(comb: Comb) -> tuple[dict[float, tuple[float, float]], dict[float, tuple[float, float]]]:
    """Maximal persistence windows of component endpoints, at event granularity.

    Returns (R, L): R maps each position that is the right endpoint of some
    component to its half-open window [s, t) of event times during which it
    stays one (t = inf when it persists beyond the last event); L likewise
    for left endpoints.  The outer boundary points 0 and 1 are not faces.
    """
    evs = comb.events
    right: dict[float, tuple[float, float]] = {}
    left: dict[float, tuple[float, float]] = {}
    open_right: dict[float, float] = {}
    open_left: dict[float, float] = {}
    for idx, (t, value) in enumerate(evs):
        rs = {r for _, r in value.components if r < 1.0}
        ls = {l for l, _ in value.components if l > 0.0}
        for store, windows, current in ((open_right, right, rs), (open_left, left, ls)):
            for x in list(store):
                if x not in current:
                    windows[x] = (store.pop(x), t)
            for x in current:
                if x not in store:
                    store[x] = t
    for x, s in open_right.items():
        right[x] = (s, math.inf)
    for x, s in open_left.items():
        left[x] = (s, math.inf)
    return right, left


def _sup_over(comb: Comb, lo: float, hi: float, include_lo: bool, include_hi: bool) -> float:
    """Sup of the comb function over an interval with controllable endpoints.

    For teeth combs this is a max over tooth heights; for event combs it is
    the first event time whose value has one component covering the whole
    interval (strictly past an included endpoint).
    """
    if comb.teeth is not None:
        pos, hts = comb._tooth_arrays()
        i = np.searchsorted(pos, lo, side="left" if include_lo else "right")
        j = np.searchsorted(pos, hi, side="right" if include_hi else "left")
        return float(hts[i:j].max()) if j > i else 0.0
    for t, value in comb.events:
        mid = component_of(value, (lo + hi) / 2.0)
        if mid is None:
            continue
        l, r = mid[1]
        lo_ok = (l < lo) if include_lo else (l <= lo)
        hi_ok = (r > hi) if include_hi else (r >= hi)
        if lo_ok and hi_ok:
            return t
    return UNMERGED


def extended_distance(
    comb: Comb,
    p: Union[float, FacePoint],
    q: Union[float, FacePoint],
) -> float:
    """Comb distance extended to endpoint faces.

    Plain points reproduce ``comb_distance``.  Between distinct positions the
    distance is the sup of the comb function over the interval between them,
    where a face opening *into* the interval excludes its own position (its
    tooth is behind it) and any other endpoint is included.  The two faces of
    one shared endpoint, and a face paired with its own plain point, are at
    distance f(x): they stay separated exactly until the tooth at x vanishes.
    """
    p_pos, p_side = (p.position, p.side) if isinstance(p, FacePoint) else (float(p), None)
    q_pos, q_side = (q.position, q.side) if isinstance(q, FacePoint) else (float(q), None)
    _check_interior(p_pos)
    _check_interior(q_pos)
    if isinstance(p, FacePoint) or isinstance(q, FacePoint):
        r_set, l_set = face_sets(comb)
        for point in (p, q):
            if isinstance(point, FacePoint):
                table = r_set if point.side == "r" else l_set
                if point.position not in table:
                    raise ValueError(f"{point} is not a face of this comb")
    if p_pos == q_pos:
        if p_side == q_side:
            return 0.0
        return _sup_over(comb, p_pos, p_pos, True, True)
    (lo, lo_side), (hi, hi_side) = sorted(((p_pos, p_side), (q_pos, q_side)))
    include_lo = lo_side != "l"  # the rightward-opening face leaves its tooth behind
    include_hi = hi_side != "r"  # the leftward-opening face likewise
    return _sup_over(comb, lo, hi, include_lo, include_hi)


# ---------------------------------------------------------------------------
# samplers and deterministic constructions


def sample_kingman_comb(rng: np.random.Generator, n_teeth: int) -> Comb:
    """Truncated Kingman comb with n_teeth teeth.

    Heights are the tail sums T_i = sum_{j >= i} 2/(j(j-1)) e_j for
    i = 2, ..., n_teeth+1 with e_j i.i.d. standard exponentials (one backward
    cumulative sum; terms beyond the truncation are dropped), so heights are
    strictly decreasing; positions are i.i.d. uniform.  The truncation hides
    mergers below T_{n_teeth+1}, whose expected height is about 2/n_teeth —
    keep n_teeth comfortably above the number of points sampled on the comb.
    """
    if n_teeth < 1:
        raise ValueError("n_teeth must be at least 1")
    j = np.arange(2, n_teeth + 2)
    e = rng.standard_exponential(n_teeth)
    heights = np.cumsum((2.0 / (j * (j - 1.0)) * e)[::-1])[::-1]
    positions = rng.random(n_teeth)
    while len(set(positions)) != n_teeth:  # pragma: no cover - measure-zero event
        positions = rng.random(n_teeth)
    return Comb.from_teeth(
        [Tooth(float(p), float(h)) for p, h in zip(positions, heights)]
    )


def mass_twin_combs() -> tuple[Comb, Comb]:
    """Two deterministic combs with identical ranked masses at every time.

    Both combs evolve as six components (roughly a third, two sixths and
    three ninths) merging to {~2/3, ~1/3} at time 1 and to (0,1) at time 2,
    with bit-identical ranked component lengths throughout.  They differ in
    where the pieces sit: on the left comb the three ninth-components end up
    inside the 2/3 block, on the right comb inside the 1/3 block, so tracking
    a point instead of masses tells them apart with certainty.

    The cut points are chosen so the length identities hold exactly in
    floating point: with A = fl(2/3), C = 1 - A, d2 = A - C, d1 = d2/2 one
    has 1 - C == A, C + d1 == 0.5, A - 0.5 == d1, d2 - d1 == d1 and
    A - d2 == C as exact float equalities.
    """
    a = 2.0 / 3.0
    c = 1.0 - a
    d2 = a - c
    d1 = d2 / 2.0
    e4 = a + 1.0 / 9.0
    e5 = e4 + 1.0 / 9.0
    left = Comb.from_teeth(
        [Tooth(c, 2.0), Tooth(0.5, 1.0), Tooth(a, 1.0), Tooth(e4, 1.0), Tooth(e5, 1.0)]
    )
    right = Comb.from_teeth(
        [Tooth(a, 2.0), Tooth(d1, 1.0), Tooth(d2, 1.0), Tooth(e4, 1.0), Tooth(e5, 1.0)]
    )
    return left, right
