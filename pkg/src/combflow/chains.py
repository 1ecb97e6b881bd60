"""Continuous-time merger chains driven by a measure on [0,1].

Two Gillespie samplers share one merger-size law (see rates.merger_weights):
the unordered chain merges a uniformly chosen k-subset of the blocks, the
ordered chain merges a uniformly chosen window of k adjacent blocks from a
uniformly shuffled start.  Forgetting the order projects the second chain
onto the first — `intertwining_check` verifies the generator-level identity
behind that projection by exhaustive enumeration for small n.

`empirical_block_sizes` runs the ordered chain from m singleton blocks for a
fixed duration and returns only the ordered block sizes.  When the measure is
a pure atom at 0 only pair mergers fire, and each merger closes one uniformly
chosen boundary between adjacent blocks; the boundaries closed by time s are
then a uniform subset of the m-1 boundaries, of size determined by the
pair-merger clocks alone.  That observation gives an O(m) sampler used
automatically in that case (the generic path is kept for everything else and
as the reference implementation in tests).
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Mapping, Union

import numpy as np

from .paintbox import (
    CoalescentTrajectory,
    Composition,
    NestedCompositionTrajectory,
    Partition,
)
from .rates import LambdaMeasure, adjacent_rate, merger_weights, rate

__all__ = [
    "simulate_partition_chain",
    "simulate_composition_chain",
    "empirical_block_sizes",
    "enumerate_partitions",
    "enumerate_compositions",
    "intertwining_check",
]


def _next_merger(
    measure: LambdaMeasure, b: int, rng: np.random.Generator
) -> tuple[float, int] | None:
    """(waiting time, merger size k) with b blocks, or None if no rate is left."""
    total, probs = merger_weights(measure, b)
    if total <= 0.0:
        return None
    wait = rng.standard_exponential() / total
    k = 2 + int(rng.choice(len(probs), p=probs))
    return wait, k


def simulate_partition_chain(
    measure: LambdaMeasure, n: int, rng: np.random.Generator
) -> CoalescentTrajectory:
    """Unordered merger chain started from the n singletons."""
    if n < 1:
        raise ValueError("need at least one block")
    blocks: list[tuple[int, ...]] = [(i,) for i in range(1, n + 1)]
    t = 0.0
    events = [(0.0, Partition(blocks))]
    while len(blocks) > 1:
        step = _next_merger(measure, len(blocks), rng)
        if step is None:
            break
        wait, k = step
        t += wait
        chosen = sorted(rng.choice(len(blocks), size=k, replace=False))
        merged = tuple(sorted(itertools.chain.from_iterable(blocks[i] for i in chosen)))
        blocks = [b for i, b in enumerate(blocks) if i not in set(chosen)]
        blocks.append(merged)
        events.append((t, Partition(blocks)))
    return CoalescentTrajectory(events)


def simulate_composition_chain(
    measure: LambdaMeasure, n: int, rng: np.random.Generator
) -> NestedCompositionTrajectory:
    """Ordered merger chain: uniformly shuffled singletons, adjacent windows merge."""
    if n < 1:
        raise ValueError("need at least one block")
    order = rng.permutation(n)
    blocks: list[tuple[int, ...]] = [(int(i) + 1,) for i in order]
    t = 0.0
    events = [(0.0, Composition(blocks))]
    while len(blocks) > 1:
        step = _next_merger(measure, len(blocks), rng)
        if step is None:
            break
        wait, k = step
        t += wait
        i = int(rng.integers(len(blocks) - k + 1))
        merged = tuple(sorted(itertools.chain.from_iterable(blocks[i : i + k])))
        blocks[i : i + k] = [merged]
        events.append((t, Composition(blocks)))
    return NestedCompositionTrajectory(events)


def empirical_block_sizes(
    measure: LambdaMeasure, m: int, s: float, rng: np.random.Generator
) -> np.ndarray:
    """Ordered block sizes of the composition chain from m singletons at time s.

    The starting order is irrelevant for sizes (all blocks start at size 1),
    so no shuffle is drawn.  Pure atom-at-zero measures take the O(m)
    boundary-subset path described in the module docstring.
    """
    if m < 1:
        raise ValueError("need at least one block")
    if s < 0.0:
        raise ValueError("duration must be nonnegative")
    if m == 1 or s == 0.0:
        return np.ones(m, dtype=np.int64)
    c = measure.atom_at_zero_mass()
    if c is not None:
        j = np.arange(m, 1, -1, dtype=float)
        waits = rng.standard_exponential(m - 1) / (c * j * (j - 1.0) / 2.0)
        n_events = int(np.searchsorted(np.cumsum(waits), s, side="right"))
        if n_events == 0:
            return np.ones(m, dtype=np.int64)
        closed = rng.permutation(m - 1)[:n_events]
        open_mask = np.ones(m - 1, dtype=bool)
        open_mask[closed] = False
        cuts = np.flatnonzero(open_mask) + 1
        return np.diff(np.concatenate(([0], cuts, [m])))
    sizes = [1] * m
    t = 0.0
    while len(sizes) > 1:
        step = _next_merger(measure, len(sizes), rng)
        if step is None:
            break
        wait, k = step
        if t + wait > s:
            break
        t += wait
        i = int(rng.integers(len(sizes) - k + 1))
        sizes[i : i + k] = [sum(sizes[i : i + k])]
    return np.asarray(sizes, dtype=np.int64)


# ---------------------------------------------------------------------------
# exhaustive generator check


def enumerate_partitions(n: int) -> list[Partition]:
    """All set partitions of [n] (Bell(n) of them)."""
    if n < 1:
        raise ValueError("need n >= 1")
    out: list[list[list[int]]] = [[[1]]]
    for i in range(2, n + 1):
        grown: list[list[list[int]]] = []
        for part in out:
            for k in range(len(part)):
                grown.append([b + [i] if j == k else b for j, b in enumerate(part)])
            grown.append(part + [[i]])
        out = grown
    return [Partition(p) for p in out]


def enumerate_compositions(n: int) -> list[Composition]:
    """All ordered set partitions of [n] (Fubini(n) of them)."""
    comps = []
    for part in enumerate_partitions(n):
        for perm in itertools.permutations(part.blocks):
            comps.append(Composition(perm))
    return comps


def intertwining_check(
    measure: LambdaMeasure,
    n: int,
    f: Union[Callable[[Composition], float], Mapping[Composition, float]],
    tol: float = 1e-9,
) -> float:
    """Max deviation of the projection identity between the two generators.

    For every partition pi, the unordered generator applied to the
    order-average of f must equal the order-average of the ordered generator
    applied to f:

        sum_{pi'} q(pi,pi') [Lf(pi') - Lf(pi)]
            = (1/Card(pi)!) sum_{orderings c of pi} sum_{c'} q~(c,c') [f(c') - f(c)]

    where q merges k-subsets at rate(b,k), q~ merges adjacent windows at
    adjacent_rate(b,k), and Lf is the uniform average of f over a partition's
    orderings.  Returns the max absolute difference over all partitions of
    [n]; callers compare against `tol` (the acceptance level — this function
    only reports).  Enumeration is exhaustive, so n is capped at 6.
    """
    if not (1 <= n <= 6):
        raise ValueError("exhaustive check only supported for 1 <= n <= 6")
    fval: Callable[[Composition], float]
    fval = f.__getitem__ if isinstance(f, Mapping) else f

    worst = 0.0
    for part in enumerate_partitions(n):
        b = len(part.blocks)
        orderings = [Composition(p) for p in itertools.permutations(part.blocks)]
        l_here = sum(fval(c) for c in orderings) / len(orderings)

        lhs = 0.0
        if b >= 2:
            for k in range(2, b + 1):
                r = rate(measure, b, k)
                if r == 0.0:
                    continue
                for subset in itertools.combinations(range(b), k):
                    merged = tuple(
                        sorted(itertools.chain.from_iterable(part.blocks[i] for i in subset))
                    )
                    rest = [blk for i, blk in enumerate(part.blocks) if i not in set(subset)]
                    target = Partition(rest + [merged])
                    t_orderings = [
                        Composition(p) for p in itertools.permutations(target.blocks)
                    ]
                    l_target = sum(fval(c) for c in t_orderings) / len(t_orderings)
                    lhs += r * (l_target - l_here)

        rhs = 0.0
        if b >= 2:
            for c in orderings:
                here = fval(c)
                acc = 0.0
                for k in range(2, b + 1):
                    ar = adjacent_rate(measure, b, k)
                    if ar == 0.0:
                        continue
                    for i in range(b - k + 1):
                        merged = tuple(
                            sorted(itertools.chain.from_iterable(c.blocks[i : i + k]))
                        )
                        moved = list(c.blocks[:i]) + [merged] + list(c.blocks[i + k :])
                        acc += ar * (fval(Composition(moved)) - here)
                rhs += acc
            rhs /= len(orderings)

        worst = max(worst, abs(lhs - rhs))
    return worst
