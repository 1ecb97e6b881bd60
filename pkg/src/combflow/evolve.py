"""One-step transition of the evolving Kingman comb.

The step erases every tooth of a fresh Kingman comb taller than s and pastes
in its place the tallest tooth of the previous comb found in the uniform gap
assigned to it, raised by s.  Teeth shorter than s are kept from the fresh
comb untouched.  Stationarity of the Kingman comb under this transition is
what `stationarity_probe` measures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .combs import Comb, Tooth, _sup_over, sample_kingman_comb
from .stats import ks_two_sample

__all__ = [
    "EvolveStepRecord",
    "evolving_kingman_step",
    "stationarity_probe",
    "height_pair_samples",
]


@dataclass(frozen=True)
class EvolveStepRecord:
    """Audit trail of one evolution step.

    ``order_stats`` holds the sorted uniforms V*_1 <= ... <= V*_{N+1} where
    N = ``n_above`` is the number of fresh teeth at height >= s;
    ``gap_sups[k]`` is the sup of the previous comb over the open gap
    (V*_{k+1}, V*_{k+2}) ... indexed from zero: gap k spans
    (order_stats[k], order_stats[k+1]).  ``pasted_heights[k]`` is
    ``gap_sups[k] + s`` and replaces the k-th tall fresh tooth in
    left-to-right position order.
    """

    fresh: Comb
    s: float
    n_above: int
    order_stats: tuple[float, ...]
    gap_sups: tuple[float, ...]
    pasted_heights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.order_stats) != self.n_above + 1:
            raise ValueError("need exactly n_above + 1 order statistics")
        if len(self.gap_sups) != self.n_above or len(self.pasted_heights) != self.n_above:
            raise ValueError("need one gap sup and one pasted height per tall tooth")
        if any(b <= a for a, b in zip(self.order_stats, self.order_stats[1:])):
            raise ValueError("order statistics must strictly increase")
        if any(p != m + self.s for m, p in zip(self.gap_sups, self.pasted_heights)):
            raise ValueError("pasted height must equal gap sup + s")
        if self.fresh.teeth is None:
            raise ValueError("fresh comb must carry teeth")
        if sum(1 for t in self.fresh.teeth if t.height >= self.s) != self.n_above:
            raise ValueError("n_above inconsistent with the fresh comb")

    def to_dict(self) -> dict:
        return {
            "fresh": self.fresh.to_dict(),
            "s": self.s,
            "n_above": self.n_above,
            "order_stats": list(self.order_stats),
            "gap_sups": list(self.gap_sups),
            "pasted_heights": list(self.pasted_heights),
        }


def evolving_kingman_step(
    f: Comb,
    s: float,
    rng: np.random.Generator,
    n_teeth: Optional[int] = None,
) -> tuple[Comb, EvolveStepRecord]:
    """Advance a teeth comb by one cut-and-paste step of size s.

    Samples a fresh Kingman comb with ``n_teeth`` teeth (defaulting to the
    tooth count of ``f``), finds its N teeth at height >= s, draws N + 1
    uniforms sorted to V*, and replaces the k-th tall tooth (left to right)
    with height M_k + s where M_k is the sup of ``f`` over the open gap
    (V*_k, V*_{k+1}).  Teeth of the fresh comb below s pass through exactly.

    With N = 0 the fresh comb is returned unchanged; a single uniform is
    still consumed so the RNG stream does not depend on the old comb.
    """
    if f.teeth is None:
        raise ValueError("evolution step needs a comb built from teeth")
    if not s > 0.0:
        raise ValueError(f"step size must be positive, got {s}")
    if n_teeth is None:
        n_teeth = len(f.teeth)

    fresh = sample_kingman_comb(rng, n_teeth)
    assert fresh.teeth is not None
    tall = [i for i, t in enumerate(fresh.teeth) if t.height >= s]
    n_above = len(tall)

    vstar = np.sort(_distinct_uniforms(rng, n_above + 1))
    sups = tuple(
        _sup_over(f, float(vstar[k]), float(vstar[k + 1]), False, False)
        for k in range(n_above)
    )
    pasted = tuple(m + s for m in sups)

    record = EvolveStepRecord(
        fresh=fresh,
        s=float(s),
        n_above=n_above,
        order_stats=tuple(float(v) for v in vstar),
        gap_sups=sups,
        pasted_heights=pasted,
    )
    if n_above == 0:
        return fresh, record

    new_teeth = list(fresh.teeth)
    for k, i in enumerate(sorted(tall, key=lambda i: fresh.teeth[i].position)):
        new_teeth[i] = Tooth(fresh.teeth[i].position, pasted[k])
    return Comb.from_teeth(new_teeth), record


def stationarity_probe(
    n_teeth: int,
    s: float,
    replicates: int,
    rng: np.random.Generator,
) -> float:
    """Two-sample KS between fresh and one-step-evolved tree heights.

    Each replicate contributes the max tooth height of one fresh Kingman
    comb and of the one-step evolution of an independent fresh comb.  If
    the Kingman comb is stationary under the step the statistic is
    two-sample-KS small; the raw statistic is returned for the caller to
    threshold.
    """
    fresh_heights, evolved_heights = height_pair_samples(n_teeth, s, replicates, rng)
    return ks_two_sample(fresh_heights, evolved_heights)


def height_pair_samples(
    n_teeth: int,
    s: float,
    replicates: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Max tooth heights of paired (fresh, evolved-independent-fresh) combs."""
    if replicates < 2:
        raise ValueError("need at least two replicates")
    fresh_heights = np.empty(replicates)
    evolved_heights = np.empty(replicates)
    for r in range(replicates):
        base = sample_kingman_comb(rng, n_teeth)
        fresh_heights[r] = _max_height(sample_kingman_comb(rng, n_teeth))
        evolved, _ = evolving_kingman_step(base, s, rng, n_teeth)
        evolved_heights[r] = _max_height(evolved)
    return fresh_heights, evolved_heights


def _max_height(comb: Comb) -> float:
    assert comb.teeth is not None
    return max(t.height for t in comb.teeth)


def _distinct_uniforms(rng: np.random.Generator, k: int) -> np.ndarray:
    while True:
        x = rng.random(k)
        if len(np.unique(x)) == k:
            return x
