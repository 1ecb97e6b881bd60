"""Finite ultrametric measure spaces and their backbone simplification.

A finite ultrametric measure space is a symmetric distance matrix obeying the
strong triangle inequality d(x,y) <= max(d(x,z), d(z,y)) exactly, plus point
weights.  Zero-weight points model structure hanging off the support: the
height function f measures how far each point sits from the weighted part,
and the star metric pulls every such point up to height f, flattening the
hanging structure while leaving sampled distance matrices distribution-equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .stats import ks_two_sample

__all__ = [
    "FiniteUMS",
    "validate_ultrametric",
    "height_function",
    "star_metric",
    "tree_distance",
    "backbone_distance",
    "sample_distance_matrix",
    "GromovComparison",
    "gromov_weak_compare",
    "ums_to_csv_text",
    "ums_from_csv_text",
]

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class FiniteUMS:
    """Finite metric measure space with an exactly ultrametric distance."""

    dist: np.ndarray
    weights: np.ndarray

    def __init__(self, dist, weights) -> None:
        d = np.array(dist, dtype=float)
        w = np.array(weights, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance matrix must be square")
        if w.ndim != 1 or len(w) != d.shape[0]:
            raise ValueError("need one weight per point")
        if len(w) < 1:
            raise ValueError("need at least one point")
        if (w < 0).any():
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"weights sum to {w.sum()}, not 1")
        if not validate_ultrametric(d):
            raise ValueError("distance matrix violates the ultrametric inequality")
        d.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return len(self.weights)

    @cached_property
    def heights(self) -> np.ndarray:
        f = height_function(self)
        f.flags.writeable = False
        return f

    def to_dict(self) -> dict:
        return {"dist": self.dist.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteUMS":
        return cls(data["dist"], data["weights"])


def validate_ultrametric(dist) -> bool:
    """True iff every triple satisfies d(x,y) <= max(d(x,z), d(z,y)) exactly.

    Structural defects (non-square, asymmetric, negative entries, nonzero
    diagonal) are errors rather than False: they make the question
    ill-posed, whereas a triangle violation is the answer this asks about.
    """
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distance matrix must be square")
    if not (d == d.T).all():
        raise ValueError("distance matrix must be symmetric")
    if (np.diag(d) != 0).any():
        raise ValueError("diagonal must be zero")
    if (d < 0).any():
        raise ValueError("distances must be nonnegative")
    n = d.shape[0]
    for z in range(n):
        bound = np.maximum(d[:, z : z + 1], d[z : z + 1, :])
        if (d > bound).any():
            return False
    return True


def height_function(space: FiniteUMS) -> np.ndarray:
    """Distance from each point to the weighted support.

    f(x) = 0 wherever weight(x) > 0, else the min distance to a
    positive-weight point; on a finite space the open-ball infimum
    inf{t : B(x,t) has positive mass} is attained at exactly this value.
    """
    positive = space.weights > 0
    if not positive.any():
        raise ValueError("need at least one positive-weight point")
    f = space.dist[:, positive].min(axis=1)
    f[positive] = 0.0
    return f


def star_metric(space: FiniteUMS) -> np.ndarray:
    """Distance matrix with every point pulled up to its height.

    d~(x,y) = max(d(x,y), f(x)) off the diagonal.  Taking the max over both
    heights is the same number — whenever f(x) != f(y) the larger height is
    already <= d(x,y) by the isosceles property — and keeps the matrix
    symmetric by construction.
    """
    f = space.heights
    out = np.maximum(space.dist, np.maximum.outer(f, f))
    np.fill_diagonal(out, 0.0)
    return out


def tree_distance(d: float, s: float, t: float) -> float:
    """Distance between points lifted to heights s and t above an ultrametric.

    Lifting x to height s and y to height t in the tree over the space gives
    max(d(x,y) - (s+t)/2, |t-s|/2): the first branch when the lifted points
    still meet at the original MRCA, the second when one sits above the other.
    """
    if d < 0:
        raise ValueError("distance must be nonnegative")
    if s < 0 or t < 0:
        raise ValueError("heights must be nonnegative")
    return max(d - (s + t) / 2.0, abs(t - s) / 2.0)


def backbone_distance(space: FiniteUMS, x: int, y: int) -> float:
    """Distance between x and y after projecting both onto the backbone.

    Each point is lifted to its height f before measuring: points whose
    sub-f structure hangs off the same support point project together
    (distance 0), and for separated pairs d~(x,y) = d_S + (f(x)+f(y))/2
    reconstructs the star metric exactly.
    """
    f = space.heights
    return tree_distance(float(space.dist[x, y]), float(f[x]), float(f[y]))


def sample_distance_matrix(
    space: FiniteUMS,
    n_samples: int,
    rng: np.random.Generator,
    metric: str = "plain",
) -> np.ndarray:
    """Distance matrix of n_samples points drawn i.i.d. by weight."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    if metric == "plain":
        d = space.dist
    elif metric == "star":
        d = star_metric(space)
    else:
        raise ValueError(f"unknown metric {metric!r}, expected 'plain' or 'star'")
    idx = rng.choice(space.n, size=n_samples, p=space.weights)
    return d[np.ix_(idx, idx)]


@dataclass(frozen=True)
class GromovComparison:
    """Statistics comparing two spaces' sampled-distance distributions."""

    pair_ks: float
    triple_energy: float
    n_samples: int
    replicates: int

    def to_dict(self) -> dict:
        return {
            "pair_ks": self.pair_ks,
            "triple_energy": self.triple_energy,
            "n_samples": self.n_samples,
            "replicates": self.replicates,
        }


def gromov_weak_compare(
    a: FiniteUMS,
    b: FiniteUMS,
    n_samples: int,
    replicates: int,
    rng: np.random.Generator,
) -> GromovComparison:
    """Statistical discriminator of sampled-distance distributions.

    Per replicate, draws n_samples i.i.d. pairs from each space and compares
    the pairwise-distance laws by two-sample KS, then n_samples i.i.d. triples
    and compares the laws of (d12, d13, d23) by energy distance; reports the
    means across replicates.  Distinguishes spaces with different distance
    matrix distributions; says nothing about structures carried only by
    zero-weight points.
    """
    if n_samples < 2 or replicates < 1:
        raise ValueError("need n_samples >= 2 and replicates >= 1")
    ks_vals = np.empty(replicates)
    energy_vals = np.empty(replicates)
    for r in range(replicates):
        ks_vals[r] = ks_two_sample(
            _pair_distances(a, n_samples, rng), _pair_distances(b, n_samples, rng)
        )
        energy_vals[r] = _energy_distance(
            _triple_distances(a, n_samples, rng), _triple_distances(b, n_samples, rng)
        )
    return GromovComparison(
        pair_ks=float(ks_vals.mean()),
        triple_energy=float(energy_vals.mean()),
        n_samples=n_samples,
        replicates=replicates,
    )


def _pair_distances(space: FiniteUMS, k: int, rng: np.random.Generator) -> np.ndarray:
    i = rng.choice(space.n, size=k, p=space.weights)
    j = rng.choice(space.n, size=k, p=space.weights)
    return space.dist[i, j]


def _triple_distances(space: FiniteUMS, k: int, rng: np.random.Generator) -> np.ndarray:
    i = rng.choice(space.n, size=k, p=space.weights)
    j = rng.choice(space.n, size=k, p=space.weights)
    l = rng.choice(space.n, size=k, p=space.weights)
    return np.column_stack([space.dist[i, j], space.dist[i, l], space.dist[j, l]])


def _energy_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Energy distance between two samples of R^k vectors (V-statistic form)."""
    return float(
        2.0 * _mean_cross_norm(a, b) - _mean_cross_norm(a, a) - _mean_cross_norm(b, b)
    )


def _mean_cross_norm(x: np.ndarray, y: np.ndarray, block: int = 256) -> float:
    total = 0.0
    for start in range(0, len(x), block):
        diff = x[start : start + block, None, :] - y[None, :, :]
        total += float(np.sqrt((diff**2).sum(axis=-1)).sum())
    return total / (len(x) * len(y))


def ums_to_csv_text(space: FiniteUMS) -> str:
    """n rows of the distance matrix followed by one row of weights."""
    lines = [",".join(repr(v) for v in row) for row in space.dist.tolist()]
    lines.append(",".join(repr(v) for v in space.weights.tolist()))
    return "\n".join(lines) + "\n"


def ums_from_csv_text(text: str) -> FiniteUMS:
    rows = [
        [float(cell) for cell in line.split(",")]
        for line in text.strip().splitlines()
        if line.strip()
    ]
    if len(rows) < 2:
        raise ValueError("need n distance rows plus a weights row")
    return FiniteUMS(rows[:-1], rows[-1])
