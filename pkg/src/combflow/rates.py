"""Merger rate laws of exchangeable multiple-merger coalescents.

A finite measure on [0,1] drives the chain: with b blocks present, any fixed
set of k of them merges at rate

    rate(b, k) = integral of x^(k-2) (1-x)^(b-k) over the measure,

with the convention 0^0 = 1 at the endpoint atoms.  The adjacent-window
variant used by ordered chains scales this to

    adjacent_rate(b, k) = C(b,k) * rate(b, k) / (b - k + 1),

so that b-k+1 windows of k adjacent blocks together carry the same total rate
as the C(b,k) unordered k-subsets.

Supported measures: a point mass (Kingman is the unit atom at 0), the uniform
measure (Bolthausen-Sznitman at mass 1), Beta measures, and finite mixtures;
every measure carries its own total mass and can be rescaled with ``scaled``.
Size-biased merger weights C(b,k)*rate(b,k) are computed in log space
(gammaln/betaln) so large block counts stay finite, and are cached per
(measure, b) — measures are frozen dataclasses, hence exact cache keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betaln, gammaln

__all__ = [
    "LambdaMeasure",
    "DiracLambda",
    "UniformLambda",
    "BetaLambda",
    "MixtureLambda",
    "KINGMAN",
    "BOLTHAUSEN_SZNITMAN",
    "scaled",
    "rate",
    "adjacent_rate",
    "merger_weights",
    "parse_lambda_spec",
]


class LambdaMeasure:
    """Finite measure on [0,1]; subclasses implement the two moment kernels."""

    def moment(self, i: int, j: int) -> float:
        """integral of x^i (1-x)^j, with 0^0 = 1 at endpoint atoms."""
        raise NotImplementedError

    def log_moment(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        """log of `moment`, vectorised; -inf where the moment vanishes."""
        raise NotImplementedError

    def total_mass(self) -> float:
        raise NotImplementedError

    def atom_at_zero_mass(self) -> float | None:
        """Total mass if the measure is purely an atom at 0, else None."""
        return None


@dataclass(frozen=True)
class DiracLambda(LambdaMeasure):
    location: float
    mass: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.location <= 1.0):
            raise ValueError(f"atom location {self.location} outside [0, 1]")
        if not self.mass > 0.0:
            raise ValueError("measure mass must be positive")

    def moment(self, i: int, j: int) -> float:
        p = self.location
        xi = 1.0 if i == 0 else p**i
        xj = 1.0 if j == 0 else (1.0 - p) ** j
        return self.mass * xi * xj

    def log_moment(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        p = self.location
        with np.errstate(divide="ignore", invalid="ignore"):
            li = np.where(i == 0, 0.0, i * (np.log(p) if p > 0 else -np.inf))
            lj = np.where(j == 0, 0.0, j * (math.log1p(-p) if p < 1 else -np.inf))
        return math.log(self.mass) + li + lj

    def total_mass(self) -> float:
        return self.mass

    def atom_at_zero_mass(self) -> float | None:
        return self.mass if self.location == 0.0 else None


@dataclass(frozen=True)
class BetaLambda(LambdaMeasure):
    """Beta(alpha, beta) shape carrying total mass `mass`."""

    alpha: float
    beta: float
    mass: float = 1.0

    def __post_init__(self) -> None:
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError("Beta parameters must be positive")
        if not self.mass > 0.0:
            raise ValueError("measure mass must be positive")

    def moment(self, i: int, j: int) -> float:
        return float(np.exp(self.log_moment(np.asarray(i), np.asarray(j))))

    def log_moment(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        return (
            math.log(self.mass)
            + betaln(self.alpha + i, self.beta + j)
            - betaln(self.alpha, self.beta)
        )

    def total_mass(self) -> float:
        return self.mass


@dataclass(frozen=True)
class UniformLambda(LambdaMeasure):
    """Lebesgue measure on [0,1] scaled to total mass `mass`."""

    mass: float = 1.0

    def __post_init__(self) -> None:
        if not self.mass > 0.0:
            raise ValueError("measure mass must be positive")

    def moment(self, i: int, j: int) -> float:
        return float(np.exp(self.log_moment(np.asarray(i), np.asarray(j))))

    def log_moment(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        return math.log(self.mass) + betaln(i + 1.0, j + 1.0)

    def total_mass(self) -> float:
        return self.mass


@dataclass(frozen=True)
class MixtureLambda(LambdaMeasure):
    parts: tuple[LambdaMeasure, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("mixture needs at least one part")

    def moment(self, i: int, j: int) -> float:
        return sum(p.moment(i, j) for p in self.parts)

    def log_moment(self, i: np.ndarray, j: np.ndarray) -> np.ndarray:
        stack = np.stack([p.log_moment(i, j) for p in self.parts])
        top = np.max(stack, axis=0)
        safe = np.where(np.isfinite(top), top, 0.0)
        out = safe + np.log(np.sum(np.exp(stack - safe), axis=0))
        return np.where(np.isfinite(top), out, -np.inf)

    def total_mass(self) -> float:
        return sum(p.total_mass() for p in self.parts)

    def atom_at_zero_mass(self) -> float | None:
        masses = [p.atom_at_zero_mass() for p in self.parts]
        if all(m is not None for m in masses):
            return float(sum(masses))  # type: ignore[arg-type]
        return None


KINGMAN = DiracLambda(0.0, 1.0)
BOLTHAUSEN_SZNITMAN = UniformLambda(1.0)


def scaled(measure: LambdaMeasure, factor: float) -> LambdaMeasure:
    """The same shape carrying `factor` times the mass."""
    if not factor > 0.0:
        raise ValueError("scale factor must be positive")
    if isinstance(measure, DiracLambda):
        return DiracLambda(measure.location, measure.mass * factor)
    if isinstance(measure, BetaLambda):
        return BetaLambda(measure.alpha, measure.beta, measure.mass * factor)
    if isinstance(measure, UniformLambda):
        return UniformLambda(measure.mass * factor)
    if isinstance(measure, MixtureLambda):
        return MixtureLambda(tuple(scaled(p, factor) for p in measure.parts))
    raise TypeError(f"unknown measure type {type(measure).__name__}")


def _check_bk(b: int, k: int) -> None:
    if not (2 <= k <= b):
        raise ValueError(f"need 2 <= k <= b, got k={k}, b={b}")


@lru_cache(maxsize=65536)
def _rate_cached(measure: LambdaMeasure, b: int, k: int) -> float:
    return measure.moment(k - 2, b - k)


def rate(measure: LambdaMeasure, b: int, k: int) -> float:
    """Rate at which a fixed k-subset of b blocks merges."""
    _check_bk(b, k)
    return _rate_cached(measure, b, k)


def adjacent_rate(measure: LambdaMeasure, b: int, k: int) -> float:
    """Rate of one window of k adjacent blocks among b ordered blocks."""
    _check_bk(b, k)
    return math.comb(b, k) * rate(measure, b, k) / (b - k + 1)


@lru_cache(maxsize=4096)
def merger_weights(measure: LambdaMeasure, b: int) -> tuple[float, np.ndarray]:
    """Total merge rate and merger-size law with b blocks present.

    Returns (total, probs) where probs[k-2] is the probability that the next
    merger takes k blocks; the unordered chain then picks a uniform k-subset
    and the ordered chain a uniform window of k adjacent blocks — both have
    total rate `total` because (b-k+1) * adjacent_rate = C(b,k) * rate.
    """
    if b < 2:
        raise ValueError("need at least two blocks")
    k = np.arange(2, b + 1)
    logw = (
        gammaln(b + 1.0)
        - gammaln(k + 1.0)
        - gammaln(b - k + 1.0)
        + measure.log_moment(k - 2, b - k)
    )
    top = float(np.max(logw))
    if top == -np.inf:
        return 0.0, np.zeros(b - 1)
    w = np.exp(logw - top)
    total = float(np.exp(top + np.log(w.sum())))
    probs = w / w.sum()
    probs.flags.writeable = False
    return total, probs


# ---------------------------------------------------------------------------
# measure grammar used by the CLI


def parse_lambda_spec(text: str) -> LambdaMeasure:
    """Parse a measure description.

    Grammar: "kingman" | "uniform" | "dirac:p" | "beta:a,b" |
    "mix:[item,...]" with item = base*weight, all optionally followed by
    "*mass" to rescale the whole measure.  Examples: "kingman", "beta:2,2",
    "dirac:0.5*2", "mix:[kingman*0.5,beta:2,2*0.5]".
    """
    text = text.strip()
    if not text:
        raise ValueError("empty measure spec")
    if text.startswith("mix:"):
        return _parse_mixture(text)
    base, factor = _split_mass(text)
    measure = _parse_base(base)
    return scaled(measure, factor) if factor != 1.0 else measure


def _split_mass(text: str) -> tuple[str, float]:
    if "*" in text:
        base, _, mass = text.rpartition("*")
        try:
            return base, float(mass)
        except ValueError as exc:
            raise ValueError(f"bad mass multiplier in {text!r}") from exc
    return text, 1.0


def _parse_base(text: str) -> LambdaMeasure:
    if text == "kingman":
        return KINGMAN
    if text == "uniform":
        return BOLTHAUSEN_SZNITMAN
    if text.startswith("dirac:"):
        try:
            return DiracLambda(float(text[len("dirac:"):]))
        except ValueError as exc:
            raise ValueError(f"bad atom location in {text!r}") from exc
    if text.startswith("beta:"):
        params = text[len("beta:"):].split(",")
        if len(params) != 2:
            raise ValueError(f"beta spec needs two parameters, got {text!r}")
        try:
            return BetaLambda(float(params[0]), float(params[1]))
        except ValueError as exc:
            raise ValueError(f"bad beta parameters in {text!r}") from exc
    raise ValueError(f"unknown measure spec {text!r}")


def _parse_mixture(text: str) -> LambdaMeasure:
    inner = text[len("mix:"):]
    body, sep, tail = inner.rpartition("]")
    if not inner.startswith("[") or sep == "":
        raise ValueError(f"mixture spec must look like mix:[...], got {text!r}")
    body = body[1:]  # drop the leading [
    factor = 1.0
    if tail:
        if not tail.startswith("*"):
            raise ValueError(f"unexpected trailing {tail!r} in {text!r}")
        factor = float(tail[1:])
    # items are comma separated, but bases may contain commas (beta:a,b);
    # every item ends with *weight, so accumulate segments until one has a *
    parts: list[LambdaMeasure] = []
    pending: list[str] = []
    for segment in body.split(","):
        pending.append(segment)
        if "*" in segment:
            item = ",".join(pending)
            pending = []
            base, weight = _split_mass(item)
            if weight <= 0.0:
                raise ValueError(f"mixture weight must be positive in {item!r}")
            parts.append(scaled(_parse_base(base), weight))
    if pending or not parts:
        raise ValueError(f"malformed mixture items in {text!r}")
    measure: LambdaMeasure = MixtureLambda(tuple(parts))
    return scaled(measure, factor) if factor != 1.0 else measure
