"""Verification suites: statistical and exact checks with report artifacts.

Each suite runs at the same parameters the acceptance tests use, appends its
TestReports to the run, and saves one PNG beside the report files.  Suites
draw from RNG streams derived from (seed, canonical suite index), so the
statistics of a named suite do not depend on which other suites run.
"""

from __future__ import annotations

import csv
import io
import json
import os
from bisect import bisect_right
from typing import Callable, Sequence

import numpy as np

from .backbone import FiniteUMS, sample_distance_matrix
from .bridges import adjacent_merge_evolution, lambda_comb_step
from .chains import (
    enumerate_compositions,
    intertwining_check,
    simulate_composition_chain,
    simulate_partition_chain,
)
from .combs import Comb, distance_matrix, mass_twin_combs, sample_kingman_comb
from .evolve import height_pair_samples
from .intervals import IntervalPartition, hausdorff, locate_components, mass_partition
from .paintbox import empirical_interval_partition, ordered_paintbox
from .plotting import save_bar, save_ecdf_comparison, save_error_grid, save_series
from .rates import KINGMAN, parse_lambda_spec
from .rng import make_rng, replicate_rng
from .stats import TestReport, ks_one_sample, ks_two_sample

__all__ = ["SUITE_NAMES", "pair_coalescence_samples", "run_suites", "write_report"]

SUITE_NAMES = (
    "intertwining",
    "projection",
    "empirical-convergence",
    "semigroup",
    "evolve-stationarity",
    "figure2",
    "star-metric",
)


# ---------------------------------------------------------------------------
# suites


def _suite_intertwining(rng: np.random.Generator, fig_path: str) -> list[TestReport]:
    """Exhaustive generator intertwining for small n across four measures."""
    measures = [
        ("kingman", KINGMAN),
        ("uniform", parse_lambda_spec("uniform")),
        ("beta:2,2", parse_lambda_spec("beta:2,2")),
        ("dirac:0.5", parse_lambda_spec("dirac:0.5")),
    ]
    trials = 20
    errors: dict[str, float] = {}
    worst = 0.0
    for mname, measure in measures:
        for n in (2, 3, 4, 5):
            comps = enumerate_compositions(n)
            worst_here = 0.0
            for _ in range(trials):
                f = {c: float(v) for c, v in zip(comps, rng.random(len(comps)))}
                worst_here = max(worst_here, intertwining_check(measure, n, f))
            errors[f"{mname} n={n}"] = worst_here
            worst = max(worst, worst_here)
    save_error_grid(fig_path, errors, "intertwining: max |Q-hat Lf - L Q f|")
    return [
        TestReport.from_statistic(
            "intertwining-max-error", worst, 1e-9, n=len(errors) * trials
        )
    ]


def _time_to_blocks(events, k: int) -> float:
    for t, value in events:
        if len(value.blocks) <= k:
            return t
    return float("inf")


def _suite_projection(rng: np.random.Generator, fig_path: str) -> list[TestReport]:
    """Block counts of the ordered chain against the plain chain, n = 20."""
    measure = parse_lambda_spec("beta:2,2")
    n, reps = 20, 10_000
    targets = (10, 5, 1)
    part_times = {k: np.empty(reps) for k in targets}
    comp_times = {k: np.empty(reps) for k in targets}
    for r in range(reps):
        traj = simulate_partition_chain(measure, n, rng)
        for k in targets:
            part_times[k][r] = _time_to_blocks(traj.events, k)
        ordered = simulate_composition_chain(measure, n, rng)
        for k in targets:
            comp_times[k][r] = _time_to_blocks(ordered.events, k)
    reports = [
        TestReport.from_statistic(
            f"projection-time-to-{k}-blocks",
            ks_two_sample(part_times[k], comp_times[k]),
            0.03,
            n=reps,
            m=reps,
        )
        for k in targets
    ]
    save_ecdf_comparison(
        fig_path,
        part_times[5],
        comp_times[5],
        "partition chain",
        "composition chain",
        "time to 5 blocks, n=20, beta(2,2)",
    )
    return reports


def pair_coalescence_samples(
    replicates: int,
    n_teeth: int,
    rng: np.random.Generator,
    chunk: int = 10_000,
) -> np.ndarray:
    """Coalescence times of two uniform points on fresh Kingman combs.

    Vectorized across replicates: per comb the pair time is the max height of
    the teeth strictly between the two points (0 if none), which is
    comb_distance without building the comb objects.  Draw order per chunk is
    heights, positions, then the two points, matching sample_kingman_comb
    followed by two uniforms when chunk=1.
    """
    out = np.empty(replicates)
    done = 0
    while done < replicates:
        c = min(chunk, replicates - done)
        e = rng.standard_exponential((c, n_teeth))
        i = np.arange(2, n_teeth + 2, dtype=float)
        # same association as sample_kingman_comb so chunk=1 agrees bit for bit
        heights = np.cumsum((2.0 / (i * (i - 1.0)) * e)[:, ::-1], axis=1)[:, ::-1]
        positions = rng.random((c, n_teeth))
        xy = rng.random((c, 2))
        lo = xy.min(axis=1)[:, None]
        hi = xy.max(axis=1)[:, None]
        between = (positions > lo) & (positions < hi)
        out[done : done + c] = np.max(np.where(between, heights, 0.0), axis=1)
        done += c
    return out


def _suite_empirical_convergence(rng: np.random.Generator, fig_path: str) -> list[TestReport]:
    """Pair-coalescence law on Kingman combs and paintbox d_H convergence."""
    reps = 100_000
    times = pair_coalescence_samples(reps, 500, rng)
    ks = ks_one_sample(times, lambda x: 1.0 - np.exp(-x))
    reports = [
        TestReport.from_statistic("pair-coalescence-exp1-ks", ks, 0.015, n=reps)
    ]

    comb = Comb.from_teeth([(0.25, 0.6), (0.5, 1.0), (0.75, 0.35)])
    ns = (100, 1_000, 10_000)
    replicate_count = 100
    means = []
    for n in ns:
        worst_dh = np.empty(replicate_count)
        for r in range(replicate_count):
            traj = ordered_paintbox(comb, n, rng)
            etimes = [t for t, _ in traj.events]
            dh = 0.0
            for t in comb.times:
                comp = traj.events[bisect_right(etimes, t) - 1][1]
                dh = max(dh, hausdorff(empirical_interval_partition(comp), comb.at(t)))
            worst_dh[r] = dh
        means.append(float(worst_dh.mean()))
    reports.append(
        TestReport.from_statistic(
            "empirical-dh-mean-n10000", means[-1], 0.05, n=replicate_count
        )
    )
    increase = max(b - a for a, b in zip(means, means[1:]))
    reports.append(
        TestReport.from_statistic(
            "empirical-dh-monotone-decrease", increase, 0.0, n=len(ns)
        )
    )
    save_series(
        fig_path,
        ns,
        means,
        "paintbox sample size n",
        "mean max-over-times d_H",
        "empirical interval-partition convergence",
        logx=True,
    )
    return reports


def _suite_semigroup(rng: np.random.Generator, fig_path: str) -> list[TestReport]:
    """Largest mass: direct adjacent-merge chain vs one bridge-composition step."""
    # dyadic cuts so the lengths sum to 1 exactly (dust-free in float, not
    # just up to rounding): nine components of 1/16 and one of 7/16
    start = IntervalPartition(
        [(i / 16.0, (i + 1) / 16.0) for i in range(9)] + [(9 / 16.0, 1.0)]
    )
    reps, m, t = 10_000, 2_000, 0.5
    direct = np.empty(reps)
    composed = np.empty(reps)
    for r in range(reps):
        a = adjacent_merge_evolution(start, KINGMAN, t, rng)
        direct[r] = max(a.lengths)
        b = lambda_comb_step(start, KINGMAN, t, m, rng)
        composed[r] = max(b.lengths)
    ks = ks_two_sample(direct, composed)
    save_ecdf_comparison(
        fig_path,
        direct,
        composed,
        "adjacent_merge_evolution",
        "lambda_comb_step",
        "largest mass after t=0.5, Kingman",
    )
    return [
        TestReport.from_statistic("semigroup-largest-mass-ks", ks, 0.03, n=reps, m=reps)
    ]


def _suite_evolve_stationarity(rng: np.random.Generator, fig_path: str) -> list[TestReport]:
    fresh, evolved = height_pair_samples(500, 0.3, 10_000, rng)
    ks = ks_two_sample(fresh, evolved)
    save_ecdf_comparison(
        fig_path,
        fresh,
        evolved,
        "fresh",
        "evolved (s=0.3)",
        "tree height: fresh vs one-step-evolved Kingman comb",
    )
    return [
        TestReport.from_statistic(
            "evolve-stationarity-height-ks", ks, 0.02, n=len(fresh), m=len(evolved)
        )
    ]


def _tracked_fraction(comb: Comb, u: np.ndarray) -> float:
    """Fraction of samples in the three smallest t=0.5 components that land
    in the largest t=1.5 component."""
    p1 = comb.at(0.5)
    p2 = comb.at(1.5)
    small3 = np.argsort(np.asarray(p1.lengths))[:3]
    big = int(np.argmax(np.asarray(p2.lengths)))
    at1 = locate_components(p1, u)
    at2 = locate_components(p2, u)
    mask = np.isin(at1, small3)
    return float(np.mean(at2[mask] == big))


def _suite_figure2(rng: np.random.Generator, fig_path: str) -> list[TestReport]:
    """Twin combs: equal ranked masses at every time, opposite tracked flows."""
    left, right = mass_twin_combs()
    mismatch = 0.0
    if left.times != right.times:
        mismatch = float("inf")
    else:
        for t in left.times:
            a = mass_partition(left.at(t)).masses
            b = mass_partition(right.at(t)).masses
            if len(a) != len(b):
                mismatch = float("inf")
                break
            mismatch = max(mismatch, max((abs(x - y) for x, y in zip(a, b)), default=0.0))
    samples = 10_000
    p_left = _tracked_fraction(left, rng.random(samples))
    p_right = _tracked_fraction(right, rng.random(samples))
    save_bar(
        fig_path,
        ["left comb", "right comb"],
        [p_left, p_right],
        "P(small component at t=0.5 -> largest block at t=1.5)",
        hline=0.5,
    )
    return [
        TestReport.from_statistic("figure2-ranked-mass-mismatch", mismatch, 5e-324, n=len(left.times)),
        TestReport.from_statistic("figure2-left-tracked", 1.0 - p_left, 0.05, n=samples),
        TestReport.from_statistic("figure2-right-tracked", p_right, 0.05, n=samples),
    ]


def _random_dusty_space(rng: np.random.Generator, n_points: int, n_zero: int) -> FiniteUMS:
    comb = sample_kingman_comb(rng, n_points + 10)
    while True:
        pts = rng.random(n_points)
        if len(np.unique(pts)) == n_points and (pts > 0.0).all():
            break
    dist = distance_matrix(comb, pts)
    weights = np.zeros(n_points)
    massive = rng.choice(n_points, size=n_points - n_zero, replace=False)
    weights[massive] = 1.0 / (n_points - n_zero)
    return FiniteUMS(dist, weights)


def _suite_star_metric(rng: np.random.Generator, fig_path: str) -> list[TestReport]:
    """Shared-RNG sampling cannot tell the plain metric from the star metric."""
    reps, n_samples = 100, 50
    worst = 0.0
    last_plain = last_star = None
    for _ in range(reps):
        space = _random_dusty_space(rng, n_points=50, n_zero=20)
        shared_seed = int(rng.integers(2**63))
        plain = sample_distance_matrix(space, n_samples, make_rng(shared_seed), "plain")
        star = sample_distance_matrix(space, n_samples, make_rng(shared_seed), "star")
        worst = max(worst, float(np.max(np.abs(plain - star))))
        last_plain, last_star = plain, star
    iu = np.triu_indices(n_samples, k=1)
    save_ecdf_comparison(
        fig_path,
        last_plain[iu],
        last_star[iu],
        "plain d",
        "star d~",
        "sampled pairwise distances (last replicate)",
    )
    return [
        TestReport.from_statistic(
            "star-metric-shared-rng-max-diff", worst, 5e-324, n=reps, m=n_samples
        )
    ]


_SUITES: dict[str, Callable[[np.random.Generator, str], list[TestReport]]] = {
    "intertwining": _suite_intertwining,
    "projection": _suite_projection,
    "empirical-convergence": _suite_empirical_convergence,
    "semigroup": _suite_semigroup,
    "evolve-stationarity": _suite_evolve_stationarity,
    "figure2": _suite_figure2,
    "star-metric": _suite_star_metric,
}


# ---------------------------------------------------------------------------
# runner and report files


def run_suites(names: Sequence[str], out_dir: str, seed: int) -> list[TestReport]:
    """Run the named suites, writing one PNG per suite into out_dir."""
    unknown = [n for n in names if n not in _SUITES]
    if unknown:
        raise ValueError(f"unknown suite name(s): {', '.join(unknown)}")
    os.makedirs(out_dir, exist_ok=True)
    reports: list[TestReport] = []
    for name in names:
        rng = replicate_rng(seed, SUITE_NAMES.index(name))
        fig_path = os.path.join(out_dir, f"{name}.png")
        reports.extend(_SUITES[name](rng, fig_path))
    return reports


def write_report(reports: Sequence[TestReport], out_dir: str, seed: int) -> bool:
    """Write report.json and report.csv; returns True iff everything passed."""
    all_passed = all(r.passed for r in reports)
    payload = {
        "seed": seed,
        "all_passed": all_passed,
        "reports": [r.to_dict() for r in reports],
    }
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "statistic", "n", "m", "threshold", "passed"])
    for r in reports:
        writer.writerow([r.name, repr(r.statistic), r.n, r.m, repr(r.threshold), r.passed])
    with open(os.path.join(out_dir, "report.csv"), "w") as fh:
        fh.write(buf.getvalue())
    return all_passed
