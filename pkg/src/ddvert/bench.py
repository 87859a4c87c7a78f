"""Random instance generation and the three-backend timing harness.

Instances follow the sampling protocol of the experiments this package
reproduces: objective and constraint entries are N(0, 100) draws rounded
half-away-from-zero to integers, right-hand sides are U[0, 10] rounded,
the number of constraints is twice the number of variables, and a draw
is accepted only when the program is feasible with a finite ideal point.

The harness drives every accepted instance once with the unbounded
double description backend choosing the vertices, and replays each cut
into the other enabled backends so all of them solve the same vertex
enumeration subproblem each round from their own state.  Wall time is
measured around the vertex enumeration calls only.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import benson
from .benson import (
    BACKEND_BOX,
    BACKEND_CONE,
    BACKEND_OFFLINE,
    DEFAULT_BIG_M,
    MolpInstance,
    make_backend,
)

NORMAL_SIGMA = 10.0     # variance 100
UNIFORM_HIGH = 10.0

WORKERS_ENV = "DDVERT_WORKERS"

CSV_FIELDS = ("instance", "iteration", "backend", "ve_time_s", "actual", "artificial", "alpha")
SUMMARY_FIELDS = (
    "iteration",
    "backend",
    "mean_ve_time_s",
    "mean_actual",
    "mean_artificial",
    "pct_artificial",
    "n_instances",
)


@dataclass(frozen=True)
class GenSpec:
    """Size and seed of one random instance draw (constraints = 2n)."""

    d: int
    n: int
    seed: int

    def __post_init__(self):
        if self.d < 2 or self.n < 1:
            raise ValueError("need d >= 2 objectives and n >= 1 variables")

    @property
    def m(self):
        return 2 * self.n


@dataclass
class BenchRecord:
    instance: int
    iteration: int
    backend: str
    ve_time_s: float
    actual: int
    artificial: int
    alpha: float | None


def _round_half_away(x):
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def generate_instance(spec: GenSpec):
    """One deterministic draw; returns the instance or None when rejected.

    Rejection happens exactly when the program is infeasible or some
    objective is unbounded below (non-finite ideal point).
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    C = _round_half_away(rng.normal(0.0, NORMAL_SIGMA, size=(spec.d, spec.n)))
    A = _round_half_away(rng.normal(0.0, NORMAL_SIGMA, size=(spec.m, spec.n)))
    b = _round_half_away(rng.uniform(0.0, UNIFORM_HIGH, size=spec.m))
    inst = MolpInstance(C, A, b)
    try:
        if benson.ideal_point(inst) is None:
            return None
    except benson.InfeasibleInstanceError:
        return None
    return inst


def sample_instances(d, n, count, seed0=0):
    """First ``count`` accepted draws walking seeds upward from seed0."""
    out = []
    seed = seed0
    while len(out) < count:
        inst = generate_instance(GenSpec(d, n, seed))
        if inst is not None:
            out.append((seed, inst))
        seed += 1
    return out


def _bench_one(args):
    seed, inst, eps, big_m, backends, cut_cap, timing_reps = args
    driver = make_backend(BACKEND_CONE, inst.cone, big_m)
    followers = [
        make_backend(name, inst.cone, big_m) for name in backends if name != BACKEND_CONE
    ]
    records = []

    def observe(iteration, rec, follower_times):
        by_name = {BACKEND_CONE: (rec.ve_time_s, rec.n_actual, rec.n_artificial)}
        for fb in followers:
            actual, artificial = fb.counts()
            by_name[fb.name] = (follower_times[fb.name], actual, artificial)
        for name in backends:
            t, actual, artificial = by_name[name]
            records.append(
                BenchRecord(
                    seed, iteration, name, t, actual, artificial,
                    None if iteration == 0 else rec.alpha,
                )
            )

    report = benson.run_outer_approximation(
        inst, eps, driver, followers, cut_cap=cut_cap, on_iteration=observe,
        timing_reps=timing_reps,
    )
    finals = {driver.name: driver.final_vertices()}
    for fb in followers:
        finals[fb.name] = fb.final_vertices()
    return records, finals, report


def run_benchmark(
    specs_or_instances,
    eps,
    big_m=DEFAULT_BIG_M,
    backends=(BACKEND_CONE, BACKEND_BOX, BACKEND_OFFLINE),
    cut_cap=benson.DEFAULT_CUT_CAP,
    workers=None,
    return_finals=False,
    timing_reps=1,
):
    """Timing records for every enabled backend over a sample of instances.

    ``specs_or_instances`` holds GenSpec entries (drawn and possibly
    rejected here) or pre-accepted ``(seed, instance)`` pairs.  Instances
    run in parallel when ``workers`` (or the DDVERT_WORKERS environment
    variable) asks for it; records always come back sorted by
    (instance, iteration, backend) so the output is order-independent.
    ``timing_reps`` > 1 reports the median of that many repetitions of
    each vertex enumeration call (extra runs use throwaway state copies).
    """
    backends = tuple(backends)
    if BACKEND_CONE not in backends:
        backends = (BACKEND_CONE,) + backends
    jobs = []
    for entry in specs_or_instances:
        if isinstance(entry, GenSpec):
            inst = generate_instance(entry)
            if inst is None:
                continue
            jobs.append((entry.seed, inst, eps, big_m, backends, cut_cap, timing_reps))
        else:
            seed, inst = entry
            jobs.append((seed, inst, eps, big_m, backends, cut_cap, timing_reps))

    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    results = []
    failed = []
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for job, outcome in zip(jobs, pool.map(_bench_one_safe, jobs)):
                if outcome is None:
                    failed.append(job[0])
                else:
                    results.append(outcome)
    else:
        for job in jobs:
            try:
                results.append(_bench_one(job))
            except benson.NumericalFailureError:
                failed.append(job[0])

    records = [rec for recs, _, _ in results for rec in recs]
    records.sort(key=lambda r: (r.instance, r.iteration, r.backend))
    if return_finals:
        finals = {recs[0].instance: fin for recs, fin, _ in results if recs}
        return records, finals, failed
    return records, failed


def _bench_one_safe(args):
    try:
        return _bench_one(args)
    except benson.NumericalFailureError:
        return None


# -- aggregation -------------------------------------------------------


def _instance_iteration_counts(records):
    counts = {}
    for rec in records:
        counts[rec.instance] = max(counts.get(rec.instance, 0), rec.iteration)
    return counts


def select_subsample(records, size=None):
    """Instances sorted by iteration count (non-increasing), top ``size``.

    Returns (selected instance ids, common iteration range end).
    """
    counts = _instance_iteration_counts(records)
    ordered = sorted(counts, key=lambda i: (-counts[i], i))
    if size is not None:
        ordered = ordered[:size]
    if not ordered:
        return [], 0
    return ordered, min(counts[i] for i in ordered)


def summarize(records, subsample=None):
    """Per-iteration averages over the (sub)sample, as summary dict rows."""
    selected, max_iter = select_subsample(records, subsample)
    chosen = set(selected)
    rows = []
    by_key = {}
    for rec in records:
        if rec.instance in chosen and rec.iteration <= max_iter:
            by_key.setdefault((rec.iteration, rec.backend), []).append(rec)
    for (iteration, backend) in sorted(by_key):
        group = by_key[(iteration, backend)]
        actual = float(np.mean([r.actual for r in group]))
        artificial = float(np.mean([r.artificial for r in group]))
        total = actual + artificial
        rows.append(
            {
                "iteration": iteration,
                "backend": backend,
                "mean_ve_time_s": float(np.mean([r.ve_time_s for r in group])),
                "mean_actual": actual,
                "mean_artificial": artificial,
                "pct_artificial": 100.0 * artificial / total if total else 0.0,
                "n_instances": len(group),
            }
        )
    return rows


def artificial_vertex_table(records, iterations=None, subsample=None):
    """Average actual/artificial counts of the box backend per iteration.

    Returns rows ``(iteration, avg_actual, avg_artificial, pct_artificial)``
    in iteration order, restricted to ``iterations`` when given.
    """
    box = [r for r in records if r.backend == BACKEND_BOX]
    rows = []
    for row in summarize(box, subsample):
        if iterations is not None and row["iteration"] not in iterations:
            continue
        rows.append(
            (
                row["iteration"],
                row["mean_actual"],
                row["mean_artificial"],
                row["pct_artificial"],
            )
        )
    return rows


# -- delimited output ---------------------------------------------------


def _fmt_time(value, with_timing):
    if not with_timing:
        return "0"
    return format(value, ".9f")


def records_to_csv(records, with_timing=True):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for rec in records:
        writer.writerow(
            [
                rec.instance,
                rec.iteration,
                rec.backend,
                _fmt_time(rec.ve_time_s, with_timing),
                rec.actual,
                rec.artificial,
                "" if rec.alpha is None else format(rec.alpha, ".12g"),
            ]
        )
    return buf.getvalue()


def summary_to_csv(summary_rows, with_timing=True):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_FIELDS)
    for row in summary_rows:
        writer.writerow(
            [
                row["iteration"],
                row["backend"],
                _fmt_time(row["mean_ve_time_s"], with_timing),
                format(row["mean_actual"], ".6g"),
                format(row["mean_artificial"], ".6g"),
                format(row["pct_artificial"], ".6g"),
                row["n_instances"],
            ]
        )
    return buf.getvalue()
