"""Acceptance gate: the seven release criteria, one test each.

Each test prints a single pass/fail line (run ``pytest -s`` to see them
on success; a failing criterion shows its line in the assertion).
Randomness is seeded, so every run checks the same inputs.
"""

import time

import numpy as np
import pytest

from ddvert import bench, benson, dd, oracle
from ddvert.lp import OPTIMAL, solve_lp
from ddvert.polyhedron import Halfspace, standard_cone_dd, validate

from helpers import point_set_distance, random_cut_sequence, random_lp
from test_lp import check_kkt


def report(tag, ok, detail=""):
    line = f"[{tag}] {'PASS' if ok else 'FAIL'} {detail}".rstrip()
    print(line)
    assert ok, line


# -- criteria 1 & 2: randomized cut chains ------------------------------

SEQUENCES_PER_DIM = 200
CHAIN_DIMS = (2, 3, 4)


@pytest.fixture(scope="module")
def chain_results():
    """Run the shared cut chains once: cone DD vs oracle vs stripped box DD."""
    stats = {
        "steps": 0,
        "max_oracle_dist": 0.0,
        "max_variant_dist": 0.0,
        "oracle_seconds": 0.0,
        "box_mismatches": 0,
    }
    t_oracle_total = 0.0
    for d in CHAIN_DIMS:
        cone = standard_cone_dd(d)
        base = [Halfspace(hs.a, 0.0) for hs in cone.facets]
        for index in range(SEQUENCES_PER_DIM):
            n_cuts = 5 + (index % 26)          # lengths 5..30
            cuts = random_cut_sequence(seed=d * 10_000 + index, d=d, n_cuts=n_cuts)
            poly = dd.init_cone(np.zeros(d), cone)
            box, f0 = dd.init_box(np.zeros(d), cone, 1e4)
            accumulated = list(base)
            for hs in cuts:
                t0 = time.perf_counter()
                dd.onlinevert2(poly, hs)
                accumulated.append(hs)
                expected, _ = oracle.enumerate_vertices_brute(
                    oracle.HRep(accumulated, d, list(cone.directions))
                )
                dist = point_set_distance(poly.vertex_array(), expected)
                t_oracle_total += time.perf_counter() - t0

                dd.onlinevert(box, hs)
                stripped = dd.strip_artificial(box, f0)
                vdist = point_set_distance(
                    np.array(stripped) if stripped else np.zeros((0, d)),
                    poly.vertex_array(),
                )
                stats["steps"] += 1
                stats["max_oracle_dist"] = max(stats["max_oracle_dist"], dist)
                stats["max_variant_dist"] = max(stats["max_variant_dist"], vdist)
                if vdist > 1e-6:
                    stats["box_mismatches"] += 1
    stats["oracle_seconds"] = t_oracle_total
    return stats


def test_criterion_1_oracle_equivalence(chain_results):
    s = chain_results
    ok = s["max_oracle_dist"] <= 1e-6 and s["oracle_seconds"] < 120.0
    report(
        "criterion-1 oracle equivalence",
        ok,
        f"{SEQUENCES_PER_DIM} sequences/dim over d={CHAIN_DIMS}, "
        f"{s['steps']} steps, max distance {s['max_oracle_dist']:.2e}, "
        f"{s['oracle_seconds']:.1f}s",
    )


def test_criterion_2_cross_variant_equivalence(chain_results):
    s = chain_results
    ok = s["box_mismatches"] == 0 and s["max_variant_dist"] <= 1e-6
    report(
        "criterion-2 cross-variant equivalence",
        ok,
        f"{s['steps']} steps, mismatches {s['box_mismatches']}, "
        f"max distance {s['max_variant_dist']:.2e}",
    )


# -- criterion 3: solver correctness ------------------------------------

SOLVE_CLASSES = ((2, 50, 0.005), (3, 20, 0.05), (4, 5, 0.05))
INSTANCES_PER_CLASS = 30


def _feasible_samples(inst, count, seed):
    from ddvert.lp import LinearProgram

    rng = np.random.default_rng(seed)
    rows = inst.feasible_rows()
    basics = []
    for _ in range(8):
        sol = solve_lp(LinearProgram(rng.normal(size=inst.n), rows))
        if sol.status == OPTIMAL:
            basics.append(sol.x)
    points = []
    for _ in range(count):
        w = rng.dirichlet(np.ones(len(basics)))
        points.append(np.sum([wi * x for wi, x in zip(w, basics)], axis=0))
    return points


def test_criterion_3_solver_correctness():
    worst_alpha_excess = -np.inf
    worst_containment = np.inf
    n_checked = 0
    t0 = time.perf_counter()
    for d, n, eps in SOLVE_CLASSES:
        for seed, inst in bench.sample_instances(d, n, INSTANCES_PER_CLASS, 0):
            rep = benson.solve_molp(inst, eps=eps, backend=benson.BACKEND_CONE)
            halfspaces = [
                Halfspace(hs.a, float(hs.a @ rep.ideal)) for hs in inst.cone.facets
            ] + [r.cut for r in rep.iterations if r.cut is not None]
            for v in rep.vertices:
                excess = benson.scalarize(inst, v).alpha_v - eps
                worst_alpha_excess = max(worst_alpha_excess, excess)
            for x in _feasible_samples(inst, 50, seed):
                y = inst.C @ x
                for hs in halfspaces:
                    worst_containment = min(worst_containment, float(hs.a @ y) - hs.b)
            n_checked += 1
    elapsed = time.perf_counter() - t0
    ok = worst_alpha_excess <= 1e-7 and worst_containment >= -1e-7
    report(
        "criterion-3 solver correctness",
        ok,
        f"{n_checked} instances, max re-scalarized alpha excess "
        f"{worst_alpha_excess:.2e}, min image slack {worst_containment:.2e}, "
        f"{elapsed:.1f}s",
    )


# -- criteria 4 & 5: benchmark reproduction -----------------------------

D3_SEED, D4_SEED = 1000, 2000
SAMPLE_DRAWS = 14
SUBSAMPLE = 10
TREND_TIE_PP = 0.25
D3_TREND_ITERS = (10, 20, 30, 40, 50, 60, 70)
D4_TREND_ITERS = (10, 13, 17, 21, 23, 26)


@pytest.fixture(scope="module")
def bench_d3():
    pairs = bench.sample_instances(3, 20, SAMPLE_DRAWS, D3_SEED)
    records, failed = bench.run_benchmark(
        pairs, eps=0.05, backends=(benson.BACKEND_CONE, benson.BACKEND_BOX)
    )
    assert not failed
    return records


@pytest.fixture(scope="module")
def bench_d4():
    pairs = bench.sample_instances(4, 5, SAMPLE_DRAWS, D4_SEED)
    records, failed = bench.run_benchmark(pairs, eps=0.05, backends=benson.BACKENDS)
    assert not failed
    return records


def _trend_pairs(shares, direction):
    """Sign-test counts over iteration pairs: (agree, disagree, ties)."""
    its = sorted(shares)
    agree = disagree = ties = 0
    for i in range(len(its)):
        for j in range(i + 1, len(its)):
            delta = shares[its[j]] - shares[its[i]]
            if abs(delta) <= TREND_TIE_PP:
                ties += 1
            elif (delta > 0) == (direction == "up"):
                agree += 1
            else:
                disagree += 1
    return agree, disagree, ties


def test_criterion_4_artificial_vertex_bands(bench_d3, bench_d4):
    _, common3 = bench.select_subsample(bench_d3, SUBSAMPLE)
    _, common4 = bench.select_subsample(bench_d4, SUBSAMPLE)
    table3 = {
        row[0]: row[3]
        for row in bench.artificial_vertex_table(bench_d3, subsample=SUBSAMPLE)
    }
    table4 = {
        row[0]: row[3]
        for row in bench.artificial_vertex_table(bench_d4, subsample=SUBSAMPLE)
    }
    band3 = table3.get(10, float("nan"))
    band4 = table4.get(10, float("nan"))

    shares3 = {it: table3[it] for it in D3_TREND_ITERS if it <= common3}
    shares4 = {it: table4[it] for it in D4_TREND_ITERS if it <= common4}
    up3, down3, _ = _trend_pairs(shares3, "down")
    up4, down4, _ = _trend_pairs(shares4, "up")
    frac3 = up3 / max(up3 + down3, 1)
    frac4 = up4 / max(up4 + down4, 1)

    ok = (
        20.0 <= band3 <= 50.0
        and 45.0 <= band4 <= 75.0
        and len(shares3) >= 3
        and len(shares4) >= 3
        and frac3 >= 0.7
        and frac4 >= 0.7
    )
    report(
        "criterion-4 artificial-vertex bands",
        ok,
        f"d3 share@10 {band3:.2f}% in [20,50], d4 share@10 {band4:.2f}% in [45,75]; "
        f"trend agreement d3 {frac3:.0%} (decreasing), d4 {frac4:.0%} (non-decreasing)",
    )


def test_criterion_5_ve_time_ordering(bench_d4):
    summary = bench.summarize(bench_d4, subsample=SUBSAMPLE)
    times = {}
    for row in summary:
        times.setdefault(row["iteration"], {})[row["backend"]] = row["mean_ve_time_s"]
    wins = total = 0
    offline_slower = 0
    for it, by in sorted(times.items()):
        if it >= 10 and benson.BACKEND_CONE in by and benson.BACKEND_BOX in by:
            total += 1
            wins += by[benson.BACKEND_CONE] < by[benson.BACKEND_BOX]
            offline_slower += by.get(benson.BACKEND_OFFLINE, np.inf) > by[benson.BACKEND_CONE]
    ok = total >= 3 and wins / total >= 0.7
    report(
        "criterion-5 VE time ordering",
        ok,
        f"unbounded-DD faster than box-DD in {wins}/{total} iterations >= 10 "
        f"(offline baseline slower in {offline_slower}/{total}, reported only)",
    )


# -- criterion 6: LP solver ---------------------------------------------


def test_criterion_6_lp_solver():
    rng = np.random.default_rng(123)
    n_optimal = 0
    worst_gap = 0.0
    for trial in range(500):
        lp = random_lp(rng, n_max=10, seed_feasible=trial % 2 == 0)
        sol = solve_lp(lp)
        if sol.status == OPTIMAL:
            n_optimal += 1
            check_kkt(lp, sol)
            rhs = np.array([r for _, _, r in lp.constraints])
            reduced = lp.objective - np.array(
                [np.asarray(row) for row, _, _ in lp.constraints]
            ).T @ sol.duals
            dual_obj = float(rhs @ sol.duals) + sum(
                reduced[j] * lb
                for j, lb in enumerate(lp.lower_bounds)
                if lb not in (None, 0.0)
            )
            gap = abs(dual_obj - sol.objective_value) / (1.0 + abs(sol.objective_value))
            worst_gap = max(worst_gap, gap)

    # classic degenerate instance that cycles under naive Dantzig pricing
    from ddvert.lp import LinearProgram

    beale = LinearProgram(
        [-0.75, 150.0, -0.02, 6.0],
        [
            ([0.25, -60.0, -0.04, 9.0], "<=", 0.0),
            ([0.5, -90.0, -0.02, 3.0], "<=", 0.0),
            ([0.0, 0.0, 1.0, 0.0], "<=", 1.0),
        ],
    )
    bsol = solve_lp(beale)
    cycling_ok = bsol.status == OPTIMAL and abs(bsol.objective_value + 0.05) < 1e-9

    ok = worst_gap <= 1e-6 and cycling_ok and n_optimal >= 150
    report(
        "criterion-6 LP solver",
        ok,
        f"500 random LPs, {n_optimal} optimal, worst duality gap {worst_gap:.2e}; "
        f"cycling instance terminated at {bsol.objective_value}",
    )


# -- criterion 7: worked fixture -----------------------------------------


def test_criterion_7_worked_fixture():
    inst = benson.MolpInstance(
        C=np.eye(2), A=np.array([[-1.0, -1.0]]), b=np.array([-1.0]),
        k=np.array([1.0, 1.0]),
    )
    rep = benson.solve_molp(inst, eps=0.005, backend=benson.BACKEND_CONE)
    cuts = [r.cut for r in rep.iterations if r.cut is not None]
    one_cut = len(cuts) == 1
    # first supporting halfspace is y1 + y2 >= 1, up to positive scaling
    scaled = cuts[0].a / cuts[0].b if one_cut and cuts[0].b else None
    halfspace_ok = scaled is not None and np.allclose(scaled, [1.0, 1.0], atol=1e-9)
    verts_ok = (
        point_set_distance(rep.vertices, np.array([[1.0, 0.0], [0.0, 1.0]])) <= 1e-9
    )
    clean = validate(rep.outer) == []
    ok = one_cut and halfspace_ok and verts_ok and clean
    report(
        "criterion-7 worked fixture",
        ok,
        f"cuts={len(cuts)}, final vertices={sorted(map(tuple, rep.vertices))}",
    )
