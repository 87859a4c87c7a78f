"""Shared fixtures: point-set matching, reference polyhedra, cut generators."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from ddvert import dd
from ddvert.polyhedron import Halfspace, from_double_description, standard_cone_dd


def point_set_distance(A, B):
    """Best-pairing distance between two point sets; inf on size mismatch."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[0] != B.shape[0]:
        return float("inf")
    if A.shape[0] == 0:
        return 0.0
    cost = cdist(A, B)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def assert_point_sets_match(A, B, tol=1e-6):
    dist = point_set_distance(A, B)
    assert dist <= tol, f"point sets differ (distance {dist:.3e})\nA={A}\nB={B}"


def square_halfspaces():
    return [
        Halfspace(np.array([1.0, 0.0]), 0.0),
        Halfspace(np.array([0.0, 1.0]), 0.0),
        Halfspace(np.array([-1.0, 0.0]), -1.0),
        Halfspace(np.array([0.0, -1.0]), -1.0),
    ]


def unit_square():
    verts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    return from_double_description(2, verts, [], square_halfspaces())


def unit_cube():
    verts = [
        (x, y, z)
        for x in (0.0, 1.0)
        for y in (0.0, 1.0)
        for z in (0.0, 1.0)
    ]
    halfspaces = []
    eye = np.eye(3)
    for i in range(3):
        halfspaces.append(Halfspace(eye[i].copy(), 0.0))
        halfspaces.append(Halfspace(-eye[i], -1.0))
    return from_double_description(3, verts, [], halfspaces)


def find_vertex(poly, coords, tol=1e-9):
    coords = np.asarray(coords, dtype=float)
    for vid, v in poly.vertices.items():
        if np.linalg.norm(v.coords - coords) <= tol:
            return vid
    raise AssertionError(f"no vertex at {coords}")


def find_direction(poly, coords, tol=1e-9):
    coords = np.asarray(coords, dtype=float)
    for did, z in poly.directions.items():
        if np.linalg.norm(z.coords - coords) <= tol:
            return did
    raise AssertionError(f"no direction at {coords}")


def random_lp(rng, n_max=10, seed_feasible=False):
    """Random integer-data LP; optionally forced feasible via a seed point."""
    from ddvert.lp import LinearProgram

    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, 2 * n + 5))
    c = rng.integers(-9, 10, size=n).astype(float)
    A = rng.integers(-9, 10, size=(m, n)).astype(float)
    rels = [["<=", ">=", "="][i] for i in rng.choice(3, size=m, p=[0.55, 0.35, 0.10])]
    bounds = [None if rng.random() < 0.15 else 0.0 for _ in range(n)]
    if seed_feasible:
        # choose b so a known nonnegative point satisfies every row
        x0 = rng.integers(0, 5, size=n).astype(float)
        b = np.empty(m)
        for i in range(m):
            slack = float(rng.integers(0, 6))
            ax = float(A[i] @ x0)
            b[i] = ax + slack if rels[i] == "<=" else ax - slack
            if rels[i] == "=":
                b[i] = ax
    else:
        b = rng.integers(-10, 11, size=m).astype(float)
    rows = [(A[i], rels[i], float(b[i])) for i in range(m)]
    return LinearProgram(c, rows, bounds)


def random_cut_sequence(seed, d, n_cuts, graze_prob=0.15, parallel_prob=0.3,
                        b_cap=20.0):
    """Adapted random halfspaces keeping the recession cone equal to R^d_+.

    Cuts are generated against a live unbounded chain so a mix of real
    cuts, grazing cuts (through an existing vertex) and redundant cuts
    appears; normals are nonnegative with occasional exact zeros to
    exercise the parallel-direction branch.
    """
    rng = np.random.default_rng(seed)
    cone = standard_cone_dd(d)
    poly = dd.init_cone(np.zeros(d), cone)
    cuts = []
    while len(cuts) < n_cuts:
        a = rng.uniform(0.2, 1.0, size=d)
        if parallel_prob and rng.random() < parallel_prob:
            n_zero = int(rng.integers(1, d))
            a[rng.choice(d, size=n_zero, replace=False)] = 0.0
        a = a / np.linalg.norm(a)
        verts = poly.vertex_array()
        vals = verts @ a
        lo, hi = float(vals.min()), float(vals.max())
        mode = rng.random()
        if mode < 0.15:
            b = lo - rng.uniform(0.1, 1.0)                 # redundant
        elif graze_prob and mode < 0.15 + graze_prob:
            b = float(vals[rng.integers(len(vals))])       # through a vertex
        elif hi - lo < 1e-9:
            b = lo + rng.uniform(0.2, 1.0)                 # cut the lone orbit
        else:
            b = lo + rng.uniform(0.25, 0.9) * (hi - lo)
        b = min(b, b_cap)
        hs = Halfspace(a, b)
        outcome = dd.onlinevert2(poly, hs)
        assert outcome.kind != dd.EMPTY
        cuts.append(hs)
        assert np.abs(poly.vertex_array()).max() < 1e3, "generator let coordinates blow up"
    return cuts
