"""Brute-force vertex enumeration from an H-representation.

Ground truth for the incremental cut routines and the offline baseline
of the solver: every d-subset of facet boundaries is solved as a linear
system and kept when the solution is feasible for all halfspaces.  Meant
for desk-scale inputs; a combinatorial guard refuses anything larger.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

FEAS_TOL = 1e-7
DEDUP_TOL = 1e-8
SUBSET_LIMIT = 10_000_000


@dataclass
class HRep:
    halfspaces: list
    dim: int
    recession_dirs: list = field(default_factory=list)

    def __post_init__(self):
        for hs in self.halfspaces:
            if hs.dim != self.dim:
                raise ValueError("all halfspaces must share the same dimension")

    def matrix(self):
        A = np.array([hs.a for hs in self.halfspaces], dtype=float)
        b = np.array([hs.b for hs in self.halfspaces], dtype=float)
        return A, b


def _dedup(points):
    kept = []
    for p in points:
        if all(np.linalg.norm(p - q) > DEDUP_TOL for q in kept):
            kept.append(p)
    return kept


def enumerate_vertices_brute(hrep: HRep):
    """All vertices of the H-rep, plus the verified recession directions.

    Returns ``(vertices, directions)`` as lists of coordinate arrays, the
    vertices in lexicographic order.  Singular subsystems are skipped;
    declared recession directions must satisfy ``a^T z >= -1e-9`` for
    every halfspace or a ValueError is raised.
    """
    d = hrep.dim
    k = len(hrep.halfspaces)
    if k < d:
        raise ValueError(f"need at least {d} halfspaces, got {k}")
    if math.comb(k, d) > SUBSET_LIMIT:
        raise ValueError(
            f"refusing {math.comb(k, d)} candidate subsets (limit {SUBSET_LIMIT})"
        )
    A, b = hrep.matrix()

    for z in hrep.recession_dirs:
        z = np.asarray(z, dtype=float)
        worst = float((A @ z).min())
        if worst < -1e-9:
            raise ValueError(
                f"declared recession direction {z} violates a halfspace (a^T z = {worst:.3e})"
            )

    idx = np.array(list(itertools.combinations(range(k), d)), dtype=int)
    mats = A[idx]                      # (N, d, d)
    rhs = b[idx]                       # (N, d)
    dets = np.linalg.det(mats)
    row_scale = np.linalg.norm(mats, axis=2).prod(axis=1)  # Hadamard bound
    solvable = np.abs(dets) > 1e-12 * np.maximum(row_scale, 1e-30)
    if not solvable.any():
        return [], [np.asarray(z, dtype=float) for z in hrep.recession_dirs]
    pts = np.linalg.solve(mats[solvable], rhs[solvable][..., None])[..., 0]
    finite = np.isfinite(pts).all(axis=1)
    pts = pts[finite]
    sub_idx = idx[solvable][finite]

    # solved subsystems must actually be active at their solution point
    act_res = np.abs(
        np.einsum("nij,nj->ni", A[sub_idx], pts) - b[sub_idx]
    ).max(axis=1)
    scale = 1.0 + np.linalg.norm(pts, axis=1)
    pts = pts[act_res <= 1e-6 * scale]

    feasible = (pts @ A.T - b >= -FEAS_TOL).all(axis=1)
    pts = pts[feasible]
    if pts.shape[0]:
        order = np.lexsort(pts.T[::-1])
        pts = pts[order]
    vertices = _dedup([p for p in pts])
    directions = [np.asarray(z, dtype=float) for z in hrep.recession_dirs]
    return vertices, directions


def hrep_from_facets(dim, halfspaces, recession_dirs=()):
    return HRep(list(halfspaces), dim, list(recession_dirs))


def contains(hrep: HRep, point, tol=FEAS_TOL):
    """Feasibility of a point for every halfspace of the H-rep."""
    A, b = hrep.matrix()
    return bool((A @ np.asarray(point, dtype=float) - b >= -tol).all())
