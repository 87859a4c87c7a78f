"""Double description kernel: incremental halfspace cuts.

``onlinevert`` intersects a bounded polyhedron with one halfspace,
``onlinevert2`` does the same for an unbounded polyhedron whose recession
cone is known and must be preserved by the cut.  Both maintain the
vertex/direction-facet adjacency lists in place.  ``init_box`` and
``init_cone`` build the two starting polyhedra used by the outer
approximation driver: a big-M simplex over the cone, or the translated
cone itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polyhedron import AdjacencyPolyhedron, ConeDD, Halfspace

# classification: |a^T v - b| <= CLASS_SCALE*(1+|b|+||a||*||v||) puts v on
# the hyperplane; strict comparisons beyond that decide inside/outside
CLASS_SCALE = 1e-9
# duplicate vertex test: euclidean distance <= DUP_SCALE*(1+||v||)
DUP_SCALE = 1e-8

UNCHANGED = "unchanged"
EMPTY = "empty"
UPDATED = "updated"


class DegenerateCutError(ValueError):
    """Segment/ray intersection requested for a misclassified pair."""


class RecessionConeViolationError(ValueError):
    """A cut would shrink the recession cone of an unbounded polyhedron."""

    def __init__(self, direction_id, value):
        super().__init__(
            f"halfspace cuts extreme direction {direction_id} (a^T z = {value:.3e} < 0)"
        )
        self.direction_id = direction_id
        self.value = value


class UnboundedInputError(ValueError):
    """onlinevert was called on a polyhedron with extreme directions."""


@dataclass
class CutOutcome:
    """Result of one halfspace cut.

    ``kind`` is "unchanged" (cut redundant, polyhedron untouched),
    "empty" (nothing remains; ``polyhedron`` is None) or "updated"
    (polyhedron mutated in place, ``new_facet_id`` names the new facet).
    """

    kind: str
    polyhedron: AdjacencyPolyhedron | None = None
    new_facet_id: int | None = None


def _class_tol(hs, coords):
    return CLASS_SCALE * (
        1.0 + abs(hs.b) + np.linalg.norm(hs.a) * np.linalg.norm(coords)
    )


def isedge(poly, x_plus, x_minus):
    """Facets carrying the edge between two members, or an empty set.

    ``x_minus`` must be a vertex; ``x_plus`` may be a vertex or an extreme
    direction (a direction stands for the unbounded edge ray it spans).
    The test intersects the member lists of all common facets, starting
    from the full member set, and reports an edge exactly when only the
    two query members survive.  Pure: the polyhedron is not modified.
    """
    if x_plus not in poly.facets_of:
        raise KeyError(f"unknown member id {x_plus}")
    if x_minus not in poly.facets_of:
        raise KeyError(f"unknown member id {x_minus}")
    if poly.is_direction(x_minus):
        raise ValueError("x_minus must be a vertex")

    common = poly.facets_of[x_plus] & poly.facets_of[x_minus]
    survivors = set(poly.vertices.keys()) | set(poly.directions.keys())
    for fid in common:
        survivors &= poly.members_of[fid]
    if survivors == {x_plus, x_minus}:
        return set(common)
    return set()


def segment_hyperplane_intersection(v_plus, v_minus, hs):
    """Point where the segment [v_plus, v_minus] crosses the boundary of hs.

    Requires v_plus strictly inside and v_minus strictly outside.
    """
    v_plus = np.asarray(v_plus, dtype=float)
    v_minus = np.asarray(v_minus, dtype=float)
    s_plus = hs.value(v_plus)
    s_minus = hs.value(v_minus)
    if s_plus <= _class_tol(hs, v_plus) or s_minus >= -_class_tol(hs, v_minus):
        raise DegenerateCutError(
            f"segment endpoints not strictly separated by the hyperplane "
            f"(slacks {s_plus:.3e}, {s_minus:.3e})"
        )
    lam = -s_minus / (s_plus - s_minus)
    return v_minus + lam * (v_plus - v_minus)


def ray_hyperplane_intersection(v_minus, z, hs):
    """Point where the ray v_minus + gamma*z (gamma >= 0) meets bd(hs).

    Requires v_minus strictly outside and the ray pointing into the
    halfspace (``a^T z > 0``); a parallel ray is an error because the
    caller must take the parallel branch instead.
    """
    v_minus = np.asarray(v_minus, dtype=float)
    z = np.asarray(z, dtype=float)
    az = float(hs.a @ z)
    if az <= _class_tol(hs, z):
        raise DegenerateCutError(
            f"ray is parallel to (or points out of) the hyperplane (a^T z = {az:.3e})"
        )
    s_minus = hs.value(v_minus)
    if s_minus >= -_class_tol(hs, v_minus):
        raise DegenerateCutError(
            f"ray base point is not strictly outside the halfspace (slack {s_minus:.3e})"
        )
    gamma = -s_minus / az
    return v_minus + gamma * z


def _classify_vertices(poly, hs):
    inside, on_plane, outside = [], [], []
    for vid in poly.vertex_ids():
        coords = poly.vertices[vid].coords
        slack = hs.value(coords)
        tol = _class_tol(hs, coords)
        if slack > tol:
            inside.append(vid)
        elif slack < -tol:
            outside.append(vid)
        else:
            on_plane.append(vid)
    return inside, on_plane, outside


def _register_hyperplane_facet(poly, hs, on_plane):
    fid = poly.add_facet(hs)
    for vid in on_plane:
        poly.link(vid, fid)
    return fid


def _insert_cut_vertex(poly, point, shared_facets, new_fid):
    """Add the intersection point, merging with an existing vertex on h."""
    existing = None
    tol = DUP_SCALE * (1.0 + np.linalg.norm(point))
    for mid in poly.members_of[new_fid]:
        if mid in poly.vertices:
            if np.linalg.norm(poly.vertices[mid].coords - point) <= tol:
                existing = mid
                break
    if existing is None:
        vid = poly.add_vertex(point)
        poly.link(vid, new_fid)
    else:
        vid = existing
    for fid in shared_facets:
        poly.link(vid, fid)
    return vid


def _finalize_cut(poly, outside):
    """Delete cut-off vertices, garbage-collect facets, prune adjacency."""
    for vid in outside:
        poly.drop_vertex(vid)
    surviving_facets = set()
    for vid in poly.vertices:
        surviving_facets |= poly.facets_of[vid]
    for fid in list(poly.facets):
        if fid not in surviving_facets:
            poly.drop_facet(fid)
    # a dropped facet may linger in a direction's adjacency: prune it
    for did in poly.directions:
        poly.facets_of[did] &= surviving_facets


def onlinevert(poly, hs):
    """Intersect a bounded polyhedron with one halfspace, in place.

    Vertices are classified against the hyperplane; each inside/outside
    pair that forms an edge contributes the segment intersection point as
    a new vertex of the cut polyhedron, adjacent to the edge's facets and
    to the new facet.  Returns the polyhedron unchanged when the cut is
    redundant and reports empty when no vertex survives.
    """
    if poly.directions:
        raise UnboundedInputError(
            "onlinevert handles bounded polyhedra only; use onlinevert2"
        )
    if hs.dim != poly.dim:
        raise ValueError("halfspace dimension mismatch")

    inside, on_plane, outside = _classify_vertices(poly, hs)
    if len(inside) + len(on_plane) == len(poly.vertices):
        return CutOutcome(UNCHANGED, poly, None)
    if len(outside) == len(poly.vertices):
        return CutOutcome(EMPTY, None, None)

    new_fid = _register_hyperplane_facet(poly, hs, on_plane)
    for vp in inside:
        for vm in outside:
            shared = isedge(poly, vp, vm)
            if not shared:
                continue
            point = segment_hyperplane_intersection(
                poly.vertices[vp].coords, poly.vertices[vm].coords, hs
            )
            _insert_cut_vertex(poly, point, shared, new_fid)
    _finalize_cut(poly, outside)
    return CutOutcome(UPDATED, poly, new_fid)


def onlinevert2(poly, hs):
    """Halfspace cut for an unbounded polyhedron with known recession cone.

    Extreme directions take part as if they were vertices: a direction
    parallel to the hyperplane becomes adjacent to the new facet, and a
    direction pointing into the halfspace contributes ray intersections
    with the edges it spans from each cut-off vertex.  Directions are
    never deleted; a cut that would exclude a direction outright raises
    RecessionConeViolationError because the recession cone is fixed by
    assumption.
    """
    if hs.dim != poly.dim:
        raise ValueError("halfspace dimension mismatch")

    parallel_dirs = []
    interior_dirs = []
    for did in sorted(poly.directions):
        z = poly.directions[did].coords
        val = float(hs.a @ z)
        tol = _class_tol(hs, z)
        if val < -tol:
            raise RecessionConeViolationError(did, val)
        if val > tol:
            interior_dirs.append(did)
        else:
            parallel_dirs.append(did)

    inside, on_plane, outside = _classify_vertices(poly, hs)
    if len(inside) + len(on_plane) == len(poly.vertices):
        return CutOutcome(UNCHANGED, poly, None)
    # with every member of the extended vertex set (vertices plus
    # directions) outside or parallel, nothing of the polyhedron remains
    if len(outside) == len(poly.vertices) and not interior_dirs:
        return CutOutcome(EMPTY, None, None)

    new_fid = _register_hyperplane_facet(poly, hs, on_plane)
    for did in parallel_dirs:
        poly.link(did, new_fid)
    for xp in inside + interior_dirs:
        xp_is_dir = poly.is_direction(xp)
        for vm in outside:
            shared = isedge(poly, xp, vm)
            if not shared:
                continue
            if xp_is_dir:
                point = ray_hyperplane_intersection(
                    poly.vertices[vm].coords, poly.directions[xp].coords, hs
                )
            else:
                point = segment_hyperplane_intersection(
                    poly.vertices[xp].coords, poly.vertices[vm].coords, hs
                )
            _insert_cut_vertex(poly, point, shared, new_fid)
    _finalize_cut(poly, outside)
    return CutOutcome(UPDATED, poly, new_fid)


def _facet_through_points(points, interior_point):
    """Halfspace whose boundary carries all points, interior side at y."""
    pts = np.asarray(points, dtype=float)
    d = pts.shape[1]
    base = pts[0]
    rows = pts[1:] - base
    if rows.shape[0] < d - 1:
        raise ValueError("need at least dim points to span a facet hyperplane")
    # the normal spans the nullspace of the point differences
    _, sing, vt = np.linalg.svd(rows)
    normal = vt[-1]
    scale = max(1.0, float(np.abs(pts).max()))
    if sing[d - 2] <= 1e-10 * scale:
        raise ValueError("box corners do not span a facet hyperplane")
    if float(np.abs(rows @ normal).max()) > 1e-7 * scale:
        raise ValueError(
            "box corners are not coplanar; scale the cone directions so the "
            "corners span a single facet"
        )
    offset = float(normal @ base)
    if float(normal @ interior_point) < offset:
        normal, offset = -normal, -offset
    if abs(float(normal @ interior_point) - offset) <= 1e-12 * scale:
        raise ValueError("degenerate box: apex lies on the corner hyperplane")
    return Halfspace(normal, offset)


def init_box(y, cone: ConeDD, M):
    """Bounded starting polyhedron: y plus the cone truncated at scale M.

    Vertices are the apex y and the corners ``y + M z^i``.  One facet per
    cone facet (translated to y) plus the artificial facet through all
    corners.  Returns the polyhedron and the artificial facet id.
    """
    if M <= 0:
        raise ValueError("box scale M must be positive")
    y = np.asarray(y, dtype=float)
    poly = AdjacencyPolyhedron(cone.dim)
    apex = poly.add_vertex(y)
    corner_ids = [poly.add_vertex(y + M * z) for z in cone.directions]

    corner_pts = [y + M * z for z in cone.directions]
    artificial = poly.add_facet(_facet_through_points(corner_pts, y))
    for j, hs in enumerate(cone.facets):
        fid = poly.add_facet(Halfspace(hs.a, float(hs.a @ y)))
        poly.link(apex, fid)
        for i in cone.dirs_of_facet[j]:
            poly.link(corner_ids[i], fid)
    for cid in corner_ids:
        poly.link(cid, artificial)
    return poly, artificial


def init_cone(y, cone: ConeDD):
    """Unbounded starting polyhedron ``{y} + cone`` with full adjacency."""
    y = np.asarray(y, dtype=float)
    poly = AdjacencyPolyhedron(cone.dim)
    apex = poly.add_vertex(y)
    dir_ids = [poly.add_direction(z) for z in cone.directions]
    for j, hs in enumerate(cone.facets):
        fid = poly.add_facet(Halfspace(hs.a, float(hs.a @ y)))
        poly.link(apex, fid)
        for i in cone.dirs_of_facet[j]:
            poly.link(dir_ids[i], fid)
    return poly


def strip_artificial(poly, artificial_fid):
    """Vertices not lying on the artificial box facet.

    The cut chain may have garbage-collected the facet once its member
    list emptied; in that case every remaining vertex is genuine.
    """
    if artificial_fid < 0 or artificial_fid >= poly._next_facet_id:
        raise KeyError(f"unknown facet id {artificial_fid}")
    if artificial_fid not in poly.facets:
        return [poly.vertices[vid].coords for vid in poly.vertex_ids()]
    on_f0 = poly.members_of[artificial_fid]
    return [
        poly.vertices[vid].coords for vid in poly.vertex_ids() if vid not in on_f0
    ]


def read_cut_file(text, dim=None):
    """Parse a replayable cut sequence: lines ``cut a1 .. ad b``."""
    cuts = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] != "cut":
            raise ValueError(f"line {line_no}: expected 'cut a1 .. ad b'")
        values = [float(t) for t in tok[1:]]
        if dim is not None and len(values) != dim + 1:
            raise ValueError(f"line {line_no}: expected {dim + 1} numbers")
        cuts.append(Halfspace(np.array(values[:-1]), values[-1]))
    return cuts


def write_cut_file(cuts):
    lines = []
    for hs in cuts:
        lines.append(
            "cut "
            + " ".join(format(float(c), ".12g") for c in hs.a)
            + " "
            + format(float(hs.b), ".12g")
        )
    return "\n".join(lines) + "\n"
