"""Polyhedra in double description form.

A polyhedron is kept simultaneously as an H-representation (facet
halfspaces ``a^T y >= b``) and a V-representation (vertices plus extreme
directions of the recession cone), glued together by bidirectional
adjacency lists: ``facets_of`` maps a vertex or direction id to the ids
of the facets it lies on, ``members_of`` maps a facet id to the ids of
the vertices *and* directions on it.  Directions take part in adjacency
exactly like vertices.

Ids are allocated from monotone counters and never reused, so stale ids
left behind by deletions are detectable.  Vertices and directions share
one id space; facets have their own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Absolute scale factor for on-facet residual tests; the effective
# tolerance is ON_FACET_SCALE * (1 + |b| + ||a||*||v||) so that box-sized
# coordinates (~1e4) do not trip false violations.
ON_FACET_SCALE = 1e-8


class ParseError(ValueError):
    """Malformed polyhedron / H-rep / cone text input."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Halfspace:
    """Halfspace ``{y : a^T y >= b}``; the interior side is ``a^T y > b``."""

    a: np.ndarray
    b: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.ndim != 1 or a.shape[0] < 2:
            raise ValueError("halfspace normal must be a vector of dimension >= 2")
        if not np.isfinite(a).all() or not math.isfinite(self.b):
            raise ValueError("halfspace data must be finite")
        if np.linalg.norm(a) == 0.0:
            raise ValueError("halfspace normal must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))

    @property
    def dim(self):
        return self.a.shape[0]

    def value(self, y):
        """Signed slack ``a^T y - b`` (>0 strictly inside, <0 outside)."""
        return float(self.a @ y) - self.b

    def on_tolerance(self, y):
        """Scale-aware residual tolerance for 'y lies on the boundary'."""
        return ON_FACET_SCALE * (
            1.0 + abs(self.b) + np.linalg.norm(self.a) * np.linalg.norm(y)
        )


@dataclass
class Vertex:
    id: int
    coords: np.ndarray


@dataclass
class Direction:
    id: int
    coords: np.ndarray


@dataclass
class Facet:
    id: int
    halfspace: Halfspace


@dataclass
class Violation:
    """One failed polyhedron invariant, with the offending ids and residual."""

    invariant: str
    ids: tuple
    residual: float = 0.0

    def __str__(self):
        return f"{self.invariant} ids={self.ids} residual={self.residual:.3e}"


class AdjacencyPolyhedron:
    """Mutable double description of a pointed polyhedron."""

    def __init__(self, dim):
        if dim < 2:
            raise ValueError("dimension must be >= 2")
        self.dim = int(dim)
        self.vertices: dict[int, Vertex] = {}
        self.directions: dict[int, Direction] = {}
        self.facets: dict[int, Facet] = {}
        self.facets_of: dict[int, set[int]] = {}
        self.members_of: dict[int, set[int]] = {}
        self._next_member_id = 0
        self._next_facet_id = 0

    # -- id management -------------------------------------------------

    def add_vertex(self, coords):
        coords = np.asarray(coords, dtype=float)
        vid = self._next_member_id
        self._next_member_id += 1
        self.vertices[vid] = Vertex(vid, coords)
        self.facets_of[vid] = set()
        return vid

    def add_direction(self, coords):
        coords = np.asarray(coords, dtype=float)
        if np.linalg.norm(coords) == 0.0:
            raise ValueError("direction must be nonzero")
        did = self._next_member_id
        self._next_member_id += 1
        self.directions[did] = Direction(did, coords)
        self.facets_of[did] = set()
        return did

    def add_facet(self, halfspace):
        if halfspace.dim != self.dim:
            raise ValueError("halfspace dimension mismatch")
        fid = self._next_facet_id
        self._next_facet_id += 1
        self.facets[fid] = Facet(fid, halfspace)
        self.members_of[fid] = set()
        return fid

    def link(self, member_id, facet_id):
        self.facets_of[member_id].add(facet_id)
        self.members_of[facet_id].add(member_id)

    def is_direction(self, member_id):
        return member_id in self.directions

    def member_coords(self, member_id):
        if member_id in self.vertices:
            return self.vertices[member_id].coords
        return self.directions[member_id].coords

    def member_ids(self):
        """All vertex and direction ids, in creation order."""
        return sorted(self.vertices.keys() | self.directions.keys())

    def vertex_ids(self):
        return sorted(self.vertices.keys())

    def vertex_array(self):
        """Vertex coordinates stacked in id (creation) order."""
        ids = self.vertex_ids()
        if not ids:
            return np.zeros((0, self.dim))
        return np.array([self.vertices[i].coords for i in ids])

    def direction_array(self):
        ids = sorted(self.directions.keys())
        if not ids:
            return np.zeros((0, self.dim))
        return np.array([self.directions[i].coords for i in ids])

    def drop_vertex(self, vid):
        del self.vertices[vid]
        for fid in self.facets_of.pop(vid):
            self.members_of[fid].discard(vid)

    def drop_facet(self, fid):
        del self.facets[fid]
        for mid in self.members_of.pop(fid):
            self.facets_of[mid].discard(fid)

    def copy(self):
        clone = AdjacencyPolyhedron(self.dim)
        clone.vertices = {i: Vertex(i, v.coords.copy()) for i, v in self.vertices.items()}
        clone.directions = {
            i: Direction(i, z.coords.copy()) for i, z in self.directions.items()
        }
        clone.facets = {i: Facet(i, f.halfspace) for i, f in self.facets.items()}
        clone.facets_of = {i: set(s) for i, s in self.facets_of.items()}
        clone.members_of = {i: set(s) for i, s in self.members_of.items()}
        clone._next_member_id = self._next_member_id
        clone._next_facet_id = self._next_facet_id
        return clone


@dataclass
class ConeDD:
    """Double description of a pointed solid polyhedral cone.

    ``directions[i]`` are the extreme directions, ``facets[j]`` the facet
    halfspaces (offsets exactly zero).  ``dirs_of_facet[j]`` holds indices
    of the directions lying on facet j; ``facets_of_dir[i]`` the reverse.
    """

    dim: int
    directions: list = field(default_factory=list)
    facets: list = field(default_factory=list)
    dirs_of_facet: list = field(default_factory=list)
    facets_of_dir: list = field(default_factory=list)

    def validate(self):
        """Check the cone invariants; returns a list of Violation."""
        out = []
        for j, hs in enumerate(self.facets):
            if hs.b != 0.0:
                out.append(Violation("cone-facet-offset", (j,), abs(hs.b)))
        if len(self.directions) < self.dim:
            out.append(Violation("cone-direction-count", (), float(len(self.directions))))
        if len(self.facets) < self.dim:
            out.append(Violation("cone-facet-count", (), float(len(self.facets))))
        if self.directions:
            rank = np.linalg.matrix_rank(np.array(self.directions))
            if rank < self.dim:
                out.append(Violation("cone-direction-span", (), float(rank)))
        for j, members in enumerate(self.dirs_of_facet):
            for i in members:
                if j not in self.facets_of_dir[i]:
                    out.append(Violation("cone-adjacency-symmetry", (i, j)))
        for i, fs in enumerate(self.facets_of_dir):
            for j in fs:
                if i not in self.dirs_of_facet[j]:
                    out.append(Violation("cone-adjacency-symmetry", (i, j)))
        return out

    def is_nonnegative_orthant(self):
        """True if the cone equals R^d_+ up to positive scaling."""
        if len(self.directions) != self.dim or len(self.facets) != self.dim:
            return False
        seen = set()
        for z in self.directions:
            nz = np.flatnonzero(np.abs(z) > 1e-12 * np.linalg.norm(z))
            if len(nz) != 1 or z[nz[0]] <= 0.0:
                return False
            seen.add(int(nz[0]))
        return seen == set(range(self.dim))


def standard_cone_dd(d):
    """Double description of the nonnegative orthant R^d_+.

    Directions are the unit vectors; facet j is ``{y : y_j >= 0}`` and is
    adjacent to every unit direction except e^j.
    """
    if d < 2:
        raise ValueError("cone dimension must be >= 2")
    eye = np.eye(d)
    cone = ConeDD(
        dim=d,
        directions=[eye[i].copy() for i in range(d)],
        facets=[Halfspace(eye[j].copy(), 0.0) for j in range(d)],
        dirs_of_facet=[{i for i in range(d) if i != j} for j in range(d)],
        facets_of_dir=[{j for j in range(d) if j != i} for i in range(d)],
    )
    return cone


def validate(poly):
    """Diagnostic check of all AdjacencyPolyhedron invariants.

    Returns an empty list when the polyhedron is internally consistent;
    otherwise one Violation per failed check.
    """
    out = []
    d = poly.dim

    for mid, fids in poly.facets_of.items():
        for fid in fids:
            if fid not in poly.members_of:
                out.append(Violation("adjacency-symmetry", (mid, fid)))
            elif mid not in poly.members_of[fid]:
                out.append(Violation("adjacency-symmetry", (mid, fid)))
    for fid, mids in poly.members_of.items():
        for mid in mids:
            if mid not in poly.facets_of:
                out.append(Violation("adjacency-symmetry", (mid, fid)))
            elif fid not in poly.facets_of[mid]:
                out.append(Violation("adjacency-symmetry", (mid, fid)))

    for vid in poly.vertices:
        if len(poly.facets_of.get(vid, ())) < d:
            out.append(
                Violation("vertex-facet-count", (vid,), float(len(poly.facets_of.get(vid, ()))))
            )
    for did in poly.directions:
        if len(poly.facets_of.get(did, ())) < d - 1:
            out.append(
                Violation("direction-facet-count", (did,), float(len(poly.facets_of.get(did, ()))))
            )

    for vid, v in poly.vertices.items():
        for fid, f in poly.facets.items():
            hs = f.halfspace
            slack = hs.value(v.coords)
            if slack < -hs.on_tolerance(v.coords):
                out.append(Violation("vertex-outside-halfspace", (vid, fid), slack))

    for did, z in poly.directions.items():
        for fid, f in poly.facets.items():
            hs = f.halfspace
            val = float(hs.a @ z.coords)
            if val < -hs.on_tolerance(z.coords):
                out.append(Violation("direction-not-recessive", (did, fid), val))

    # members of a facet must sit on its boundary hyperplane
    for fid, f in poly.facets.items():
        hs = f.halfspace
        for mid in poly.members_of[fid]:
            if mid in poly.vertices:
                res = hs.value(poly.vertices[mid].coords)
                if abs(res) > hs.on_tolerance(poly.vertices[mid].coords):
                    out.append(Violation("member-off-facet", (mid, fid), res))
            elif mid in poly.directions:
                res = float(hs.a @ poly.directions[mid].coords)
                if abs(res) > hs.on_tolerance(poly.directions[mid].coords):
                    out.append(Violation("member-off-facet", (mid, fid), res))
    return out


def from_double_description(dim, vertices, directions, halfspaces):
    """Build an AdjacencyPolyhedron with adjacency reconstructed from scratch.

    A vertex is adjacent to a facet when its boundary residual is within
    the on-facet tolerance; a direction is adjacent when it is orthogonal
    to the facet normal and the facet carries at least one vertex.
    """
    poly = AdjacencyPolyhedron(dim)
    vids = [poly.add_vertex(v) for v in vertices]
    dids = [poly.add_direction(z) for z in directions]
    for hs in halfspaces:
        fid = poly.add_facet(hs)
        for vid in vids:
            coords = poly.vertices[vid].coords
            if abs(hs.value(coords)) <= hs.on_tolerance(coords):
                poly.link(vid, fid)
        if poly.members_of[fid] & set(vids):
            for did in dids:
                z = poly.directions[did].coords
                if abs(float(hs.a @ z)) <= hs.on_tolerance(z):
                    poly.link(did, fid)
    return poly


# -- text format ------------------------------------------------------
#
#   # comment
#   d 2
#   v 0 0          one line per vertex
#   z 1 0          one line per direction
#   f 1 0 0        facet halfspace: a_1 .. a_d b
#   adj 0 0 2      facet id, then member ids on it
#
# Member ids count v and z lines together in file order starting at 0;
# facet ids count f lines in file order starting at 0.


def _fmt(x):
    return format(float(x), ".12g")


def dump_polyhedron(poly):
    """Serialize to the line-oriented text format (ids renumbered densely)."""
    lines = [f"d {poly.dim}"]
    member_index = {}
    for vid in sorted(poly.vertices):
        member_index[vid] = len(member_index)
        coords = " ".join(_fmt(c) for c in poly.vertices[vid].coords)
        lines.append(f"v {coords}")
    for did in sorted(poly.directions):
        member_index[did] = len(member_index)
        coords = " ".join(_fmt(c) for c in poly.directions[did].coords)
        lines.append(f"z {coords}")
    facet_order = sorted(poly.facets)
    for fid in facet_order:
        hs = poly.facets[fid].halfspace
        lines.append("f " + " ".join(_fmt(c) for c in hs.a) + " " + _fmt(hs.b))
    for new_fid, fid in enumerate(facet_order):
        members = sorted(member_index[m] for m in poly.members_of[fid])
        lines.append(f"adj {new_fid} " + " ".join(str(m) for m in members))
    return "\n".join(lines) + "\n"


def _parse_lines(text):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        yield line_no, line.split()


def load_polyhedron(text):
    """Parse the text format back into an AdjacencyPolyhedron."""
    poly = None
    dim = None
    member_ids = []
    facet_ids = []
    pending_adj = []
    for line_no, tok in _parse_lines(text):
        tag, rest = tok[0], tok[1:]
        if tag == "d":
            if len(rest) != 1:
                raise ParseError(line_no, "expected 'd <dim>'")
            dim = int(rest[0])
            poly = AdjacencyPolyhedron(dim)
            continue
        if poly is None:
            raise ParseError(line_no, "missing 'd <dim>' header")
        try:
            values = [float(t) for t in rest]
        except ValueError as exc:
            raise ParseError(line_no, f"bad number: {exc}") from None
        if tag == "v":
            if len(values) != dim:
                raise ParseError(line_no, f"vertex needs {dim} coordinates")
            member_ids.append(poly.add_vertex(values))
        elif tag == "z":
            if len(values) != dim:
                raise ParseError(line_no, f"direction needs {dim} coordinates")
            member_ids.append(poly.add_direction(values))
        elif tag == "f":
            if len(values) != dim + 1:
                raise ParseError(line_no, f"facet needs {dim} coefficients and offset")
            facet_ids.append(poly.add_facet(Halfspace(np.array(values[:-1]), values[-1])))
        elif tag == "adj":
            pending_adj.append((line_no, [int(t) for t in rest]))
        else:
            raise ParseError(line_no, f"unknown tag {tag!r}")
    if poly is None:
        raise ParseError(0, "empty input")
    for line_no, ids in pending_adj:
        if not ids:
            raise ParseError(line_no, "adj row needs a facet id")
        fidx, mids = ids[0], ids[1:]
        if fidx < 0 or fidx >= len(facet_ids):
            raise ParseError(line_no, f"unknown facet index {fidx}")
        for m in mids:
            if m < 0 or m >= len(member_ids):
                raise ParseError(line_no, f"unknown member index {m}")
            poly.link(member_ids[m], facet_ids[fidx])
    return poly


def load_hrep_lines(text):
    """Parse only the d/f/z lines of the format: returns (dim, halfspaces, dirs)."""
    dim = None
    halfspaces = []
    dirs = []
    for line_no, tok in _parse_lines(text):
        tag, rest = tok[0], tok[1:]
        if tag == "d":
            dim = int(rest[0])
        elif tag == "f":
            if dim is None:
                raise ParseError(line_no, "missing 'd <dim>' header")
            values = [float(t) for t in rest]
            if len(values) != dim + 1:
                raise ParseError(line_no, f"facet needs {dim} coefficients and offset")
            halfspaces.append(Halfspace(np.array(values[:-1]), values[-1]))
        elif tag == "z":
            values = [float(t) for t in rest]
            if dim is None or len(values) != dim:
                raise ParseError(line_no, "direction before header or wrong length")
            dirs.append(np.array(values))
        elif tag in ("v", "adj"):
            continue
        else:
            raise ParseError(line_no, f"unknown tag {tag!r}")
    if dim is None:
        raise ParseError(0, "missing 'd <dim>' header")
    return dim, halfspaces, dirs


def load_cone_dd(text):
    """Read a cone double description from the text format.

    Directions come from ``z`` lines, facets from ``f`` lines (offset must
    be 0), adjacency rows list direction indices per facet.
    """
    dim = None
    dirs = []
    facets = []
    adj = []
    for line_no, tok in _parse_lines(text):
        tag, rest = tok[0], tok[1:]
        if tag == "d":
            dim = int(rest[0])
        elif tag == "z":
            dirs.append(np.array([float(t) for t in rest]))
        elif tag == "f":
            values = [float(t) for t in rest]
            if dim is None or len(values) != dim + 1:
                raise ParseError(line_no, "facet before header or wrong length")
            if values[-1] != 0.0:
                raise ParseError(line_no, "cone facet offset must be 0")
            facets.append(Halfspace(np.array(values[:-1]), 0.0))
        elif tag == "adj":
            ids = [int(t) for t in rest]
            adj.append((line_no, ids[0], ids[1:]))
        else:
            raise ParseError(line_no, f"unknown tag {tag!r}")
    if dim is None:
        raise ParseError(0, "missing 'd <dim>' header")
    dirs_of_facet = [set() for _ in facets]
    facets_of_dir = [set() for _ in dirs]
    for line_no, fidx, mids in adj:
        if fidx < 0 or fidx >= len(facets):
            raise ParseError(line_no, f"unknown facet index {fidx}")
        for m in mids:
            if m < 0 or m >= len(dirs):
                raise ParseError(line_no, f"unknown direction index {m}")
            dirs_of_facet[fidx].add(m)
            facets_of_dir[m].add(fidx)
    cone = ConeDD(dim, dirs, facets, dirs_of_facet, facets_of_dir)
    bad = cone.validate()
    if bad:
        raise ValueError("invalid cone double description: " + "; ".join(map(str, bad)))
    return cone
