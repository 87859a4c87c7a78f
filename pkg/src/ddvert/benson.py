"""Outer approximation of the upper image of a linear multiobjective program.

The solver maintains an outer polyhedral approximation of
``cl(C X + K)`` where ``X = {x >= 0 : A x <= b}`` and K is the ordering
cone.  Each round scalarizes one vertex v of the current approximation:

    min alpha  s.t.  C x <=_K v + alpha*k,  A x <= b,  x >= 0

whose optimum alpha measures how far v lies outside the upper image
along the fixed interior direction k.  When alpha exceeds the target
tolerance, the dual multipliers of the cone block yield a supporting
halfspace that cuts v off, and the approximation is refined; otherwise
the vertex is accepted.  The loop stops when every vertex is accepted.

Three interchangeable vertex-enumeration backends maintain the
approximation: an unbounded double description seeded with the translated
cone, a bounded double description over a big-M box (whose artificial
box vertices are stripped from the final answer), and an offline
baseline that re-enumerates all vertices from the accumulated
H-representation each round.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import dd, oracle
from .lp import INFEASIBLE, LEQ, OPTIMAL, UNBOUNDED, LinearProgram, solve_lp
from .polyhedron import (
    AdjacencyPolyhedron,
    ConeDD,
    Halfspace,
    from_double_description,
    standard_cone_dd,
)

DEFAULT_BIG_M = 1e4
DEFAULT_CUT_CAP = 100_000

BACKEND_CONE = "cone"
BACKEND_BOX = "box"
BACKEND_OFFLINE = "offline"
BACKENDS = (BACKEND_CONE, BACKEND_BOX, BACKEND_OFFLINE)


class InfeasibleInstanceError(ValueError):
    """The feasible set {x >= 0 : A x <= b} is empty."""


class UnboundedInstanceError(ValueError):
    """Some objective is unbounded below over the feasible set."""


class NumericalFailureError(RuntimeError):
    """A step produced a state the algorithm cannot recover from."""


def default_direction(cone: ConeDD):
    """Interior scalarization direction: the sum of the extreme directions."""
    return np.sum(np.array(cone.directions), axis=0)


def default_epsilon(d):
    """Approximation error matching the benchmark protocol."""
    return 0.005 if d == 2 else 0.05


@dataclass
class MolpInstance:
    """``min C x`` w.r.t. the cone order, over ``A x <= b, x >= 0``."""

    C: np.ndarray
    A: np.ndarray
    b: np.ndarray
    cone: ConeDD | None = None
    k: np.ndarray | None = None

    def __post_init__(self):
        self.C = np.atleast_2d(np.asarray(self.C, dtype=float))
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.cone is None:
            self.cone = standard_cone_dd(self.C.shape[0])
        if self.cone.dim != self.C.shape[0]:
            raise ValueError("cone dimension must match the number of objectives")
        if self.A.shape[1] != self.C.shape[1]:
            raise ValueError("A and C must agree on the number of variables")
        if self.b.shape[0] != self.A.shape[0]:
            raise ValueError("b length must match the number of constraint rows")
        if self.k is None:
            self.k = default_direction(self.cone)
        self.k = np.asarray(self.k, dtype=float).ravel()
        if self.k.shape[0] != self.cone.dim:
            raise ValueError("k must live in the objective space")
        for hs in self.cone.facets:
            if float(hs.a @ self.k) <= 0.0:
                raise ValueError(
                    "scalarization direction k must lie in the interior of the cone"
                )

    @property
    def d(self):
        return self.C.shape[0]

    @property
    def n(self):
        return self.C.shape[1]

    @property
    def m(self):
        return self.A.shape[0]

    def feasible_rows(self):
        return [(self.A[i], LEQ, float(self.b[i])) for i in range(self.m)]


@dataclass
class IdealPointResult:
    point: np.ndarray
    argmins: list


@dataclass
class ScalarizationResult:
    x_v: np.ndarray
    alpha_v: float
    w_v: np.ndarray
    y_v: np.ndarray


@dataclass
class IterationRecord:
    iteration: int
    vertex: np.ndarray
    alpha: float
    cut: Halfspace | None
    ve_time_s: float
    n_actual: int
    n_artificial: int


@dataclass
class SolveReport:
    outer: AdjacencyPolyhedron
    vertices: np.ndarray
    directions: np.ndarray
    efficient_set: list
    iterations: list
    epsilon: float
    ideal: np.ndarray | None
    backend: str


def ideal_point(inst: MolpInstance):
    """Componentwise objective minima over the feasible set.

    Returns an IdealPointResult, or None when some objective is unbounded
    below.  Only defined for the nonnegative orthant ordering cone.
    """
    if not inst.cone.is_nonnegative_orthant():
        raise ValueError("ideal point is only defined for the R^d_+ ordering cone")
    rows = inst.feasible_rows()
    point = np.empty(inst.d)
    argmins = []
    for i in range(inst.d):
        sol = solve_lp(LinearProgram(inst.C[i], rows))
        if sol.status == INFEASIBLE:
            raise InfeasibleInstanceError("feasible set is empty")
        if sol.status == UNBOUNDED:
            return None
        point[i] = sol.objective_value
        argmins.append(sol.x)
    return IdealPointResult(point, argmins)


def _scalarization_lp(inst: MolpInstance, v):
    """LP over (x, alpha): min alpha s.t. the cone block and A x <= b."""
    n = inst.n
    rows = []
    normals = np.array([hs.a for hs in inst.cone.facets])
    block = normals @ inst.C                       # (l, n)
    kdot = normals @ inst.k                        # (l,)
    vdot = normals @ np.asarray(v, dtype=float)    # (l,)
    for j in range(normals.shape[0]):
        rows.append((np.concatenate([block[j], [-kdot[j]]]), LEQ, float(vdot[j])))
    for i in range(inst.m):
        rows.append((np.concatenate([inst.A[i], [0.0]]), LEQ, float(inst.b[i])))
    objective = np.zeros(n + 1)
    objective[n] = 1.0
    bounds = [0.0] * n + [None]
    return LinearProgram(objective, rows, bounds)


def scalarize(inst: MolpInstance, v) -> ScalarizationResult:
    """Distance of v from the upper image along k, with dual information.

    ``alpha_v`` may be negative (v strictly inside the upper image);
    ``w_v`` combines the cone-block duals into the supporting normal.
    """
    sol = solve_lp(_scalarization_lp(inst, v))
    if sol.status == UNBOUNDED:
        raise UnboundedInstanceError("scalarization LP unbounded; instance not bounded")
    if sol.status != OPTIMAL:
        raise NumericalFailureError(
            f"scalarization LP reported {sol.status} for an outer vertex"
        )
    n = inst.n
    l = len(inst.cone.facets)
    mu = np.maximum(-sol.duals[:l], 0.0)
    normals = np.array([hs.a for hs in inst.cone.facets])
    w = normals.T @ mu
    alpha = float(sol.objective_value)
    y = np.asarray(v, dtype=float) + alpha * inst.k
    return ScalarizationResult(sol.x[:n], alpha, w, y)


def supporting_halfspace(res: ScalarizationResult) -> Halfspace:
    """Halfspace ``w^T y >= w^T y_v`` containing the upper image."""
    norm = float(np.linalg.norm(res.w_v))
    if norm <= 1e-12:
        raise NumericalFailureError("degenerate dual: supporting normal is zero")
    return Halfspace(res.w_v, float(res.w_v @ res.y_v))


# -- vertex enumeration backends -------------------------------------


class ConeBackend:
    """Unbounded double description seeded with the translated cone."""

    name = BACKEND_CONE

    def __init__(self, cone: ConeDD, big_m=None):
        self.cone = cone
        self.poly = None

    def initialize(self, y):
        self.poly = dd.init_cone(y, self.cone)

    def apply_cut(self, hs):
        return dd.onlinevert2(self.poly, hs)

    def clone(self):
        other = ConeBackend(self.cone)
        other.poly = self.poly.copy()
        return other

    def vertex_items(self):
        """(key, coords) pairs in creation order."""
        return [(vid, self.poly.vertices[vid].coords) for vid in self.poly.vertex_ids()]

    def counts(self):
        return len(self.poly.vertices), 0

    def final_vertices(self):
        return self.poly.vertex_array()

    def final_polyhedron(self):
        return self.poly


class BoxBackend:
    """Bounded double description over the big-M truncation of the cone."""

    name = BACKEND_BOX

    def __init__(self, cone: ConeDD, big_m=DEFAULT_BIG_M):
        self.cone = cone
        self.big_m = big_m
        self.poly = None
        self.artificial_fid = None

    def initialize(self, y):
        self.poly, self.artificial_fid = dd.init_box(y, self.cone, self.big_m)

    def apply_cut(self, hs):
        return dd.onlinevert(self.poly, hs)

    def clone(self):
        other = BoxBackend(self.cone, self.big_m)
        other.poly = self.poly.copy()
        other.artificial_fid = self.artificial_fid
        return other

    def _artificial_ids(self):
        if self.artificial_fid not in self.poly.facets:
            return set()
        return set(self.poly.members_of[self.artificial_fid])

    def vertex_items(self):
        return [(vid, self.poly.vertices[vid].coords) for vid in self.poly.vertex_ids()]

    def counts(self):
        artificial = len(self._artificial_ids())
        return len(self.poly.vertices) - artificial, artificial

    def final_vertices(self):
        stripped = dd.strip_artificial(self.poly, self.artificial_fid)
        if not stripped:
            return np.zeros((0, self.poly.dim))
        return np.array(stripped)

    def final_polyhedron(self):
        return self.poly


class OfflineBackend:
    """Offline baseline: keep the H-rep, re-enumerate vertices each round."""

    name = BACKEND_OFFLINE

    def __init__(self, cone: ConeDD, big_m=None):
        self.cone = cone
        self.halfspaces = []
        self.dim = cone.dim
        self._vertices = []
        self._registry = []      # first-seen coordinate per key, in seen order
        self._order = []         # registry key per current vertex

    def initialize(self, y):
        y = np.asarray(y, dtype=float)
        self.halfspaces = [
            Halfspace(hs.a, float(hs.a @ y)) for hs in self.cone.facets
        ]
        self._enumerate()

    def _enumerate(self):
        hrep = oracle.HRep(list(self.halfspaces), self.dim, list(self.cone.directions))
        vertices, _ = oracle.enumerate_vertices_brute(hrep)
        self._vertices = vertices
        order = []
        for v in vertices:
            key = None
            for idx, seen in enumerate(self._registry):
                if np.linalg.norm(seen - v) <= 1e-7 * (1.0 + np.linalg.norm(v)):
                    key = idx
                    break
            if key is None:
                key = len(self._registry)
                self._registry.append(v.copy())
            order.append(key)
        self._order = order

    def apply_cut(self, hs):
        self.halfspaces.append(hs)
        self._enumerate()
        return dd.CutOutcome(dd.UPDATED if self._vertices else dd.EMPTY, None, None)

    def clone(self):
        other = OfflineBackend(self.cone)
        other.halfspaces = list(self.halfspaces)
        other._vertices = [v.copy() for v in self._vertices]
        other._registry = [v.copy() for v in self._registry]
        other._order = list(self._order)
        return other

    def vertex_items(self):
        pairs = sorted(zip(self._order, self._vertices), key=lambda kv: kv[0])
        return [(key, coords) for key, coords in pairs]

    def counts(self):
        return len(self._vertices), 0

    def final_vertices(self):
        if not self._vertices:
            return np.zeros((0, self.dim))
        return np.array(self._vertices)

    def final_polyhedron(self):
        return from_double_description(
            self.dim, self._vertices, list(self.cone.directions), self.halfspaces
        )


_BACKEND_TYPES = {
    BACKEND_CONE: ConeBackend,
    BACKEND_BOX: BoxBackend,
    BACKEND_OFFLINE: OfflineBackend,
}


def make_backend(name, cone, big_m=DEFAULT_BIG_M):
    try:
        return _BACKEND_TYPES[name](cone, big_m)
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; pick from {BACKENDS}") from None


# -- the driver loop ---------------------------------------------------


def _timed_cut(backend, hs, reps=1):
    """Apply the cut, timing it; extra repetitions run on throwaway clones."""
    times = []
    try:
        for _ in range(reps - 1):
            clone = backend.clone()
            t0 = time.perf_counter()
            clone.apply_cut(hs)
            times.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        outcome = backend.apply_cut(hs)
        times.append(time.perf_counter() - t0)
    except dd.RecessionConeViolationError as exc:
        raise NumericalFailureError(f"cut shrinks the recession cone: {exc}") from exc
    return outcome, float(np.median(times))


def run_outer_approximation(
    inst: MolpInstance,
    eps,
    driver,
    followers=(),
    initial_point=None,
    cut_cap=DEFAULT_CUT_CAP,
    on_iteration=None,
    timing_reps=1,
):
    """Shared engine: one driver backend picks vertices, followers replay cuts.

    Vertices are visited first-in-first-out over their creation order and
    each is scalarized at most once while it survives.  Returns the
    SolveReport of the driver; ``on_iteration(iteration, record,
    follower_times)`` observes each cut when provided.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    efficient = []
    efficient_keys = set()

    def record_solution(x):
        key = tuple(np.round(x, 12))
        if key not in efficient_keys:
            efficient_keys.add(key)
            efficient.append(x)

    ideal = None
    if initial_point is None:
        result = ideal_point(inst)
        if result is None:
            raise UnboundedInstanceError("ideal point has an unbounded component")
        ideal = result.point
        for x in result.argmins:
            record_solution(x)
        y0 = ideal
    else:
        y0 = np.asarray(initial_point, dtype=float)
        feas = solve_lp(LinearProgram(np.zeros(inst.n), inst.feasible_rows()))
        if feas.status == INFEASIBLE:
            raise InfeasibleInstanceError("feasible set is empty")

    t0 = time.perf_counter()
    driver.initialize(y0)
    init_time = time.perf_counter() - t0
    follower_init = {}
    for fb in followers:
        t0 = time.perf_counter()
        fb.initialize(y0)
        follower_init[fb.name] = time.perf_counter() - t0

    records = []
    actual, artificial = driver.counts()
    init_record = IterationRecord(0, y0, float("nan"), None, init_time, actual, artificial)
    records.append(init_record)
    if on_iteration is not None:
        on_iteration(0, init_record, follower_init)

    verified = set()
    cuts = 0
    while True:
        next_vertex = None
        for key, coords in driver.vertex_items():
            if key not in verified:
                next_vertex = (key, coords)
                break
        if next_vertex is None:
            break
        key, coords = next_vertex
        res = scalarize(inst, coords)
        record_solution(res.x_v)
        if res.alpha_v <= eps:
            verified.add(key)
            continue
        cuts += 1
        if cuts > cut_cap:
            raise NumericalFailureError(f"cut cap {cut_cap} exceeded without converging")
        hs = supporting_halfspace(res)
        outcome, elapsed = _timed_cut(driver, hs, timing_reps)
        if outcome.kind != dd.UPDATED:
            raise NumericalFailureError(
                f"cut at alpha={res.alpha_v:.3e} left the approximation {outcome.kind}"
            )
        follower_times = {}
        for fb in followers:
            _, fb_elapsed = _timed_cut(fb, hs, timing_reps)
            follower_times[fb.name] = fb_elapsed
        actual, artificial = driver.counts()
        rec = IterationRecord(cuts, coords, res.alpha_v, hs, elapsed, actual, artificial)
        records.append(rec)
        if on_iteration is not None:
            on_iteration(cuts, rec, follower_times)

    poly = driver.final_polyhedron()
    return SolveReport(
        outer=poly,
        vertices=driver.final_vertices(),
        directions=np.array(inst.cone.directions),
        efficient_set=efficient,
        iterations=records,
        epsilon=eps,
        ideal=ideal,
        backend=driver.name,
    )


def solve_molp(
    inst: MolpInstance,
    eps=None,
    backend=BACKEND_CONE,
    big_m=DEFAULT_BIG_M,
    initial_point=None,
    cut_cap=DEFAULT_CUT_CAP,
):
    """Outer approximation with one vertex-enumeration backend.

    ``backend`` is "cone", "box" or "offline"; ``big_m`` only matters for
    the box backend.  For a non-orthant ordering cone an ``initial_point``
    y with the whole upper image inside ``{y} + K`` must be supplied.
    """
    if eps is None:
        eps = default_epsilon(inst.d)
    if initial_point is None and not inst.cone.is_nonnegative_orthant():
        raise ValueError("a general ordering cone needs an explicit initial_point")
    driver = make_backend(backend, inst.cone, big_m)
    return run_outer_approximation(
        inst, eps, driver, initial_point=initial_point, cut_cap=cut_cap
    )


# -- instance text format ----------------------------------------------
#
#   # comment
#   d n m        header: objectives, variables, constraint rows
#   <d rows of n numbers>       C
#   <m rows of n numbers>       A
#   <one row of m numbers>      b
#   <optional row of d numbers> k


def dump_instance(inst: MolpInstance):
    lines = [f"{inst.d} {inst.n} {inst.m}"]

    def fmt_row(row):
        return " ".join(format(float(v), ".12g") for v in row)

    for i in range(inst.d):
        lines.append(fmt_row(inst.C[i]))
    for i in range(inst.m):
        lines.append(fmt_row(inst.A[i]))
    lines.append(fmt_row(inst.b))
    lines.append(fmt_row(inst.k))
    return "\n".join(lines) + "\n"


def load_instance(text):
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append((line_no, [float(t) for t in line.split()]))
        except ValueError:
            raise ValueError(f"line {line_no}: malformed number") from None
    if not rows:
        raise ValueError("empty instance file")
    header_no, header = rows[0]
    if len(header) != 3 or any(v != int(v) or v <= 0 for v in header):
        raise ValueError(f"line {header_no}: header must be 'd n m' positive integers")
    d, n, m = (int(v) for v in header)
    body = rows[1:]
    expected = d + m + 1
    if len(body) not in (expected, expected + 1):
        raise ValueError(
            f"expected {expected} data rows (+ optional k row), got {len(body)}"
        )
    for line_no, row in body[: d + m]:
        if len(row) != n:
            raise ValueError(f"line {line_no}: expected {n} values")
    b_no, b_row = body[d + m]
    if len(b_row) != m:
        raise ValueError(f"line {b_no}: expected {m} values for b")
    k = None
    if len(body) == expected + 1:
        k_no, k_row = body[-1]
        if len(k_row) != d:
            raise ValueError(f"line {k_no}: expected {d} values for k")
        k = np.array(k_row)
    C = np.array([row for _, row in body[:d]])
    A = np.array([row for _, row in body[d : d + m]])
    return MolpInstance(C, A, np.array(b_row), k=k)
