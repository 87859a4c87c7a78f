"""Dense two-phase primal simplex with dual multipliers.

Solves ``min c^T x`` over rows ``a^T x {<=,>=,=} r`` with per-variable
lower bounds (default 0) or free variables.  Dantzig pricing by default;
any degenerate (zero-step) pivot switches the next selection to Bland's
rule, which guarantees termination, and a positive step switches back.

Dual sign convention (shadow prices of a minimization): ``duals[i]`` is
the sensitivity of the optimal objective to the right-hand side of row
i.  A binding ``>=`` row therefore has a nonnegative dual, a binding
``<=`` row a nonpositive one, and equality rows are unrestricted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

PIVOT_TOL = 1e-9
PHASE1_TOL = 1e-7
MAX_PIVOTS = 1_000_000

LEQ, GEQ, EQ = "<=", ">=", "="
_RELATIONS = (LEQ, GEQ, EQ)


class SimplexFailureError(RuntimeError):
    """Pivot limit exhausted or tableau numerically broken."""


@dataclass
class LinearProgram:
    """``min objective @ x`` subject to ``constraints`` and lower bounds.

    ``constraints`` is a list of ``(row, relation, rhs)`` with relation
    one of "<=", ">=", "=".  ``lower_bounds[j]`` is a float (default 0.0)
    or None for a free variable.
    """

    objective: np.ndarray
    constraints: list
    lower_bounds: list | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        n = self.objective.shape[0]
        if self.lower_bounds is None:
            self.lower_bounds = [0.0] * n
        if len(self.lower_bounds) != n:
            raise ValueError("lower_bounds length must match objective length")
        if not self.constraints and all(lb is None for lb in self.lower_bounds):
            raise ValueError("need at least one constraint or bound")
        cleaned = []
        for row, rel, rhs in self.constraints:
            row = np.asarray(row, dtype=float)
            if row.shape[0] != n:
                raise ValueError("constraint row length must match objective length")
            if rel not in _RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
            cleaned.append((row, rel, float(rhs)))
        self.constraints = cleaned

    @property
    def n_vars(self):
        return self.objective.shape[0]


@dataclass
class LpSolution:
    status: str
    x: np.ndarray | None = None
    objective_value: float | None = None
    duals: np.ndarray | None = None
    pivots: int = 0
    diagnostics: dict = field(default_factory=dict)


class _Standardized:
    """Equality standard form with bookkeeping to map results back."""

    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        self.var_cols = []          # (col_plus, col_minus or None, shift)
        cols = 0
        for lb in lp.lower_bounds:
            if lb is None:
                self.var_cols.append((cols, cols + 1, 0.0))
                cols += 2
            else:
                self.var_cols.append((cols, None, float(lb)))
                cols += 1
        m = len(lp.constraints)
        n_slack = sum(1 for _, rel, _ in lp.constraints if rel != EQ)
        self.n_struct = cols
        self.n_slack = n_slack
        A = np.zeros((m, cols + n_slack))
        rhs = np.zeros(m)
        c = np.zeros(cols + n_slack)
        for j, (cp, cm, shift) in enumerate(self.var_cols):
            c[cp] = lp.objective[j]
            if cm is not None:
                c[cm] = -lp.objective[j]
        slack_at = cols
        slack_cols = [None] * m
        for i, (row, rel, r) in enumerate(lp.constraints):
            r_eff = r
            for j, (cp, cm, shift) in enumerate(self.var_cols):
                A[i, cp] = row[j]
                if cm is not None:
                    A[i, cm] = -row[j]
                if shift:
                    r_eff -= row[j] * shift
            if rel != EQ:
                A[i, slack_at] = 1.0 if rel == LEQ else -1.0
                slack_cols[i] = slack_at
                slack_at += 1
            rhs[i] = r_eff
        self.row_sign = np.ones(m)
        flip = rhs < 0.0
        self.row_sign[flip] = -1.0
        A[flip] *= -1.0
        rhs[flip] *= -1.0
        # slack columns that end up with coefficient +1 can seed the basis
        self.basis_slack = [
            col if col is not None and A[i, col] == 1.0 else None
            for i, col in enumerate(slack_cols)
        ]
        self.A = A
        self.rhs = rhs
        self.c = c
        self.m = m

    def recover_x(self, x_std):
        x = np.empty(len(self.var_cols))
        for j, (cp, cm, shift) in enumerate(self.var_cols):
            x[j] = x_std[cp] + shift
            if cm is not None:
                x[j] -= x_std[cm]
        return x


def _price_out(tableau, basis, cost):
    z = np.concatenate([cost, [0.0]]).astype(float)
    for r, col in enumerate(basis):
        cb = z[col]
        if cb != 0.0:
            z -= cb * tableau[r]
    return z


def _run_simplex(tableau, basis, zrow, allowed, pivot_budget):
    """Pivot until optimal/unbounded; returns (status, pivots used)."""
    basis_arr = np.asarray(basis)
    use_bland = False
    pivots = 0
    while True:
        reduced = zrow[:-1]
        candidates = np.flatnonzero(allowed & (reduced < -PIVOT_TOL))
        if candidates.size == 0:
            basis[:] = basis_arr.tolist()
            return OPTIMAL, pivots
        if use_bland:
            j = int(candidates[0])
        else:
            j = int(candidates[np.argmin(reduced[candidates])])
        col = tableau[:, j]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if rows.size == 0:
            basis[:] = basis_arr.tolist()
            return UNBOUNDED, pivots
        ratios = tableau[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12]
        # Bland-compatible tie break: leave the smallest basis index
        i = int(ties[np.argmin(basis_arr[ties])])
        use_bland = best <= 1e-12
        factors = col.copy()
        pivot_row = tableau[i] / tableau[i, j]
        tableau -= np.outer(factors, pivot_row)
        tableau[i] = pivot_row
        zrow -= zrow[j] * pivot_row
        basis_arr[i] = j
        pivots += 1
        if pivots >= pivot_budget:
            raise SimplexFailureError(
                f"pivot limit {pivot_budget} exhausted (objective row {zrow[-1]:.6e})"
            )


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Two-phase simplex; returns status, primal point, objective, duals."""
    std = _Standardized(lp)
    m = std.m
    n_total = std.A.shape[1]

    if m == 0:
        # only bounds: optimal at the lower bounds unless some free/negative
        # cost direction makes the problem unbounded
        x = np.array([lb if lb is not None else 0.0 for lb in lp.lower_bounds])
        for j, lb in enumerate(lp.lower_bounds):
            cj = lp.objective[j]
            if (lb is None and cj != 0.0) or cj < 0.0:
                return LpSolution(UNBOUNDED)
        return LpSolution(
            OPTIMAL, x, float(lp.objective @ x), np.zeros(0), diagnostics={"m": 0}
        )

    # phase 1: slack basis where a +1 slack survives, artificials elsewhere
    tableau = np.hstack([std.A, np.eye(m), std.rhs[:, None]])
    basis = [
        slack if slack is not None else n_total + i
        for i, slack in enumerate(std.basis_slack)
    ]
    art_cols = np.arange(n_total, n_total + m)
    phase1_cost = np.zeros(n_total + m)
    phase1_cost[art_cols] = 1.0
    zrow = _price_out(tableau, basis, phase1_cost)
    allowed = np.ones(n_total + m, dtype=bool)
    allowed[art_cols] = False

    pivots = 0
    if any(b >= n_total for b in basis):
        status, used = _run_simplex(tableau, basis, zrow, allowed, MAX_PIVOTS)
        pivots = used
        if status != OPTIMAL:
            raise SimplexFailureError("phase 1 reported unbounded; inconsistent tableau")
        phase1_obj = -zrow[-1]
        if phase1_obj > PHASE1_TOL:
            return LpSolution(
                INFEASIBLE, pivots=pivots, diagnostics={"phase1": phase1_obj}
            )
    else:
        phase1_obj = 0.0

    # drive artificials out of the basis where possible
    for r in range(m):
        if basis[r] >= n_total:
            options = np.flatnonzero(np.abs(tableau[r, :n_total]) > 1e-7)
            if options.size:
                j = int(options[0])
                pivot = tableau[r, j]
                tableau[r] /= pivot
                for rr in range(m):
                    if rr != r and tableau[rr, j] != 0.0:
                        tableau[rr] -= tableau[rr, j] * tableau[r]
                basis[r] = j
                pivots += 1
            # else: redundant row, artificial stays basic at level ~0

    zrow = _price_out(tableau, basis, np.concatenate([std.c, np.zeros(m)]))
    status, used = _run_simplex(tableau, basis, zrow, allowed, MAX_PIVOTS - pivots)
    pivots += used
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, pivots=pivots)

    # recompute the basic solution and the duals from the pristine data
    full = np.hstack([std.A, np.eye(m)])
    cost = np.concatenate([std.c, np.zeros(m)])
    B = full[:, basis]
    try:
        xb = np.linalg.solve(B, std.rhs)
        y = np.linalg.solve(B.T, cost[basis])
    except np.linalg.LinAlgError:
        xb, *_ = np.linalg.lstsq(B, std.rhs, rcond=None)
        y, *_ = np.linalg.lstsq(B.T, cost[basis], rcond=None)
    x_std = np.zeros(n_total + m)
    x_std[basis] = xb
    x = std.recover_x(x_std[:n_total])
    duals = std.row_sign * y
    return LpSolution(
        OPTIMAL,
        x,
        float(lp.objective @ x),
        duals,
        pivots=pivots,
        diagnostics={"phase1": phase1_obj},
    )
